#include <gtest/gtest.h>

#include "rgym/compat/robust_env.hpp"
#include "rgym/core/errors.hpp"
#include "rgym/harness/experiment.hpp"
#include "rgym/version.hpp"

using namespace rgym;
using namespace rgym::compat;

namespace {

harness::RunConfig maze_config(double p) {
  return harness::parse_config(R"(
[env]
id = "grid_maze"
horizon = 20

[agent]
id = "tabular_q"

[[disruptor]]
id = "obs"
source = "state"
mode = "random"
noise = "discrete_replace"
p = )" + std::to_string(p) + R"(

[[disruptor]]
id = "rew"
source = "reward"
mode = "random"
noise = "gaussian"
sigma = 0.1
)");
}

Json step_input(Json action) { return Json{{"action", std::move(action)}, {"robust_config", Json::object()}}; }

}  // namespace

TEST(RobustEnv, FiveTupleWithTrueChannels) {
  RobustEnv env(maze_config(0.5));
  const Json obs0 = env.reset(3);
  EXPECT_TRUE(obs0.is_number_unsigned());
  const auto out = env.step(step_input(3));
  EXPECT_TRUE(out.info.contains(kTrueState));
  EXPECT_TRUE(out.info.contains(kTrueReward));
  EXPECT_EQ(out.info[kTrueReward].get<double>(), -1.0);
  EXPECT_NE(out.reward, -1.0);
  EXPECT_FALSE(out.terminated);
  EXPECT_FALSE(out.truncated);
  EXPECT_EQ(out.info["step"].get<std::size_t>(), 0u);
  EXPECT_EQ(std::string(kVersion), "0.1.0");
}

TEST(RobustEnv, MatchesPipelineDrivenDirectly) {
  const auto config = maze_config(0.3);
  RobustEnv env(config);
  env.reset(11);
  const harness::SeedStreams streams(11);
  disrupt::Pipeline p(harness::make_config_environment(config), harness::gated_disruptors(config),
                      streams.disruptor_seed);
  p.reset(streams.env_seed("train", 0), 0, disrupt::Phase::Train);
  for (int t = 0; t < 20; ++t) {
    const std::size_t a = (t * 7) % 4;
    const auto out = env.step(step_input(a));
    const auto tr = p.act(Value::index(a));
    const auto& o = p.observe();
    EXPECT_EQ(out.observation, value_to_json(o.state));
    EXPECT_EQ(out.reward, o.reward);
    EXPECT_EQ(out.info[kTrueState], value_to_json(tr.next_state));
    EXPECT_EQ(out.info[kTrueReward].get<double>(), tr.true_reward);
    EXPECT_EQ(out.truncated, tr.truncated);
    if (out.terminated || out.truncated) break;
  }
}

TEST(RobustEnv, RejectsMisshapedInput) {
  RobustEnv env(maze_config(0.1));
  EXPECT_THROW(env.step(step_input(0)), DomainError);
  EXPECT_THROW(env.reset(std::nullopt), DomainError);
  env.reset(1);
  EXPECT_THROW(env.step(Json{{"action", 0}}), DomainError);
  EXPECT_THROW(env.step(Json{{"action", 0}, {"robust_config", 1}}), DomainError);
  EXPECT_THROW(env.step(Json{{"action", 0}, {"robust_config", Json::object()}, {"extra", 1}}), DomainError);
  EXPECT_THROW(env.step(step_input(7)), DomainError);
  EXPECT_THROW(env.step(step_input(-1)), DomainError);
  EXPECT_THROW(env.step(step_input("up")), DomainError);
  EXPECT_NO_THROW(env.step(step_input(0)));
}

TEST(ValueJson, RoundTrips) {
  const auto box = SpaceSpec::box({-2.0}, {2.0});
  EXPECT_EQ(value_from_json(Json(0.5), box), Value::vector({0.5}));
  EXPECT_EQ(value_from_json(Json::array({0.5}), box), Value::vector({0.5}));
  const auto md = SpaceSpec::multi_discrete({4, 4});
  EXPECT_EQ(value_from_json(value_to_json(Value::indices({1, 3})), md), Value::indices({1, 3}));
  EXPECT_THROW(value_from_json(Json::array({1, 4}), md), DomainError);
}

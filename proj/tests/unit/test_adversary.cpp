#include <gtest/gtest.h>

#include <chrono>
#include <map>

#include "rgym/adversary/adversary.hpp"
#include "rgym/adversary/external.hpp"
#include "rgym/adversary/prompt.hpp"
#include "rgym/core/errors.hpp"
#include "rgym/envs/grid_maze.hpp"
#include "rgym/envs/windy_pendulum.hpp"

using namespace rgym;
using namespace rgym::adversary;

namespace {

AdversaryRequest request(Vector value, Vector lo, Vector hi, bool integral = false) {
  AdversaryRequest r;
  r.task_description = "t";
  r.value = std::move(value);
  r.region_low = std::move(lo);
  r.region_high = std::move(hi);
  r.current_reward = -1.5;
  r.previous_reward = -2.0;
  r.integral = integral;
  return r;
}

std::string mock(const std::string& mode, const std::string& extra = "") {
  return std::string(RGYM_CLI_PATH) + " adversary-mock --mode " + mode + extra;
}

AdversaryReply ask(const std::string& endpoint, const AdversaryRequest& req, double timeout = 5.0) {
  ExternalAdversary adv("ext", Endpoint::parse(endpoint), timeout);
  Rng rng(0);
  return adv.respond(req, AdversaryContext{}, rng);
}

}  // namespace

TEST(RandomInSet, StaysInRegion) {
  Rng rng(1);
  const auto req = request({0.5, 0.5}, {0.2, -1.0}, {0.8, 1.0});
  for (int i = 0; i < 10000; ++i) {
    const auto r = random_in_set(req, rng);
    ASSERT_GE(r.value[0], 0.2);
    ASSERT_LE(r.value[0], 0.8);
    ASSERT_GE(r.value[1], -1.0);
    ASSERT_LE(r.value[1], 1.0);
  }
}

TEST(RandomInSet, IntegralDrawsCoverTheIntegers) {
  Rng rng(2);
  const auto req = request({3}, {1.5}, {4.2}, true);
  std::map<double, int> counts;
  for (int i = 0; i < 30000; ++i) counts[random_in_set(req, rng).value[0]]++;
  ASSERT_EQ(counts.size(), 3u);
  for (auto [v, n] : counts) {
    EXPECT_TRUE(v == 2 || v == 3 || v == 4);
    EXPECT_NEAR(n / 30000.0, 1.0 / 3, 0.01);
  }
}

TEST(ClampToRegion, FlagsViolations) {
  const auto req = request({0.5}, {0.2}, {0.8});
  auto c = clamp_to_region(AdversaryReply{{0.9}}, req);
  EXPECT_TRUE(c.violated);
  EXPECT_EQ(c.value[0], 0.8);
  c = clamp_to_region(AdversaryReply{{0.3}}, req);
  EXPECT_FALSE(c.violated);
  const auto ireq = request({2}, {0}, {4}, true);
  c = clamp_to_region(AdversaryReply{{2.6}}, ireq);
  EXPECT_FALSE(c.violated);
  EXPECT_EQ(c.value[0], 3.0);
  EXPECT_THROW(validate_request(request({0.5}, {0.8}, {0.2})), DomainError);
  EXPECT_THROW(validate_request(request({0.5, 1}, {0.2}, {0.8})), DomainError);
}

TEST(Greedy, MatchesEnumerationOracle) {
  envs::GridMazeOptions o;
  o.board = envs::parse_board("S.#.\n....\n.HH.\n...G\n");
  o.safe = true;
  o.step_reward = -1.0;
  envs::GridMaze maze(o);
  maze.reset(0);
  maze.step(Value::index(3));
  const auto req = request({1}, {0}, {3}, true);
  const SpaceSpec& space = maze.action_space();
  AdversaryContext ctx{&maze, Target::Action, &space, nullptr};
  Rng rng(0);
  // Every action pays -1 here, so the lowest index wins the tie.
  EXPECT_EQ(greedy_worst_case(req, ctx, 4, rng).value, Vector{0});

  envs::WindyPendulum pend(50);
  pend.reset(4);
  const auto preq = request({0.0}, {-2.0}, {2.0});
  const SpaceSpec& pspace = pend.action_space();
  AdversaryContext pctx{&pend, Target::Action, &pspace, nullptr};
  Rng a(9), b(9);
  const auto reply = greedy_worst_case(preq, pctx, 16, a);
  double worst = 0;
  Vector best;
  for (int j = 0; j < 16; ++j) {
    const auto cand = random_in_set(preq, b).value;
    auto fork = pend.fork();
    const double r = fork->step(Value::vector(cand)).true_reward;
    if (j == 0 || r < worst) {
      worst = r;
      best = cand;
    }
  }
  EXPECT_EQ(reply.value, best);
}

TEST(Greedy, SingleCandidateIsRandomInSet) {
  envs::WindyPendulum pend(50);
  pend.reset(4);
  const auto req = request({0.0}, {-2.0}, {2.0});
  const SpaceSpec& space = pend.action_space();
  AdversaryContext ctx{&pend, Target::Action, &space, nullptr};
  Rng a(3), b(3);
  EXPECT_EQ(greedy_worst_case(req, ctx, 1, a).value, random_in_set(req, b).value);
}

TEST(Wire, RequestRoundTrip) {
  const auto req = request({0.25, -1.0}, {0.2, 0.2}, {0.8, 0.8});
  const auto back = decode_request(encode_request(req));
  EXPECT_EQ(back.task_description, "t");
  EXPECT_EQ(back.value, req.value);
  EXPECT_EQ(back.region_low, req.region_low);
  EXPECT_EQ(back.region_high, req.region_high);
  EXPECT_EQ(back.current_reward, -1.5);
  EXPECT_EQ(back.previous_reward, -2.0);
}

TEST(Wire, ReplyDefects) {
  EXPECT_EQ(decode_reply(R"({"value":[1,2]})", 2).value, (Vector{1, 2}));
  EXPECT_THROW(decode_reply("not json", 1), DomainError);
  EXPECT_THROW(decode_reply("[1]", 1), DomainError);
  EXPECT_THROW(decode_reply(R"({"val":[1]})", 1), DomainError);
  EXPECT_THROW(decode_reply(R"({"value":["a"]})", 1), DomainError);
  EXPECT_THROW(decode_reply(R"({"value":[1,2]})", 1), DomainError);
}

TEST(External, EchoAndConstant) {
  const auto req = request({0.25, 0.5}, {0.2}, {0.8});
  auto full = req;
  full.region_low = {0.2, 0.2};
  full.region_high = {0.8, 0.8};
  EXPECT_EQ(ask(mock("echo"), full).value, full.value);
  EXPECT_EQ(ask(mock("constant", " --value 0.7"), full).value, (Vector{0.7, 0.7}));
  EXPECT_EQ(ask(mock("region-high"), full).value, (Vector{0.8, 0.8}));
}

TEST(External, SequentialRequestsShareOneProcess) {
  ExternalAdversary adv("ext", Endpoint::parse(mock("echo")), 5.0);
  Rng rng(0);
  for (int i = 0; i < 20; ++i) {
    const auto req = request({i * 0.01}, {0.0}, {1.0});
    EXPECT_EQ(adv.respond(req, AdversaryContext{}, rng).value, req.value);
  }
}

TEST(External, ErrorPaths) {
  const auto req = request({0.5}, {0.2}, {0.8});
  auto expect_error = [&](const std::string& endpoint, const std::string& fragment, double timeout = 5.0) {
    try {
      ask(endpoint, req, timeout);
      ADD_FAILURE() << endpoint;
    } catch (const AdversaryError& e) {
      EXPECT_EQ(e.adversary_id(), "ext");
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  expect_error(mock("wrong-length"), "expected 1 values, got 2");
  expect_error(mock("garbage"), "not JSON");
  expect_error("exit 0", "closed");
  expect_error("unix:/nonexistent/socket", "connect");
  const auto start = std::chrono::steady_clock::now();
  expect_error(mock("hang"), "timeout", 0.3);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(3));
}

TEST(Prompt, ListingTwoText) {
  auto req = request({0.1, -0.25}, {0.2, 0.2}, {0.8, 0.8});
  req.current_reward = -1.5;
  req.previous_reward = -2.0;
  const auto p = build_llm_prompt(req);
  EXPECT_NE(p.find("we want you as an adversary policy"), std::string::npos);
  EXPECT_NE(p.find("(0.2, 0.8)"), std::string::npos);
  EXPECT_NE(p.find("the current reward:-1.5"), std::string::npos);
  EXPECT_NE(p.find("the previous reward is-2.0"), std::string::npos);
  EXPECT_NE(p.find("[0.1, -0.25]"), std::string::npos);
  EXPECT_EQ(p, build_llm_prompt(req));
}

TEST(Prompt, MixedRegionsAndDiscreteState) {
  auto req = request({7}, {0}, {24}, true);
  auto p = build_llm_prompt(req);
  EXPECT_NE(p.find("(0.0, 24.0)"), std::string::npos);
  EXPECT_NE(p.find("state values:7,"), std::string::npos);
  req = request({0.0, 0.0}, {0.1, 0.2}, {0.5, 0.6});
  p = build_llm_prompt(req);
  EXPECT_NE(p.find("([0.1, 0.2], [0.5, 0.6])"), std::string::npos);
}

TEST(Prompt, PythonFloatRepr) {
  EXPECT_EQ(python_float_repr(1.0), "1.0");
  EXPECT_EQ(python_float_repr(0.1), "0.1");
  EXPECT_EQ(python_float_repr(-0.0), "-0.0");
  EXPECT_EQ(python_float_repr(1e16), "1e+16");
  EXPECT_EQ(python_float_repr(1.5e16), "1.5e+16");
  EXPECT_EQ(python_float_repr(1e-5), "1e-05");
  EXPECT_EQ(python_float_repr(0.0001), "0.0001");
  EXPECT_EQ(python_float_repr(123456789.0), "123456789.0");
}

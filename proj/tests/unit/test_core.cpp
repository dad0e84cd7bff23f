#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "rgym/core/environment.hpp"
#include "rgym/core/errors.hpp"
#include "rgym/core/format.hpp"
#include "rgym/core/params.hpp"
#include "rgym/core/rng.hpp"
#include "rgym/core/space.hpp"
#include "rgym/envs/grid_maze.hpp"
#include "rgym/envs/windy_pendulum.hpp"
#include "rgym/version.hpp"

using namespace rgym;

TEST(Rng, SameKeySameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, SplitDoesNotAdvanceParent) {
  Rng a(7);
  Rng b(7);
  (void)a.split("child").next_u64();
  EXPECT_EQ(a, b);
  EXPECT_NE(a.split("x").next_u64(), a.split("y").next_u64());
  EXPECT_EQ(a.split("x").next_u64(), b.split("x").next_u64());
}

TEST(Rng, UniformAndIndexRanges) {
  Rng r(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double x = r.uniform(-2.0, 5.0);
    ASSERT_GE(x, -2.0);
    ASSERT_LE(x, 5.0);
    const auto k = r.index(7);
    ASSERT_LT(k, 7u);
    seen.insert(k);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_EQ(r.uniform(1.5, 1.5), 1.5);
}

TEST(Rng, NormalMoments) {
  Rng r(11);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal(1.0, 2.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 1.0, 0.02);
  EXPECT_NEAR(std::sqrt(s2 / n - mean * mean), 2.0, 0.02);
}

TEST(Space, ContainsAndClip) {
  const auto d = SpaceSpec::discrete(4);
  EXPECT_TRUE(d.contains(Value::index(3)));
  EXPECT_FALSE(d.contains(Value::index(4)));
  EXPECT_FALSE(d.contains(Value::vector({0.0})));

  const auto b = SpaceSpec::box({-1.0, -2.0}, {1.0, 2.0});
  EXPECT_TRUE(b.contains(Value::vector({0.5, -2.0})));
  EXPECT_FALSE(b.contains(Value::vector({1.5, 0.0})));
  EXPECT_FALSE(b.contains(Value::vector({0.0})));
  Value v = Value::vector({3.0, -5.0});
  EXPECT_TRUE(b.clip(v));
  EXPECT_EQ(v, Value::vector({1.0, -2.0}));
  EXPECT_FALSE(b.clip(v));

  const auto m = SpaceSpec::multi_discrete({25, 25});
  EXPECT_TRUE(m.contains(Value::indices({24, 0})));
  EXPECT_FALSE(m.contains(Value::indices({25, 0})));
  EXPECT_EQ(m.dimension(), 2u);
  EXPECT_THROW(SpaceSpec::box({1.0}, {0.0}), DomainError);
}

TEST(Params, ClampAndFlag) {
  envs::WindyPendulum env;
  auto up = env.set_params({{"gravity", 14.715}});
  EXPECT_FALSE(up.any_clamped());
  EXPECT_EQ(env.params().current("gravity"), 14.715);
  up = env.set_params({{"gravity", 25.0}});
  EXPECT_EQ(env.params().current("gravity"), 19.82);
  ASSERT_EQ(up.clamped, std::vector<std::string>{"gravity"});
  EXPECT_EQ(up.params.current("gravity"), 19.82);
  env.restore_nominal_params();
  EXPECT_EQ(env.params().current("gravity"), 9.81);
}

TEST(Params, UnknownNameLeavesSetUntouched) {
  envs::WindyPendulum env;
  const auto before = env.params();
  try {
    env.set_params({{"gravity", 12.0}, {"viscosity", 1.0}});
    FAIL();
  } catch (const UnknownParameterError& e) {
    EXPECT_EQ(e.name(), "viscosity");
  }
  EXPECT_EQ(env.params(), before);
  EXPECT_THROW(env.set_params({{"wind", std::nan("")}}), DomainError);
}

TEST(Environment, ResetIsDeterministic) {
  envs::WindyPendulum a, b;
  EXPECT_EQ(a.reset(5), b.reset(5));
  for (int t = 0; t < 20; ++t) {
    const auto u = Value::vector({0.3});
    EXPECT_EQ(a.step(u).next_state, b.step(u).next_state);
  }
  EXPECT_NE(a.reset(5), a.reset(6));
}

TEST(Environment, TruncatesAtHorizonAndRejectsLateSteps) {
  envs::WindyPendulum env(3);
  env.reset(1);
  EXPECT_FALSE(env.step(Value::vector({0.0})).truncated);
  EXPECT_FALSE(env.step(Value::vector({0.0})).truncated);
  const auto last = env.step(Value::vector({0.0}));
  EXPECT_TRUE(last.truncated);
  EXPECT_FALSE(last.terminated);
  EXPECT_TRUE(env.episode_over());
  EXPECT_THROW(env.step(Value::vector({0.0})), DomainError);
}

TEST(Environment, RejectsActionsOutsideTheSpace) {
  envs::GridMaze maze(envs::GridMazeOptions{});
  maze.reset(0);
  EXPECT_THROW(maze.step(Value::index(4)), DomainError);
  EXPECT_THROW(maze.step(Value::vector({0.0})), DomainError);
  envs::WindyPendulum p;
  p.reset(0);
  EXPECT_THROW(p.step(Value::vector({2.5})), DomainError);
}

TEST(Environment, ForkCopiesRngPosition) {
  envs::GridMazeOptions o;
  o.slip = 0.5;
  envs::GridMaze maze(o);
  maze.reset(9);
  maze.step(Value::index(3));
  auto f = maze.fork();
  for (int t = 0; t < 10 && !maze.episode_over(); ++t) {
    EXPECT_EQ(maze.step(Value::index(1)).next_state, f->step(Value::index(1)).next_state);
  }
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(-16.0), "-16");
  EXPECT_EQ(parse_real("2.5"), 2.5);
  EXPECT_THROW(parse_real("2.5x"), DomainError);
  EXPECT_THROW(parse_real(""), DomainError);
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = r.normal(0, 1e3);
    EXPECT_EQ(parse_real(format_real(x)), x);
  }
}

TEST(Version, IsSet) { EXPECT_STREQ(kVersion, "0.1.0"); }

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rgym/core/errors.hpp"
#include "rgym/envs/board.hpp"
#include "rgym/envs/grid_maze.hpp"
#include "rgym/envs/registry.hpp"
#include "rgym/envs/two_agent_grid.hpp"
#include "rgym/envs/windy_pendulum.hpp"

using namespace rgym;
using namespace rgym::envs;
using std::numbers::pi;

TEST(Pendulum, UprightAtRestWithUnitWind) {
  const auto s = pendulum_dynamics(0.0, 0.0, 0.0, PendulumParams{9.81, 0.4, 1.0});
  EXPECT_NEAR(s.theta_dot, 0.3125, 1e-12);
  EXPECT_NEAR(s.theta, 0.015625, 1e-12);
  EXPECT_NEAR(s.reward, -0.009765625, 1e-12);
}

TEST(Pendulum, HorizontalWithoutWind) {
  const auto s = pendulum_dynamics(pi / 2, 0.0, 0.0, PendulumParams{9.81, 0.4, 0.0});
  const double acc = 9.81 / 0.4;
  EXPECT_NEAR(acc, 24.525, 1e-12);
  EXPECT_NEAR(s.theta_dot, 1.22625, 1e-12);
  EXPECT_NEAR(s.theta, pi / 2 + 0.0613125, 1e-12);
  EXPECT_NEAR(s.reward, -(pi * pi / 4 + 0.1 * 1.22625 * 1.22625), 1e-12);
}

TEST(Pendulum, TorqueAndSpeedLimit) {
  const auto s = pendulum_dynamics(0.0, 7.9, 2.0, PendulumParams{9.81, 0.4, 2.0});
  EXPECT_EQ(s.theta_dot, 8.0);
  EXPECT_NEAR(s.reward, -(0.1 * 64.0 + 0.001 * 4.0), 1e-12);
  EXPECT_THROW(pendulum_dynamics(std::nan(""), 0, 0, {}), EnvironmentFault);
}

TEST(Pendulum, WrapAngle) {
  EXPECT_NEAR(wrap_angle(pi + 0.1), -pi + 0.1, 1e-12);
  EXPECT_NEAR(wrap_angle(-pi - 0.1), pi - 0.1, 1e-12);
  EXPECT_EQ(wrap_angle(pi), pi);
  EXPECT_NEAR(wrap_angle(-pi), pi, 1e-12);
}

TEST(Pendulum, EnvUsesCurrentParams) {
  WindyPendulum env(10);
  const auto s0 = env.reset(3).as_vector();
  EXPECT_LE(std::abs(s0[0]), 0.1);
  EXPECT_LE(std::abs(s0[1]), 0.05);
  env.set_params({{"gravity", 14.715}, {"wind", 0.0}, {"length", 0.5}});
  const auto out = env.step(Value::vector({1.0}));
  const auto ref = pendulum_dynamics(s0[0], s0[1], 1.0, {14.715, 0.5, 0.0});
  EXPECT_EQ(out.next_state.as_vector(), (Vector{ref.theta, ref.theta_dot}));
  EXPECT_EQ(out.true_reward, ref.reward);
  EXPECT_EQ(out.true_cost, 0.0);
}

TEST(Board, ParseAndRender) {
  const std::string text = "S.#\n.H.\n..G\n";
  const Board b = parse_board(text);
  EXPECT_EQ(b.width(), 3u);
  EXPECT_EQ(b.height(), 3u);
  EXPECT_EQ(*b.start, 0u);
  EXPECT_EQ(*b.goal, 8u);
  EXPECT_TRUE(b.is_wall(2));
  EXPECT_TRUE(b.is_hazard(4));
  EXPECT_EQ(b.to_text(), text);
  EXPECT_THROW(parse_board("S..\n..\n"), ConfigError);
  EXPECT_THROW(parse_board("S.x\n..G\n"), ConfigError);
}

TEST(Board, MovesStopAtWallsAndEdges) {
  const Board b = parse_board("S.#\n...\n..G\n");
  EXPECT_EQ(b.move(0, GridAction::Up), 0u);
  EXPECT_EQ(b.move(0, GridAction::Left), 0u);
  EXPECT_EQ(b.move(0, GridAction::Right), 1u);
  EXPECT_EQ(b.move(1, GridAction::Right), 1u);
  EXPECT_EQ(b.move(0, GridAction::Down), 3u);
}

TEST(GridMaze, ShortestPathReturn) {
  GridMaze maze(GridMazeOptions{});
  maze.reset(0);
  double ret = 0;
  StepOutcome out;
  for (auto a : {3, 3, 3, 3, 1, 1, 1, 1}) {
    out = maze.step(Value::index(a));
    ret += out.true_reward;
  }
  EXPECT_TRUE(out.terminated);
  EXPECT_EQ(ret, -8.0);
}

TEST(GridMaze, SlipFrequency) {
  GridMazeOptions o;
  o.slip = 0.2;
  o.board = parse_board(".....\n.....\n..S..\n.....\n....G\n");
  GridMaze maze(o);
  int moved_as_intended = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    maze.reset(static_cast<std::uint64_t>(i));
    if (maze.step(Value::index(0)).next_state.as_index() == 7u) ++moved_as_intended;
  }
  EXPECT_NEAR(moved_as_intended / double(n), 0.8 + 0.2 / 4, 0.01);
}

TEST(GridMaze, SafeVariantCosts) {
  GridMazeOptions o;
  o.board = default_safe_board();
  o.safe = true;
  GridMaze maze(o);
  EXPECT_EQ(maze.id(), "safe_grid_maze");
  maze.reset(0);
  maze.step(Value::index(3));
  EXPECT_EQ(maze.step(Value::index(3)).true_cost, 1.0);
  o.safe = false;
  GridMaze plain(o);
  plain.reset(0);
  plain.step(Value::index(3));
  EXPECT_EQ(plain.step(Value::index(3)).true_cost, 0.0);
}

TEST(TwoAgentGrid, DefaultsAndWaiting) {
  TwoAgentGrid g(TwoAgentGridOptions{});
  EXPECT_EQ(g.reset(0), Value::indices({0, 4}));
  EXPECT_EQ(g.goals()[0], 24u);
  EXPECT_EQ(g.goals()[1], 20u);
  TwoAgentGridOptions o;
  o.goals = std::array<std::size_t, 2>{1, 2};
  TwoAgentGrid near(o);
  near.reset(0);
  auto out = near.step(Value::indices({3, 2}));
  EXPECT_EQ(out.next_state, Value::indices({1, 3}));
  EXPECT_FALSE(out.terminated);
  out = near.step(Value::indices({2, 2}));
  EXPECT_EQ(out.next_state, Value::indices({1, 2}));
  EXPECT_TRUE(out.terminated);
  EXPECT_EQ(out.true_reward, -1.0);
}

TEST(Registry, KnownIds) {
  for (const auto& info : registered_environments()) {
    EnvOptions o;
    o.id = info.id;
    auto env = make_environment(o);
    EXPECT_EQ(env->id(), info.id);
  }
  EnvOptions bad;
  bad.id = "mujoco_ant";
  EXPECT_THROW(make_environment(bad), ConfigError);
}

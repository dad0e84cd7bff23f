#include "rgym/envs/registry.hpp"

#include <algorithm>

#include "rgym/core/errors.hpp"
#include "rgym/envs/grid_maze.hpp"
#include "rgym/envs/two_agent_grid.hpp"
#include "rgym/envs/windy_pendulum.hpp"

namespace rgym::envs {

namespace {

Board board_from(const EnvOptions& o, Board fallback) {
  if (o.layout) return parse_board(*o.layout);
  if (o.width || o.height) return open_board(o.width.value_or(5), o.height.value_or(5));
  return fallback;
}

}  // namespace

const std::vector<EnvInfo>& registered_environments() {
  static const std::vector<EnvInfo> infos{
      {"grid_maze", "discrete maze, -1 per step, parameter: slip"},
      {"safe_grid_maze", "grid_maze with hazard cells that emit cost"},
      {"windy_pendulum", "inverted pendulum, parameters: gravity, wind, length"},
      {"two_agent_grid", "two agents, shared reward until both reach their goals"},
  };
  return infos;
}

bool is_registered(const std::string& id) {
  const auto& all = registered_environments();
  return std::ranges::any_of(all, [&](const EnvInfo& e) { return e.id == id; });
}

std::unique_ptr<Environment> make_environment(const EnvOptions& o) {
  if (o.id == "grid_maze" || o.id == "safe_grid_maze") {
    const bool safe = o.id == "safe_grid_maze";
    GridMazeOptions g;
    g.board = board_from(o, safe ? default_safe_board() : open_board(5, 5));
    g.safe = safe;
    if (o.slip) g.slip = *o.slip;
    if (o.step_reward) g.step_reward = *o.step_reward;
    if (o.hazard_cost) g.hazard_cost = *o.hazard_cost;
    if (o.horizon) g.horizon = *o.horizon;
    return std::make_unique<GridMaze>(std::move(g));
  }
  if (o.id == "windy_pendulum") {
    return std::make_unique<WindyPendulum>(o.horizon.value_or(pendulum::kHorizon));
  }
  if (o.id == "two_agent_grid") {
    TwoAgentGridOptions t;
    t.board = board_from(o, open_board(5, 5));
    t.starts = o.starts;
    t.goals = o.goals;
    if (o.slip) t.slip = *o.slip;
    if (o.step_reward) t.step_reward = *o.step_reward;
    if (o.horizon) t.horizon = *o.horizon;
    return std::make_unique<TwoAgentGrid>(std::move(t));
  }
  throw ConfigError("env.id", "unknown environment '" + o.id + "'");
}

}  // namespace rgym::envs

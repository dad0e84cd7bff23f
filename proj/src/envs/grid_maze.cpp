#include "rgym/envs/grid_maze.hpp"

#include "rgym/core/errors.hpp"

namespace rgym::envs {

GridMaze::GridMaze(GridMazeOptions options)
    : ForkableEnvironment<GridMaze>(HorizonSpec{options.horizon}),
      board_(std::move(options.board)),
      state_space_(SpaceSpec::discrete(board_.cells())),
      action_space_(SpaceSpec::discrete(kGridActions)),
      step_reward_(options.step_reward),
      hazard_cost_(options.hazard_cost),
      safe_(options.safe) {
  if (!board_.start || !board_.goal) throw ConfigError("map", "board needs a start and a goal");
  if (board_.is_wall(*board_.start) || board_.is_wall(*board_.goal))
    throw ConfigError("map", "start and goal must not be walls");
  if (!(options.slip >= 0.0 && options.slip <= 1.0)) throw ConfigError("env.slip", "must be in [0, 1]");
  if (hazard_cost_ < 0.0) throw ConfigError("env.hazard_cost", "must be >= 0");
  if (!safe_) board_.set_hazards({});
  params_.define("slip", options.slip, 0.0, 1.0);
}

double GridMaze::cost(std::size_t cell) const {
  return board_.is_hazard(cell) ? hazard_cost_ : 0.0;
}

StateValue GridMaze::initial_state(Rng&) { return Value::index(start()); }

StepOutcome GridMaze::transition(const ActionValue& action, Rng& rng) {
  const std::size_t from = state().as_index();
  const std::size_t to = maze_transition(board_, from, static_cast<GridAction>(action.as_index()),
                                         params_.current("slip"), rng);
  StepOutcome out;
  out.next_state = Value::index(to);
  out.true_reward = step_reward_;
  out.true_cost = cost(to);
  out.terminated = to == goal();
  if (to == from) out.info["blocked"] = 1.0;
  return out;
}

Board default_safe_board() {
  return parse_board(
      "S.H.G\n"
      "..H..\n"
      "..H..\n"
      "..H..\n"
      ".....\n");
}

}  // namespace rgym::envs

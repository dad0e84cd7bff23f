#pragma once

#include <string_view>

#include "rgym/core/environment.hpp"
#include "rgym/envs/board.hpp"

namespace rgym::envs {

struct GridMazeOptions {
  Board board = open_board(5, 5);
  double slip = 0.0;
  double step_reward = -1.0;
  double hazard_cost = 1.0;
  std::size_t horizon = 100;
  // Hazards only produce cost in the safe variant.
  bool safe = false;
};

/// Discrete maze. Reaching the goal terminates; every step, blocked or not,
/// pays `step_reward`. The slip probability is the dynamics parameter "slip".
class GridMaze : public ForkableEnvironment<GridMaze> {
 public:
  explicit GridMaze(GridMazeOptions options);

  std::string_view id() const override { return safe_ ? "safe_grid_maze" : "grid_maze"; }
  const SpaceSpec& state_space() const override { return state_space_; }
  const SpaceSpec& action_space() const override { return action_space_; }

  const Board& board() const noexcept { return board_; }
  std::size_t start() const noexcept { return *board_.start; }
  std::size_t goal() const noexcept { return *board_.goal; }
  double step_reward() const noexcept { return step_reward_; }

  // Cost of occupying a cell.
  double cost(std::size_t cell) const;

 protected:
  StateValue initial_state(Rng& rng) override;
  StepOutcome transition(const ActionValue& action, Rng& rng) override;

 private:
  Board board_;
  SpaceSpec state_space_;
  SpaceSpec action_space_;
  double step_reward_;
  double hazard_cost_;
  bool safe_;
};

// Default hazard layout for the safe variant: a 4-step route along the top
// row crosses a hazard column; the 12-step detour along the bottom is free.
Board default_safe_board();

}  // namespace rgym::envs

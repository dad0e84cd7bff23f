#pragma once

#include <array>
#include <string_view>

#include "rgym/core/environment.hpp"
#include "rgym/envs/board.hpp"

namespace rgym::envs {

struct TwoAgentGridOptions {
  Board board = open_board(5, 5);
  // Defaults (when unset): agent 0 top-left -> bottom-right,
  // agent 1 top-right -> bottom-left.
  std::optional<std::array<std::size_t, 2>> starts;
  std::optional<std::array<std::size_t, 2>> goals;
  double slip = 0.0;
  double step_reward = -1.0;
  std::size_t horizon = 100;
};

/// Two agents on one board with independent moves and a shared reward of
/// `step_reward` per step until both stand on their goals. An agent that
/// reaches its goal stays there. State and action are multi-discrete with
/// one component per agent.
class TwoAgentGrid : public ForkableEnvironment<TwoAgentGrid> {
 public:
  explicit TwoAgentGrid(TwoAgentGridOptions options);

  std::string_view id() const override { return "two_agent_grid"; }
  const SpaceSpec& state_space() const override { return state_space_; }
  const SpaceSpec& action_space() const override { return action_space_; }
  std::size_t num_agents() const override { return 2; }

  const Board& board() const noexcept { return board_; }
  const std::array<std::size_t, 2>& starts() const noexcept { return starts_; }
  const std::array<std::size_t, 2>& goals() const noexcept { return goals_; }

 protected:
  StateValue initial_state(Rng& rng) override;
  StepOutcome transition(const ActionValue& action, Rng& rng) override;

 private:
  Board board_;
  std::array<std::size_t, 2> starts_{};
  std::array<std::size_t, 2> goals_{};
  SpaceSpec state_space_;
  SpaceSpec action_space_;
  double step_reward_;
};

}  // namespace rgym::envs

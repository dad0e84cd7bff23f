#include "rgym/envs/two_agent_grid.hpp"

#include "rgym/core/errors.hpp"

namespace rgym::envs {

TwoAgentGrid::TwoAgentGrid(TwoAgentGridOptions options)
    : ForkableEnvironment<TwoAgentGrid>(HorizonSpec{options.horizon}),
      board_(std::move(options.board)),
      state_space_(SpaceSpec::multi_discrete({board_.cells(), board_.cells()})),
      action_space_(SpaceSpec::multi_discrete({kGridActions, kGridActions})),
      step_reward_(options.step_reward) {
  const std::size_t w = board_.width();
  const std::size_t h = board_.height();
  starts_ = options.starts.value_or(std::array<std::size_t, 2>{
      board_.start.value_or(0), board_.index({w - 1, 0})});
  goals_ = options.goals.value_or(std::array<std::size_t, 2>{
      board_.goal.value_or(board_.cells() - 1), board_.index({0, h - 1})});
  for (std::size_t i = 0; i < 2; ++i) {
    if (starts_[i] >= board_.cells() || goals_[i] >= board_.cells())
      throw ConfigError("env", "agent " + std::to_string(i) + " start/goal outside the board");
    if (board_.is_wall(starts_[i]) || board_.is_wall(goals_[i]))
      throw ConfigError("env", "agent " + std::to_string(i) + " start/goal on a wall");
  }
  if (!(options.slip >= 0.0 && options.slip <= 1.0)) throw ConfigError("env.slip", "must be in [0, 1]");
  params_.define("slip", options.slip, 0.0, 1.0);
}

StateValue TwoAgentGrid::initial_state(Rng&) {
  return Value::indices({starts_[0], starts_[1]});
}

StepOutcome TwoAgentGrid::transition(const ActionValue& action, Rng& rng) {
  const auto& pos = state().as_indices();
  const auto& acts = action.as_indices();
  const double slip = params_.current("slip");
  IndexVector next(pos);
  for (std::size_t i = 0; i < 2; ++i) {
    if (pos[i] == goals_[i]) continue;
    next[i] = maze_transition(board_, pos[i], static_cast<GridAction>(acts[i]), slip, rng);
  }
  StepOutcome out;
  out.terminated = next[0] == goals_[0] && next[1] == goals_[1];
  out.true_reward = step_reward_;
  out.next_state = Value::indices(std::move(next));
  return out;
}

}  // namespace rgym::envs

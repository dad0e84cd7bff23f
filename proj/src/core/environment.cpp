#include "rgym/core/environment.hpp"

#include "rgym/core/errors.hpp"

namespace rgym {

Environment::Environment(HorizonSpec horizon) { set_horizon(horizon); }

void Environment::set_horizon(HorizonSpec h) {
  if (h.max_steps < 1) throw DomainError("horizon must be at least 1 step");
  horizon_ = h;
}

StateValue Environment::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  steps_ = 0;
  over_ = false;
  state_ = initial_state(rng_);
  return state_;
}

StepOutcome Environment::step(const ActionValue& action) {
  if (over_) throw DomainError(std::string(id()) + ": step called after the episode ended");
  if (!action_space().contains(action))
    throw DomainError(std::string(id()) + ": action " + action.to_string() + " outside " +
                      action_space().describe());
  StepOutcome out = transition(action, rng_);
  ++steps_;
  if (!out.terminated && steps_ >= horizon_.max_steps) out.truncated = true;
  over_ = out.terminated || out.truncated;
  state_ = out.next_state;
  return out;
}

}  // namespace rgym

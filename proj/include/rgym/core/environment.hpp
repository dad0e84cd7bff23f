#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "rgym/core/params.hpp"
#include "rgym/core/rng.hpp"
#include "rgym/core/space.hpp"

namespace rgym {

struct HorizonSpec {
  std::size_t max_steps = 1;

  bool operator==(const HorizonSpec&) const = default;
};

struct StepOutcome {
  StateValue next_state;
  double true_reward = 0.0;
  double true_cost = 0.0;
  bool terminated = false;
  bool truncated = false;
  std::map<std::string, double> info;
};

/// Base-environment contract.
///
/// `reset(seed)` reseeds the environment's own random stream, so the seed
/// plus the action and parameter-update sequence determine everything that
/// follows. Parameter updates take effect on the next `step`. The step
/// counter truncates the episode at the horizon.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string_view id() const = 0;
  virtual const SpaceSpec& state_space() const = 0;
  virtual const SpaceSpec& action_space() const = 0;
  virtual std::size_t num_agents() const { return 1; }

  // Independent copy with identical state, parameters and RNG position.
  virtual std::unique_ptr<Environment> fork() const = 0;

  StateValue reset(std::uint64_t seed);

  // Throws DomainError if the action is outside the action space or the
  // episode is already over.
  StepOutcome step(const ActionValue& action);

  const EnvParamSet& params() const noexcept { return params_; }
  ParamUpdate set_params(const ParamMap& updates) { return params_.apply(updates); }
  void restore_nominal_params() { params_.restore_nominal(); }

  const HorizonSpec& horizon() const noexcept { return horizon_; }
  void set_horizon(HorizonSpec h);

  const StateValue& state() const noexcept { return state_; }
  std::size_t step_count() const noexcept { return steps_; }
  bool episode_over() const noexcept { return over_; }

 protected:
  explicit Environment(HorizonSpec horizon);
  Environment(const Environment&) = default;
  Environment& operator=(const Environment&) = default;

  // Draws the initial state. `state_` is assigned by the caller.
  virtual StateValue initial_state(Rng& rng) = 0;
  // One transition from `state_`; truncation is handled by the base.
  virtual StepOutcome transition(const ActionValue& action, Rng& rng) = 0;

  EnvParamSet params_;

 private:
  Rng rng_;
  HorizonSpec horizon_;
  StateValue state_;
  std::size_t steps_ = 0;
  bool over_ = false;
};

// Implements `fork` through the derived copy constructor.
template <class Derived>
class ForkableEnvironment : public Environment {
 public:
  std::unique_ptr<Environment> fork() const override {
    return std::make_unique<Derived>(static_cast<const Derived&>(*this));
  }

 protected:
  using Environment::Environment;
};

}  // namespace rgym

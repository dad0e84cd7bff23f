#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rgym/adversary/adversary.hpp"
#include "rgym/core/environment.hpp"
#include "rgym/core/errors.hpp"
#include "rgym/core/transcript.hpp"
#include "rgym/disrupt/spec.hpp"

namespace rgym::disrupt {

/// What the agent sees before acting at step t: the disrupted state and the
/// disrupted reward/cost of step t-1 (zero at t = 0).
struct Observation {
  StateValue state;
  double reward = 0.0;
  double cost = 0.0;
};

/// A stage fault. Carries the transcript of the episode so far.
class PipelineError : public Error {
 public:
  PipelineError(const std::string& what, std::vector<StepTranscript> partial,
                std::optional<std::string> adversary_id = std::nullopt)
      : Error(what), partial_(std::move(partial)), adversary_id_(std::move(adversary_id)) {}

  const std::vector<StepTranscript>& partial() const noexcept { return partial_; }
  const std::optional<std::string>& adversary_id() const noexcept { return adversary_id_; }

 private:
  std::vector<StepTranscript> partial_;
  std::optional<std::string> adversary_id_;
};

/// Wraps one environment in a list of disruptors.
///
/// Per step t:
///   1. env_params disruptors that fire update the parameter set;
///   2. state disruptors produce the observed state;
///   3. the agent picks a_t from the observation;
///   4. action disruptors produce the executed action;
///   5. the environment steps on the executed action, and reward/cost
///      disruptors produce the observed reward/cost of step t (handed to the
///      agent with the next observation).
/// Disruptors sharing a source compose in declaration order. Every
/// disruptor owns independent schedule and noise streams, reseeded per
/// (phase, episode) from the pipeline seed.
class Pipeline {
 public:
  Pipeline(std::unique_ptr<Environment> env, std::vector<DisruptorSpec> specs, std::uint64_t disruptor_seed);
  ~Pipeline();
  Pipeline(Pipeline&&) noexcept;
  Pipeline& operator=(Pipeline&&) noexcept;

  // Needed by greedy state adversaries.
  void set_probe(adversary::PolicyProbe probe) { probe_ = std::move(probe); }

  // Starts an episode. `episode` indexes param schedules and windows.
  const Observation& reset(std::uint64_t env_seed, std::size_t episode, Phase phase);

  // Stages 1-2 for the current step (idempotent until `act`). After the
  // episode ends it only disrupts the final state, for bootstrapping.
  const Observation& observe();

  // Stages 3-5 for the agent's chosen action.
  StepTranscript act(const ActionValue& agent_action);

  template <class Agent>
  StepTranscript step(Agent&& agent) {
    const Observation& o = observe();
    return act(agent(o));
  }

  Environment& env() noexcept { return *env_; }
  const Environment& env() const noexcept { return *env_; }
  const std::vector<DisruptorSpec>& disruptors() const noexcept { return specs_; }
  bool episode_over() const noexcept { return env_->episode_over(); }
  Phase phase() const noexcept { return phase_; }
  std::size_t episode() const noexcept { return episode_; }
  std::uint64_t global_step() const noexcept { return global_step_; }
  const std::vector<StepTranscript>& history() const noexcept { return history_; }

 private:
  struct Active;

  StateValue disrupt_state(Active& d, const StateValue& s);
  ActionValue disrupt_action(Active& d, const ActionValue& a);
  double disrupt_signal(Active& d, double value, double current_reward, double previous_reward);
  Vector call_adversary(Active& d, adversary::AdversaryRequest req, adversary::Target target,
                        const SpaceSpec* space);
  StepCounters counters() const;
  [[noreturn]] void fault(const std::string& stage, const std::exception& cause);

  std::unique_ptr<Environment> env_;
  std::vector<Active> active_;
  std::vector<DisruptorSpec> specs_;
  std::uint64_t seed_;
  adversary::PolicyProbe probe_;

  Phase phase_ = Phase::Train;
  std::size_t episode_ = 0;
  std::uint64_t global_step_ = 0;
  bool started_ = false;

  bool obs_ready_ = false;
  Observation obs_;
  ParamMap snapshot_;
  std::size_t clamps_ = 0;
  std::size_t violations_ = 0;

  double prev_true_reward_ = 0.0;
  double prev_prev_true_reward_ = 0.0;
  double prev_observed_reward_ = 0.0;
  double prev_observed_cost_ = 0.0;
  std::vector<StepTranscript> history_;
};

}  // namespace rgym::disrupt

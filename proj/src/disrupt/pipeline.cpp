#include "rgym/disrupt/pipeline.hpp"

#include <algorithm>

namespace rgym::disrupt {

using adversary::AdversaryRequest;
using adversary::Target;

struct Pipeline::Active {
  DisruptorSpec spec;
  Vector region_low;
  Vector region_high;
  std::string task;
  Rng base;
  Rng schedule_rng;
  Rng noise_rng;
  std::unique_ptr<adversary::Adversary> adversary;
  bool fired = false;
};

namespace {

Vector broadcast(const Vector& v, std::size_t dim) {
  return v.size() == 1 ? Vector(dim, v.front()) : v;
}

void restore_unmasked(Value& out, const Value& original, const std::optional<IndexVector>& mask) {
  if (!mask || !out.is_indices()) return;
  auto& idx = out.as_indices();
  const auto& orig = original.as_indices();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (std::ranges::find(*mask, i) == mask->end()) idx[i] = orig[i];
  }
}

}  // namespace

Pipeline::Pipeline(std::unique_ptr<Environment> env, std::vector<DisruptorSpec> specs,
                   std::uint64_t disruptor_seed)
    : env_(std::move(env)), seed_(disruptor_seed) {
  if (!env_) throw DomainError("pipeline needs an environment");
  validate_disruptors(specs, *env_);
  specs_ = specs;
  const Rng root = Rng(seed_).split("disruptor");
  active_.reserve(specs.size());
  for (auto& spec : specs) {
    Active a;
    a.base = root.split(spec.id);
    if (auto* adv = std::get_if<AdversarialMode>(&spec.mode)) {
      std::size_t dim = 1;
      if (spec.source == Source::State) dim = env_->state_space().dimension();
      if (spec.source == Source::Action) dim = env_->action_space().dimension();
      a.region_low = broadcast(adv->region_low, dim);
      a.region_high = broadcast(adv->region_high, dim);
      a.task = adv->task.empty()
                   ? std::string(env_->id()) + ": perturb the " + to_string(spec.source) + " signal"
                   : adv->task;
      a.adversary = adversary::make_adversary(spec.id, adv->adversary);
    }
    a.spec = std::move(spec);
    active_.push_back(std::move(a));
  }
}

Pipeline::~Pipeline() = default;
Pipeline::Pipeline(Pipeline&&) noexcept = default;
Pipeline& Pipeline::operator=(Pipeline&&) noexcept = default;

StepCounters Pipeline::counters() const {
  return StepCounters{global_step_, episode_, env_->step_count()};
}

const Observation& Pipeline::reset(std::uint64_t env_seed, std::size_t episode, Phase phase) {
  phase_ = phase;
  episode_ = episode;
  env_->reset(env_seed);
  for (auto& a : active_) {
    const Rng stream = a.base.split(phase == Phase::Train ? 1 : 2).split(episode);
    a.schedule_rng = stream.split("schedule");
    a.noise_rng = stream.split("noise");
  }
  started_ = true;
  obs_ready_ = false;
  prev_true_reward_ = prev_prev_true_reward_ = 0.0;
  prev_observed_reward_ = prev_observed_cost_ = 0.0;
  history_.clear();
  return observe();
}

void Pipeline::fault(const std::string& stage, const std::exception& cause) {
  started_ = false;
  std::optional<std::string> adversary_id;
  if (const auto* ae = dynamic_cast<const AdversaryError*>(&cause)) adversary_id = ae->adversary_id();
  throw PipelineError("pipeline " + stage + " stage at step " + std::to_string(env_->step_count()) +
                          ": " + cause.what(),
                      history_, std::move(adversary_id));
}

const Observation& Pipeline::observe() {
  if (!started_) throw DomainError("pipeline: reset() must start an episode first");
  if (obs_ready_) return obs_;
  clamps_ = violations_ = 0;
  for (auto& a : active_) a.fired = false;
  const StepCounters c = counters();
  try {
    if (!env_->episode_over()) {
      for (auto& a : active_) {
        if (a.spec.source != Source::EnvParams) continue;
        if (!schedule_fires(a.spec.schedule, c, phase_, a.schedule_rng)) continue;
        a.fired = true;
        const ParamMap values = eval_param_schedule(*a.spec.param_schedule(), episode_, c.step_in_episode, a.noise_rng);
        clamps_ += env_->set_params(values).clamped.size();
      }
    }
    snapshot_ = env_->params().snapshot();
    StateValue s = env_->state();
    for (auto& a : active_) {
      if (a.spec.source != Source::State) continue;
      if (!schedule_fires(a.spec.schedule, c, phase_, a.schedule_rng)) continue;
      a.fired = true;
      s = disrupt_state(a, s);
    }
    obs_ = Observation{std::move(s), prev_observed_reward_, prev_observed_cost_};
  } catch (const Error& e) {
    fault("observation", e);
  }
  obs_ready_ = true;
  return obs_;
}

StepTranscript Pipeline::act(const ActionValue& agent_action) {
  observe();
  if (env_->episode_over()) throw DomainError("pipeline: act() after the episode ended");
  if (!env_->action_space().contains(agent_action))
    throw DomainError("pipeline: agent action " + agent_action.to_string() + " outside " +
                      env_->action_space().describe());
  const StepCounters c = counters();

  ActionValue executed = agent_action;
  try {
    for (auto& a : active_) {
      if (a.spec.source != Source::Action) continue;
      if (!schedule_fires(a.spec.schedule, c, phase_, a.schedule_rng)) continue;
      a.fired = true;
      executed = disrupt_action(a, executed);
    }
  } catch (const Error& e) {
    fault("action", e);
  }

  StepTranscript tr;
  tr.t = c.step_in_episode;
  tr.true_state = env_->state();
  StepOutcome out;
  try {
    out = env_->step(executed);
  } catch (const Error& e) {
    fault("environment", e);
  }

  double reward = out.true_reward;
  double cost = out.true_cost;
  try {
    for (auto& a : active_) {
      if (a.spec.source != Source::Reward && a.spec.source != Source::Cost) continue;
      if (!schedule_fires(a.spec.schedule, c, phase_, a.schedule_rng)) continue;
      a.fired = true;
      if (a.spec.source == Source::Reward) {
        reward = disrupt_signal(a, reward, out.true_reward, prev_true_reward_);
      } else {
        cost = disrupt_signal(a, cost, out.true_reward, prev_true_reward_);
      }
    }
  } catch (const Error& e) {
    fault("reward", e);
  }

  tr.observed_state = obs_.state;
  tr.agent_action = agent_action;
  tr.executed_action = std::move(executed);
  tr.true_reward = out.true_reward;
  tr.observed_reward = reward;
  tr.true_cost = out.true_cost;
  tr.observed_cost = cost;
  for (const auto& a : active_) {
    if (a.fired) tr.fired.push_back(a.spec.id);
  }
  tr.env_params_snapshot = snapshot_;
  tr.next_state = std::move(out.next_state);
  tr.terminated = out.terminated;
  tr.truncated = out.truncated;
  tr.clamp_count = clamps_;
  tr.adversary_violations = violations_;

  prev_prev_true_reward_ = prev_true_reward_;
  prev_true_reward_ = out.true_reward;
  prev_observed_reward_ = reward;
  prev_observed_cost_ = cost;
  obs_ready_ = false;
  ++global_step_;
  history_.push_back(tr);
  return tr;
}

Vector Pipeline::call_adversary(Active& d, AdversaryRequest req, Target target, const SpaceSpec* space) {
  req.task_description = d.task;
  req.region_low = d.region_low;
  req.region_high = d.region_high;
  adversary::AdversaryContext ctx{env_.get(), target, space, &probe_};
  const auto reply = d.adversary->respond(req, ctx, d.noise_rng);
  if (reply.value.size() != req.value.size())
    throw AdversaryError(d.spec.id, "reply has the wrong length");
  auto clamped = adversary::clamp_to_region(reply, req);
  if (clamped.violated) {
    ++violations_;
    ++clamps_;
  }
  return std::move(clamped.value);
}

StateValue Pipeline::disrupt_state(Active& d, const StateValue& s) {
  const SpaceSpec& space = env_->state_space();
  if (const auto* r = std::get_if<RandomMode>(&d.spec.mode))
    return apply_noise(s, r->noise, space, d.noise_rng, d.spec.agent_mask);
  AdversaryRequest req;
  req.value = s.to_reals();
  req.current_reward = prev_true_reward_;
  req.previous_reward = prev_prev_true_reward_;
  req.integral = space.is_finite();
  StateValue out = adversary::value_from_reals(call_adversary(d, std::move(req), Target::State, &space), space);
  restore_unmasked(out, s, d.spec.agent_mask);
  return out;
}

ActionValue Pipeline::disrupt_action(Active& d, const ActionValue& a) {
  const SpaceSpec& space = env_->action_space();
  ActionValue out;
  if (const auto* r = std::get_if<RandomMode>(&d.spec.mode)) {
    out = apply_noise(a, r->noise, space, d.noise_rng, d.spec.agent_mask);
  } else {
    AdversaryRequest req;
    req.value = a.to_reals();
    req.current_reward = prev_true_reward_;
    req.previous_reward = prev_prev_true_reward_;
    req.integral = space.is_finite();
    out = adversary::value_from_reals(call_adversary(d, std::move(req), Target::Action, &space), space);
    restore_unmasked(out, a, d.spec.agent_mask);
  }
  if (space.clip(out)) ++clamps_;
  return out;
}

double Pipeline::disrupt_signal(Active& d, double value, double current_reward, double previous_reward) {
  if (const auto* r = std::get_if<RandomMode>(&d.spec.mode)) return apply_noise(value, r->noise, d.noise_rng);
  AdversaryRequest req;
  req.value = {value};
  req.current_reward = current_reward;
  req.previous_reward = previous_reward;
  return call_adversary(d, std::move(req), Target::Signal, nullptr).front();
}

}  // namespace rgym::disrupt

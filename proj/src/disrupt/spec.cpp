#include "rgym/disrupt/spec.hpp"

#include <set>

#include "rgym/core/errors.hpp"

namespace rgym::disrupt {

std::string to_string(Source s) {
  switch (s) {
    case Source::State: return "state";
    case Source::Reward: return "reward";
    case Source::Cost: return "cost";
    case Source::Action: return "action";
    case Source::EnvParams: return "env_params";
  }
  return "state";
}

std::string mode_name(const DisruptionMode& m) {
  switch (m.index()) {
    case 0: return "random";
    case 1: return "adversarial";
    case 2: return "internal_shift";
    default: return "external";
  }
}

const ParamSchedule* DisruptorSpec::param_schedule() const noexcept {
  if (const auto* m = std::get_if<InternalShiftMode>(&mode)) return &m->params;
  if (const auto* m = std::get_if<ExternalMode>(&mode)) return &m->params;
  return nullptr;
}

namespace {

[[noreturn]] void fail(std::size_t i, const std::string& field, const std::string& what) {
  throw ConfigError("disruptor[" + std::to_string(i) + "]." + field, what);
}

const SpaceSpec* space_for(Source s, const Environment& env) {
  if (s == Source::State) return &env.state_space();
  if (s == Source::Action) return &env.action_space();
  return nullptr;
}

}  // namespace

void validate_disruptors(const std::vector<DisruptorSpec>& specs, const Environment& env) {
  std::set<std::string> ids;
  std::set<std::string> scheduled_params;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const DisruptorSpec& d = specs[i];
    if (d.id.empty()) fail(i, "id", "must not be empty");
    if (!ids.insert(d.id).second) fail(i, "id", "duplicate disruptor id '" + d.id + "'");

    try {
      validate_schedule(d.schedule);
    } catch (const ConfigError& e) {
      fail(i, e.key(), e.detail());
    }

    const bool env_mode = d.param_schedule() != nullptr;
    if ((d.source == Source::EnvParams) != env_mode)
      fail(i, "mode", "source env_params requires mode internal_shift or external (and vice versa)");

    if (d.agent_mask) {
      if (env.num_agents() < 2) fail(i, "agents", "agent masks need a multi-agent environment");
      if (d.source != Source::State && d.source != Source::Action)
        fail(i, "agents", "agent masks apply to state and action sources only");
      for (std::size_t a : *d.agent_mask) {
        if (a >= env.num_agents()) fail(i, "agents", "agent index " + std::to_string(a) + " out of range");
      }
    }

    const SpaceSpec* space = space_for(d.source, env);
    if (const auto* r = std::get_if<RandomMode>(&d.mode)) {
      try {
        validate_noise(r->noise);
        if (space) {
          check_noise_space(r->noise, *space);
        } else if (std::holds_alternative<DiscreteReplace>(r->noise)) {
          throw ConfigError("noise", "discrete_replace cannot act on a " + to_string(d.source) + " signal");
        }
      } catch (const ConfigError& e) {
        fail(i, e.key(), e.detail());
      }
    } else if (const auto* a = std::get_if<AdversarialMode>(&d.mode)) {
      if (!adversary::is_known_adversary(a->adversary.kind))
        fail(i, "adversary", "unknown adversary '" + a->adversary.kind + "'");
      const std::size_t dim = space ? space->dimension() : 1;
      if (a->region_low.size() != a->region_high.size() ||
          (a->region_low.size() != 1 && a->region_low.size() != dim))
        fail(i, "region_low", "region needs 1 or " + std::to_string(dim) + " elements per bound");
      for (std::size_t k = 0; k < a->region_low.size(); ++k) {
        if (!(a->region_low[k] <= a->region_high[k])) fail(i, "region_high", "region_low > region_high");
      }
      if (a->adversary.kind == "greedy") {
        if (!space) fail(i, "adversary", "greedy adversary attacks state or action sources only");
        if (a->adversary.candidates < 1) fail(i, "candidates", "must be >= 1");
      }
      if (a->adversary.kind == "external") {
        if (a->adversary.endpoint.empty()) fail(i, "command", "external adversary needs a command");
        if (!(a->adversary.timeout_s > 0.0)) fail(i, "timeout", "must be > 0");
      }
    } else {
      const ParamSchedule& ps = *d.param_schedule();
      if (ps.empty()) fail(i, "params", "env_params disruptor needs at least one parameter rule");
      for (const auto& [name, rule] : ps) {
        if (!env.params().contains(name))
          fail(i, "params." + name, "unknown parameter for " + std::string(env.id()));
        if (!scheduled_params.insert(name).second)
          fail(i, "params." + name, "parameter already driven by another env_params disruptor");
        try {
          validate_rule(rule);
        } catch (const ConfigError& e) {
          fail(i, "params." + name + "." + e.key(), e.detail());
        }
        const auto* u = std::get_if<UniformDrawRule>(&rule);
        if (u && u->at == DrawAt::EpisodeStart && !d.schedule.can_fire_at_episode_start())
          fail(i, "params." + name + ".at", "episode_start draws need a schedule that can fire at step 0");
      }
    }
  }
}

}  // namespace rgym::disrupt

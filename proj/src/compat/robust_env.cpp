#include "rgym/compat/robust_env.hpp"

#include <cmath>

#include "rgym/core/errors.hpp"
#include "rgym/harness/experiment.hpp"

namespace rgym::compat {

Json value_to_json(const Value& v) {
  if (v.is_index()) return v.as_index();
  if (v.is_vector()) return v.as_vector();
  return v.as_indices();
}

namespace {

std::size_t index_from_json(const Json& j) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::size_t>(j.get<std::int64_t>());
  throw DomainError("expected a non-negative integer action, got " + j.dump());
}

}  // namespace

Value value_from_json(const Json& j, const SpaceSpec& space) {
  Value v;
  if (space.is_discrete()) {
    v = Value::index(index_from_json(j));
  } else if (space.is_box()) {
    Vector x;
    if (j.is_number()) {
      x.push_back(j.get<double>());
    } else if (j.is_array()) {
      for (const auto& e : j) {
        if (!e.is_number()) throw DomainError("expected numbers in the action, got " + j.dump());
        x.push_back(e.get<double>());
      }
    } else {
      throw DomainError("expected a number or a list of numbers, got " + j.dump());
    }
    v = Value::vector(std::move(x));
  } else {
    if (!j.is_array()) throw DomainError("expected a list of per-agent actions, got " + j.dump());
    IndexVector x;
    for (const auto& e : j) x.push_back(index_from_json(e));
    v = Value::indices(std::move(x));
  }
  if (!space.contains(v)) throw DomainError("action " + j.dump() + " is outside " + space.describe());
  return v;
}

RobustEnv::RobustEnv(const std::string& env_id, const std::filesystem::path& config_path)
    : RobustEnv(harness::load_config(config_path)) {
  if (config_.env.id != env_id)
    throw ConfigError("env.id", "config describes '" + config_.env.id + "', not '" + env_id + "'");
}

RobustEnv::RobustEnv(harness::RunConfig config) : config_(std::move(config)) {
  harness::validate_config(config_);
}

Json RobustEnv::reset(std::optional<std::uint64_t> seed) {
  if (!seed) throw DomainError("reset needs an explicit seed");
  const harness::SeedStreams streams(*seed);
  auto env = harness::make_config_environment(config_);
  env->restore_nominal_params();
  pipeline_ = std::make_unique<disrupt::Pipeline>(std::move(env), harness::gated_disruptors(config_),
                                                  streams.disruptor_seed);
  return value_to_json(pipeline_->reset(streams.env_seed("train", 0), 0, disrupt::Phase::Train).state);
}

StepReturn RobustEnv::step(const Json& input) {
  if (!input.is_object() || input.size() != 2 || !input.contains("action") || !input.contains("robust_config"))
    throw DomainError("step input must be a mapping with exactly the keys \"action\" and \"robust_config\"");
  if (!input["robust_config"].is_object()) throw DomainError("\"robust_config\" must be a mapping");
  if (!pipeline_) throw DomainError("call reset(seed) before step");
  const Value action = value_from_json(input["action"], pipeline_->env().action_space());
  const StepTranscript tr = pipeline_->act(action);
  const disrupt::Observation& next = pipeline_->observe();

  StepReturn out;
  out.observation = value_to_json(next.state);
  out.reward = next.reward;
  out.terminated = tr.terminated;
  out.truncated = tr.truncated;
  out.info[kTrueState] = value_to_json(tr.next_state);
  out.info[kTrueReward] = tr.true_reward;
  out.info[kTrueCost] = tr.true_cost;
  out.info["cost"] = next.cost;
  out.info["executed_action"] = value_to_json(tr.executed_action);
  out.info["fired"] = tr.fired;
  out.info["step"] = tr.t;
  return out;
}

}  // namespace rgym::compat

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rgym/adversary/adversary.hpp"
#include "rgym/core/environment.hpp"
#include "rgym/disrupt/noise.hpp"
#include "rgym/disrupt/param_schedule.hpp"
#include "rgym/disrupt/schedule.hpp"

namespace rgym::disrupt {

enum class Source { State, Reward, Cost, Action, EnvParams };

std::string to_string(Source s);

struct RandomMode {
  NoiseModel noise;
  bool operator==(const RandomMode&) const = default;
};

// Region bounds of length 1 are broadcast to the attacked value's dimension.
struct AdversarialMode {
  adversary::AdversaryOptions adversary;
  Vector region_low;
  Vector region_high;
  std::string task;
  bool operator==(const AdversarialMode&) const = default;
};

struct InternalShiftMode {
  ParamSchedule params;
  bool operator==(const InternalShiftMode&) const = default;
};

struct ExternalMode {
  ParamSchedule params;
  bool operator==(const ExternalMode&) const = default;
};

using DisruptionMode = std::variant<RandomMode, AdversarialMode, InternalShiftMode, ExternalMode>;

std::string mode_name(const DisruptionMode& m);

/// One disruption channel.
struct DisruptorSpec {
  std::string id;
  Source source = Source::State;
  DisruptionMode mode = RandomMode{};
  Schedule schedule;
  std::optional<IndexVector> agent_mask;  // multi-agent envs only

  // Parameter schedule of an env_params disruptor, null otherwise.
  const ParamSchedule* param_schedule() const noexcept;

  bool operator==(const DisruptorSpec&) const = default;
};

/// Checks a disruptor list against an environment. Errors are ConfigError
/// with keys of the form "disruptor[i].field".
void validate_disruptors(const std::vector<DisruptorSpec>& specs, const Environment& env);

}  // namespace rgym::disrupt

#pragma once

#include <map>
#include <string>
#include <variant>

#include "rgym/core/params.hpp"
#include "rgym/core/rng.hpp"

namespace rgym::disrupt {

struct ConstantRule {
  double value = 0.0;
  bool operator==(const ConstantRule&) const = default;
};

enum class DrawAt { EpisodeStart, Step };

struct UniformDrawRule {
  double lo = 0.0;
  double hi = 0.0;
  DrawAt at = DrawAt::EpisodeStart;
  bool operator==(const UniformDrawRule&) const = default;
};

enum class SinusoidIndex { Episode, Step };

// base + amp * sin(freq * index)
struct SinusoidRule {
  double base = 0.0;
  double amp = 0.0;
  double freq = 0.0;
  SinusoidIndex index = SinusoidIndex::Episode;
  bool operator==(const SinusoidRule&) const = default;
};

using ParamRule = std::variant<ConstantRule, UniformDrawRule, SinusoidRule>;
using ParamSchedule = std::map<std::string, ParamRule>;

std::string rule_name(const ParamRule& r);

void validate_rule(const ParamRule& r);

/// Values the schedule assigns at (episode, step). Values are not clamped
/// here; the environment clamps on assignment. A uniform draw with
/// at = episode_start only yields a value at step 0 (the parameter keeps its
/// value for the rest of the episode). Rules are evaluated in name order.
ParamMap eval_param_schedule(const ParamSchedule& ps, std::size_t episode, std::size_t step, Rng& rng);

}  // namespace rgym::disrupt

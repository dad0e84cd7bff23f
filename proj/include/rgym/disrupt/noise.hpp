#pragma once

#include <optional>
#include <string>
#include <variant>

#include "rgym/core/rng.hpp"
#include "rgym/core/space.hpp"

namespace rgym::disrupt {

struct GaussianNoise {
  double mu = 0.0;
  double sigma = 0.0;
  bool operator==(const GaussianNoise&) const = default;
};

struct UniformNoise {
  double a = 0.0;
  double b = 0.0;
  bool operator==(const UniformNoise&) const = default;
};

// With probability p the value is replaced by a uniform element of the space.
struct DiscreteReplace {
  double p = 0.0;
  bool operator==(const DiscreteReplace&) const = default;
};

using NoiseModel = std::variant<GaussianNoise, UniformNoise, DiscreteReplace>;

// Components a multi-agent disruptor may touch; nullopt means all.
using AgentMask = std::optional<IndexVector>;

std::string noise_name(const NoiseModel& m);

// Throws ConfigError (key "noise") on sigma < 0, a > b, p outside [0, 1].
void validate_noise(const NoiseModel& m);

// Throws ConfigError when the family cannot act on the space: additive
// families need a box, discrete_replace needs a finite space.
void check_noise_space(const NoiseModel& m, const SpaceSpec& space);

// One additive draw (gaussian or uniform).
double sample_additive(const NoiseModel& m, Rng& rng);

/// Perturbs a state or action. Additive families add an independent draw to
/// every component; the result is not clipped. discrete_replace resamples
/// each (masked) component with probability p.
Value apply_noise(const Value& value, const NoiseModel& m, const SpaceSpec& space, Rng& rng,
                  const AgentMask& mask = std::nullopt);

// Perturbs a reward or cost. Never clipped.
double apply_noise(double value, const NoiseModel& m, Rng& rng);

}  // namespace rgym::disrupt

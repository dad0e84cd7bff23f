#include "rgym/disrupt/noise.hpp"

#include <algorithm>
#include <cmath>

#include "rgym/core/errors.hpp"

namespace rgym::disrupt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool masked(const AgentMask& mask, std::size_t i) {
  return !mask || std::ranges::find(*mask, i) != mask->end();
}

}  // namespace

std::string noise_name(const NoiseModel& m) {
  return std::visit(overloaded{[](const GaussianNoise&) { return "gaussian"; },
                               [](const UniformNoise&) { return "uniform"; },
                               [](const DiscreteReplace&) { return "discrete_replace"; }},
                    m);
}

void validate_noise(const NoiseModel& m) {
  std::visit(overloaded{
                 [](const GaussianNoise& g) {
                   if (!std::isfinite(g.mu)) throw ConfigError("mu", "must be finite");
                   if (!(g.sigma >= 0.0) || !std::isfinite(g.sigma))
                     throw ConfigError("sigma", "must be finite and >= 0");
                 },
                 [](const UniformNoise& u) {
                   if (!std::isfinite(u.a) || !std::isfinite(u.b))
                     throw ConfigError("a", "bounds must be finite");
                   if (!(u.a <= u.b)) throw ConfigError("b", "uniform noise needs a <= b");
                 },
                 [](const DiscreteReplace& d) {
                   if (!(d.p >= 0.0 && d.p <= 1.0)) throw ConfigError("p", "must be in [0, 1]");
                 }},
             m);
}

void check_noise_space(const NoiseModel& m, const SpaceSpec& space) {
  const bool additive = !std::holds_alternative<DiscreteReplace>(m);
  if (additive && !space.is_box())
    throw ConfigError("noise", noise_name(m) + " noise needs a continuous space, got " + space.describe());
  if (!additive && space.is_box())
    throw ConfigError("noise", "discrete_replace needs a discrete space, got " + space.describe());
}

double sample_additive(const NoiseModel& m, Rng& rng) {
  if (const auto* g = std::get_if<GaussianNoise>(&m)) return rng.normal(g->mu, g->sigma);
  const auto& u = std::get<UniformNoise>(m);
  return rng.uniform(u.a, u.b);
}

Value apply_noise(const Value& value, const NoiseModel& m, const SpaceSpec& space, Rng& rng,
                  const AgentMask& mask) {
  check_noise_space(m, space);
  Value out = value;
  if (const auto* d = std::get_if<DiscreteReplace>(&m)) {
    if (space.is_discrete()) {
      if (masked(mask, 0) && rng.bernoulli(d->p)) out = Value::index(rng.index(space.n()));
      return out;
    }
    auto& idx = out.as_indices();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (masked(mask, i) && rng.bernoulli(d->p)) idx[i] = rng.index(space.counts()[i]);
    }
    return out;
  }
  auto& x = out.as_vector();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (masked(mask, i)) x[i] += sample_additive(m, rng);
  }
  return out;
}

double apply_noise(double value, const NoiseModel& m, Rng& rng) {
  if (std::holds_alternative<DiscreteReplace>(m))
    throw ConfigError("noise", "discrete_replace cannot act on a scalar signal");
  return value + sample_additive(m, rng);
}

}  // namespace rgym::disrupt

#include "rgym/disrupt/param_schedule.hpp"

#include <cmath>

#include "rgym/core/errors.hpp"

namespace rgym::disrupt {

std::string rule_name(const ParamRule& r) {
  if (std::holds_alternative<ConstantRule>(r)) return "constant";
  if (std::holds_alternative<UniformDrawRule>(r)) return "uniform";
  return "sinusoid";
}

void validate_rule(const ParamRule& r) {
  if (const auto* c = std::get_if<ConstantRule>(&r)) {
    if (!std::isfinite(c->value)) throw ConfigError("value", "must be finite");
  } else if (const auto* u = std::get_if<UniformDrawRule>(&r)) {
    if (!std::isfinite(u->lo) || !std::isfinite(u->hi)) throw ConfigError("lo", "must be finite");
    if (!(u->lo <= u->hi)) throw ConfigError("hi", "uniform rule needs lo <= hi");
  } else {
    const auto& s = std::get<SinusoidRule>(r);
    if (!std::isfinite(s.base) || !std::isfinite(s.amp) || !std::isfinite(s.freq))
      throw ConfigError("base", "sinusoid coefficients must be finite");
  }
}

ParamMap eval_param_schedule(const ParamSchedule& ps, std::size_t episode, std::size_t step, Rng& rng) {
  ParamMap out;
  for (const auto& [name, rule] : ps) {
    if (const auto* c = std::get_if<ConstantRule>(&rule)) {
      out[name] = c->value;
    } else if (const auto* u = std::get_if<UniformDrawRule>(&rule)) {
      if (u->at == DrawAt::Step || step == 0) out[name] = rng.uniform(u->lo, u->hi);
    } else {
      const auto& s = std::get<SinusoidRule>(rule);
      const double i = static_cast<double>(s.index == SinusoidIndex::Episode ? episode : step);
      out[name] = s.base + s.amp * std::sin(s.freq * i);
    }
  }
  return out;
}

}  // namespace rgym::disrupt

#include "rgym/core/params.hpp"

#include <algorithm>
#include <cmath>

#include "rgym/core/errors.hpp"

namespace rgym {

void EnvParamSet::define(const std::string& name, double nominal, double low, double high) {
  if (!(low <= nominal && nominal <= high))
    throw DomainError("parameter '" + name + "' needs low <= nominal <= high");
  entries_[name] = ParamEntry{nominal, nominal, low, high};
}

const ParamEntry& EnvParamSet::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw UnknownParameterError(name);
  return it->second;
}

ParamUpdate EnvParamSet::apply(const ParamMap& updates) {
  for (const auto& [name, value] : updates) {
    if (!entries_.contains(name)) throw UnknownParameterError(name);
    if (!std::isfinite(value))
      throw DomainError("parameter '" + name + "' update is not finite");
  }
  std::vector<std::string> clamped;
  for (const auto& [name, value] : updates) {
    auto& e = entries_.at(name);
    e.current = std::clamp(value, e.low, e.high);
    if (e.current != value) clamped.push_back(name);
  }
  return ParamUpdate{*this, std::move(clamped)};
}

void EnvParamSet::restore_nominal() {
  for (auto& [name, e] : entries_) e.current = e.nominal;
}

ParamMap EnvParamSet::snapshot() const {
  ParamMap out;
  for (const auto& [name, e] : entries_) out.emplace(name, e.current);
  return out;
}

std::vector<std::string> EnvParamSet::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, e] : entries_) out.push_back(name);
  return out;
}

}  // namespace rgym

#pragma once

#include <map>
#include <string>
#include <vector>

namespace rgym {

using ParamMap = std::map<std::string, double>;

struct ParamEntry {
  double nominal = 0.0;
  double current = 0.0;
  double low = 0.0;
  double high = 0.0;

  bool operator==(const ParamEntry&) const = default;
};

struct ParamUpdate;

/// Named dynamics parameters with nominal value, current value and bounds.
/// Every mutation keeps low <= current <= high.
class EnvParamSet {
 public:
  void define(const std::string& name, double nominal, double low, double high);

  bool contains(const std::string& name) const { return entries_.contains(name); }
  const ParamEntry& entry(const std::string& name) const;
  double current(const std::string& name) const { return entry(name).current; }
  double nominal(const std::string& name) const { return entry(name).nominal; }

  // Validates every name before touching anything; throws
  // UnknownParameterError naming the first offending key.
  ParamUpdate apply(const ParamMap& updates);

  void restore_nominal();

  ParamMap snapshot() const;
  std::vector<std::string> names() const;
  const std::map<std::string, ParamEntry>& entries() const noexcept { return entries_; }

  bool operator==(const EnvParamSet&) const = default;

 private:
  std::map<std::string, ParamEntry> entries_;
};

// Result of a parameter update: the post-clamp set and the names whose
// requested value had to be clamped.
struct ParamUpdate {
  EnvParamSet params;
  std::vector<std::string> clamped;

  bool any_clamped() const noexcept { return !clamped.empty(); }
};

}  // namespace rgym

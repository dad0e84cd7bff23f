#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "rgym/disrupt/pipeline.hpp"
#include "rgym/harness/config.hpp"

namespace rgym::compat {

using Json = nlohmann::json;

// Reserved info keys carrying the true values of a step.
inline constexpr const char* kTrueState = "_true_state";
inline constexpr const char* kTrueReward = "_true_reward";
inline constexpr const char* kTrueCost = "_true_cost";

struct StepReturn {
  Json observation;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  Json info;
};

Json value_to_json(const Value& v);
// Throws DomainError when `j` does not fit the space.
Value value_from_json(const Json& j, const SpaceSpec& space);

/// Gym-style facade over one pipeline: step takes {"action", "robust_config"}
/// and returns the observed state and reward; true values travel in info.
///
/// reset(seed) replays the first training episode the harness would run for
/// run seed `seed` (same env and disruptor streams), so the two observed
/// streams agree for the same actions.
class RobustEnv {
 public:
  // `env_id` must match the [env] id of the config.
  RobustEnv(const std::string& env_id, const std::filesystem::path& config_path);
  explicit RobustEnv(harness::RunConfig config);

  Json reset(std::optional<std::uint64_t> seed);

  // Throws DomainError on a mis-shaped input mapping.
  StepReturn step(const Json& input);

  const harness::RunConfig& config() const noexcept { return config_; }
  const disrupt::Pipeline* pipeline() const noexcept { return pipeline_.get(); }

 private:
  harness::RunConfig config_;
  std::unique_ptr<disrupt::Pipeline> pipeline_;
};

}  // namespace rgym::compat

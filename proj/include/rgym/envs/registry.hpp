#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rgym/core/environment.hpp"

namespace rgym::envs {

/// Construction options shared by every registered environment; fields that
/// do not apply to an id must stay unset (validated by the config loader).
struct EnvOptions {
  std::string id;
  std::optional<std::string> layout;  // inline map text
  std::optional<std::size_t> width;
  std::optional<std::size_t> height;
  std::optional<std::size_t> horizon;
  std::optional<double> slip;
  std::optional<double> step_reward;
  std::optional<double> hazard_cost;
  std::optional<std::array<std::size_t, 2>> starts;  // two_agent_grid, cell indices
  std::optional<std::array<std::size_t, 2>> goals;

  bool operator==(const EnvOptions&) const = default;
};

struct EnvInfo {
  std::string id;
  std::string description;
};

const std::vector<EnvInfo>& registered_environments();
bool is_registered(const std::string& id);

std::unique_ptr<Environment> make_environment(const EnvOptions& options);

}  // namespace rgym::envs

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rgym/agents/agent.hpp"
#include "rgym/disrupt/spec.hpp"
#include "rgym/envs/registry.hpp"

namespace rgym::harness {

enum class Protocol { InTraining, PostTraining };

std::string to_string(Protocol p);

/// Everything one experiment needs.
struct RunConfig {
  envs::EnvOptions env;
  agents::AgentOptions agent;
  std::optional<std::string> agent_load;  // policy snapshot to start from
  std::vector<disrupt::DisruptorSpec> disruptors;
  Protocol protocol = Protocol::InTraining;
  std::size_t train_episodes = 0;
  std::size_t eval_episodes = 10;
  std::optional<std::size_t> horizon;
  std::vector<std::uint64_t> seeds{0};
  std::map<std::string, std::vector<double>> eval_param_grid;
  double cvar_alpha = 0.1;
  std::string output = "out";
  std::optional<std::size_t> workers;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the TOML configuration. Unknown or inapplicable keys are errors.
/// `map_file` entries are read relative to `base_dir` and inlined as the
/// layout. Throws ConfigError whose message carries the key and line.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Semantic checks across sections (environment, agent, disruptors,
/// protocol, harness). Throws ConfigError naming the key.
void validate_config(const RunConfig& config);

/// Environment the config describes, with the harness horizon applied.
std::unique_ptr<Environment> make_config_environment(const RunConfig& config);

/// Disruptor list as the protocol gates it: post_training turns `both`
/// into `eval_only` and rejects `train_only`.
std::vector<disrupt::DisruptorSpec> gated_disruptors(const RunConfig& config);

/// Canonical TOML text; parse_config(to_toml(c)) == c.
std::string to_toml(const RunConfig& config);

/// Replaces the value at a dotted key ("disruptor.0.sigma", "protocol.kind")
/// in TOML text, keeping the type of the existing value. Throws ConfigError
/// when the key does not resolve or the value does not fit the type.
std::string set_config_value(std::string_view toml_text, std::string_view dotted_key, std::string_view value);

// harness.cvar_alpha of a config text (default 0.1) without validating the
// rest; throws ConfigError on a TOML syntax error.
double read_cvar_alpha(std::string_view toml_text);

// Comma-separated list of unsigned seeds; throws ConfigError.
std::vector<std::uint64_t> parse_seed_list(std::string_view text, const std::string& key);

}  // namespace rgym::harness

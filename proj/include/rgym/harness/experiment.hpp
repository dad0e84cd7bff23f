#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rgym/agents/agent.hpp"
#include "rgym/disrupt/pipeline.hpp"
#include "rgym/harness/config.hpp"
#include "rgym/harness/metrics.hpp"

namespace rgym::harness {

/// Per-episode totals. Returns are undiscounted sums.
struct EpisodeRecord {
  std::uint64_t seed = 0;
  std::string phase;  // train | eval | nominal | shift:<k>
  std::size_t episode = 0;
  double return_true = 0.0;
  double return_observed = 0.0;
  double cost_true = 0.0;
  std::size_t steps = 0;
  std::size_t fired_count = 0;
  std::size_t clamp_count = 0;

  bool operator==(const EpisodeRecord&) const = default;
};

struct EpisodeResult {
  EpisodeRecord record;
  std::vector<StepTranscript> transcripts;  // only when requested
};

/// A stage fault during an episode, with the totals accumulated so far.
class EpisodeError : public Error {
 public:
  EpisodeError(const std::string& what, EpisodeRecord partial, std::vector<StepTranscript> transcripts)
      : Error(what), partial_(std::move(partial)), transcripts_(std::move(transcripts)) {}

  const EpisodeRecord& partial() const noexcept { return partial_; }
  const std::vector<StepTranscript>& transcripts() const noexcept { return transcripts_; }

 private:
  EpisodeRecord partial_;
  std::vector<StepTranscript> transcripts_;
};

/// Runs one episode: the agent only sees the pipeline's observations; with
/// `learn` it is updated from observed transitions after every step.
EpisodeResult run_episode(disrupt::Pipeline& pipeline, agents::Agent& agent, Rng& agent_rng,
                          std::uint64_t env_seed, std::size_t episode, disrupt::Phase phase, bool learn,
                          bool keep_transcripts = false);

/// Per-seed streams: the run seed splits into independent env, disruptor
/// and agent streams, so adding a disruptor never moves env randomness.
struct SeedStreams {
  Rng env;
  std::uint64_t disruptor_seed = 0;
  Rng agent;

  explicit SeedStreams(std::uint64_t run_seed);

  // Reset seed of an episode in a phase ("train", "eval", "nominal", ...).
  std::uint64_t env_seed(std::string_view phase, std::size_t episode) const;
};

struct MetricsSummary {
  std::string label;  // seed, or "all" for the aggregate row
  std::size_t episodes = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  double min_return = 0.0;
  double cvar_return = 0.0;
  double nominal_return = 0.0;
  std::optional<double> worst_case_return;
  std::optional<double> average_shift_return;
  double total_cost = 0.0;
  std::size_t fired_count = 0;
  std::size_t clamp_count = 0;
  double ci95_return = 0.0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> records;
  MetricsSummary summary;
  std::string policy_snapshot;
};

struct ExperimentResult {
  std::vector<SeedResult> seeds;
  MetricsSummary aggregate;
};

/// Trains and evaluates one seed; no files are touched.
SeedResult run_seed(const RunConfig& config, std::uint64_t seed);

/// Summaries are recomputed from episode records (the report tool uses the
/// same code on episodes.jsonl).
MetricsSummary summarize_seed(const std::vector<EpisodeRecord>& records, std::uint64_t seed, double cvar_alpha);
MetricsSummary aggregate(const std::vector<MetricsSummary>& per_seed);

/// Validates, runs every seed (up to `workers` in parallel, default: the
/// config's or the hardware's), and writes artifacts into `out_dir`.
ExperimentResult run_experiment(const RunConfig& config, const std::filesystem::path& out_dir,
                                std::optional<std::size_t> workers = std::nullopt);

// Artifact formats.
const std::vector<std::string>& summary_columns();
std::string summary_csv(const ExperimentResult& result);
std::string summary_row(const MetricsSummary& m);
std::string episode_json(const EpisodeRecord& r);
// Throws DomainError on a malformed line.
EpisodeRecord parse_episode_json(std::string_view line);

}  // namespace rgym::harness

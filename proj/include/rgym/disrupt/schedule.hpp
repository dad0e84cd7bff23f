#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "rgym/core/rng.hpp"

namespace rgym::disrupt {

enum class Phase { Train, Eval };
enum class PhaseGate { TrainOnly, EvalOnly, Both };

std::string to_string(Phase p);
std::string to_string(PhaseGate g);

struct StepCounters {
  std::uint64_t global_step = 0;
  std::size_t episode = 0;
  std::size_t step_in_episode = 0;
};

/// Firing rule of one disruptor.
struct Schedule {
  enum class Kind { EveryStep, EveryK, PerEpisode, Bernoulli, EpisodeWindow, Never };

  Kind kind = Kind::EveryStep;
  std::size_t k = 1;           // every_k
  double q = 0.0;              // bernoulli
  std::size_t from = 0;        // episode_window, inclusive
  std::size_t to = 0;          // episode_window, inclusive
  PhaseGate phase = PhaseGate::Both;

  static Schedule every_step(PhaseGate g = PhaseGate::Both) { return {Kind::EveryStep, 1, 0, 0, 0, g}; }
  static Schedule every_k(std::size_t k, PhaseGate g = PhaseGate::Both) { return {Kind::EveryK, k, 0, 0, 0, g}; }
  static Schedule per_episode(PhaseGate g = PhaseGate::Both) { return {Kind::PerEpisode, 1, 0, 0, 0, g}; }
  static Schedule bernoulli(double q, PhaseGate g = PhaseGate::Both) { return {Kind::Bernoulli, 1, q, 0, 0, g}; }
  static Schedule episode_window(std::size_t from, std::size_t to, PhaseGate g = PhaseGate::Both) {
    return {Kind::EpisodeWindow, 1, 0, from, to, g};
  }
  static Schedule never() { return {Kind::Never, 1, 0, 0, 0, PhaseGate::Both}; }

  // Whether the schedule can fire at step_in_episode == 0.
  bool can_fire_at_episode_start() const noexcept { return kind != Kind::EveryK; }

  bool operator==(const Schedule&) const = default;
};

std::string to_string(Schedule::Kind k);

// Throws ConfigError on k == 0, q outside [0, 1], from > to.
void validate_schedule(const Schedule& s);

bool gate_allows(PhaseGate gate, Phase phase) noexcept;

/// Phase gating first; then every_step -> always, every_k -> step > 0 and
/// step % k == 0, per_episode -> step == 0, bernoulli -> independent draw,
/// episode_window -> from <= episode <= to, never -> false.
bool schedule_fires(const Schedule& s, const StepCounters& c, Phase phase, Rng& rng);

}  // namespace rgym::disrupt

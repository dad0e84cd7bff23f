#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>

#include "rgym/core/environment.hpp"
#include "rgym/core/rng.hpp"
#include "rgym/core/space.hpp"

namespace rgym::adversary {

struct AdversaryRequest {
  std::string task_description;
  Vector value;  // true state or action (indices widened to reals)
  Vector region_low;
  Vector region_high;
  double current_reward = 0.0;
  double previous_reward = 0.0;
  bool integral = false;  // value lives in a discrete space
};

struct AdversaryReply {
  Vector value;
};

// Side-effect-free greedy action of the agent under attack.
using PolicyProbe = std::function<ActionValue(const StateValue&)>;

enum class Target { State, Action, Signal };

/// What an adversary may look at besides the request. `env` is the live
/// environment; strategies that simulate must fork it.
struct AdversaryContext {
  const Environment* env = nullptr;
  Target target = Target::Signal;
  const SpaceSpec* space = nullptr;  // space of the attacked value (state/action)
  const PolicyProbe* probe = nullptr;
};

// Throws DomainError on mismatched lengths or low > high.
void validate_request(const AdversaryRequest& req);

// Converts a real vector to a member of `space` (rounding for discrete kinds).
Value value_from_reals(const Vector& v, const SpaceSpec& space);

struct ClampedReply {
  Vector value;
  bool violated = false;  // reply left the region and was clamped
};

// Rounds integral replies, then clamps element-wise into the region.
ClampedReply clamp_to_region(const AdversaryReply& reply, const AdversaryRequest& req);

/// Uniform draw from the region, element by element. Integral requests draw
/// uniformly among the integers of each interval.
AdversaryReply random_in_set(const AdversaryRequest& req, Rng& rng);

/// Samples `n_candidates` points of the region (or enumerates every integer
/// point when the request is integral and the region holds at most that
/// many), simulates one step on a fork for each and returns the candidate
/// with the lowest immediate true reward; ties go to the lowest index.
/// Candidate 0 is the same draw random_in_set would make.
AdversaryReply greedy_worst_case(const AdversaryRequest& req, const AdversaryContext& ctx,
                                 std::size_t n_candidates, Rng& rng);

class Adversary {
 public:
  explicit Adversary(std::string id) : id_(std::move(id)) {}
  virtual ~Adversary() = default;

  // Throws AdversaryError on failure.
  virtual AdversaryReply respond(const AdversaryRequest& req, const AdversaryContext& ctx, Rng& rng) = 0;

  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

struct AdversaryOptions {
  std::string kind;  // random_in_set | greedy | external
  std::size_t candidates = 8;
  std::string endpoint;  // external: shell command, or unix:<path>
  double timeout_s = 5.0;

  bool operator==(const AdversaryOptions&) const = default;
};

bool is_known_adversary(const std::string& kind);

// `id` names the adversary in errors (the owning disruptor's id).
std::unique_ptr<Adversary> make_adversary(const std::string& id, const AdversaryOptions& options);

}  // namespace rgym::adversary

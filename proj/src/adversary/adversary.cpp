#include "rgym/adversary/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "rgym/adversary/external.hpp"
#include "rgym/core/errors.hpp"

namespace rgym::adversary {

namespace {

struct IntRange {
  long long lo;
  long long hi;
};

IntRange integer_range(double lo, double hi) {
  const auto a = static_cast<long long>(std::ceil(lo));
  const auto b = static_cast<long long>(std::floor(hi));
  if (a > b) {
    const auto r = static_cast<long long>(std::llround(lo));
    return {r, r};
  }
  return {a, b};
}

class RandomInSetAdversary final : public Adversary {
 public:
  using Adversary::Adversary;
  AdversaryReply respond(const AdversaryRequest& req, const AdversaryContext&, Rng& rng) override {
    return random_in_set(req, rng);
  }
};

class GreedyAdversary final : public Adversary {
 public:
  GreedyAdversary(std::string id, std::size_t n) : Adversary(std::move(id)), n_(n) {}
  AdversaryReply respond(const AdversaryRequest& req, const AdversaryContext& ctx, Rng& rng) override {
    try {
      return greedy_worst_case(req, ctx, n_, rng);
    } catch (const AdversaryError&) {
      throw;
    } catch (const Error& e) {
      throw AdversaryError(id(), e.what());
    }
  }

 private:
  std::size_t n_;
};

}  // namespace

void validate_request(const AdversaryRequest& req) {
  if (req.value.size() != req.region_low.size() || req.value.size() != req.region_high.size())
    throw DomainError("adversary request: value and region lengths differ");
  for (std::size_t i = 0; i < req.value.size(); ++i) {
    if (!(req.region_low[i] <= req.region_high[i]))
      throw DomainError("adversary request: region_low > region_high at " + std::to_string(i));
  }
}

Value value_from_reals(const Vector& v, const SpaceSpec& space) {
  auto to_index = [](double x) { return static_cast<std::size_t>(std::max(0.0, std::round(x))); };
  switch (space.kind()) {
    case SpaceSpec::Kind::Discrete:
      return Value::index(std::min(to_index(v.at(0)), space.n() - 1));
    case SpaceSpec::Kind::MultiDiscrete: {
      IndexVector idx(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) idx[i] = std::min(to_index(v[i]), space.counts().at(i) - 1);
      return Value::indices(std::move(idx));
    }
    case SpaceSpec::Kind::Box:
      return Value::vector(v);
  }
  return Value::vector(v);
}

ClampedReply clamp_to_region(const AdversaryReply& reply, const AdversaryRequest& req) {
  ClampedReply out{reply.value, false};
  for (std::size_t i = 0; i < out.value.size(); ++i) {
    double x = req.integral ? std::round(out.value[i]) : out.value[i];
    double lo = req.region_low[i];
    double hi = req.region_high[i];
    if (req.integral) {
      const IntRange r = integer_range(lo, hi);
      lo = static_cast<double>(r.lo);
      hi = static_cast<double>(r.hi);
    }
    const double c = std::clamp(x, lo, hi);
    if (c != x) out.violated = true;
    out.value[i] = c;
  }
  return out;
}

AdversaryReply random_in_set(const AdversaryRequest& req, Rng& rng) {
  validate_request(req);
  AdversaryReply out;
  out.value.resize(req.value.size());
  for (std::size_t i = 0; i < req.value.size(); ++i) {
    if (req.integral) {
      const IntRange r = integer_range(req.region_low[i], req.region_high[i]);
      const auto span = static_cast<std::uint64_t>(r.hi - r.lo + 1);
      out.value[i] = static_cast<double>(r.lo + static_cast<long long>(rng.index(span)));
    } else {
      out.value[i] = rng.uniform(req.region_low[i], req.region_high[i]);
    }
  }
  return out;
}

AdversaryReply greedy_worst_case(const AdversaryRequest& req, const AdversaryContext& ctx,
                                 std::size_t n_candidates, Rng& rng) {
  validate_request(req);
  if (n_candidates < 1) throw DomainError("greedy adversary needs at least one candidate");
  if (ctx.env == nullptr || ctx.space == nullptr)
    throw DomainError("greedy adversary needs a forkable environment");
  if (ctx.target == Target::Signal) throw DomainError("greedy adversary cannot attack a reward/cost signal");
  if (ctx.target == Target::State && (ctx.probe == nullptr || !*ctx.probe))
    throw DomainError("greedy state attack needs a policy probe");

  std::vector<Vector> candidates;
  if (req.integral) {
    std::vector<IntRange> ranges;
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < req.value.size(); ++i) {
      ranges.push_back(integer_range(req.region_low[i], req.region_high[i]));
      total *= static_cast<std::uint64_t>(ranges.back().hi - ranges.back().lo + 1);
      if (total > n_candidates) break;
    }
    if (ranges.size() == req.value.size() && total <= n_candidates) {
      // Full enumeration, first component varying slowest.
      for (std::uint64_t j = 0; j < total; ++j) {
        Vector c(req.value.size());
        std::uint64_t rest = j;
        for (std::size_t i = req.value.size(); i-- > 0;) {
          const auto span = static_cast<std::uint64_t>(ranges[i].hi - ranges[i].lo + 1);
          c[i] = static_cast<double>(ranges[i].lo + static_cast<long long>(rest % span));
          rest /= span;
        }
        candidates.push_back(std::move(c));
      }
    }
  }
  if (candidates.empty()) {
    for (std::size_t j = 0; j < n_candidates; ++j) candidates.push_back(random_in_set(req, rng).value);
  }

  const SpaceSpec& action_space = ctx.env->action_space();
  std::size_t best = 0;
  double best_reward = 0.0;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    Value candidate = value_from_reals(candidates[j], *ctx.space);
    ActionValue action = ctx.target == Target::Action ? candidate : (*ctx.probe)(candidate);
    action_space.clip(action);
    auto fork = ctx.env->fork();
    const double reward = fork->step(action).true_reward;
    if (j == 0 || reward < best_reward) {
      best = j;
      best_reward = reward;
    }
  }
  return AdversaryReply{candidates[best]};
}

bool is_known_adversary(const std::string& kind) {
  return kind == "random_in_set" || kind == "greedy" || kind == "external";
}

std::unique_ptr<Adversary> make_adversary(const std::string& id, const AdversaryOptions& options) {
  if (options.kind == "random_in_set") return std::make_unique<RandomInSetAdversary>(id);
  if (options.kind == "greedy") return std::make_unique<GreedyAdversary>(id, options.candidates);
  if (options.kind == "external")
    return std::make_unique<ExternalAdversary>(id, Endpoint::parse(options.endpoint), options.timeout_s);
  throw ConfigError("adversary", "unknown adversary '" + options.kind + "'");
}

}  // namespace rgym::adversary

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rgym/core/environment.hpp"
#include "rgym/core/rng.hpp"
#include "rgym/disrupt/schedule.hpp"

namespace rgym::agents {

using disrupt::Phase;

/// What a learner gets to see of one step. Only observed quantities: the
/// true state, reward and cost never reach an agent.
struct ObservedTransition {
  StateValue state;
  ActionValue action;  // the agent's own choice, before action disruption
  double reward = 0.0;
  double cost = 0.0;
  StateValue next_state;
  bool done = false;
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string_view id() const = 0;

  // Training: exploratory; evaluation: greedy / mean action.
  virtual ActionValue act(const StateValue& observed, Phase phase, Rng& rng) = 0;
  // Deterministic evaluation action without side effects.
  virtual ActionValue greedy(const StateValue& observed) const = 0;

  // Called before every episode; `total` is the number of training episodes.
  virtual void begin_episode(std::size_t /*index*/, std::size_t /*total*/) {}
  virtual void learn(const ObservedTransition& /*tr*/) {}

  // False for agents trained by an outer loop (CEM) instead of per-step updates.
  virtual bool learns_online() const { return true; }

  virtual std::string snapshot() const = 0;
  // Throws DomainError on a malformed or mismatched snapshot.
  virtual void load_snapshot(std::string_view text) = 0;
};

/// Tabular Q-learning on observed rewards with linear epsilon decay.
class TabularQAgent : public Agent {
 public:
  struct Options {
    double alpha = 0.1;
    double gamma = 0.99;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
  };

  TabularQAgent(std::size_t states, std::size_t actions, Options options);
  TabularQAgent(std::size_t states, std::size_t actions) : TabularQAgent(states, actions, Options{}) {}

  std::string_view id() const override { return "tabular_q"; }
  ActionValue act(const StateValue& observed, Phase phase, Rng& rng) override;
  ActionValue greedy(const StateValue& observed) const override;
  void begin_episode(std::size_t index, std::size_t total) override;
  void learn(const ObservedTransition& tr) override;
  std::string snapshot() const override;
  void load_snapshot(std::string_view text) override;

  // Index-level primitives, also used by the team agent.
  std::size_t act_index(std::size_t s, Phase phase, Rng& rng) const;
  std::size_t greedy_index(std::size_t s) const;
  void update(std::size_t s, std::size_t a, double reward, std::size_t next, bool done);

  // Out-of-range indices are remapped by modulo.
  std::size_t state_index(const StateValue& v) const;

  double q(std::size_t s, std::size_t a) const { return table_.at(s * actions_ + a); }
  void set_q(std::size_t s, std::size_t a, double v) { table_.at(s * actions_ + a) = v; }
  double epsilon() const noexcept { return epsilon_; }
  void set_epsilon(double e) noexcept { epsilon_ = e; }
  std::size_t states() const noexcept { return states_; }
  std::size_t actions() const noexcept { return actions_; }
  const Options& options() const noexcept { return options_; }

 protected:
  // Learning signal derived from the observed reward and cost.
  virtual double signal(double reward, double /*cost*/) const { return reward; }

 private:
  std::size_t states_;
  std::size_t actions_;
  Options options_;
  double epsilon_;
  std::vector<double> table_;
};

/// Q-learning on observed reward minus lambda times observed cost.
class PenalizedQAgent : public TabularQAgent {
 public:
  PenalizedQAgent(std::size_t states, std::size_t actions, Options options, double lambda);

  std::string_view id() const override { return "penalized_q"; }
  double lambda() const noexcept { return lambda_; }

 protected:
  double signal(double reward, double cost) const override { return reward - lambda_ * cost; }

 private:
  double lambda_;
};

/// Linear pendulum controller u = clip(k1 * theta + k2 * theta_dot), with a
/// diagonal Gaussian search distribution over (k1, k2).
class CemPolicy : public Agent {
 public:
  struct Options {
    std::size_t population = 32;
    double elite_fraction = 0.25;
    std::vector<double> init_mean{0.0, 0.0};
    std::vector<double> init_std{5.0, 5.0};
    double max_torque = 2.0;
  };
  static constexpr double kStdFloor = 1e-3;

  explicit CemPolicy(Options options);
  CemPolicy() : CemPolicy(Options{}) {}

  std::string_view id() const override { return "cem"; }
  // Uses the parameters set by `use` (the mean unless a candidate is active).
  ActionValue act(const StateValue& observed, Phase phase, Rng& rng) override;
  ActionValue greedy(const StateValue& observed) const override;
  bool learns_online() const override { return false; }
  std::string snapshot() const override;
  void load_snapshot(std::string_view text) override;

  double torque(const Vector& gains, const StateValue& observed) const;

  const Vector& mean() const noexcept { return mean_; }
  const Vector& stddev() const noexcept { return std_; }
  void set_distribution(Vector mean, Vector stddev);
  const Options& options() const noexcept { return options_; }
  std::size_t elite_count() const noexcept;

  // Candidate gains used by `act`; `use_mean` reverts to the mean.
  void use(Vector gains) { active_ = std::move(gains); }
  void use_mean() { active_.reset(); }

 private:
  Options options_;
  Vector mean_;
  Vector std_;
  std::optional<Vector> active_;
};

// Scores one candidate's `episode`-th evaluation episode by its TRUE return.
using CandidateRunner = std::function<double(const CemPolicy& policy, std::size_t candidate, std::size_t episode)>;

struct CemStats {
  std::vector<Vector> candidates;
  std::vector<double> scores;  // mean true return per candidate
  double elite_mean_score = 0.0;
};

/// One CEM iteration: samples the population, scores each candidate over
/// `episodes_per_candidate` episodes, refits mean/std to the elite set with
/// std floored at 1e-3. When every candidate scores the same the elite set
/// carries no information: the mean stays put and the std halves (floored).
CemStats cem_iteration(CemPolicy& policy, const CandidateRunner& run, std::size_t episodes_per_candidate,
                       Rng& rng);

/// One independent Q-learner per agent; learner k sees only component k of
/// the observed joint state and picks component k of the joint action.
/// With known goal cells, a learner's own task ends when it is observed on
/// its goal: that transition is terminal for it and it stops updating while
/// it waits there for its partner.
class IndependentQTeam : public Agent {
 public:
  IndependentQTeam(std::size_t agents, std::size_t states, std::size_t actions, TabularQAgent::Options options,
                   std::vector<std::optional<std::size_t>> goals = {});

  std::string_view id() const override { return "independent_q"; }
  ActionValue act(const StateValue& observed, Phase phase, Rng& rng) override;
  ActionValue greedy(const StateValue& observed) const override;
  void begin_episode(std::size_t index, std::size_t total) override;
  void learn(const ObservedTransition& tr) override;
  std::string snapshot() const override;
  void load_snapshot(std::string_view text) override;

  const TabularQAgent& member(std::size_t k) const { return members_.at(k); }
  TabularQAgent& member(std::size_t k) { return members_.at(k); }
  std::size_t size() const noexcept { return members_.size(); }

 private:
  std::vector<TabularQAgent> members_;
  std::vector<std::optional<std::size_t>> goals_;
};

struct AgentOptions {
  std::string id = "tabular_q";
  TabularQAgent::Options q;
  double lambda = 1.0;
  CemPolicy::Options cem;
  std::size_t episodes_per_candidate = 1;

  bool operator==(const AgentOptions&) const;
};

const std::vector<std::string>& registered_agents();

// Throws ConfigError (key "agent.id" or the offending hyperparameter) when
// the agent is unknown, misconfigured or cannot drive `env`.
void validate_agent(const AgentOptions& options, const Environment& env);
std::unique_ptr<Agent> make_agent(const AgentOptions& options, const Environment& env);

}  // namespace rgym::agents

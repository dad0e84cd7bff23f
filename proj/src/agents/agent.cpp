#include "rgym/agents/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rgym/core/errors.hpp"
#include "rgym/core/format.hpp"
#include "rgym/envs/two_agent_grid.hpp"

namespace rgym::agents {

namespace {

constexpr std::string_view kQHeader = "rgym-qtable v1";
constexpr std::string_view kCemHeader = "rgym-cem v1";
constexpr std::string_view kTeamHeader = "rgym-team v1";

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_real(v[i]);
  }
  return out;
}

// Reads "<header>" then whitespace-separated tokens.
std::istringstream open_snapshot(std::string_view text, std::string_view header) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::getline(in, line);
  if (line != header) throw DomainError("snapshot: expected header '" + std::string(header) + "', got '" + line + "'");
  return in;
}

std::string token(std::istream& in, std::string_view what) {
  std::string t;
  if (!(in >> t)) throw DomainError("snapshot: missing " + std::string(what));
  return t;
}

void expect(std::istream& in, std::string_view word) {
  const std::string t = token(in, word);
  if (t != word) throw DomainError("snapshot: expected '" + std::string(word) + "', got '" + t + "'");
}

std::size_t read_count(std::istream& in, std::string_view what) {
  const double v = parse_real(token(in, what));
  if (v < 0 || v != std::floor(v)) throw DomainError("snapshot: bad " + std::string(what));
  return static_cast<std::size_t>(v);
}

std::vector<double> read_reals(std::istream& in, std::size_t n, std::string_view what) {
  std::vector<double> out(n);
  for (auto& x : out) x = parse_real(token(in, what));
  return out;
}

}  // namespace

TabularQAgent::TabularQAgent(std::size_t states, std::size_t actions, Options options)
    : states_(states), actions_(actions), options_(options), epsilon_(options.epsilon_start),
      table_(states * actions, 0.0) {
  if (states == 0 || actions == 0) throw DomainError("tabular agent needs non-empty state and action sets");
}

std::size_t TabularQAgent::state_index(const StateValue& v) const {
  if (!v.is_index()) throw DomainError("tabular agent needs a discrete state, got " + v.to_string());
  return v.as_index() % states_;
}

std::size_t TabularQAgent::greedy_index(std::size_t s) const {
  const auto row = table_.begin() + static_cast<std::ptrdiff_t>(s * actions_);
  return static_cast<std::size_t>(std::max_element(row, row + static_cast<std::ptrdiff_t>(actions_),
                                                   [](double a, double b) { return a < b; }) - row);
}

std::size_t TabularQAgent::act_index(std::size_t s, Phase phase, Rng& rng) const {
  if (phase == Phase::Train && rng.bernoulli(epsilon_)) return rng.index(actions_);
  return greedy_index(s);
}

ActionValue TabularQAgent::act(const StateValue& observed, Phase phase, Rng& rng) {
  return Value::index(act_index(state_index(observed), phase, rng));
}

ActionValue TabularQAgent::greedy(const StateValue& observed) const {
  return Value::index(greedy_index(state_index(observed)));
}

void TabularQAgent::begin_episode(std::size_t index, std::size_t total) {
  const double frac = total > 1 ? std::min(1.0, static_cast<double>(index) / static_cast<double>(total - 1)) : 1.0;
  epsilon_ = options_.epsilon_start + (options_.epsilon_end - options_.epsilon_start) * frac;
}

void TabularQAgent::update(std::size_t s, std::size_t a, double reward, std::size_t next, bool done) {
  double target = reward;
  if (!done) target += options_.gamma * q(next, greedy_index(next));
  double& cell = table_.at(s * actions_ + a);
  cell += options_.alpha * (target - cell);
}

void TabularQAgent::learn(const ObservedTransition& tr) {
  update(state_index(tr.state), tr.action.as_index() % actions_, signal(tr.reward, tr.cost),
         state_index(tr.next_state), tr.done);
}

std::string TabularQAgent::snapshot() const {
  std::string out(kQHeader);
  out += "\nstates " + std::to_string(states_) + " actions " + std::to_string(actions_) + "\n";
  for (std::size_t s = 0; s < states_; ++s) {
    out += join(std::vector<double>(table_.begin() + static_cast<std::ptrdiff_t>(s * actions_),
                                    table_.begin() + static_cast<std::ptrdiff_t>((s + 1) * actions_)));
    out += '\n';
  }
  return out;
}

void TabularQAgent::load_snapshot(std::string_view text) {
  auto in = open_snapshot(text, kQHeader);
  expect(in, "states");
  const std::size_t s = read_count(in, "state count");
  expect(in, "actions");
  const std::size_t a = read_count(in, "action count");
  if (s != states_ || a != actions_)
    throw DomainError("snapshot: table is " + std::to_string(s) + "x" + std::to_string(a) + ", agent expects " +
                      std::to_string(states_) + "x" + std::to_string(actions_));
  table_ = read_reals(in, s * a, "q value");
}

PenalizedQAgent::PenalizedQAgent(std::size_t states, std::size_t actions, Options options, double lambda)
    : TabularQAgent(states, actions, options), lambda_(lambda) {
  if (!(lambda >= 0.0)) throw DomainError("penalized agent needs lambda >= 0");
}

CemPolicy::CemPolicy(Options options) : options_(std::move(options)) {
  set_distribution(options_.init_mean, options_.init_std);
}

void CemPolicy::set_distribution(Vector mean, Vector stddev) {
  if (mean.size() != 2 || stddev.size() != 2) throw DomainError("cem distribution has two dimensions");
  mean_ = std::move(mean);
  std_ = std::move(stddev);
}

std::size_t CemPolicy::elite_count() const noexcept {
  const auto n = static_cast<std::size_t>(
      std::ceil(options_.elite_fraction * static_cast<double>(options_.population) - 1e-9));
  return std::clamp<std::size_t>(n, 1, options_.population);
}

double CemPolicy::torque(const Vector& gains, const StateValue& observed) const {
  const auto& x = observed.as_vector();
  const double u = gains[0] * x.at(0) + gains[1] * x.at(1);
  if (std::isnan(u)) return 0.0;
  return std::clamp(u, -options_.max_torque, options_.max_torque);
}

ActionValue CemPolicy::act(const StateValue& observed, Phase, Rng&) {
  return Value::vector({torque(active_ ? *active_ : mean_, observed)});
}

ActionValue CemPolicy::greedy(const StateValue& observed) const {
  return Value::vector({torque(mean_, observed)});
}

std::string CemPolicy::snapshot() const {
  return std::string(kCemHeader) + "\nmean " + join(mean_) + "\nstd " + join(std_) + "\n";
}

void CemPolicy::load_snapshot(std::string_view text) {
  auto in = open_snapshot(text, kCemHeader);
  expect(in, "mean");
  Vector mean = read_reals(in, 2, "mean");
  expect(in, "std");
  Vector sd = read_reals(in, 2, "std");
  set_distribution(std::move(mean), std::move(sd));
}

CemStats cem_iteration(CemPolicy& policy, const CandidateRunner& run, std::size_t episodes_per_candidate,
                       Rng& rng) {
  const std::size_t pop = policy.options().population;
  if (pop == 0 || episodes_per_candidate == 0) throw DomainError("cem needs a population and episodes");
  CemStats stats;
  for (std::size_t j = 0; j < pop; ++j) {
    Vector c(2);
    for (std::size_t d = 0; d < 2; ++d) c[d] = rng.normal(policy.mean()[d], policy.stddev()[d]);
    stats.candidates.push_back(std::move(c));
  }
  for (std::size_t j = 0; j < pop; ++j) {
    policy.use(stats.candidates[j]);
    double total = 0.0;
    for (std::size_t e = 0; e < episodes_per_candidate; ++e) total += run(policy, j, e);
    stats.scores.push_back(total / static_cast<double>(episodes_per_candidate));
  }
  policy.use_mean();

  std::vector<std::size_t> order(pop);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return stats.scores[a] > stats.scores[b]; });
  const std::size_t n_elite = policy.elite_count();
  for (std::size_t i = 0; i < n_elite; ++i) stats.elite_mean_score += stats.scores[order[i]];
  stats.elite_mean_score /= static_cast<double>(n_elite);

  const bool degenerate = pop > 1 && std::all_of(stats.scores.begin(), stats.scores.end(),
                                                 [&](double s) { return s == stats.scores.front(); });
  Vector mean = policy.mean();
  Vector sd = policy.stddev();
  for (std::size_t d = 0; d < 2; ++d) {
    if (degenerate) {
      sd[d] = std::max(CemPolicy::kStdFloor, 0.5 * sd[d]);
      continue;
    }
    double m = 0.0;
    for (std::size_t i = 0; i < n_elite; ++i) m += stats.candidates[order[i]][d];
    m /= static_cast<double>(n_elite);
    double var = 0.0;
    for (std::size_t i = 0; i < n_elite; ++i) {
      const double dev = stats.candidates[order[i]][d] - m;
      var += dev * dev;
    }
    mean[d] = m;
    sd[d] = std::max(CemPolicy::kStdFloor, std::sqrt(var / static_cast<double>(n_elite)));
  }
  policy.set_distribution(std::move(mean), std::move(sd));
  return stats;
}

IndependentQTeam::IndependentQTeam(std::size_t agents, std::size_t states, std::size_t actions,
                                   TabularQAgent::Options options, std::vector<std::optional<std::size_t>> goals)
    : goals_(std::move(goals)) {
  if (agents == 0) throw DomainError("team needs at least one agent");
  goals_.resize(agents);
  for (std::size_t k = 0; k < agents; ++k) members_.emplace_back(states, actions, options);
}

ActionValue IndependentQTeam::act(const StateValue& observed, Phase phase, Rng& rng) {
  const auto& s = observed.as_indices();
  IndexVector a(members_.size());
  for (std::size_t k = 0; k < members_.size(); ++k)
    a[k] = members_[k].act_index(s.at(k) % members_[k].states(), phase, rng);
  return Value::indices(std::move(a));
}

ActionValue IndependentQTeam::greedy(const StateValue& observed) const {
  const auto& s = observed.as_indices();
  IndexVector a(members_.size());
  for (std::size_t k = 0; k < members_.size(); ++k) a[k] = members_[k].greedy_index(s.at(k) % members_[k].states());
  return Value::indices(std::move(a));
}

void IndependentQTeam::begin_episode(std::size_t index, std::size_t total) {
  for (auto& m : members_) m.begin_episode(index, total);
}

void IndependentQTeam::learn(const ObservedTransition& tr) {
  const auto& s = tr.state.as_indices();
  const auto& a = tr.action.as_indices();
  const auto& next = tr.next_state.as_indices();
  for (std::size_t k = 0; k < members_.size(); ++k) {
    auto& m = members_[k];
    const std::size_t from = s.at(k) % m.states();
    const std::size_t to = next.at(k) % m.states();
    if (goals_[k] && from == *goals_[k]) continue;
    const bool done = tr.done || (goals_[k] && to == *goals_[k]);
    m.update(from, a.at(k) % m.actions(), tr.reward, to, done);
  }
}

std::string IndependentQTeam::snapshot() const {
  std::string out(kTeamHeader);
  out += "\nmembers " + std::to_string(members_.size()) + "\n";
  for (const auto& m : members_) out += m.snapshot();
  return out;
}

void IndependentQTeam::load_snapshot(std::string_view text) {
  auto in = open_snapshot(text, kTeamHeader);
  expect(in, "members");
  if (read_count(in, "member count") != members_.size()) throw DomainError("snapshot: team size mismatch");
  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // Members are concatenated q-table snapshots; split on their headers.
  std::vector<std::size_t> starts;
  for (std::size_t pos = rest.find(kQHeader); pos != std::string::npos; pos = rest.find(kQHeader, pos + 1))
    starts.push_back(pos);
  if (starts.size() != members_.size()) throw DomainError("snapshot: team size mismatch");
  starts.push_back(rest.size());
  for (std::size_t k = 0; k < members_.size(); ++k)
    members_[k].load_snapshot(std::string_view(rest).substr(starts[k], starts[k + 1] - starts[k]));
}

bool AgentOptions::operator==(const AgentOptions& o) const {
  const auto q_eq = [](const TabularQAgent::Options& a, const TabularQAgent::Options& b) {
    return a.alpha == b.alpha && a.gamma == b.gamma && a.epsilon_start == b.epsilon_start &&
           a.epsilon_end == b.epsilon_end;
  };
  const auto c_eq = [](const CemPolicy::Options& a, const CemPolicy::Options& b) {
    return a.population == b.population && a.elite_fraction == b.elite_fraction && a.init_mean == b.init_mean &&
           a.init_std == b.init_std && a.max_torque == b.max_torque;
  };
  return id == o.id && q_eq(q, o.q) && lambda == o.lambda && c_eq(cem, o.cem) &&
         episodes_per_candidate == o.episodes_per_candidate;
}

const std::vector<std::string>& registered_agents() {
  static const std::vector<std::string> ids{"tabular_q", "penalized_q", "cem", "independent_q"};
  return ids;
}

void validate_agent(const AgentOptions& o, const Environment& env) {
  if (std::find(registered_agents().begin(), registered_agents().end(), o.id) == registered_agents().end())
    throw ConfigError("agent.id", "unknown agent '" + o.id + "'");
  const SpaceSpec& s = env.state_space();
  const SpaceSpec& a = env.action_space();
  const auto incompatible = [&](const std::string& need) {
    throw ConfigError("agent.id", "agent '" + o.id + "' needs " + need + "; environment '" + std::string(env.id()) +
                                      "' has state " + s.describe() + " and action " + a.describe());
  };
  if (o.id == "tabular_q" || o.id == "penalized_q" || o.id == "independent_q") {
    if (o.id == "independent_q") {
      if (!s.is_multi_discrete() || !a.is_multi_discrete() || s.counts().size() != a.counts().size())
        incompatible("multi-agent discrete spaces");
    } else if (!s.is_discrete() || !a.is_discrete()) {
      incompatible("discrete state and action spaces");
    }
    if (!(o.q.alpha > 0.0 && o.q.alpha <= 1.0)) throw ConfigError("agent.alpha", "must lie in (0, 1]");
    if (!(o.q.gamma >= 0.0 && o.q.gamma <= 1.0)) throw ConfigError("agent.gamma", "must lie in [0, 1]");
    if (!(o.q.epsilon_start >= 0.0 && o.q.epsilon_start <= 1.0))
      throw ConfigError("agent.epsilon_start", "must lie in [0, 1]");
    if (!(o.q.epsilon_end >= 0.0 && o.q.epsilon_end <= 1.0))
      throw ConfigError("agent.epsilon_end", "must lie in [0, 1]");
    if (o.id == "penalized_q" && !(o.lambda >= 0.0)) throw ConfigError("agent.lambda", "must be >= 0");
    return;
  }
  if (!s.is_box() || s.dimension() != 2 || !a.is_box() || a.dimension() != 1)
    incompatible("a 2-dimensional box state and a 1-dimensional box action");
  if (o.cem.population == 0) throw ConfigError("agent.population", "must be >= 1");
  if (!(o.cem.elite_fraction > 0.0 && o.cem.elite_fraction <= 1.0))
    throw ConfigError("agent.elite_fraction", "must lie in (0, 1]");
  if (o.cem.init_mean.size() != 2) throw ConfigError("agent.init_mean", "needs two entries");
  if (o.cem.init_std.size() != 2) throw ConfigError("agent.init_std", "needs two entries");
  for (double x : o.cem.init_std)
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("agent.init_std", "entries must be finite and >= 0");
  for (double x : o.cem.init_mean)
    if (!std::isfinite(x)) throw ConfigError("agent.init_mean", "entries must be finite");
  if (o.episodes_per_candidate == 0) throw ConfigError("agent.episodes_per_candidate", "must be >= 1");
}

std::unique_ptr<Agent> make_agent(const AgentOptions& o, const Environment& env) {
  validate_agent(o, env);
  if (o.id == "tabular_q") return std::make_unique<TabularQAgent>(env.state_space().n(), env.action_space().n(), o.q);
  if (o.id == "penalized_q")
    return std::make_unique<PenalizedQAgent>(env.state_space().n(), env.action_space().n(), o.q, o.lambda);
  if (o.id == "independent_q") {
    const auto& sc = env.state_space().counts();
    const auto& ac = env.action_space().counts();
    std::vector<std::optional<std::size_t>> goals;
    if (const auto* grid = dynamic_cast<const envs::TwoAgentGrid*>(&env))
      goals.assign(grid->goals().begin(), grid->goals().end());
    return std::make_unique<IndependentQTeam>(sc.size(), *std::max_element(sc.begin(), sc.end()),
                                              *std::max_element(ac.begin(), ac.end()), o.q, std::move(goals));
  }
  auto cem = o.cem;
  cem.max_torque = env.action_space().high().at(0);
  return std::make_unique<CemPolicy>(cem);
}

}  // namespace rgym::agents

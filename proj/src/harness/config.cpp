#include "rgym/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "rgym/core/errors.hpp"
#include "rgym/core/format.hpp"

namespace rgym::harness {

using disrupt::DisruptorSpec;
using disrupt::Source;

std::string to_string(Protocol p) { return p == Protocol::InTraining ? "in_training" : "post_training"; }

namespace {

std::string line_of(const toml::node& n) { return " (line " + std::to_string(n.source().begin.line) + ")"; }

// One TOML table; remembers which keys were read so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const toml::table& table, std::string prefix) : table_(table), prefix_(std::move(prefix)) {}

  bool has(std::string_view key) const { return table_.contains(key); }

  const toml::node* node(std::string_view key) {
    const toml::node* n = table_.get(key);
    if (n) used_.insert(std::string(key));
    return n;
  }

  [[noreturn]] void fail(std::string_view key, const std::string& what, const toml::node* n = nullptr) const {
    if (!n) n = table_.get(key);
    throw ConfigError(prefix_ + std::string(key), what + (n ? line_of(*n) : line_of(table_)));
  }

  std::optional<std::string> string(std::string_view key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (!n->is_string()) fail(key, "expected a string", n);
    return n->value<std::string>();
  }

  std::string required_string(std::string_view key) {
    auto s = string(key);
    if (!s) fail(key, "is required");
    return *s;
  }

  static std::optional<double> number_of(const toml::node& n) {
    if (n.is_floating_point()) return n.value<double>();
    if (n.is_integer()) return static_cast<double>(*n.value<std::int64_t>());
    return std::nullopt;
  }

  std::optional<double> real(std::string_view key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    auto v = number_of(*n);
    if (!v) fail(key, "expected a number", n);
    return v;
  }

  double required_real(std::string_view key) {
    auto v = real(key);
    if (!v) fail(key, "is required");
    return *v;
  }

  static std::optional<std::uint64_t> count_of(const toml::node& n) {
    if (n.is_integer()) {
      const auto v = *n.value<std::int64_t>();
      if (v < 0) return std::nullopt;
      return static_cast<std::uint64_t>(v);
    }
    return std::nullopt;
  }

  std::optional<std::size_t> count(std::string_view key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    auto v = count_of(*n);
    if (!v) fail(key, "expected a non-negative integer", n);
    return static_cast<std::size_t>(*v);
  }

  std::size_t required_count(std::string_view key) {
    auto v = count(key);
    if (!v) fail(key, "is required");
    return *v;
  }

  // A number or an array of numbers.
  std::optional<Vector> reals(std::string_view key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = number_of(*n)) return Vector{*v};
    const toml::array* arr = n->as_array();
    if (!arr) fail(key, "expected a number or an array of numbers", n);
    Vector out;
    for (const toml::node& e : *arr) {
      auto v = number_of(e);
      if (!v) fail(key, "expected a number or an array of numbers", n);
      out.push_back(*v);
    }
    return out;
  }

  std::optional<IndexVector> counts(std::string_view key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const toml::array* arr = n->as_array();
    if (!arr) fail(key, "expected an array of non-negative integers", n);
    IndexVector out;
    for (const toml::node& e : *arr) {
      auto v = count_of(e);
      if (!v) fail(key, "expected an array of non-negative integers", n);
      out.push_back(static_cast<std::size_t>(*v));
    }
    return out;
  }

  const toml::table* table(std::string_view key) {
    const toml::node* n = node(key);
    if (!n) return nullptr;
    if (!n->is_table()) fail(key, "expected a table", n);
    return n->as_table();
  }

  // Keys present but never read.
  void finish() const {
    for (auto&& [k, n] : table_) {
      if (!used_.contains(std::string(k.str())))
        throw ConfigError(prefix_ + std::string(k.str()), "unknown key" + line_of(n));
    }
  }

  // Keys present in the table but not in `allowed` are reported as
  // inapplicable with `why`.
  void only(std::initializer_list<std::string_view> allowed, const std::string& why) const {
    for (auto&& [k, n] : table_) {
      if (std::find(allowed.begin(), allowed.end(), k.str()) == allowed.end())
        throw ConfigError(prefix_ + std::string(k.str()), "not used " + why + line_of(n));
    }
  }

  const std::string& prefix() const noexcept { return prefix_; }
  const toml::table& table_view() const noexcept { return table_; }

 private:
  const toml::table& table_;
  std::string prefix_;
  std::set<std::string> used_;
};

template <class Enum>
Enum pick(Section& s, std::string_view key, const std::string& text,
          std::initializer_list<std::pair<const char*, Enum>> choices) {
  std::string names;
  for (const auto& [name, value] : choices) {
    if (name == text) return value;
    names += names.empty() ? "" : ", ";
    names += name;
  }
  s.fail(key, "unknown value '" + text + "' (expected one of: " + names + ")");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

envs::EnvOptions parse_env(Section& s, const std::filesystem::path& base_dir) {
  envs::EnvOptions o;
  o.id = s.required_string("id");
  if (o.id == "windy_pendulum") {
    s.only({"id", "horizon"}, "by windy_pendulum");
  } else if (o.id == "two_agent_grid") {
    s.only({"id", "width", "height", "layout", "map_file", "horizon", "slip", "step_reward", "starts", "goals"},
           "by two_agent_grid");
  } else if (o.id == "grid_maze") {
    s.only({"id", "width", "height", "layout", "map_file", "horizon", "slip", "step_reward"}, "by grid_maze");
  } else if (o.id == "safe_grid_maze") {
    s.only({"id", "width", "height", "layout", "map_file", "horizon", "slip", "step_reward", "hazard_cost"},
           "by safe_grid_maze");
  } else {
    s.fail("id", "unknown environment '" + o.id + "'");
  }
  o.layout = s.string("layout");
  if (auto file = s.string("map_file")) {
    if (o.layout) s.fail("map_file", "give either layout or map_file, not both");
    try {
      o.layout = read_file(base_dir / *file);
    } catch (const ConfigError& e) {
      s.fail("map_file", e.what());
    }
  }
  o.width = s.count("width");
  o.height = s.count("height");
  if (o.layout && (o.width || o.height)) s.fail(o.width ? "width" : "height", "not used together with a layout");
  o.horizon = s.count("horizon");
  o.slip = s.real("slip");
  o.step_reward = s.real("step_reward");
  o.hazard_cost = s.real("hazard_cost");
  for (auto [key, field] : {std::pair{"starts", &o.starts}, std::pair{"goals", &o.goals}}) {
    if (auto v = s.counts(key)) {
      if (v->size() != 2) s.fail(key, "needs one cell index per agent (2)");
      *field = std::array<std::size_t, 2>{(*v)[0], (*v)[1]};
    }
  }
  s.finish();
  return o;
}

agents::AgentOptions parse_agent(Section& s, std::optional<std::string>& load) {
  agents::AgentOptions o;
  o.id = s.required_string("id");
  if (o.id == "tabular_q" || o.id == "independent_q") {
    s.only({"id", "alpha", "gamma", "epsilon_start", "epsilon_end", "load"}, "by " + o.id);
  } else if (o.id == "penalized_q") {
    s.only({"id", "alpha", "gamma", "epsilon_start", "epsilon_end", "lambda", "load"}, "by penalized_q");
  } else if (o.id == "cem") {
    s.only({"id", "population", "elite_fraction", "init_mean", "init_std", "episodes_per_candidate", "load"},
           "by cem");
  } else {
    s.fail("id", "unknown agent '" + o.id + "'");
  }
  if (auto v = s.real("alpha")) o.q.alpha = *v;
  if (auto v = s.real("gamma")) o.q.gamma = *v;
  if (auto v = s.real("epsilon_start")) o.q.epsilon_start = *v;
  if (auto v = s.real("epsilon_end")) o.q.epsilon_end = *v;
  if (auto v = s.real("lambda")) o.lambda = *v;
  if (auto v = s.count("population")) o.cem.population = *v;
  if (auto v = s.real("elite_fraction")) o.cem.elite_fraction = *v;
  if (auto v = s.reals("init_mean")) o.cem.init_mean = *v;
  if (auto v = s.reals("init_std")) o.cem.init_std = *v;
  if (auto v = s.count("episodes_per_candidate")) o.episodes_per_candidate = *v;
  load = s.string("load");
  s.finish();
  return o;
}

disrupt::ParamRule parse_rule(Section& s) {
  const std::string rule = s.required_string("rule");
  if (rule == "constant") {
    s.only({"rule", "value"}, "by rule constant");
    return disrupt::ConstantRule{s.required_real("value")};
  }
  if (rule == "uniform") {
    s.only({"rule", "lo", "hi", "at"}, "by rule uniform");
    disrupt::UniformDrawRule u;
    u.lo = s.required_real("lo");
    u.hi = s.required_real("hi");
    if (auto at = s.string("at"))
      u.at = pick(s, "at", *at, {std::pair{"episode_start", disrupt::DrawAt::EpisodeStart},
                                 std::pair{"step", disrupt::DrawAt::Step}});
    return u;
  }
  if (rule == "sinusoid") {
    s.only({"rule", "base", "amp", "freq", "index"}, "by rule sinusoid");
    disrupt::SinusoidRule r;
    r.base = s.required_real("base");
    r.amp = s.required_real("amp");
    r.freq = s.required_real("freq");
    if (auto idx = s.string("index"))
      r.index = pick(s, "index", *idx, {std::pair{"episode", disrupt::SinusoidIndex::Episode},
                                        std::pair{"step", disrupt::SinusoidIndex::Step}});
    return r;
  }
  s.fail("rule", "unknown rule '" + rule + "' (expected one of: constant, uniform, sinusoid)");
}

disrupt::Schedule parse_schedule(Section& s) {
  using K = disrupt::Schedule::Kind;
  disrupt::Schedule sc;
  const std::string kind = s.string("schedule").value_or("every_step");
  sc.kind = pick(s, "schedule", kind,
                 {std::pair{"every_step", K::EveryStep}, std::pair{"every_k", K::EveryK},
                  std::pair{"per_episode", K::PerEpisode}, std::pair{"bernoulli", K::Bernoulli},
                  std::pair{"episode_window", K::EpisodeWindow}, std::pair{"never", K::Never}});
  const auto forbid = [&](std::string_view key, bool used) {
    if (s.has(key) && !used) s.fail(key, "not used by schedule " + kind);
  };
  forbid("k", sc.kind == K::EveryK);
  forbid("q", sc.kind == K::Bernoulli);
  forbid("from", sc.kind == K::EpisodeWindow);
  forbid("to", sc.kind == K::EpisodeWindow);
  if (sc.kind == K::EveryK) sc.k = s.required_count("k");
  if (sc.kind == K::Bernoulli) sc.q = s.required_real("q");
  if (sc.kind == K::EpisodeWindow) {
    sc.from = s.required_count("from");
    sc.to = s.required_count("to");
  }
  if (auto ph = s.string("phase"))
    sc.phase = pick(s, "phase", *ph,
                    {std::pair{"train_only", disrupt::PhaseGate::TrainOnly},
                     std::pair{"eval_only", disrupt::PhaseGate::EvalOnly}, std::pair{"both", disrupt::PhaseGate::Both}});
  return sc;
}

DisruptorSpec parse_disruptor(Section& s, std::size_t index) {
  DisruptorSpec d;
  d.id = s.string("id").value_or("d" + std::to_string(index));
  const std::string source = s.required_string("source");
  d.source = pick(s, "source", source,
                  {std::pair{"state", Source::State}, std::pair{"reward", Source::Reward},
                   std::pair{"cost", Source::Cost}, std::pair{"action", Source::Action},
                   std::pair{"env_params", Source::EnvParams}});
  const std::string mode = s.required_string("mode");
  std::vector<std::string_view> keys{"id", "source", "mode", "schedule", "k", "q", "from", "to", "phase", "agents"};
  const auto check_keys = [&](std::initializer_list<std::string_view> extra, const std::string& why) {
    for (auto&& [k, n] : s.table_view()) {
      const auto ks = k.str();
      if (std::find(keys.begin(), keys.end(), ks) == keys.end() &&
          std::find(extra.begin(), extra.end(), ks) == extra.end())
        s.fail(ks, "not used " + why, &n);
    }
  };
  if (mode == "random") {
    const std::string noise = s.required_string("noise");
    if (noise == "gaussian") {
      check_keys({"noise", "mu", "sigma"}, "by gaussian noise");
      d.mode = disrupt::RandomMode{disrupt::GaussianNoise{s.real("mu").value_or(0.0), s.required_real("sigma")}};
    } else if (noise == "uniform") {
      check_keys({"noise", "a", "b"}, "by uniform noise");
      const double a = s.required_real("a");
      d.mode = disrupt::RandomMode{disrupt::UniformNoise{a, s.required_real("b")}};
    } else if (noise == "discrete_replace") {
      check_keys({"noise", "p"}, "by discrete_replace noise");
      d.mode = disrupt::RandomMode{disrupt::DiscreteReplace{s.required_real("p")}};
    } else {
      s.fail("noise", "unknown noise '" + noise + "' (expected one of: gaussian, uniform, discrete_replace)");
    }
  } else if (mode == "adversarial") {
    disrupt::AdversarialMode a;
    a.adversary.kind = s.required_string("adversary");
    if (a.adversary.kind == "greedy") {
      check_keys({"adversary", "region_low", "region_high", "task", "candidates"}, "by the greedy adversary");
    } else if (a.adversary.kind == "external") {
      check_keys({"adversary", "region_low", "region_high", "task", "command", "timeout"},
                 "by the external adversary");
    } else if (a.adversary.kind == "random_in_set") {
      check_keys({"adversary", "region_low", "region_high", "task"}, "by the random_in_set adversary");
    } else {
      s.fail("adversary", "unknown adversary '" + a.adversary.kind +
                              "' (expected one of: random_in_set, greedy, external)");
    }
    auto lo = s.reals("region_low");
    auto hi = s.reals("region_high");
    if (!lo) s.fail("region_low", "is required");
    if (!hi) s.fail("region_high", "is required");
    a.region_low = *lo;
    a.region_high = *hi;
    a.task = s.string("task").value_or("");
    if (auto c = s.count("candidates")) a.adversary.candidates = *c;
    a.adversary.endpoint = s.string("command").value_or("");
    if (auto t = s.real("timeout")) a.adversary.timeout_s = *t;
    d.mode = std::move(a);
  } else if (mode == "internal_shift" || mode == "external") {
    check_keys({"params"}, "by mode " + mode);
    const toml::table* params = s.table("params");
    if (!params) s.fail("params", "is required");
    disrupt::ParamSchedule ps;
    for (auto&& [name, n] : *params) {
      const toml::table* t = n.as_table();
      const std::string key = "params." + std::string(name.str());
      if (!t) s.fail(key, "expected a table", &n);
      Section rs(*t, s.prefix() + key + ".");
      ps[std::string(name.str())] = parse_rule(rs);
      rs.finish();
    }
    if (mode == "internal_shift") {
      d.mode = disrupt::InternalShiftMode{std::move(ps)};
    } else {
      d.mode = disrupt::ExternalMode{std::move(ps)};
    }
  } else {
    s.fail("mode", "unknown mode '" + mode + "' (expected one of: random, adversarial, internal_shift, external)");
  }
  d.schedule = parse_schedule(s);
  d.agent_mask = s.counts("agents");
  s.finish();
  return d;
}

std::uint64_t parse_seed(std::string_view text, const std::string& key) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != end)
    throw ConfigError(key, "'" + std::string(text) + "' is not an unsigned 64-bit seed");
  return v;
}

void parse_harness(Section& s, RunConfig& c) {
  if (const toml::node* n = s.node("seeds")) {
    const toml::array* arr = n->as_array();
    if (!arr) s.fail("seeds", "expected an array of seeds", n);
    c.seeds.clear();
    for (const toml::node& e : *arr) {
      if (auto v = Section::count_of(e)) {
        c.seeds.push_back(*v);
      } else if (e.is_string()) {
        try {
          c.seeds.push_back(parse_seed(*e.value<std::string>(), "harness.seeds"));
        } catch (const ConfigError& err) {
          s.fail("seeds", err.detail(), n);
        }
      } else {
        s.fail("seeds", "seeds are non-negative integers (or decimal strings)", n);
      }
    }
  }
  if (auto v = s.real("cvar_alpha")) c.cvar_alpha = *v;
  c.horizon = s.count("horizon");
  if (auto v = s.string("output")) c.output = *v;
  c.workers = s.count("workers");
  if (const toml::table* grid = s.table("eval_param_grid")) {
    Section gs(*grid, "harness.eval_param_grid.");
    for (auto&& [name, n] : *grid) {
      auto v = gs.reals(name.str());
      c.eval_param_grid[std::string(name.str())] = *v;
    }
  }
  s.finish();
}

void parse_protocol(Section& s, RunConfig& c) {
  if (auto k = s.string("kind"))
    c.protocol = pick(s, "kind", *k,
                      {std::pair{"in_training", Protocol::InTraining}, std::pair{"post_training", Protocol::PostTraining}});
  if (auto v = s.count("train_episodes")) c.train_episodes = *v;
  if (auto v = s.count("eval_episodes")) c.eval_episodes = *v;
  s.finish();
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError("line " + std::to_string(e.source().begin.line) + ": " + std::string(e.description()));
  }
  RunConfig c;
  Section top(root, "");
  const auto section = [&](std::string_view key, bool required) -> const toml::table* {
    const toml::table* t = top.table(key);
    if (!t && required) throw ConfigError(std::string(key), "section [" + std::string(key) + "] is required");
    return t;
  };
  if (const toml::table* t = section("env", true)) {
    Section s(*t, "env.");
    c.env = parse_env(s, base_dir);
  }
  if (const toml::table* t = section("agent", true)) {
    Section s(*t, "agent.");
    c.agent = parse_agent(s, c.agent_load);
  }
  if (const toml::node* n = top.node("disruptor")) {
    const toml::array* arr = n->as_array();
    if (!arr || !arr->is_array_of_tables()) top.fail("disruptor", "expected [[disruptor]] tables", n);
    for (std::size_t i = 0; i < arr->size(); ++i) {
      Section s(*arr->get(i)->as_table(), "disruptor[" + std::to_string(i) + "].");
      c.disruptors.push_back(parse_disruptor(s, i));
    }
  }
  if (const toml::table* t = section("protocol", false)) {
    Section s(*t, "protocol.");
    parse_protocol(s, c);
  }
  if (const toml::table* t = section("harness", false)) {
    Section s(*t, "harness.");
    parse_harness(s, c);
  }
  top.finish();

  if (c.agent_load && !base_dir.empty() && std::filesystem::path(*c.agent_load).is_relative())
    c.agent_load = (base_dir / *c.agent_load).string();

  try {
    validate_config(c);
  } catch (const ConfigError& e) {
    // Point at the offending line when the key exists in the file.
    const toml::node_view<const toml::node> n = toml::at_path(std::as_const(root), e.key());
    if (!e.key().empty() && n) throw ConfigError(e.key(), e.detail() + line_of(*n.node()));
    throw;
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

std::unique_ptr<Environment> make_config_environment(const RunConfig& c) {
  envs::EnvOptions o = c.env;
  if (c.horizon) o.horizon = c.horizon;
  try {
    return envs::make_environment(o);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("env", e.what());
  }
}

std::vector<DisruptorSpec> gated_disruptors(const RunConfig& c) {
  std::vector<DisruptorSpec> out = c.disruptors;
  if (c.protocol == Protocol::InTraining) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& g = out[i].schedule.phase;
    if (g == disrupt::PhaseGate::TrainOnly)
      throw ConfigError("disruptor[" + std::to_string(i) + "].phase",
                        "train_only contradicts protocol post_training (disruptors only act during evaluation)");
    g = disrupt::PhaseGate::EvalOnly;
  }
  return out;
}

void validate_config(const RunConfig& c) {
  if (c.seeds.empty()) throw ConfigError("harness.seeds", "needs at least one seed");
  if (c.eval_episodes < 1) throw ConfigError("protocol.eval_episodes", "must be >= 1");
  if (!(c.cvar_alpha > 0.0 && c.cvar_alpha <= 1.0)) throw ConfigError("harness.cvar_alpha", "must lie in (0, 1]");
  if (c.horizon && *c.horizon < 1) throw ConfigError("harness.horizon", "must be >= 1");
  if (c.env.horizon && *c.env.horizon < 1) throw ConfigError("env.horizon", "must be >= 1");
  if (c.workers && *c.workers < 1) throw ConfigError("harness.workers", "must be >= 1");
  if (c.output.empty()) throw ConfigError("harness.output", "must not be empty");
  if (c.env.slip && !(*c.env.slip >= 0.0 && *c.env.slip <= 1.0)) throw ConfigError("env.slip", "must lie in [0, 1]");
  if (c.env.step_reward && !std::isfinite(*c.env.step_reward)) throw ConfigError("env.step_reward", "must be finite");
  if (c.env.hazard_cost && !(*c.env.hazard_cost >= 0.0 && std::isfinite(*c.env.hazard_cost)))
    throw ConfigError("env.hazard_cost", "must be finite and >= 0");
  if ((c.env.width && *c.env.width < 1) || (c.env.height && *c.env.height < 1))
    throw ConfigError(c.env.width && *c.env.width < 1 ? "env.width" : "env.height", "must be >= 1");

  const auto env = make_config_environment(c);
  agents::validate_agent(c.agent, *env);
  disrupt::validate_disruptors(gated_disruptors(c), *env);
  for (const auto& [name, values] : c.eval_param_grid) {
    const std::string key = "harness.eval_param_grid." + name;
    if (!env->params().contains(name)) throw ConfigError(key, "unknown parameter for " + std::string(env->id()));
    if (values.empty()) throw ConfigError(key, "needs at least one value");
    for (double v : values)
      if (!std::isfinite(v)) throw ConfigError(key, "values must be finite");
  }
  if (c.agent_load && !std::filesystem::is_regular_file(*c.agent_load))
    throw ConfigError("agent.load", "no such snapshot file '" + *c.agent_load + "'");
}

namespace {

std::string toml_string(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(ch));
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

std::string toml_real(double x) {
  std::string s = format_real(x);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::string toml_reals(const Vector& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + toml_real(v[i]);
  return out + "]";
}

template <class Seq>
std::string toml_counts(const Seq& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out + "]";
}

class Writer {
 public:
  void section(std::string_view header) {
    if (!out_.empty()) out_ += '\n';
    out_ += header;
    out_ += '\n';
  }
  void raw(std::string_view key, const std::string& value) { out_ += std::string(key) + " = " + value + "\n"; }
  void str(std::string_view key, std::string_view v) { raw(key, toml_string(v)); }
  void real(std::string_view key, double v) { raw(key, toml_real(v)); }
  void count(std::string_view key, std::uint64_t v) { raw(key, std::to_string(v)); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

std::string_view schedule_kind_name(disrupt::Schedule::Kind k) {
  using K = disrupt::Schedule::Kind;
  switch (k) {
    case K::EveryStep: return "every_step";
    case K::EveryK: return "every_k";
    case K::PerEpisode: return "per_episode";
    case K::Bernoulli: return "bernoulli";
    case K::EpisodeWindow: return "episode_window";
    case K::Never: return "never";
  }
  return "every_step";
}

void write_disruptor(Writer& w, const DisruptorSpec& d) {
  w.section("[[disruptor]]");
  w.str("id", d.id);
  w.str("source", disrupt::to_string(d.source));
  w.str("mode", disrupt::mode_name(d.mode));
  if (const auto* r = std::get_if<disrupt::RandomMode>(&d.mode)) {
    w.str("noise", disrupt::noise_name(r->noise));
    if (const auto* g = std::get_if<disrupt::GaussianNoise>(&r->noise)) {
      w.real("mu", g->mu);
      w.real("sigma", g->sigma);
    } else if (const auto* u = std::get_if<disrupt::UniformNoise>(&r->noise)) {
      w.real("a", u->a);
      w.real("b", u->b);
    } else {
      w.real("p", std::get<disrupt::DiscreteReplace>(r->noise).p);
    }
  } else if (const auto* a = std::get_if<disrupt::AdversarialMode>(&d.mode)) {
    w.str("adversary", a->adversary.kind);
    w.raw("region_low", toml_reals(a->region_low));
    w.raw("region_high", toml_reals(a->region_high));
    if (!a->task.empty()) w.str("task", a->task);
    if (a->adversary.kind == "greedy") w.count("candidates", a->adversary.candidates);
    if (a->adversary.kind == "external") {
      w.str("command", a->adversary.endpoint);
      w.real("timeout", a->adversary.timeout_s);
    }
  }
  const auto& s = d.schedule;
  w.str("schedule", schedule_kind_name(s.kind));
  if (s.kind == disrupt::Schedule::Kind::EveryK) w.count("k", s.k);
  if (s.kind == disrupt::Schedule::Kind::Bernoulli) w.real("q", s.q);
  if (s.kind == disrupt::Schedule::Kind::EpisodeWindow) {
    w.count("from", s.from);
    w.count("to", s.to);
  }
  w.str("phase", disrupt::to_string(s.phase));
  if (d.agent_mask) w.raw("agents", toml_counts(*d.agent_mask));
  if (const auto* ps = d.param_schedule()) {
    for (const auto& [name, rule] : *ps) {
      w.section("[disruptor.params." + name + "]");
      w.str("rule", disrupt::rule_name(rule));
      if (const auto* k = std::get_if<disrupt::ConstantRule>(&rule)) {
        w.real("value", k->value);
      } else if (const auto* u = std::get_if<disrupt::UniformDrawRule>(&rule)) {
        w.real("lo", u->lo);
        w.real("hi", u->hi);
        w.str("at", u->at == disrupt::DrawAt::EpisodeStart ? "episode_start" : "step");
      } else {
        const auto& r = std::get<disrupt::SinusoidRule>(rule);
        w.real("base", r.base);
        w.real("amp", r.amp);
        w.real("freq", r.freq);
        w.str("index", r.index == disrupt::SinusoidIndex::Episode ? "episode" : "step");
      }
    }
  }
}

}  // namespace

std::string to_toml(const RunConfig& c) {
  Writer w;
  w.section("[env]");
  const auto& e = c.env;
  w.str("id", e.id);
  if (e.layout) w.str("layout", *e.layout);
  if (e.width) w.count("width", *e.width);
  if (e.height) w.count("height", *e.height);
  if (e.horizon) w.count("horizon", *e.horizon);
  if (e.slip) w.real("slip", *e.slip);
  if (e.step_reward) w.real("step_reward", *e.step_reward);
  if (e.hazard_cost) w.real("hazard_cost", *e.hazard_cost);
  if (e.starts) w.raw("starts", toml_counts(*e.starts));
  if (e.goals) w.raw("goals", toml_counts(*e.goals));

  w.section("[agent]");
  const auto& a = c.agent;
  w.str("id", a.id);
  if (a.id == "cem") {
    w.count("population", a.cem.population);
    w.real("elite_fraction", a.cem.elite_fraction);
    w.raw("init_mean", toml_reals(a.cem.init_mean));
    w.raw("init_std", toml_reals(a.cem.init_std));
    w.count("episodes_per_candidate", a.episodes_per_candidate);
  } else {
    w.real("alpha", a.q.alpha);
    w.real("gamma", a.q.gamma);
    w.real("epsilon_start", a.q.epsilon_start);
    w.real("epsilon_end", a.q.epsilon_end);
    if (a.id == "penalized_q") w.real("lambda", a.lambda);
  }
  if (c.agent_load) w.str("load", *c.agent_load);

  for (const auto& d : c.disruptors) write_disruptor(w, d);

  w.section("[protocol]");
  w.str("kind", to_string(c.protocol));
  w.count("train_episodes", c.train_episodes);
  w.count("eval_episodes", c.eval_episodes);

  w.section("[harness]");
  std::string seeds = "[";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) {
    seeds += i ? ", " : "";
    const auto s = c.seeds[i];
    seeds += s <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) ? std::to_string(s)
                                                                                      : toml_string(std::to_string(s));
  }
  w.raw("seeds", seeds + "]");
  w.real("cvar_alpha", c.cvar_alpha);
  if (c.horizon) w.count("horizon", *c.horizon);
  w.str("output", c.output);
  if (c.workers) w.count("workers", *c.workers);
  if (!c.eval_param_grid.empty()) {
    w.section("[harness.eval_param_grid]");
    for (const auto& [name, values] : c.eval_param_grid) w.raw(name, toml_reals(values));
  }
  return w.take();
}

std::string set_config_value(std::string_view text, std::string_view dotted, std::string_view value) {
  const std::string key(dotted);
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError("line " + std::to_string(e.source().begin.line) + ": " + std::string(e.description()));
  }
  // Walk the dotted path; numeric segments index arrays.
  toml::node* parent = &root;
  toml::node* target = nullptr;
  std::string last;
  std::size_t pos = 0;
  while (pos <= dotted.size()) {
    const std::size_t dot = std::min(dotted.find('.', pos), dotted.size());
    const std::string seg(dotted.substr(pos, dot - pos));
    if (seg.empty()) throw ConfigError(key, "empty path segment");
    if (target) parent = target;
    target = nullptr;
    if (auto* t = parent->as_table()) {
      target = t->get(seg);
    } else if (auto* arr = parent->as_array()) {
      std::size_t idx = 0;
      const auto res = std::from_chars(seg.data(), seg.data() + seg.size(), idx);
      if (res.ec == std::errc() && res.ptr == seg.data() + seg.size()) target = arr->get(idx);
    }
    if (!target) throw ConfigError(key, "does not resolve inside the config");
    last = seg;
    pos = dot + 1;
  }
  toml::node* replacement_slot = target;
  const auto fail_type = [&](const std::string& type) -> void {
    throw ConfigError(key, "value '" + std::string(value) + "' is not a valid " + type);
  };
  if (replacement_slot->is_integer()) {
    std::int64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size()) fail_type("integer");
    *replacement_slot->as_integer() = v;
  } else if (replacement_slot->is_floating_point()) {
    double v = 0.0;
    try {
      v = parse_real(value);
    } catch (const DomainError&) {
      fail_type("number");
    }
    *replacement_slot->as_floating_point() = v;
  } else if (replacement_slot->is_string()) {
    *replacement_slot->as_string() = std::string(value);
  } else if (replacement_slot->is_boolean()) {
    if (value != "true" && value != "false") fail_type("boolean");
    *replacement_slot->as_boolean() = value == "true";
  } else {
    throw ConfigError(key, "only scalar values can be swept");
  }
  std::ostringstream out;
  out << root;
  return out.str();
}

double read_cvar_alpha(std::string_view text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError("line " + std::to_string(e.source().begin.line) + ": " + std::string(e.description()));
  }
  const auto n = root.at_path("harness.cvar_alpha");
  if (!n) return 0.1;
  if (auto v = n.value<double>()) return *v;
  throw ConfigError("harness.cvar_alpha", "expected a number");
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text, const std::string& key) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view tok = text.substr(pos, comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    out.push_back(parse_seed(tok, key));
    pos = comma + 1;
  }
  return out;
}

}  // namespace rgym::harness

#include "rgym/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rgym/core/errors.hpp"
#include "rgym/core/format.hpp"
#include "rgym/version.hpp"

namespace rgym::harness {

using disrupt::Phase;
using disrupt::Pipeline;

EpisodeResult run_episode(Pipeline& pipeline, agents::Agent& agent, Rng& agent_rng, std::uint64_t env_seed,
                          std::size_t episode, Phase phase, bool learn, bool keep_transcripts) {
  EpisodeResult res;
  EpisodeRecord& rec = res.record;
  rec.episode = episode;
  rec.phase = disrupt::to_string(phase);
  try {
    pipeline.reset(env_seed, episode, phase);
    while (!pipeline.episode_over()) {
      const StateValue s = pipeline.observe().state;
      const ActionValue a = agent.act(s, phase, agent_rng);
      StepTranscript tr = pipeline.act(a);
      rec.return_true += tr.true_reward;
      rec.return_observed += tr.observed_reward;
      rec.cost_true += tr.true_cost;
      rec.steps += 1;
      rec.fired_count += tr.fired.size();
      rec.clamp_count += tr.clamp_count;
      if (learn) {
        const disrupt::Observation& next = pipeline.observe();
        agent.learn({s, a, next.reward, next.cost, next.state, tr.terminated});
      }
      if (keep_transcripts) res.transcripts.push_back(std::move(tr));
    }
  } catch (const disrupt::PipelineError& e) {
    throw EpisodeError(e.what(), rec, e.partial());
  }
  return res;
}

SeedStreams::SeedStreams(std::uint64_t run_seed)
    : env(Rng(run_seed).split("env")),
      disruptor_seed(Rng(run_seed).split("disruptors").next_u64()),
      agent(Rng(run_seed).split("agent")) {}

std::uint64_t SeedStreams::env_seed(std::string_view phase, std::size_t episode) const {
  return env.split(phase).split(episode).next_u64();
}

namespace {

// Cartesian product of the grid in name order, last name varying fastest.
std::vector<ParamMap> grid_points(const std::map<std::string, std::vector<double>>& grid) {
  std::vector<ParamMap> points{ParamMap{}};
  for (const auto& [name, values] : grid) {
    std::vector<ParamMap> next;
    for (const auto& p : points) {
      for (double v : values) {
        ParamMap q = p;
        q[name] = v;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

SeedResult run_seed(const RunConfig& config, std::uint64_t seed) {
  SeedResult out;
  out.seed = seed;
  const SeedStreams streams(seed);

  auto env = make_config_environment(config);
  env->restore_nominal_params();
  auto agent = agents::make_agent(config.agent, *env);
  if (config.agent_load) {
    try {
      agent->load_snapshot(read_text(*config.agent_load));
    } catch (const DomainError& e) {
      throw Error("agent.load: " + std::string(e.what()));
    }
  }
  Pipeline pipeline(std::move(env), gated_disruptors(config), streams.disruptor_seed);
  agents::Agent* raw = agent.get();
  pipeline.set_probe([raw](const StateValue& s) { return raw->greedy(s); });
  Rng agent_rng = streams.agent;

  const auto keep = [&](EpisodeRecord rec, std::string phase) {
    rec.seed = seed;
    rec.phase = std::move(phase);
    out.records.push_back(std::move(rec));
  };

  std::size_t episode = 0;
  pipeline.env().restore_nominal_params();
  if (agent->learns_online()) {
    for (std::size_t i = 0; i < config.train_episodes; ++i, ++episode) {
      agent->begin_episode(i, config.train_episodes);
      auto res = run_episode(pipeline, *agent, agent_rng, streams.env_seed("train", episode), episode, Phase::Train, true);
      keep(std::move(res.record), "train");
    }
  } else {
    auto& cem = dynamic_cast<agents::CemPolicy&>(*agent);
    const std::size_t per_iteration = cem.options().population * config.agent.episodes_per_candidate;
    const std::size_t iterations = config.train_episodes / per_iteration;
    const agents::CandidateRunner runner = [&](const agents::CemPolicy&, std::size_t, std::size_t) {
      auto res = run_episode(pipeline, cem, agent_rng, streams.env_seed("train", episode), episode, Phase::Train, false);
      ++episode;
      const double r = res.record.return_true;
      keep(std::move(res.record), "train");
      return r;
    };
    for (std::size_t it = 0; it < iterations; ++it)
      agents::cem_iteration(cem, runner, config.agent.episodes_per_candidate, agent_rng);
  }

  pipeline.env().restore_nominal_params();
  for (std::size_t j = 0; j < config.eval_episodes; ++j) {
    agent->begin_episode(config.train_episodes, config.train_episodes);
    auto res = run_episode(pipeline, *agent, agent_rng, streams.env_seed("eval", j), episode + j, Phase::Eval, false);
    keep(std::move(res.record), "eval");
  }

  // Frozen policy, disruptors off: nominal parameters, then every grid point.
  const auto clean_eval = [&](const ParamMap& params, const std::string& label) {
    auto clean_env = make_config_environment(config);
    clean_env->restore_nominal_params();
    clean_env->set_params(params);
    Pipeline clean(std::move(clean_env), {}, streams.disruptor_seed);
    for (std::size_t j = 0; j < config.eval_episodes; ++j) {
      auto res = run_episode(clean, *agent, agent_rng, streams.env_seed("eval", j), episode + j, Phase::Eval, false);
      keep(std::move(res.record), label);
    }
  };
  clean_eval({}, "nominal");
  if (!config.eval_param_grid.empty()) {
    const auto points = grid_points(config.eval_param_grid);
    for (std::size_t k = 0; k < points.size(); ++k) clean_eval(points[k], "shift:" + std::to_string(k));
  }

  out.policy_snapshot = agent->snapshot();
  out.summary = summarize_seed(out.records, seed, config.cvar_alpha);
  return out;
}

MetricsSummary summarize_seed(const std::vector<EpisodeRecord>& records, std::uint64_t seed, double cvar_alpha) {
  MetricsSummary m;
  m.label = std::to_string(seed);
  std::vector<double> eval;
  double nominal_sum = 0.0;
  std::size_t nominal_n = 0;
  std::map<std::size_t, std::pair<double, std::size_t>> shifts;
  for (const auto& r : records) {
    if (r.seed != seed) continue;
    if (r.phase == "eval") {
      eval.push_back(r.return_true);
      m.total_cost += r.cost_true;
      m.fired_count += r.fired_count;
      m.clamp_count += r.clamp_count;
    } else if (r.phase == "nominal") {
      nominal_sum += r.return_true;
      ++nominal_n;
    } else if (r.phase.starts_with("shift:")) {
      auto& [sum, n] = shifts[std::stoul(r.phase.substr(6))];
      sum += r.return_true;
      ++n;
    }
  }
  if (eval.empty()) throw DomainError("seed " + m.label + " has no evaluation episodes");
  const ReturnStats st = compute_metrics(eval, cvar_alpha);
  m.episodes = eval.size();
  m.mean_return = st.mean;
  m.std_return = st.std;
  m.min_return = st.min;
  m.cvar_return = st.cvar;
  m.ci95_return = st.ci95;
  m.nominal_return = nominal_n ? nominal_sum / static_cast<double>(nominal_n) : 0.0;
  if (!shifts.empty()) {
    double worst = INFINITY;
    double total = 0.0;
    for (const auto& [k, sn] : shifts) {
      const double mean = sn.first / static_cast<double>(sn.second);
      worst = std::min(worst, mean);
      total += mean;
    }
    m.worst_case_return = worst;
    m.average_shift_return = total / static_cast<double>(shifts.size());
  }
  return m;
}

MetricsSummary aggregate(const std::vector<MetricsSummary>& per_seed) {
  if (per_seed.empty()) throw DomainError("nothing to aggregate");
  MetricsSummary a;
  a.label = "all";
  const double n = static_cast<double>(per_seed.size());
  a.min_return = INFINITY;
  std::vector<double> means;
  double worst = 0.0;
  double average = 0.0;
  bool shifts = true;
  for (const auto& m : per_seed) {
    a.episodes += m.episodes;
    means.push_back(m.mean_return);
    a.min_return = std::min(a.min_return, m.min_return);
    a.cvar_return += m.cvar_return;
    a.nominal_return += m.nominal_return;
    a.total_cost += m.total_cost;
    a.fired_count += m.fired_count;
    a.clamp_count += m.clamp_count;
    shifts = shifts && m.worst_case_return.has_value();
    if (shifts) {
      worst += *m.worst_case_return;
      average += *m.average_shift_return;
    }
  }
  a.cvar_return /= n;
  a.nominal_return /= n;
  const ReturnStats st = compute_metrics(means, 1.0);
  a.mean_return = st.mean;
  a.std_return = st.std;
  a.ci95_return = st.ci95;
  if (shifts) {
    a.worst_case_return = worst / n;
    a.average_shift_return = average / n;
  }
  return a;
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{
      "seed",        "episodes",          "mean_return",          "std_return", "min_return",
      "cvar_return", "nominal_return",    "worst_case_return",    "average_shift_return",
      "total_cost",  "fired_count",       "clamp_count",          "ci95_return"};
  return cols;
}

std::string summary_row(const MetricsSummary& m) {
  const auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  std::string row = m.label + "," + std::to_string(m.episodes);
  for (const std::string& f :
       {format_real(m.mean_return), format_real(m.std_return), format_real(m.min_return), format_real(m.cvar_return),
        format_real(m.nominal_return), opt(m.worst_case_return), opt(m.average_shift_return),
        format_real(m.total_cost), std::to_string(m.fired_count), std::to_string(m.clamp_count),
        format_real(m.ci95_return)})
    row += "," + f;
  return row;
}

std::string summary_csv(const ExperimentResult& result) {
  std::string out;
  const auto& cols = summary_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& s : result.seeds) out += summary_row(s.summary) + '\n';
  out += summary_row(result.aggregate) + '\n';
  return out;
}

std::string episode_json(const EpisodeRecord& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["phase"] = r.phase;
  j["episode"] = r.episode;
  j["return_true"] = r.return_true;
  j["return_observed"] = r.return_observed;
  j["cost_true"] = r.cost_true;
  j["steps"] = r.steps;
  j["fired_count"] = r.fired_count;
  j["clamp_count"] = r.clamp_count;
  return j.dump();
}

EpisodeRecord parse_episode_json(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    EpisodeRecord r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.phase = j.at("phase").get<std::string>();
    r.episode = j.at("episode").get<std::size_t>();
    r.return_true = j.at("return_true").get<double>();
    r.return_observed = j.at("return_observed").get<double>();
    r.cost_true = j.at("cost_true").get<double>();
    r.steps = j.at("steps").get<std::size_t>();
    r.fired_count = j.at("fired_count").get<std::size_t>();
    r.clamp_count = j.at("clamp_count").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed episode record: ") + e.what());
  }
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config, const std::filesystem::path& out_dir,
                                std::optional<std::size_t> workers) {
  validate_config(config);
  const std::string started = utc_now();

  std::size_t n_workers = workers.value_or(config.workers.value_or(std::thread::hardware_concurrency()));
  n_workers = std::clamp<std::size_t>(n_workers, 1, config.seeds.size());

  ExperimentResult result;
  result.seeds.resize(config.seeds.size());
  std::vector<std::exception_ptr> errors(config.seeds.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      try {
        result.seeds[i] = run_seed(config, config.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error("seed " + std::to_string(config.seeds[i]) + ": " + e.what());
    }
  }

  std::vector<MetricsSummary> per_seed;
  for (const auto& s : result.seeds) per_seed.push_back(s.summary);
  result.aggregate = aggregate(per_seed);

  std::filesystem::create_directories(out_dir);
  std::string episodes;
  for (const auto& s : result.seeds)
    for (const auto& r : s.records) episodes += episode_json(r) + '\n';
  write_text(out_dir / "episodes.jsonl", episodes);
  write_text(out_dir / "summary.csv", summary_csv(result));
  write_text(out_dir / "config.snapshot", to_toml(config));
  std::filesystem::create_directories(out_dir / "policies");
  for (const auto& s : result.seeds)
    write_text(out_dir / "policies" / ("seed_" + std::to_string(s.seed) + ".txt"), s.policy_snapshot);
  nlohmann::ordered_json meta;
  meta["version"] = kVersion;
  meta["started"] = started;
  meta["finished"] = utc_now();
  write_text(out_dir / "metadata.json", meta.dump(2) + '\n');
  return result;
}

}  // namespace rgym::harness

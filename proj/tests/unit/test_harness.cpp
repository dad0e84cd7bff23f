#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rgym/core/errors.hpp"
#include "rgym/envs/grid_maze.hpp"
#include "rgym/harness/config.hpp"
#include "rgym/harness/experiment.hpp"
#include "rgym/harness/mdp.hpp"
#include "rgym/harness/metrics.hpp"
#include "rgym/harness/report.hpp"

using namespace rgym;
using namespace rgym::harness;
namespace fs = std::filesystem;

namespace {

const char* kMazeConfig = R"(
[env]
id = "grid_maze"
horizon = 50

[agent]
id = "tabular_q"

[[disruptor]]
id = "obs"
source = "state"
mode = "random"
noise = "discrete_replace"
p = 0.1

[protocol]
kind = "in_training"
train_episodes = 30
eval_episodes = 5

[harness]
seeds = [1, 2]
cvar_alpha = 0.2
)";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rgym_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "no error";
}

}  // namespace

TEST(ValueIteration, TwoStateChain) {
  TabularMdp m(2, 1);
  m.p(0, 0, 0) = 1.0;
  m.r(0, 0) = 0.5;
  m.terminal[1] = true;
  const auto v = value_iteration(m, 0.5, 1e-12);
  EXPECT_NEAR(v.value[0], 1.0, 1e-10);
  EXPECT_EQ(v.value[1], 0.0);
}

TEST(ValueIteration, OpenMazeShortestPath) {
  envs::GridMazeOptions o;
  o.board = envs::open_board(3, 3);
  envs::GridMaze maze(o);
  const auto v = value_iteration(grid_maze_mdp(maze), 1.0);
  EXPECT_NEAR(v.value[maze.start()], -4.0, 1e-9);
  EXPECT_EQ(v.value[maze.goal()], 0.0);
  EXPECT_EQ(v.policy[maze.start()], 1u);
}

TEST(ValueIteration, KernelCheck) {
  TabularMdp m(2, 1);
  m.p(0, 0, 0) = 0.5;
  m.terminal[1] = true;
  try {
    value_iteration(m, 0.9);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("kernel row (0, 0) sums to 0.5"), std::string::npos);
  }
}

TEST(PerturbedKernel, MixesActionsByHand) {
  TabularMdp m(3, 2);
  m.p(0, 0, 1) = 1.0;
  m.p(0, 1, 2) = 1.0;
  m.r(0, 0) = -1.0;
  m.r(0, 1) = -3.0;
  m.terminal[1] = m.terminal[2] = true;
  const auto q = perturbed_kernel(m, 0.2);
  EXPECT_NEAR(q.p(0, 0, 1), 0.8 + 0.1, 1e-12);
  EXPECT_NEAR(q.p(0, 0, 2), 0.1, 1e-12);
  EXPECT_NEAR(q.p(0, 1, 2), 0.9, 1e-12);
  EXPECT_NEAR(q.r(0, 0), 0.8 * -1.0 + 0.1 * -4.0, 1e-12);
  EXPECT_NEAR(q.r(0, 1), 0.8 * -3.0 + 0.1 * -4.0, 1e-12);
  const auto same = perturbed_kernel(m, 0.0);
  EXPECT_EQ(same.kernel, m.kernel);
}

TEST(Metrics, CvarExample) {
  EXPECT_DOUBLE_EQ(cvar({-4, -10, -6, -8}, 0.5), -9.0);
  EXPECT_DOUBLE_EQ(cvar({-4, -10, -6, -8}, 1.0), -7.0);
  EXPECT_DOUBLE_EQ(cvar({-4, -10, -6, -8}, 0.1), -10.0);
  EXPECT_THROW(cvar({}, 0.5), DomainError);
  EXPECT_THROW(cvar({1.0}, 0.0), DomainError);
}

TEST(Metrics, Summary) {
  const auto st = compute_metrics({1.0, 2.0, 3.0, 4.0}, 0.25);
  EXPECT_DOUBLE_EQ(st.mean, 2.5);
  EXPECT_DOUBLE_EQ(st.std, std::sqrt(5.0 / 3.0));
  EXPECT_DOUBLE_EQ(st.min, 1.0);
  EXPECT_DOUBLE_EQ(st.cvar, 1.0);
  EXPECT_DOUBLE_EQ(st.ci95, 1.96 * std::sqrt(5.0 / 3.0) / 2.0);
  const auto one = compute_metrics({-3.0}, 0.5);
  EXPECT_EQ(one.std, 0.0);
  EXPECT_EQ(one.ci95, 0.0);
}

TEST(Config, ParsesExample) {
  const auto c = parse_config(kMazeConfig);
  EXPECT_EQ(c.env.id, "grid_maze");
  EXPECT_EQ(*c.env.horizon, 50u);
  ASSERT_EQ(c.disruptors.size(), 1u);
  EXPECT_EQ(c.disruptors[0].id, "obs");
  EXPECT_EQ(c.disruptors[0].source, disrupt::Source::State);
  EXPECT_EQ(std::get<disrupt::RandomMode>(c.disruptors[0].mode).noise,
            disrupt::NoiseModel(disrupt::DiscreteReplace{0.1}));
  EXPECT_EQ(c.train_episodes, 30u);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(c.cvar_alpha, 0.2);
}

TEST(Config, ErrorsNameKeyAndLine) {
  std::string text = kMazeConfig;
  EXPECT_EQ(config_error(std::string(text).replace(text.find("p = 0.1"), 7, "p = 1.5")),
            "disruptor[0].p: must be in [0, 1] (line 14)");
  EXPECT_EQ(config_error(std::string(text).replace(text.find("horizon = 50"), 12, "horizn = 50")),
            "env.horizn: not used by grid_maze (line 4)");
  EXPECT_EQ(config_error(std::string(text).replace(text.find("tabular_q"), 9, "ppo")),
            "agent.id: unknown agent 'ppo' (line 7)");
  EXPECT_NE(config_error(std::string(text) + "[bogus]\nx = 1\n").find("bogus: unknown key"), std::string::npos);
  EXPECT_NE(config_error("[env\n").find("line 1"), std::string::npos);
  EXPECT_NE(config_error("[agent]\nid = \"tabular_q\"\n").find("env: section [env] is required"),
            std::string::npos);
}

TEST(Config, SeedsAsStrings) {
  std::string text = kMazeConfig;
  text.replace(text.find("[1, 2]"), 6, "[\"18446744073709551615\", 3]");
  EXPECT_EQ(parse_config(text).seeds, (std::vector<std::uint64_t>{18446744073709551615ull, 3}));
  EXPECT_EQ(parse_seed_list("4,5, 6", "--seed-override"), (std::vector<std::uint64_t>{4, 5, 6}));
  EXPECT_THROW(parse_seed_list("4,x", "--seed-override"), ConfigError);
}

TEST(Config, TomlRoundTrip) {
  const char* rich = R"(
[env]
id = "windy_pendulum"
horizon = 40

[agent]
id = "cem"
population = 8
init_std = [2.0, 1.0]

[[disruptor]]
id = "g"
source = "env_params"
mode = "internal_shift"
schedule = "per_episode"
phase = "eval_only"
params.gravity = { rule = "sinusoid", base = 14.715, amp = 4.905, freq = 0.5 }
params.wind = { rule = "uniform", lo = 0.5, hi = 1.5, at = "step" }

[[disruptor]]
id = "adv"
source = "state"
mode = "adversarial"
adversary = "greedy"
candidates = 4
region_low = -0.5
region_high = 0.5
schedule = "bernoulli"
q = 0.25

[protocol]
train_episodes = 16
eval_episodes = 3

[harness]
seeds = [7]
eval_param_grid = { gravity = [9.81, 19.62], wind = [0.0, 2.0] }
)";
  const auto c = parse_config(rich);
  const auto text = to_toml(c);
  EXPECT_EQ(parse_config(text), c);
  EXPECT_EQ(to_toml(parse_config(text)), text);
  EXPECT_EQ(parse_config(to_toml(parse_config(kMazeConfig))), parse_config(kMazeConfig));
}

TEST(Config, SetValue) {
  auto text = set_config_value(kMazeConfig, "disruptor.0.p", "0.3");
  EXPECT_EQ(std::get<disrupt::RandomMode>(parse_config(text).disruptors[0].mode).noise,
            disrupt::NoiseModel(disrupt::DiscreteReplace{0.3}));
  text = set_config_value(kMazeConfig, "protocol.train_episodes", "7");
  EXPECT_EQ(parse_config(text).train_episodes, 7u);
  EXPECT_THROW(set_config_value(kMazeConfig, "protocol.train_episodes", "seven"), ConfigError);
  EXPECT_THROW(set_config_value(kMazeConfig, "protocol.missing", "1"), ConfigError);
  EXPECT_EQ(read_cvar_alpha(kMazeConfig), 0.2);
}

TEST(Config, PostTrainingGatesDisruptors) {
  std::string text = kMazeConfig;
  text.replace(text.find("in_training"), 11, "post_training");
  const auto c = parse_config(text);
  EXPECT_EQ(gated_disruptors(c)[0].schedule.phase, disrupt::PhaseGate::EvalOnly);
  text.replace(text.find("p = 0.1"), 7, "p = 0.1\nphase = \"train_only\"");
  EXPECT_NE(config_error(text).find("disruptor[0].phase"), std::string::npos);
}

TEST(Experiment, RecordLayoutAndPairedSeeds) {
  const auto c = parse_config(kMazeConfig);
  const auto r = run_seed(c, 1);
  std::size_t train = 0, eval = 0, nominal = 0;
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.seed, 1u);
    if (rec.phase == "train") EXPECT_EQ(rec.episode, train++);
    if (rec.phase == "eval") EXPECT_EQ(rec.episode, 30 + eval++);
    if (rec.phase == "nominal") {
      EXPECT_EQ(rec.episode, 30 + nominal++);
      EXPECT_EQ(rec.fired_count, 0u);
      EXPECT_EQ(rec.return_true, rec.return_observed);
    }
  }
  EXPECT_EQ(train, 30u);
  EXPECT_EQ(eval, 5u);
  EXPECT_EQ(nominal, 5u);
  const SeedStreams s(1);
  EXPECT_NE(s.env_seed("train", 0), s.env_seed("eval", 0));
  EXPECT_EQ(s.env_seed("eval", 3), SeedStreams(1).env_seed("eval", 3));
}

TEST(Experiment, SummaryMatchesRecords) {
  const auto c = parse_config(kMazeConfig);
  const auto r = run_seed(c, 2);
  std::vector<double> eval;
  for (const auto& rec : r.records)
    if (rec.phase == "eval") eval.push_back(rec.return_true);
  const auto st = compute_metrics(eval, 0.2);
  EXPECT_EQ(r.summary.mean_return, st.mean);
  EXPECT_EQ(r.summary.cvar_return, st.cvar);
  EXPECT_EQ(r.summary.episodes, 5u);
  EXPECT_FALSE(r.summary.worst_case_return.has_value());
}

TEST(Experiment, ShiftGridPoints) {
  std::string text = kMazeConfig;
  text += "eval_param_grid = { slip = [0.0, 0.5, 1.0] }\n";
  const auto r = run_seed(parse_config(text), 1);
  std::map<std::string, std::vector<double>> by_phase;
  for (const auto& rec : r.records) by_phase[rec.phase].push_back(rec.return_true);
  ASSERT_EQ(by_phase.count("shift:2"), 1u);
  EXPECT_EQ(by_phase["shift:0"], by_phase["nominal"]);
  double worst = 0;
  double total = 0;
  for (int k = 0; k < 3; ++k) {
    const auto& v = by_phase["shift:" + std::to_string(k)];
    double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    worst = k == 0 ? m : std::min(worst, m);
    total += m;
  }
  EXPECT_DOUBLE_EQ(*r.summary.worst_case_return, worst);
  EXPECT_DOUBLE_EQ(*r.summary.average_shift_return, total / 3);
}

TEST(Experiment, AggregateAcrossSeeds) {
  MetricsSummary a, b;
  a.mean_return = -10;
  a.min_return = -20;
  a.cvar_return = -18;
  a.nominal_return = -8;
  a.episodes = 5;
  b.mean_return = -14;
  b.min_return = -30;
  b.cvar_return = -22;
  b.nominal_return = -8;
  b.episodes = 5;
  const auto agg = aggregate({a, b});
  EXPECT_EQ(agg.label, "all");
  EXPECT_EQ(agg.episodes, 10u);
  EXPECT_DOUBLE_EQ(agg.mean_return, -12.0);
  EXPECT_DOUBLE_EQ(agg.std_return, std::sqrt(8.0));
  EXPECT_DOUBLE_EQ(agg.ci95_return, 1.96 * std::sqrt(8.0) / std::sqrt(2.0));
  EXPECT_EQ(agg.min_return, -30);
  EXPECT_DOUBLE_EQ(agg.cvar_return, -20);
  EXPECT_EQ(agg.nominal_return, -8);
}

TEST(Experiment, ArtifactsAndReport) {
  const auto dir = scratch("artifacts");
  const auto c = parse_config(kMazeConfig);
  const auto res = run_experiment(c, dir / "run", 2);
  for (auto f : {"episodes.jsonl", "summary.csv", "config.snapshot", "metadata.json", "policies/seed_1.txt",
                 "policies/seed_2.txt"})
    EXPECT_TRUE(fs::exists(dir / "run" / f)) << f;
  const auto csv = slurp(dir / "run" / "summary.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "seed,episodes,mean_return,std_return,min_return,cvar_return,nominal_return,worst_case_return,"
            "average_shift_return,total_cost,fired_count,clamp_count,ci95_return");
  EXPECT_NE(csv.find("\nall,10,"), std::string::npos);
  EXPECT_EQ(parse_config(slurp(dir / "run" / "config.snapshot")), c);

  std::istringstream lines(slurp(dir / "run" / "episodes.jsonl"));
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto rec = parse_episode_json(line);
    EXPECT_EQ(episode_json(rec), line);
    ++n;
  }
  EXPECT_EQ(n, 2u * (30 + 5 + 5));

  const auto logs = read_run(dir / "run");
  EXPECT_EQ(logs.aggregate.mean_return, res.aggregate.mean_return);
  const auto row = report_row(logs, "mean_return");
  EXPECT_EQ(row.mean, res.aggregate.mean_return);
  EXPECT_EQ(row.std, res.aggregate.std_return);
  EXPECT_EQ(report_csv({row}).substr(0, 22), "source,x,mean,std,ci95");
}

TEST(Report, OrdersNumericSweepValues) {
  std::vector<ReportRow> rows{{"a", "10", 0, 0, 0}, {"b", "2", 0, 0, 0}, {"c", "0.5", 0, 0, 0}};
  order_rows(rows);
  EXPECT_EQ(rows[0].source, "c");
  EXPECT_EQ(rows[1].source, "b");
  EXPECT_EQ(rows[2].source, "a");
  EXPECT_EQ(report_metrics().size(), 11u);
}

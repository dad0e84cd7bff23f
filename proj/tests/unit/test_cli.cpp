#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "rgym/cli/cli.hpp"
#include "rgym/harness/experiment.hpp"

using namespace rgym;
namespace fs = std::filesystem;

namespace {

const char* kConfig = R"(
[env]
id = "grid_maze"
horizon = 30

[agent]
id = "tabular_q"

[[disruptor]]
id = "act"
source = "action"
mode = "random"
noise = "discrete_replace"
p = 0.2

[protocol]
train_episodes = 20
eval_episodes = 4

[harness]
seeds = [1, 2]
)";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = rgym::cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rgym_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint64_t> seeds_in(const fs::path& episodes) {
  std::vector<std::uint64_t> out;
  std::istringstream lines(slurp(episodes));
  std::string line;
  while (std::getline(lines, line)) {
    const auto s = harness::parse_episode_json(line).seed;
    if (out.empty() || out.back() != s) out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(Cli, RunWritesArtifacts) {
  const auto dir = scratch("run");
  const auto cfg = write(dir / "c.toml", kConfig);
  const auto r = invoke({"run", "--config", cfg.string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, rgym::cli::kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("seeds=all episodes=8 mean_return=", 0), 0u) << r.out;
  EXPECT_TRUE(fs::exists(dir / "out" / "summary.csv"));
  EXPECT_EQ(seeds_in(dir / "out" / "episodes.jsonl"), (std::vector<std::uint64_t>{1, 2}));
}

TEST(Cli, SeedPrecedence) {
  const auto dir = scratch("seeds");
  const auto cfg = write(dir / "c.toml", kConfig);
  ::setenv("ROBUST_SEED", "5", 1);
  ASSERT_EQ(invoke({"run", "--config", cfg.string(), "--out", (dir / "env").string()}).code, 0);
  ASSERT_EQ(invoke({"run", "--config", cfg.string(), "--out", (dir / "flag").string(), "--seed-override", "7,8"}).code,
            0);
  ::unsetenv("ROBUST_SEED");
  EXPECT_EQ(seeds_in(dir / "env" / "episodes.jsonl"), (std::vector<std::uint64_t>{5}));
  EXPECT_EQ(seeds_in(dir / "flag" / "episodes.jsonl"), (std::vector<std::uint64_t>{7, 8}));
  ::setenv("ROBUST_SEED", "abc", 1);
  EXPECT_EQ(invoke({"run", "--config", cfg.string(), "--out", (dir / "bad").string()}).code, rgym::cli::kExitConfig);
  ::unsetenv("ROBUST_SEED");
}

TEST(Cli, ConfigErrorsExitTwo) {
  const auto dir = scratch("errors");
  std::string bad = kConfig;
  bad.replace(bad.find("p = 0.2"), 7, "p = 2.0");
  const auto cfg = write(dir / "bad.toml", bad);
  auto r = invoke({"run", "--config", cfg.string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, rgym::cli::kExitConfig);
  EXPECT_NE(r.err.find("disruptor[0].p"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "o"));
  EXPECT_EQ(invoke({"run", "--config", (dir / "missing.toml").string()}).code, rgym::cli::kExitConfig);
  EXPECT_EQ(invoke({"run"}).code, rgym::cli::kExitConfig);
  EXPECT_EQ(invoke({"frobnicate"}).code, rgym::cli::kExitConfig);
}

TEST(Cli, RuntimeFailureExitsThree) {
  const auto dir = scratch("runtime");
  std::string text = kConfig;
  text.replace(text.find("mode = \"random\""), text.find("p = 0.2") + 7 - text.find("mode = \"random\""),
               "mode = \"adversarial\"\nadversary = \"external\"\nregion_low = 0\nregion_high = 3\n"
               "command = \"exit 0\"\ntimeout = 1.0");
  const auto cfg = write(dir / "c.toml", text);
  const auto r = invoke({"run", "--config", cfg.string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, rgym::cli::kExitRuntime) << r.err;
  EXPECT_NE(r.err.find("act"), std::string::npos) << r.err;
}

TEST(Cli, SweepAndReport) {
  const auto dir = scratch("sweep");
  const auto cfg = write(dir / "c.toml", kConfig);
  auto r = invoke({"sweep", "--config", cfg.string(), "--param", "disruptor.0.p", "--values", "0.0,0.5", "--out",
                (dir / "sw").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "sw" / "p0_0.0" / "summary.csv"));
  EXPECT_EQ(slurp(dir / "sw" / "p1_0.5" / "sweep_point"), "disruptor.0.p=0.5\n");
  const auto summary = slurp(dir / "sw" / "sweep_summary.csv");
  EXPECT_EQ(summary.rfind("param,value,episodes,mean_return", 0), 0u);
  EXPECT_NE(summary.find("\ndisruptor.0.p,0.5,"), std::string::npos);

  r = invoke({"report", "--in", (dir / "sw" / "p1_0.5").string(), (dir / "sw" / "p0_0.0").string(), "--metric",
           "cvar_return", "--out", (dir / "report.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(dir / "report.csv");
  EXPECT_EQ(csv.rfind("source,x,mean,std,ci95\n", 0), 0u);
  EXPECT_LT(csv.find(",0.0,"), csv.find(",0.5,"));

  r = invoke({"report", "--in", (dir / "nowhere").string(), "--out", (dir / "r2.csv").string()});
  EXPECT_EQ(r.code, rgym::cli::kExitRuntime);
  EXPECT_NE(r.err.find("nowhere"), std::string::npos);
  EXPECT_EQ(invoke({"report", "--in", (dir / "sw" / "p0_0.0").string(), "--metric", "bogus"}).code, rgym::cli::kExitConfig);
  EXPECT_EQ(invoke({"sweep", "--config", cfg.string(), "--param", "disruptor.0.p", "--values", "0.1,9"}).code,
            rgym::cli::kExitConfig);
}

TEST(Cli, ListEnvsAndMock) {
  const auto r = invoke({"list-envs"});
  EXPECT_EQ(r.code, 0);
  for (auto id : {"grid_maze", "safe_grid_maze", "windy_pendulum", "two_agent_grid"})
    EXPECT_NE(r.out.find(id), std::string::npos);
  const auto m = invoke({"adversary-mock", "--mode", "region-low"},
                     "{\"task\":\"t\",\"value\":[0.5],\"low\":[0.2],\"high\":[0.8],\"reward\":0,\"prev_reward\":0}\n");
  EXPECT_EQ(m.out, "{\"value\":[0.2]}\n");
}

TEST(Cli, BinaryExitCodes) {
  const std::string bin = RGYM_CLI_PATH;
  const auto status = [](const std::string& cmd) { return WEXITSTATUS(std::system((cmd + " >/dev/null 2>&1").c_str())); };
  EXPECT_EQ(status(bin + " list-envs"), 0);
  EXPECT_EQ(status(bin + " run --config /nonexistent.toml"), 2);
  EXPECT_EQ(status(bin + " --version"), 0);
}

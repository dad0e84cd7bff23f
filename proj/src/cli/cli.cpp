#include "rgym/cli/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "rgym/adversary/external.hpp"
#include "rgym/core/errors.hpp"
#include "rgym/core/format.hpp"
#include "rgym/envs/registry.hpp"
#include "rgym/harness/experiment.hpp"
#include "rgym/harness/report.hpp"
#include "rgym/version.hpp"

namespace rgym::cli {

namespace {

using harness::RunConfig;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string tok = text.substr(pos, comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.erase(tok.begin());
    while (!tok.empty() && tok.back() == ' ') tok.pop_back();
    out.push_back(tok);
    pos = comma + 1;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --seed-override beats ROBUST_SEED, which beats the config.
void apply_seeds(RunConfig& c, const std::string& override_list) {
  if (!override_list.empty()) {
    c.seeds = harness::parse_seed_list(override_list, "--seed-override");
  } else if (const char* env = std::getenv("ROBUST_SEED"); env && *env) {
    c.seeds = harness::parse_seed_list(env, "ROBUST_SEED");
  }
}

void print_summary(const harness::MetricsSummary& m, std::ostream& out) {
  out << "seeds=" << m.label << " episodes=" << m.episodes << " mean_return=" << format_real(m.mean_return)
      << " std_return=" << format_real(m.std_return) << " min_return=" << format_real(m.min_return)
      << " cvar_return=" << format_real(m.cvar_return) << " nominal_return=" << format_real(m.nominal_return);
  if (m.worst_case_return) out << " worst_case_return=" << format_real(*m.worst_case_return);
  if (m.average_shift_return) out << " average_shift_return=" << format_real(*m.average_shift_return);
  out << " total_cost=" << format_real(m.total_cost) << " fired_count=" << m.fired_count
      << " clamp_count=" << m.clamp_count << " ci95_return=" << format_real(m.ci95_return) << "\n";
}

struct RunArgs {
  std::string config;
  std::string out;
  std::string seeds;
  std::size_t workers = 0;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
  RunConfig c = harness::load_config(a.config);
  apply_seeds(c, a.seeds);
  const std::string dir = a.out.empty() ? c.output : a.out;
  const auto result = harness::run_experiment(c, dir, a.workers ? std::optional(a.workers) : std::nullopt);
  print_summary(result.aggregate, out);
  return kExitOk;
}

std::string dir_name(std::size_t i, const std::string& value) {
  std::string safe;
  for (char ch : value) safe += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-') ? ch : '_';
  return "p" + std::to_string(i) + "_" + safe;
}

int cmd_sweep(const RunArgs& a, const std::string& param, const std::string& values_text, std::ostream& out) {
  const std::string text = read_file(a.config);
  const std::filesystem::path base = std::filesystem::path(a.config).parent_path();
  if (values_text.empty()) throw ConfigError("--values", "needs at least one value");
  const auto values = split_list(values_text);
  for (const auto& v : values)
    if (v.empty()) throw ConfigError("--values", "empty entry in '" + values_text + "'");

  // Resolve every point before running any of them.
  std::vector<RunConfig> configs;
  for (const auto& v : values) {
    RunConfig c = harness::parse_config(harness::set_config_value(text, param, v), base);
    apply_seeds(c, a.seeds);
    harness::validate_config(c);
    configs.push_back(std::move(c));
  }
  const std::filesystem::path root = a.out.empty() ? std::filesystem::path(configs.front().output) : std::filesystem::path(a.out);
  std::filesystem::create_directories(root);

  std::string csv = "param,value";
  for (std::size_t i = 1; i < harness::summary_columns().size(); ++i) csv += "," + harness::summary_columns()[i];
  csv += "\n";
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto dir = root / dir_name(i, values[i]);
    const auto result =
        harness::run_experiment(configs[i], dir, a.workers ? std::optional(a.workers) : std::nullopt);
    std::ofstream(dir / "sweep_point", std::ios::binary) << param << "=" << values[i] << "\n";
    const std::string row = harness::summary_row(result.aggregate);
    csv += param + "," + values[i] + row.substr(row.find(','));
    csv += "\n";
    out << param << "=" << values[i] << ": ";
    print_summary(result.aggregate, out);
  }
  std::ofstream(root / "sweep_summary.csv", std::ios::binary) << csv;
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& metric, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
  const auto& names = harness::report_metrics();
  if (std::find(names.begin(), names.end(), metric) == names.end())
    throw ConfigError("--metric", "unknown metric '" + metric + "'");
  std::vector<harness::ReportRow> rows;
  std::vector<std::string> offenders;
  for (const auto& d : dirs) {
    try {
      rows.push_back(harness::report_row(harness::read_run(d), metric));
    } catch (const DomainError& e) {
      offenders.push_back(e.what());
    }
  }
  if (!offenders.empty()) {
    err << "report: unusable inputs:\n";
    for (const auto& o : offenders) err << "  " << o << "\n";
    return kExitRuntime;
  }
  harness::order_rows(rows);
  std::ofstream(out_path, std::ios::binary) << harness::report_csv(rows);
  out << harness::report_table(rows, metric);
  return kExitOk;
}

int cmd_list_envs(std::ostream& out) {
  for (const auto& e : envs::registered_environments()) out << e.id << "\t" << e.description << "\n";
  return kExitOk;
}

// Scripted external adversary speaking the line protocol on stdin/stdout.
int cmd_adversary_mock(const std::string& mode, const std::string& value_text, std::istream& in, std::ostream& out) {
  Vector constant;
  if (!value_text.empty()) {
    for (const auto& tok : split_list(value_text)) {
      try {
        constant.push_back(parse_real(tok));
      } catch (const DomainError&) {
        throw ConfigError("--value", "'" + tok + "' is not a number");
      }
    }
  }
  if (mode == "constant" && constant.empty()) throw ConfigError("--value", "constant mode needs --value");
  std::string line;
  while (std::getline(in, line)) {
    if (mode == "hang") {
      std::this_thread::sleep_for(std::chrono::hours(1));
      return kExitOk;
    }
    if (mode == "garbage") {
      out << "this is not json" << std::endl;
      continue;
    }
    adversary::AdversaryRequest req;
    try {
      req = adversary::decode_request(line);
    } catch (const DomainError&) {
      out << "{\"error\":\"bad request\"}" << std::endl;
      continue;
    }
    adversary::AdversaryReply reply;
    if (mode == "echo") {
      reply.value = req.value;
    } else if (mode == "constant") {
      reply.value = constant.size() == 1 ? Vector(req.value.size(), constant.front()) : constant;
    } else if (mode == "region-high") {
      reply.value = req.region_high;
    } else if (mode == "region-low") {
      reply.value = req.region_low;
    } else {  // wrong-length
      reply.value = req.value;
      reply.value.push_back(0.0);
    }
    out << adversary::encode_reply(reply) << std::endl;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Disrupted-MDP robustness experiments", "rgym"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "run one experiment");
  run_cmd->add_option("--config", run_args.config, "TOML configuration")->required();
  run_cmd->add_option("--out", run_args.out, "output directory (default: harness.output)");
  run_cmd->add_option("--seed-override", run_args.seeds, "comma-separated seeds replacing the config's");
  run_cmd->add_option("--workers", run_args.workers, "parallel seeds (default: logical cores)");

  RunArgs sweep_args;
  std::string param, values;
  auto* sweep_cmd = app.add_subcommand("sweep", "run one experiment per value of a config key");
  sweep_cmd->add_option("--config", sweep_args.config, "TOML configuration")->required();
  sweep_cmd->add_option("--param", param, "dotted key, e.g. disruptor.0.p")->required();
  sweep_cmd->add_option("--values", values, "comma-separated values")->required();
  sweep_cmd->add_option("--out", sweep_args.out, "output directory (default: harness.output)");
  sweep_cmd->add_option("--seed-override", sweep_args.seeds, "comma-separated seeds replacing the config's");
  sweep_cmd->add_option("--workers", sweep_args.workers, "parallel seeds (default: logical cores)");

  std::vector<std::string> in_dirs;
  std::string metric = "mean_return";
  std::string report_out = "report.csv";
  auto* report_cmd = app.add_subcommand("report", "tabulate runs as long-format data");
  report_cmd->add_option("--in", in_dirs, "run directories")->required();
  report_cmd->add_option("--metric", metric, "summary field to report");
  report_cmd->add_option("--out", report_out, "data file to write");

  auto* list_cmd = app.add_subcommand("list-envs", "list registered environments");

  std::string mock_mode = "echo";
  std::string mock_value;
  auto* mock_cmd = app.add_subcommand("adversary-mock", "scripted external adversary on stdin/stdout");
  mock_cmd->add_option("--mode", mock_mode, "reply policy")
      ->check(CLI::IsMember({"echo", "constant", "region-high", "region-low", "wrong-length", "garbage", "hang"}));
  mock_cmd->add_option("--value", mock_value, "comma-separated reply for constant mode");

  std::vector<std::string> argv_store{"rgym"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "rgym: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run_args, out);
    if (*sweep_cmd) return cmd_sweep(sweep_args, param, values, out);
    if (*report_cmd) return cmd_report(in_dirs, metric, report_out, out, err);
    if (*list_cmd) return cmd_list_envs(out);
    if (*mock_cmd) return cmd_adversary_mock(mock_mode, mock_value, in, out);
  } catch (const ConfigError& e) {
    err << "rgym: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "rgym: error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace rgym::cli

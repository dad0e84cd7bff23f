#include "rgym/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rgym/core/errors.hpp"
#include "rgym/core/format.hpp"

namespace rgym::harness {

const std::vector<std::string>& report_metrics() {
  static const std::vector<std::string> names{
      "mean_return",    "std_return",        "min_return",           "cvar_return",
      "nominal_return", "worst_case_return", "average_shift_return", "total_cost",
      "fired_count",    "clamp_count",       "ci95_return"};
  return names;
}

double metric_value(const MetricsSummary& m, const std::string& name) {
  const auto need = [&](const std::optional<double>& v) {
    if (!v) throw DomainError("metric '" + name + "' is absent (no eval_param_grid in this run)");
    return *v;
  };
  if (name == "mean_return") return m.mean_return;
  if (name == "std_return") return m.std_return;
  if (name == "min_return") return m.min_return;
  if (name == "cvar_return") return m.cvar_return;
  if (name == "nominal_return") return m.nominal_return;
  if (name == "worst_case_return") return need(m.worst_case_return);
  if (name == "average_shift_return") return need(m.average_shift_return);
  if (name == "total_cost") return m.total_cost;
  if (name == "fired_count") return static_cast<double>(m.fired_count);
  if (name == "clamp_count") return static_cast<double>(m.clamp_count);
  if (name == "ci95_return") return m.ci95_return;
  throw DomainError("unknown metric '" + name + "'");
}

namespace {

std::optional<std::string> read_optional(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

}  // namespace

RunLogs read_run(const std::filesystem::path& dir) {
  RunLogs run;
  run.dir = dir;
  const auto text = read_optional(dir / "episodes.jsonl");
  if (!text) throw DomainError(dir.string() + ": missing episodes.jsonl");
  double alpha = 0.1;
  if (const auto snap = read_optional(dir / "config.snapshot")) {
    try {
      alpha = read_cvar_alpha(*snap);
    } catch (const Error& e) {
      throw DomainError(dir.string() + ": corrupt config.snapshot: " + e.what());
    }
  }
  if (const auto point = read_optional(dir / "sweep_point")) {
    // "key=value"
    const std::string line = trim(*point);
    const auto eq = line.find('=');
    run.x = eq == std::string::npos ? line : line.substr(eq + 1);
  }
  std::istringstream in(*text);
  std::string line;
  std::size_t n = 0;
  std::vector<std::uint64_t> seeds;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      run.records.push_back(parse_episode_json(line));
    } catch (const DomainError& e) {
      throw DomainError(dir.string() + ": episodes.jsonl line " + std::to_string(n) + ": " + e.what());
    }
    const auto s = run.records.back().seed;
    if (std::find(seeds.begin(), seeds.end(), s) == seeds.end()) seeds.push_back(s);
  }
  if (seeds.empty()) throw DomainError(dir.string() + ": episodes.jsonl has no records");
  try {
    for (auto s : seeds) run.per_seed.push_back(summarize_seed(run.records, s, alpha));
  } catch (const DomainError& e) {
    throw DomainError(dir.string() + ": " + e.what());
  }
  run.aggregate = aggregate(run.per_seed);
  return run;
}

ReportRow report_row(const RunLogs& run, const std::string& metric) {
  ReportRow row;
  row.source = run.dir.string();
  row.x = run.x.value_or("");
  row.mean = metric_value(run.aggregate, metric);
  std::vector<double> values;
  for (const auto& m : run.per_seed) values.push_back(metric_value(m, metric));
  const ReturnStats st = compute_metrics(values, 1.0);
  row.std = st.std;
  row.ci95 = st.ci95;
  return row;
}

void order_rows(std::vector<ReportRow>& rows) {
  std::vector<double> xs;
  for (const auto& r : rows) {
    try {
      xs.push_back(parse_real(r.x));
    } catch (const DomainError&) {
      return;
    }
  }
  std::vector<std::size_t> idx(rows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<ReportRow> sorted;
  for (std::size_t i : idx) sorted.push_back(rows[i]);
  rows = std::move(sorted);
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = "source,x,mean,std,ci95\n";
  for (const auto& r : rows)
    out += r.source + "," + r.x + "," + format_real(r.mean) + "," + format_real(r.std) + "," + format_real(r.ci95) + "\n";
  return out;
}

std::string report_table(const std::vector<ReportRow>& rows, const std::string& metric) {
  std::size_t w_src = 6;
  for (const auto& r : rows) w_src = std::max(w_src, r.source.size());
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-*s  %10s  %14s  %12s  %12s\n", static_cast<int>(w_src), "source", "x",
                metric.c_str(), "std", "ci95");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %10s  %14.4f  %12.4f  %12.4f\n", static_cast<int>(w_src), r.source.c_str(),
                  r.x.c_str(), r.mean, r.std, r.ci95);
    out += buf;
  }
  return out;
}

}  // namespace rgym::harness

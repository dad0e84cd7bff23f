#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rgym/harness/experiment.hpp"

namespace rgym::harness {

// Names accepted by --metric (MetricsSummary fields).
const std::vector<std::string>& report_metrics();

// Throws DomainError for unknown names or an absent optional field.
double metric_value(const MetricsSummary& m, const std::string& name);

/// Episode records and summaries of one run directory, recomputed from
/// episodes.jsonl (cvar alpha read from config.snapshot when present).
struct RunLogs {
  std::filesystem::path dir;
  std::optional<std::string> x;  // sweep value, from the sweep_point file
  std::vector<EpisodeRecord> records;
  std::vector<MetricsSummary> per_seed;
  MetricsSummary aggregate;
};

// Throws DomainError describing what is missing or corrupt.
RunLogs read_run(const std::filesystem::path& dir);

struct ReportRow {
  std::string source;
  std::string x;
  double mean = 0.0;  // the aggregate-row value of the metric
  double std = 0.0;   // across seeds
  double ci95 = 0.0;
};

ReportRow report_row(const RunLogs& run, const std::string& metric);

// Orders rows by numeric x when every row has one; input order otherwise.
void order_rows(std::vector<ReportRow>& rows);

std::string report_csv(const std::vector<ReportRow>& rows);
std::string report_table(const std::vector<ReportRow>& rows, const std::string& metric);

}  // namespace rgym::harness

#pragma once

/**
 * Report documents: canonical JSON (stable key order, full precision) plus a
 * human-readable markdown table in the before/after layout. Rounding happens
 * only at markdown rendering, half-even.
 */

#include "greenbench/runner.hpp"

#include <string>
#include <vector>

namespace greenbench {

inline constexpr const char *kReportSchemaVersion = "1.0";
inline constexpr const char *kToolVersion = "0.1.0";

struct Provenance {
  std::string energy_provider; // collector description
  std::string factor_file;
  std::string factor_region;
  std::string corpus_path;
  std::size_t subset_size = 0;
  std::uint64_t subset_seed = 0;
  std::string tool_version = kToolVersion;
};

struct ReportDocument {
  std::string schema_version = kReportSchemaVersion;
  std::vector<BenchmarkRun> runs;
  std::vector<ComparisonReport> comparisons;
  Provenance provenance;
};

std::string emit_json(const ReportDocument &doc);
ReportDocument parse_report_json(const std::string &json_text);

ReportDocument load_report(const std::string &path);
void save_report(const std::string &path, const ReportDocument &doc);

// One row per run: Model, Precision, Recall, F1, Accuracy, CO2(kg); runs with
// quantization info land in the after-optimization section. Metrics render at
// 2 decimals, CO2 at 3, both rounded half-even.
std::string emit_markdown_table(const ReportDocument &doc);

// Presentation-only helper, exposed for tests.
std::string format_rounded(double value, int decimals);

} // namespace greenbench

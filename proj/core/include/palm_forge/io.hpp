#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "palm_forge/palm_engine.hpp"
#include "palm_forge/verify.hpp"

namespace palm_forge {

/// {"domain": "real", "window": [lo, hi], "atoms": [[location, weight], ...]}
std::string config_to_json(const PointConfig& config);
/// Inverse of config_to_json; throws PreconditionError on malformed input.
PointConfig config_from_json(std::string_view text);

/// One line per item: {"weight": w, "config": {...}}.
void write_batch_jsonl(std::ostream& out, const SampleBatch& batch);
/// Reads items written by write_batch_jsonl. Blank lines are skipped.
SampleBatch read_batch_jsonl(std::istream& in, BatchRole role, std::string meta = {});

std::string report_to_json(const TestReport& report, int indent = 2);
/// Several reports as one JSON array.
std::string reports_to_json(const std::vector<TestReport>& reports, int indent = 2);

/// One results.csv row.
struct CsvRow {
  std::string scenario;
  std::string estimator;
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string verdict;
};

inline constexpr std::string_view kCsvHeader = "scenario,estimator,value,se,n,seed,verdict";

/// Numbers use 17 significant digits so rows round-trip exactly.
std::string csv_line(const CsvRow& row);
/// Rows for a report: one per entry, verdicts "pass"/"fail".
std::vector<CsvRow> report_rows(const TestReport& report);

}  // namespace palm_forge

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "palm_forge/config.hpp"
#include "palm_forge/io.hpp"
#include "palm_forge/verify.hpp"

namespace palm_forge::cli {

/// Flag values shared by every subcommand.
struct Options {
  std::uint64_t seed = 7;
  std::size_t n = 10000;
  double window = 40.0;
  double level = 0.01;
  std::string palm = "lattice";
  /// Empty: the subcommand default (brownian:sigma=0.5, negation for
  /// compact). "none" runs without a field.
  std::string field;
  std::int64_t order = 12;
  double alpha = 0.8;
  std::vector<std::size_t> sizes{1000, 10000, 100000};
  std::size_t seeds = 5;
  std::size_t replicas = 200;
  std::vector<double> windows{64, 256};
  std::size_t cases = 100;
  double merge_tol = kMergeTolerance;
  bool quick = false;
  bool deterministic = false;
  std::string out_dir = ".";
  std::string dump_batch;
  std::string palm_file;
};

/// What one scenario produced.
struct Outcome {
  std::string scenario;
  std::vector<TestReport> reports;
  std::vector<CsvRow> rows;
  /// Human-readable summary, printed to stdout.
  std::vector<std::string> lines;
  bool pass = true;
  double seconds = 0.0;

  void add_row(CsvRow row);
  void add_report(TestReport report);
};

// Each runner reads the fields of Options it needs. GateFailure and
// PreconditionError propagate to the caller.
Outcome run_mecke(const Options& opts);
Outcome run_invert(const Options& opts);
Outcome run_voronoi(const Options& opts);
Outcome run_collisions(const Options& opts);
Outcome run_compact(const Options& opts);
Outcome run_heavy_tail(const Options& opts);
Outcome run_ergodic(const Options& opts);
Outcome run_lemma(const Options& opts);

/// The acceptance suite in a fixed order. --quick scales sample sizes down
/// and marks the affected rows.
std::vector<Outcome> run_all(const Options& opts);

}  // namespace palm_forge::cli

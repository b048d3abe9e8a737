#include "palm_forge_cli/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "palm_forge/errors.hpp"
#include "palm_forge_cli/scenarios.hpp"

namespace palm_forge::cli {
namespace {

using nlohmann::json;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::vector<std::size_t> parse_sizes(const std::vector<std::string>& raw) {
  std::vector<std::size_t> out;
  for (const std::string& s : raw) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || !(v >= 1.0) || v != std::floor(v)) {
      throw CLI::ValidationError("--sizes", "'" + s + "' is not a positive integer");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void write_outputs(const Options& o, const std::string& command, const std::vector<Outcome>& outcomes,
                   bool pass) {
  const std::filesystem::path dir(o.out_dir);
  std::filesystem::create_directories(dir);

  std::ofstream csv(dir / "results.csv", std::ios::binary);
  if (!o.deterministic) csv << "# generated " << utc_timestamp() << '\n';
  csv << kCsvHeader << '\n';
  for (const Outcome& out : outcomes) {
    for (const CsvRow& row : out.rows) csv << csv_line(row) << '\n';
  }

  json report{{"command", command}, {"seed", o.seed}, {"quick", o.quick}, {"pass", pass}};
  if (!o.deterministic) report["generated"] = utc_timestamp();
  json list = json::array();
  for (const Outcome& out : outcomes) {
    json entry{{"scenario", out.scenario}, {"pass", out.pass}, {"summary", out.lines}};
    if (!o.deterministic) entry["seconds"] = out.seconds;
    json tests = json::array();
    for (const TestReport& r : out.reports) tests.push_back(json::parse(report_to_json(r, -1)));
    entry["tests"] = std::move(tests);
    list.push_back(std::move(entry));
  }
  report["outcomes"] = std::move(list);
  std::ofstream(dir / "report.json", std::ios::binary) << report.dump(2) << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  std::vector<std::string> sizes_raw;

  CLI::App app{"Monte Carlo checks of Palm measures under random perturbations", "palm_forge"};
  app.set_config("--scenario", "", "Flat scenario file, one 'key = value' per line ('#' comments)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  app.add_option("--palm", o.palm, "Palm source: lattice, poisson:lambda=L, renewal:<gaps>, shifted-lattice")
      ->capture_default_str();
  app.add_option("--field", o.field, "Field spec, e.g. brownian:sigma=0.5, walk:poisson=2, negation, none");
  app.add_option("--n", o.n, "Batch size")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "64-bit seed")->capture_default_str();
  app.add_option("--window", o.window, "Palm window radius W; samples live on [-W, W]")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--level", o.level, "Family-wise test level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  app.add_option("--order", o.order, "Cyclic group order (compact)")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--alpha", o.alpha, "Heavy-tail exponent in (0, 1]")->capture_default_str();
  app.add_option("--sizes", sizes_raw, "Sample sizes for heavy-tail, e.g. 1e3,1e4,1e5")->delimiter(',');
  app.add_option("--seeds", o.seeds, "Number of fixed seeds (1..k) for heavy-tail")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--replicas", o.replicas, "Replicas for ergodic")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  app.add_option("--windows", o.windows, "Window radii for ergodic")->delimiter(',');
  app.add_option("--cases", o.cases, "Cases per group for lemma")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--merge-tol", o.merge_tol, "Real-line merge tolerance")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--out", o.out_dir, "Output directory for report.json and results.csv")->capture_default_str();
  app.add_option("--dump-batch", o.dump_batch, "Write the (perturbed) Palm batch as JSON lines");
  app.add_option("--palm-file", o.palm_file, "Read the Palm batch from JSON lines instead of sampling");
  app.add_flag("--quick", o.quick, "Reduced sample sizes (all)");
  app.add_flag("--deterministic", o.deterministic, "Omit timestamps and timings from outputs");

  struct Command {
    const char* name;
    const char* help;
    Outcome (*run)(const Options&);
  };
  const Command commands[] = {
      {"mecke", "Mecke battery on a (perturbed) Palm batch", run_mecke},
      {"invert", "Real-line inversion mass and stationarity test", run_invert},
      {"voronoi", "Voronoi and inversion mass estimates", run_voronoi},
      {"collisions", "Simplicity audit over the three Palm sources", run_collisions},
      {"compact", "Cyclic-group fixture and mass product table", run_compact},
      {"heavy-tail", "Running means under the heavy-tail walk", run_heavy_tail},
      {"ergodic", "Variance decay of window averages", run_ergodic},
      {"lemma", "Randomized checks of the compatibility identities", run_lemma},
  };
  for (const Command& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();
  app.add_subcommand("all", "The acceptance suite")->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (!sizes_raw.empty()) o.sizes = parse_sizes(sizes_raw);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::vector<Outcome> outcomes;
  try {
    if (command == "all") {
      outcomes = run_all(o);
    } else {
      for (const Command& c : commands) {
        if (command == c.name) outcomes.push_back(c.run(o));
      }
    }
  } catch (const GateFailure& e) {
    err << "gate failure: " << e.what() << '\n';
    return kGate;
  } catch (const PreconditionError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainMismatch& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kFail;
  }

  bool pass = true;
  if (o.quick && command == "all") out << "[quick] reduced sample sizes; thresholds are not the full-scale ones\n";
  for (const Outcome& r : outcomes) {
    for (const std::string& line : r.lines) out << line << '\n';
    out << (r.pass ? "PASS " : "FAIL ") << r.scenario << '\n';
    pass = pass && r.pass;
  }
  write_outputs(o, command, outcomes, pass);
  out << "verdict: " << (pass ? "pass" : "fail") << '\n';
  return pass ? kPass : kFail;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace palm_forge::cli

#include "palm_forge/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "palm_forge/errors.hpp"

namespace palm_forge {
namespace {

using nlohmann::json;

json config_json(const PointConfig& config) {
  json atoms = json::array();
  for (const Atom& a : config.atoms()) atoms.push_back({a.location, a.weight});
  return {{"domain", config.domain().name()},
          {"window", {config.window().lo(), config.window().hi()}},
          {"atoms", std::move(atoms)}};
}

PointConfig config_of(const json& j) {
  try {
    const GroupDomain domain = GroupDomain::parse(j.at("domain").get<std::string>());
    Window window = domain.is_compact()
                        ? Window::full(domain)
                        : Window::interval(domain, j.at("window").at(0).get<double>(),
                                           j.at("window").at(1).get<double>());
    std::vector<Atom> atoms;
    for (const json& a : j.at("atoms")) atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
    return PointConfig(window, std::move(atoms));
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("malformed configuration JSON: ") + e.what());
  }
}

// JSON has no infinities; they appear as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json report_json(const TestReport& r) {
  json entries = json::array();
  for (const TestEntry& e : r.entries) {
    entries.push_back({{"label", e.label},
                       {"lhs", number(e.lhs)},
                       {"rhs", number(e.rhs)},
                       {"residual", number(e.residual)},
                       {"se", number(e.se)},
                       {"z", number(e.z)},
                       {"p_value", number(e.p_value)},
                       {"pass", e.pass}});
  }
  return {{"scenario", r.scenario}, {"test", r.test},          {"n", r.n},
          {"seed", r.seed},         {"level", r.level},        {"threshold", number(r.threshold)},
          {"entries", entries},     {"notes", r.notes},        {"verdict", r.pass ? "pass" : "fail"}};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string config_to_json(const PointConfig& config) { return config_json(config).dump(); }

PointConfig config_from_json(std::string_view text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw PreconditionError("configuration is not valid JSON");
  return config_of(j);
}

void write_batch_jsonl(std::ostream& out, const SampleBatch& batch) {
  for (const BatchItem& item : batch.items()) {
    out << json{{"weight", item.weight}, {"config", config_json(item.config)}}.dump() << '\n';
  }
}

SampleBatch read_batch_jsonl(std::istream& in, BatchRole role, std::string meta) {
  std::vector<BatchItem> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("weight") || !j.contains("config")) {
      throw PreconditionError("batch line " + std::to_string(line_no) + " is malformed");
    }
    items.push_back({config_of(j.at("config")), j.at("weight").get<double>()});
  }
  if (items.empty()) throw PreconditionError("batch file has no items");
  return SampleBatch(role, std::move(items), std::move(meta));
}

std::string report_to_json(const TestReport& report, int indent) {
  return report_json(report).dump(indent);
}

std::string reports_to_json(const std::vector<TestReport>& reports, int indent) {
  json all = json::array();
  for (const TestReport& r : reports) all.push_back(report_json(r));
  return all.dump(indent);
}

std::string csv_line(const CsvRow& row) {
  return csv_field(row.scenario) + ',' + csv_field(row.estimator) + ',' + format_double(row.value) +
         ',' + format_double(row.se) + ',' + std::to_string(row.n) + ',' +
         std::to_string(row.seed) + ',' + csv_field(row.verdict);
}

std::vector<CsvRow> report_rows(const TestReport& report) {
  std::vector<CsvRow> rows;
  for (const TestEntry& e : report.entries) {
    const bool ks = report.test == "stationarity";
    rows.push_back({report.scenario, report.test + ":" + e.label, ks ? e.p_value : e.residual,
                    ks ? 0.0 : e.se, report.n, report.seed, e.pass ? "pass" : "fail"});
  }
  return rows;
}

}  // namespace palm_forge

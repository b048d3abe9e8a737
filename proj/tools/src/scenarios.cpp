#include "palm_forge_cli/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "palm_forge/errors.hpp"
#include "palm_forge/parallel.hpp"

namespace palm_forge::cli {
namespace {

const GroupDomain kReal = GroupDomain::real_line();

// Bernoulli site probability of the random compact fixture.
constexpr double kSiteProbability = 0.3;

std::string num(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::string verdict(bool ok) { return ok ? "pass" : "fail"; }

// |value - target| <= 3 se, with a rounding allowance for exact estimators.
bool within(double value, double se, double target) {
  return std::abs(value - target) <= 3.0 * se + 1e-12 * std::max(1.0, std::abs(target));
}

RandomStream stream(const Options& o, const std::string& id) {
  return RandomStream(o.seed, scenario_hash(id));
}

// An empty spec selects the subcommand's default; "none" means no field.
std::optional<IncrementSampler> parse_field(const std::string& spec,
                                            const char* fallback = "brownian:sigma=0.5") {
  const std::string& chosen = spec.empty() ? std::string(fallback) : spec;
  if (chosen == "none") return std::nullopt;
  return IncrementSampler::parse(chosen);
}

std::string field_name(const std::optional<IncrementSampler>& f) { return f ? f->name() : "none"; }

std::string source_label(const Options& o, const PalmSource& s) { return o.palm_file.empty() ? s.name() : "file"; }

void gate(const IncrementSampler& field, const GroupDomain& domain, double radius, const RandomStream& base) {
  RandomStream rng = base.lane(lanes::kCheck);
  require_sublinear(field, domain, radius, 20, rng);
}

SampleBatch palm_batch(const Options& o, const PalmSource& source, const RandomStream& base) {
  if (!o.palm_file.empty()) {
    std::ifstream in(o.palm_file);
    if (!in) throw PreconditionError("cannot open Palm batch file " + o.palm_file);
    return read_batch_jsonl(in, BatchRole::PalmSide, "file " + o.palm_file);
  }
  return sample_palm_batch(source, Window::symmetric(kReal, o.window), o.n, base);
}

SampleBatch perturbed_palm(const Options& o, const PalmSource& source,
                           const std::optional<IncrementSampler>& field, const RandomStream& base) {
  if (field) gate(*field, kReal, o.window, base);
  SampleBatch batch = palm_batch(o, source, base);
  if (field) batch = perturb_palm(batch, *field, base);
  if (!o.dump_batch.empty()) {
    std::ofstream dump(o.dump_batch);
    if (!dump) throw PreconditionError("cannot write " + o.dump_batch);
    write_batch_jsonl(dump, batch);
  }
  return batch;
}

std::string describe(const PointConfig& c) {
  std::string out;
  for (const Atom& a : c.atoms()) {
    if (!out.empty()) out += " + ";
    out += num(a.weight) + "·δ_" + num(a.location);
  }
  return out.empty() ? "0" : out;
}

// First atom right of zero in a Palm configuration.
double xi_one(const PointConfig& c) { return neighbors_of_zero(c).next; }

// Exact unweighted draws from the normalized measure: keep item i with
// probability w_i / max w. The weighted KS p-value assumes weights
// independent of the compared statistic, which inversion weights are not.
SampleBatch rejection_resample(const SampleBatch& batch, const RandomStream& base) {
  double top = 0.0;
  for (const BatchItem& item : batch.items()) top = std::max(top, item.weight);
  std::vector<BatchItem> kept;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    RandomStream rng = base.for_item(i);
    const BatchItem& item = batch.items()[i];
    if (rng.uniform() * top < item.weight) kept.push_back({item.config, 1.0});
  }
  if (kept.empty()) throw PreconditionError("rejection resampling kept no items");
  return SampleBatch(batch.role(), std::move(kept), batch.meta() + " | resampled");
}

template <class F>
Outcome timed(F&& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out = body();
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

void Outcome::add_row(CsvRow row) {
  if (row.verdict == "fail") pass = false;
  rows.push_back(std::move(row));
}

void Outcome::add_report(TestReport report) {
  for (CsvRow& row : report_rows(report)) rows.push_back(std::move(row));
  pass = pass && report.pass;
  reports.push_back(std::move(report));
}

Outcome run_mecke(const Options& o) {
  return timed([&] {
    const PalmSource source = PalmSource::parse(o.palm);
    const auto field = parse_field(o.field);
    Outcome out;
    out.scenario = "mecke/" + source_label(o, source) + "/" + field_name(field);
    const RandomStream base = stream(o, out.scenario);
    const SampleBatch batch = perturbed_palm(o, source, field, base);
    const auto functions = canonical_test_functions();
    TestReport report = mecke_battery(batch, functions, o.level);
    report.scenario = out.scenario;
    report.seed = o.seed;
    const bool control = std::holds_alternative<PalmSource::ShiftedLattice>(source.kind);
    const double z = report.max_abs_z();
    if (!control) {
      out.lines.push_back(out.scenario + ": max|z| = " + num(z) + " (bound " + num(report.threshold) +
                          ") " + verdict(report.pass));
      out.add_report(std::move(report));
      return out;
    }
    // Negative control: the battery is expected to reject.
    const bool rejected = !report.pass && z >= 5.0;
    for (CsvRow row : report_rows(report)) {
      row.verdict = row.verdict == "pass" ? "accept" : "reject";
      out.rows.push_back(std::move(row));
    }
    out.rows.push_back({out.scenario, "control:max_abs_z", z, 0.0, batch.size(), o.seed, verdict(rejected)});
    out.pass = rejected;
    out.lines.push_back(out.scenario + " (negative control): max|z| = " + num(z) +
                        (rejected ? ", rejected as expected" : ", NOT rejected"));
    out.reports.push_back(std::move(report));
    return out;
  });
}

Outcome run_invert(const Options& o) {
  return timed([&] {
    const PalmSource source = PalmSource::parse(o.palm);
    const auto field = parse_field(o.field);
    Outcome out;
    out.scenario = "invert/" + source_label(o, source) + "/" + field_name(field);
    const RandomStream base = stream(o, out.scenario);
    const SampleBatch palm = perturbed_palm(o, source, field, base);
    const MeanEstimate mass = inversion_mass_estimate(palm);
    const bool known = o.palm_file.empty();
    out.add_row({out.scenario, "inversion_mass", mass.value, mass.se, palm.size(), o.seed,
                 known ? verdict(within(mass.value, mass.se, 1.0)) : "info"});
    out.lines.push_back(out.scenario + ": mass = " + num(mass.value) + " ± " + num(mass.se));

    const SampleBatch stationary = rejection_resample(
        invert_palm_realline(palm, base), RandomStream(o.seed, scenario_hash(out.scenario + "/resample")));
    out.lines.push_back(out.scenario + ": " + std::to_string(stationary.size()) + " of " +
                        std::to_string(palm.size()) + " items kept by rejection resampling");
    const std::vector<double> offsets{0.0, 0.37, 2.61};
    TestReport report = stationarity_test(stationary, offsets, Window::interval(kReal, 0.0, 1.0), o.level);
    report.scenario = out.scenario;
    report.seed = o.seed;
    out.lines.push_back(out.scenario + ": stationarity min p = " + num(report.min_p_value()) +
                        " (floor " + num(report.threshold) + ") " + verdict(report.pass));
    for (const std::string& note : report.notes) out.lines.push_back("  note: " + note);
    out.add_report(std::move(report));
    return out;
  });
}

Outcome run_voronoi(const Options& o) {
  return timed([&] {
    const PalmSource source = PalmSource::parse(o.palm);
    const auto field = parse_field(o.field);
    Outcome out;
    out.scenario = "voronoi/" + source_label(o, source) + "/" + field_name(field);
    const RandomStream base = stream(o, out.scenario);
    const SampleBatch palm = perturbed_palm(o, source, field, base);
    const MeanEstimate vor = voronoi_mass_estimate(palm);
    const MeanEstimate inv = inversion_mass_estimate(palm);
    // Paired difference per item: w (xi_{-1} + xi_1) / 2 up to sign.
    std::vector<double> diff;
    diff.reserve(palm.size());
    for (const BatchItem& item : palm.items()) {
      diff.push_back(item.weight * (voronoi_zero_volume(item.config) - xi_one(item.config)));
    }
    const MeanEstimate d = mean_estimate(diff);
    const bool known = o.palm_file.empty();
    out.add_row({out.scenario, "voronoi_mass", vor.value, vor.se, palm.size(), o.seed,
                 known ? verdict(within(vor.value, vor.se, 1.0)) : "info"});
    out.add_row({out.scenario, "inversion_mass", inv.value, inv.se, palm.size(), o.seed,
                 known ? verdict(within(inv.value, inv.se, 1.0)) : "info"});
    out.add_row({out.scenario, "voronoi_minus_inversion", d.value, d.se, palm.size(), o.seed,
                 verdict(within(d.value, d.se, 0.0))});
    out.lines.push_back(out.scenario + ": voronoi " + num(vor.value) + " ± " + num(vor.se) +
                        ", inversion " + num(inv.value) + " ± " + num(inv.se) + ", difference " +
                        num(d.value) + " ± " + num(d.se));
    return out;
  });
}

Outcome run_collisions(const Options& o) {
  return timed([&] {
    const auto field = parse_field(o.field);
    if (!field) throw PreconditionError("collisions needs a field");
    Outcome out;
    out.scenario = "collisions/" + field->name();
    const RandomStream base = stream(o, out.scenario);
    gate(*field, kReal, o.window, base);
    const bool expect_simple = field->pointwise_non_atomic();
    for (const char* spec : {"lattice", "poisson:lambda=2", "renewal:gamma:shape=2,scale=0.5"}) {
      const PalmSource source = PalmSource::parse(spec);
      const RandomStream sub = base.for_item(scenario_hash(spec));
      const SampleBatch palm = sample_palm_batch(source, Window::symmetric(kReal, o.window), o.n, sub);
      std::vector<std::size_t> counts(palm.size());
      std::vector<char> simple(palm.size());
      parallel_for(palm.size(), [&](std::size_t i) {
        RandomStream rng = sub.lane(lanes::kField).for_item(i);
        const PointConfig& c = palm.items()[i].config;
        const std::vector<double> l = c.locations();
        const DisplacementTable d = sample_field(*field, kReal, l, rng);
        counts[i] = collision_count(c, d, o.merge_tol);
        simple[i] = perturb(c, d, o.merge_tol).is_simple();
      });
      std::size_t total = 0, nonsimple = 0;
      for (std::size_t i = 0; i < counts.size(); ++i) {
        total += counts[i];
        if (!simple[i]) ++nonsimple;
        if ((counts[i] == 0) != bool(simple[i])) throw Error("collision count disagrees with simplicity");
      }
      out.add_row({out.scenario, std::string("collisions:") + source.name(), double(total), 0.0, palm.size(),
                   o.seed, expect_simple ? verdict(total == 0) : "info"});
      out.lines.push_back(out.scenario + " on " + source.name() + ": " + std::to_string(total) +
                          " colliding pairs, " + std::to_string(nonsimple) + " non-simple of " +
                          std::to_string(palm.size()));
    }
    return out;
  });
}

Outcome run_compact(const Options& o) {
  return timed([&] {
    const GroupDomain g = GroupDomain::cyclic(o.order);
    const Window full = Window::full(g);
    const auto parsed = parse_field(o.field, "negation");
    if (!parsed) throw PreconditionError("compact needs a field");
    const IncrementSampler field(parsed->kind());
    if (!field.supports(g)) throw DomainMismatch("field " + field.name() + " is not defined on " + g.name());
    Outcome out;
    out.scenario = "compact/" + g.name() + "/" + field.name();
    const RandomStream base = stream(o, out.scenario);
    const auto m = static_cast<std::size_t>(o.order);

    std::vector<double> residues;
    for (std::size_t k = 0; k < m; ++k) residues.push_back(double(k));
    const PointConfig whole = PointConfig::simple(full, residues);
    RandomStream rng = base.lane(lanes::kField);
    const DisplacementTable d = sample_field(field, g, residues, rng);
    const PointConfig image = perturb(whole, d);
    const std::size_t collisions = collision_count(whole, d);
    out.lines.push_back("xi_B = " + describe(image));
    if (std::holds_alternative<IncrementSampler::NegationField>(field.kind())) {
      const bool ok = image.size() == 1 && image.atoms()[0] == Atom{0.0, double(m)};
      out.add_row({out.scenario, "fixture:xi_B_weight_at_0", image.weight_at(0.0), 0.0, 1, o.seed, verdict(ok)});
      out.add_row({out.scenario, "fixture:collisions", double(collisions), 0.0, 1, o.seed,
                   verdict(collisions == m * (m - 1))});
      out.lines.push_back("collision_count = " + std::to_string(collisions) + " (m(m-1) = " +
                          std::to_string(m * (m - 1)) + ")");
    } else {
      out.add_row({out.scenario, "fixture:collisions", double(collisions), 0.0, 1, o.seed, "info"});
    }

    // Deterministic fixtures: P(M) against P^nu(M) under the mass-2 field.
    const IncrementSampler doubled(field.kind(), 2.0);
    std::vector<double> evens;
    for (std::size_t k = 0; k < m; k += 2) evens.push_back(double(k));
    const std::pair<const char*, PointConfig> fixtures[] = {
        {"full", whole}, {"single", PointConfig::simple(full, {0.0})}, {"even", PointConfig::simple(full, evens)}};
    out.lines.push_back("fixture   P(M)        P^nu(M)     nu(F)  ratio");
    for (const auto& [name, config] : fixtures) {
      const SampleBatch palm(BatchRole::PalmSide, {{config, 1.0}}, name);
      const double before = invert_palm_compact(palm, base).mass.value;
      const double after = invert_palm_compact(perturb_palm(palm, doubled, base), base).mass.value;
      char line[128];
      std::snprintf(line, sizeof line, "%-9s %-11.6g %-11.6g %-6.3g %.6g", name, before, after, doubled.mass(),
                    after / before);
      out.lines.push_back(line);
      out.add_row({out.scenario, std::string("mass_product:") + name, after / before, 0.0, 1, o.seed,
                   verdict(after == 2.0 * before)});
    }

    // Random fixture: Bernoulli Palm with an i.i.d.-difference field of mass 2.
    const double p = kSiteProbability;
    const double exact = 1.0 - std::pow(1.0 - p, double(m));
    std::vector<std::optional<BatchItem>> slots(o.n);
    const RandomStream palm_lane = base.lane(lanes::kPalm);
    parallel_for(o.n, [&](std::size_t i) {
      RandomStream r = palm_lane.for_item(i);
      slots[i] = sample_bernoulli_palm(p, full, r);
    });
    std::vector<BatchItem> items;
    for (auto& s : slots) items.push_back(std::move(*s));
    const SampleBatch palm(BatchRole::PalmSide, std::move(items), "bernoulli p=0.3");
    const MeanEstimate before = invert_palm_compact(palm, base).mass;
    const SampleBatch moved = perturb_palm(palm, IncrementSampler(IncrementSampler::IidDifference{}, 2.0), base);
    const MeanEstimate after = invert_palm_compact(moved, base).mass;
    out.add_row({out.scenario, "random:mass", before.value, before.se, o.n, o.seed,
                 verdict(within(before.value, before.se, exact))});
    out.add_row({out.scenario, "random:perturbed_mass", after.value, after.se, o.n, o.seed,
                 verdict(within(after.value, after.se, 2.0 * exact))});
    out.lines.push_back("bernoulli(0.3) Palm: P(M) = " + num(before.value) + " ± " + num(before.se) +
                        ", P^nu(M) = " + num(after.value) + " ± " + num(after.se) + " (exact " + num(exact) +
                        " and " + num(2 * exact) + ")");
    return out;
  });
}

Outcome run_heavy_tail(const Options& o) {
  return timed([&] {
    Outcome out;
    out.scenario = "heavy-tail/alpha=" + num(o.alpha);
    const IncrementSampler heavy(IncrementSampler::HeavyTailWalk{o.alpha});
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= o.seeds; ++s) seeds.push_back(s);
    const std::size_t required = o.seeds >= 5 ? o.seeds - 1 : o.seeds;
    const DivergenceReport r = heavy_tail_divergence_demo(heavy, o.sizes, seeds, 5.0, required);
    out.lines.push_back("seed  n         running mean of 1 + B_1");
    for (const RunningMeanRow& row : r.rows) {
      char line[96];
      std::snprintf(line, sizeof line, "%-5llu %-9zu %.6g", static_cast<unsigned long long>(row.seed), row.n,
                    row.running_mean);
      out.lines.push_back(line);
      out.rows.push_back({out.scenario, "running_mean:seed=" + std::to_string(row.seed) + ",n=" + std::to_string(row.n),
                          row.running_mean, row.se, row.n, row.seed, "info"});
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      out.rows.push_back({out.scenario, "growth:seed=" + std::to_string(seeds[i]), r.growth[i], 0.0,
                          o.sizes.back(), seeds[i], "info"});
    }
    const bool unit_alpha = o.alpha >= 1.0;
    if (unit_alpha) {
      out.add_row({out.scenario, "medians_nondecreasing", r.medians_nondecreasing ? 1.0 : 0.0, 0.0, o.sizes.back(),
                   o.seed, verdict(r.medians_nondecreasing)});
    } else {
      out.add_row({out.scenario, "seeds_with_5x_growth", double(r.seeds_meeting_gate), 0.0, o.sizes.back(), o.seed,
                   verdict(r.gate_met)});
    }
    out.lines.push_back(unit_alpha ? std::string("medians nondecreasing: ") + (r.medians_nondecreasing ? "yes" : "no")
                                   : "seeds with >= 5x growth: " + std::to_string(r.seeds_meeting_gate) + " of " +
                                         std::to_string(seeds.size()) + " (need " + std::to_string(required) + ")");

    const DivergenceReport control =
        heavy_tail_divergence_demo(IncrementSampler::parse("walk:poisson=2"), o.sizes, seeds, 5.0, required);
    bool converged = true;
    for (const RunningMeanRow& row : control.rows) {
      if (row.n != o.sizes.back()) continue;
      const bool ok = within(row.running_mean, row.se, 3.0);
      converged = converged && ok;
      out.add_row({out.scenario, "control_mean:seed=" + std::to_string(row.seed), row.running_mean, row.se, row.n,
                   row.seed, verdict(ok)});
    }
    out.lines.push_back(std::string("finite-mean control (mean 3): ") + (converged ? "converged" : "NOT converged"));
    return out;
  });
}

Outcome run_ergodic(const Options& o) {
  return timed([&] {
    const auto field = parse_field(o.field);
    Outcome out;
    out.scenario = "ergodic/lattice/" + field_name(field);
    const RandomStream base = stream(o, out.scenario);
    if (field) gate(*field, kReal, o.windows.back(), base);
    const CountFunctional unit_bin{};
    auto table = [&](const std::string& label, const std::vector<DecayRow>& rows) {
      for (const DecayRow& row : rows) {
        out.lines.push_back(label + " W=" + num(row.window) + ": var = " + num(row.variance) + " ± " +
                            num(row.variance_se));
      }
    };

    const auto rows = ergodic_average_decay({PalmSource{PalmSource::Lattice{}}, field, true}, unit_bin, o.windows,
                                            o.replicas, base);
    table("perturbed", rows);
    for (const DecayRow& row : rows) {
      out.rows.push_back({out.scenario, "variance:W=" + num(row.window), row.variance, row.variance_se,
                          row.replicas, o.seed, "info"});
    }
    const bool halves = rows.back().variance <= rows.front().variance / 2.0;
    out.add_row({out.scenario, "variance_ratio", rows.front().variance / rows.back().variance, 0.0, o.replicas, o.seed,
                 verdict(halves)});

    // Zero field against the unperturbed process, same streams.
    const auto plain = ergodic_average_decay({PalmSource{PalmSource::Lattice{}}, std::nullopt, true}, unit_bin,
                                             o.windows, o.replicas, base);
    const auto zero = ergodic_average_decay({PalmSource{PalmSource::Lattice{}}, IncrementSampler::parse("zero"), true},
                                            unit_bin, o.windows, o.replicas, base);
    for (std::size_t i = 0; i < plain.size(); ++i) {
      const double se = std::hypot(plain[i].variance_se, zero[i].variance_se);
      out.add_row({out.scenario, "zero_field_minus_plain:W=" + num(plain[i].window),
                   zero[i].variance - plain[i].variance, se, o.replicas, o.seed,
                   verdict(within(zero[i].variance - plain[i].variance, se, 0.0))});
    }

    // Degenerate: the lattice seen from its own atom, no random origin.
    const auto fixed = ergodic_average_decay({PalmSource{PalmSource::Lattice{}}, std::nullopt, false}, unit_bin,
                                             o.windows, o.replicas, base);
    table("fixed lattice", fixed);
    for (const DecayRow& row : fixed) {
      out.rows.push_back({out.scenario, "degenerate_variance:W=" + num(row.window), row.variance, row.variance_se,
                          row.replicas, o.seed, "info"});
    }
    out.lines.push_back(std::string("variance halves from W=") + num(o.windows.front()) + " to W=" +
                        num(o.windows.back()) + ": " + (halves ? "yes" : "no"));
    return out;
  });
}

Outcome run_lemma(const Options& o) {
  return timed([&] {
    Outcome out;
    out.scenario = "lemma";
    const LemmaCheckResult r = lemma_identity_check(o.cases, stream(o, out.scenario));
    out.add_row({out.scenario, "max_real_error", r.max_real_error, 0.0, r.cases, o.seed,
                 verdict(r.max_real_error <= kLemmaRealTolerance)});
    out.add_row({out.scenario, "discrete_failures", double(r.discrete_failures), 0.0, r.cases, o.seed,
                 verdict(r.discrete_failures == 0)});
    out.lines.push_back("lemma identities: " + std::to_string(r.cases) + " cases, max real error " +
                        num(r.max_real_error) + ", discrete failures " + std::to_string(r.discrete_failures));
    return out;
  });
}

std::vector<Outcome> run_all(const Options& base_opts) {
  Options o = base_opts;
  o.palm_file.clear();
  o.dump_batch.clear();
  if (o.quick) {
    o.n = 1000;
    o.sizes = {100, 1000, 10000};
    o.windows = {16, 64};
  }
  std::vector<Outcome> all;
  auto with = [&](auto runner, std::string palm, std::string field) {
    Options s = o;
    s.palm = std::move(palm);
    s.field = std::move(field);
    all.push_back(runner(s));
  };
  for (const char* palm : {"lattice", "poisson:lambda=2", "renewal:gamma:shape=2,scale=0.5"}) {
    for (const char* field : {"brownian:sigma=0.1", "brownian:sigma=0.5"}) with(run_mecke, palm, field);
  }
  with(run_mecke, "shifted-lattice", "none");
  with(run_compact, "lattice", "negation");
  with(run_collisions, "lattice", "brownian:sigma=0.5");
  with(run_invert, "lattice", "none");
  with(run_invert, "poisson:lambda=2", "none");
  with(run_invert, "lattice", "brownian:sigma=0.5");
  with(run_voronoi, "poisson:lambda=2", "none");
  with(run_voronoi, "lattice", "brownian:sigma=0.1");
  {
    Options s = o;
    s.alpha = 0.8;
    all.push_back(run_heavy_tail(s));
    s.alpha = 1.0;
    all.push_back(run_heavy_tail(s));
  }
  with(run_ergodic, "lattice", "brownian:sigma=0.5");
  all.push_back(run_lemma(o));
  if (o.quick) {
    for (Outcome& out : all) {
      out.scenario = "quick/" + out.scenario;
      for (CsvRow& row : out.rows) row.scenario = "quick/" + row.scenario;
      for (TestReport& r : out.reports) r.scenario = "quick/" + r.scenario;
    }
  }
  return all;
}

}  // namespace palm_forge::cli

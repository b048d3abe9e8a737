#include "palm_forge/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "palm_forge/errors.hpp"
#include "palm_forge/parallel.hpp"

namespace palm_forge {
namespace {

// Representative of a cyclic residue in (-m/2, m/2]; identity elsewhere.
double centered(const GroupDomain& g, double x) {
  if (!g.is_compact()) return x;
  const double m = static_cast<double>(g.order());
  return x > m / 2.0 ? x - m : x;
}

struct ItemTerms {
  double lhs;
  double rhs;
};

// Sum over atoms in [lo, hi] of mu_x * bump(x - offset).
double weighted_bump_sum(const PointConfig& config, const TriangleBump& bump, double offset) {
  const auto [first, last] = config.range(offset + bump.lo(), offset + bump.hi());
  double sum = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    const Atom& a = config.atoms()[i];
    sum += a.weight * bump(a.location - offset);
  }
  return sum;
}

ItemTerms mecke_terms_ordered(const PointConfig& config, const TestFunction& f) {
  const double rhs = weighted_bump_sum(config, f.g, 0.0) * std::exp(-weighted_bump_sum(config, f.h, 0.0));
  // g(-t) != 0 only for t in [-g.hi, -g.lo].
  const auto [first, last] = config.range(-f.g.hi(), -f.g.lo());
  double lhs = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    const Atom& t = config.atoms()[i];
    const double gt = f.g(-t.location);
    if (gt == 0.0) continue;
    lhs += t.weight * gt * std::exp(-weighted_bump_sum(config, f.h, t.location));
  }
  return {lhs, rhs};
}

ItemTerms mecke_terms_cyclic(const PointConfig& config, const TestFunction& f) {
  const GroupDomain& g = config.domain();
  auto measure_h = [&](double shift) {
    double sum = 0.0;
    for (const Atom& x : config.atoms()) {
      sum += x.weight * f.h(centered(g, g.subtract(x.location, shift)));
    }
    return sum;
  };
  double gsum = 0.0;
  double lhs = 0.0;
  for (const Atom& t : config.atoms()) {
    gsum += t.weight * f.g(centered(g, t.location));
    const double gt = f.g(centered(g, g.negate(t.location)));
    if (gt != 0.0) lhs += t.weight * gt * std::exp(-measure_h(t.location));
  }
  return {lhs, gsum * std::exp(-measure_h(0.0))};
}

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
  double sw = 0.0, s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sw += weights[i];
    s += weights[i] * values[i];
  }
  return s / sw;
}

}  // namespace

double TriangleBump::operator()(double x) const noexcept {
  const double u = 1.0 - std::abs(x - center) / radius;
  return u > 0.0 ? height * u : 0.0;
}

double TriangleBump::reach() const noexcept { return std::max(std::abs(lo()), std::abs(hi())); }

double TestFunction::operator()(const PointConfig& config, double t) const {
  const GroupDomain& dom = config.domain();
  double mass = 0.0;
  for (const Atom& x : config.atoms()) mass += x.weight * h(centered(dom, x.location));
  return g(centered(dom, t)) * std::exp(-mass);
}

std::string TestFunction::label() const {
  return "g(c=" + format_number(g.center) + ",r=" + format_number(g.radius) + ") h(c=" +
         format_number(h.center) + ",r=" + format_number(h.radius) +
         ",a=" + format_number(h.height) + ")";
}

std::vector<TestFunction> canonical_test_functions() {
  auto f = [](double gc, double gr, double hc, double ha) {
    return TestFunction{{gc, gr, 1.0}, {hc, 1.0, ha}};
  };
  return {f(-2, 1, 0, 0.5), f(-2, 2, 1, 1.0), f(0, 1, 0, 1.0), f(0, 2, 1, 0.5),
          f(2, 1, 1, 1.0),  f(2, 2, 0, 0.5),  f(0, 1, 1, 0.5), f(0, 2, 0, 1.0)};
}

double TestReport::max_abs_z() const noexcept {
  double worst = 0.0;
  for (const TestEntry& e : entries) worst = std::max(worst, std::abs(e.z));
  return worst;
}

double TestReport::min_p_value() const noexcept {
  double best = 1.0;
  for (const TestEntry& e : entries) best = std::min(best, e.p_value);
  return best;
}

TestEntry mecke_residual(const SampleBatch& batch, const TestFunction& f) {
  if (batch.role() != BatchRole::PalmSide) {
    throw PreconditionError("the Mecke residual is defined for Palm-side batches");
  }
  const GroupDomain& g = batch.domain();
  const std::size_t n = batch.size();
  std::vector<double> lhs(n), rhs(n), diff(n);
  parallel_for(n, [&](std::size_t i) {
    const BatchItem& item = batch.items()[i];
    if (!g.is_compact()) {
      const double core = item.config.window().inner_radius() / 2.0;
      if (f.g.reach() > core || f.h.reach() > core) {
        throw BiasError("test function " + f.label() + " reaches outside the core window (radius " +
                        format_number(core) + ")");
      }
    }
    const ItemTerms terms =
        g.is_compact() ? mecke_terms_cyclic(item.config, f) : mecke_terms_ordered(item.config, f);
    lhs[i] = item.weight * terms.lhs;
    rhs[i] = item.weight * terms.rhs;
    diff[i] = lhs[i] - rhs[i];
  });

  TestEntry entry;
  entry.label = f.label();
  entry.lhs = mean_estimate(lhs).value;
  entry.rhs = mean_estimate(rhs).value;
  const MeanEstimate d = mean_estimate(diff);
  entry.residual = d.value;
  entry.se = d.se;
  // Residuals and standard errors below the rounding floor carry no signal.
  const double floor = 1e-12 * (1.0 + std::abs(entry.lhs) + std::abs(entry.rhs));
  if (std::abs(d.value) <= floor) {
    entry.z = 0.0;
  } else if (d.se <= floor) {
    entry.z = std::copysign(std::numeric_limits<double>::infinity(), d.value);
  } else {
    entry.z = d.value / d.se;
  }
  return entry;
}

TestReport mecke_battery(const SampleBatch& batch, std::span<const TestFunction> functions,
                         double level) {
  if (functions.empty()) throw PreconditionError("mecke_battery needs at least one function");
  TestReport report;
  report.test = "mecke";
  report.scenario = batch.meta();
  report.n = batch.size();
  report.level = level;
  report.threshold = bonferroni_z(level, functions.size());
  report.pass = true;
  for (const TestFunction& f : functions) {
    TestEntry e = mecke_residual(batch, f);
    e.pass = std::abs(e.z) <= report.threshold;
    report.pass = report.pass && e.pass;
    report.entries.push_back(std::move(e));
  }
  if (batch.size() < 2) report.notes.push_back("single item: standard errors are undefined");
  return report;
}

TestReport stationarity_test(const SampleBatch& batch, std::span<const double> offsets,
                             const Window& bin, double level) {
  if (batch.domain().kind() != GroupKind::RealLine) {
    throw PreconditionError("stationarity_test is implemented on the real line");
  }
  if (offsets.size() < 2) throw PreconditionError("stationarity_test needs at least two offsets");
  const std::size_t k = offsets.size();
  std::vector<std::vector<double>> counts(k), weights(k);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const BatchItem& item = batch.items()[i];
    const std::size_t slot = i % k;
    const double off = offsets[slot];
    const double core = item.config.window().inner_radius() / 2.0;
    for (double o : offsets) {
      if (std::max(std::abs(bin.lo() + o), std::abs(bin.hi() + o)) > core) {
        throw BiasError("stationarity bin at offset " + format_number(o) +
                        " leaves the core window");
      }
    }
    counts[slot].push_back(item.config.mass_in(bin.lo() + off, bin.hi() + off));
    weights[slot].push_back(item.weight);
  }

  TestReport report;
  report.test = "stationarity";
  report.scenario = batch.meta();
  report.n = batch.size();
  report.level = level;
  const std::size_t pairs = k * (k - 1) / 2;
  report.threshold = level / double(pairs);
  report.pass = true;
  for (std::size_t a = 0; a < k; ++a) {
    if (counts[a].size() < 100) {
      report.notes.push_back("power warning: offset " + format_number(offsets[a]) + " has only " +
                             std::to_string(counts[a].size()) + " samples");
    }
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      if (counts[a].empty() || counts[b].empty()) {
        throw PreconditionError("stationarity_test needs at least one item per offset");
      }
      const KsResult ks = weighted_ks_two_sample(counts[a], weights[a], counts[b], weights[b]);
      TestEntry e;
      e.label = "offset " + format_number(offsets[a]) + " vs " + format_number(offsets[b]);
      e.lhs = weighted_mean(counts[a], weights[a]);
      e.rhs = weighted_mean(counts[b], weights[b]);
      e.residual = ks.statistic;
      e.p_value = ks.p_value;
      e.pass = ks.p_value >= report.threshold;
      report.pass = report.pass && e.pass;
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

std::vector<DecayRow> ergodic_average_decay(const ErgodicScenario& scenario,
                                            const CountFunctional& functional,
                                            std::span<const double> window_sizes,
                                            std::size_t replicas, const RandomStream& base,
                                            double grid_step) {
  if (replicas < 2) throw PreconditionError("ergodic_average_decay needs at least two replicas");
  if (!(grid_step > 0.0)) throw PreconditionError("grid step must be positive");
  const GroupDomain real = GroupDomain::real_line();
  const RandomStream lane = base.lane(lanes::kReplica);
  std::vector<DecayRow> rows;
  for (std::size_t w = 0; w < window_sizes.size(); ++w) {
    const double size = window_sizes[w];
    const Window window = Window::symmetric(real, size);
    const auto grid_points = static_cast<std::size_t>(std::llround(size / grid_step));
    if (grid_points == 0) throw PreconditionError("window smaller than one grid step");
    const double step = size / double(grid_points);

    std::vector<double> averages(replicas), weights(replicas);
    parallel_for(replicas, [&](std::size_t r) {
      RandomStream rng = lane.for_item(w * replicas + r);
      BatchItem item = sample_palm(scenario.palm, window, rng);
      if (scenario.field) {
        const std::vector<double> locations = item.config.locations();
        item.config = perturb(item.config, sample_field(*scenario.field, real, locations, rng));
      }
      double weight = 1.0;
      if (scenario.random_origin) {
        const auto atoms = item.config.atoms();
        const auto it = std::upper_bound(atoms.begin(), atoms.end(), 0.0,
                                         [](double x, const Atom& a) { return x < a.location; });
        if (it == atoms.end()) throw InsufficientWindow("no atom right of zero");
        const double first = it->location;
        item.config = stationary_from_palm(item.config, first * rng.uniform());
        weight = first;
      }
      double sum = 0.0;
      for (std::size_t k = 0; k < grid_points; ++k) {
        sum += functional(item.config, -size / 2.0 + (double(k) + 0.5) * step);
      }
      averages[r] = sum / double(grid_points);
      weights[r] = weight;
    });

    double sw = 0.0;
    for (double v : weights) sw += v;
    const double mean = weighted_mean(averages, weights);
    double variance = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) {
      variance += weights[r] / sw * (averages[r] - mean) * (averages[r] - mean);
    }
    // Delta-method SE of the weighted variance.
    double se2 = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) {
      const double p = weights[r] / sw;
      const double dev = (averages[r] - mean) * (averages[r] - mean) - variance;
      se2 += p * p * dev * dev;
    }
    rows.push_back({size, mean, variance, std::sqrt(se2), replicas});
  }
  return rows;
}

LemmaCheckResult lemma_identity_check(std::size_t cases_per_group, const RandomStream& base) {
  LemmaCheckResult result;
  const RandomStream lane = base.lane(lanes::kCheck);
  std::uint64_t case_index = 0;

  for (int group = 0; group < 3; ++group) {
    for (std::size_t c = 0; c < cases_per_group; ++c, ++case_index) {
      RandomStream rng = lane.for_item(case_index);
      GroupDomain domain = GroupDomain::real_line();
      Window window = Window::symmetric(domain, 10.0);
      std::vector<IncrementSampler> fields;
      if (group == 0) {
        fields = {IncrementSampler(IncrementSampler::TwoSidedBrownian{0.1 + 2.0 * rng.uniform()}),
                  IncrementSampler(IncrementSampler::LinearDrift{1.8 * rng.uniform() - 0.9}),
                  IncrementSampler(IncrementSampler::NegationField{}),
                  IncrementSampler(IncrementSampler::ZeroField{})};
      } else if (group == 1) {
        domain = GroupDomain::integer_lattice();
        window = Window::symmetric(domain, 20.0);
        fields = {IncrementSampler(IncrementSampler::IidWalk{{StepDistribution::UniformInt{-3, 3}}}),
                  IncrementSampler(IncrementSampler::IidWalk{{StepDistribution::Poisson{1.5}}}),
                  IncrementSampler(IncrementSampler::NegationField{}),
                  IncrementSampler(IncrementSampler::ZeroField{})};
      } else {
        domain = GroupDomain::cyclic(2 + static_cast<std::int64_t>(rng() % 15));
        window = Window::full(domain);
        fields = {IncrementSampler(IncrementSampler::IidDifference{}),
                  IncrementSampler(IncrementSampler::NegationField{}),
                  IncrementSampler(IncrementSampler::ZeroField{})};
      }
      const IncrementSampler& field = fields[rng() % fields.size()];

      const std::size_t count = 1 + rng() % 30;
      std::vector<Atom> atoms;
      for (std::size_t i = 0; i < count; ++i) {
        atoms.push_back({sample_haar(window, rng), (rng() % 3 == 0) ? 0.5 + 2.0 * rng.uniform() : 1.0});
      }
      const PointConfig config = PointConfig::from_unsorted(window, std::move(atoms), 0.0);
      std::vector<double> locations = config.locations();
      if (!config.has_atom_at(0.0)) {
        locations.insert(std::lower_bound(locations.begin(), locations.end(), 0.0), 0.0);
      }
      const DisplacementTable table = sample_field(field, domain, locations, rng);
      const double t = locations[rng() % locations.size()];

      const DisplacementTable shifted = shift_table(table, t);
      // B_t = -(theta_t B)_{-t}
      const double back = domain.negate(shifted.at(domain.negate(t)));
      const double err1 = std::abs(back - table.at(t));

      // tau_{t + B_t} Gamma(xi, B) = Gamma(tau_t xi, theta_t B)
      const PointConfig lhs = translate(perturb(config, table), domain.add(t, table.at(t)));
      const PointConfig rhs = perturb(translate(config, t), shifted);
      const double err2 = max_atom_discrepancy(lhs, rhs);

      ++result.cases;
      if (domain.is_discrete()) {
        if (err1 != 0.0 || err2 != 0.0) ++result.discrete_failures;
      } else {
        result.max_real_error = std::max({result.max_real_error, err1, err2});
      }
    }
  }
  result.pass = result.discrete_failures == 0 && result.max_real_error <= kLemmaRealTolerance;
  return result;
}

}  // namespace palm_forge

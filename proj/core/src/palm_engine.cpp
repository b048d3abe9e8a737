#include "palm_forge/palm_engine.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "palm_forge/errors.hpp"
#include "palm_forge/parallel.hpp"

namespace palm_forge {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

double parse_number(std::string_view text) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw PreconditionError("cannot parse number from '" + std::string(text) + "'");
}

// Value of `key` in "k1=v1,k2=v2".
double param(std::string_view params, std::string_view key) {
  while (!params.empty()) {
    const auto comma = params.find(',');
    const auto item = params.substr(0, comma);
    const auto eq = item.find('=');
    if (eq != std::string_view::npos && item.substr(0, eq) == key) {
      return parse_number(item.substr(eq + 1));
    }
    if (comma == std::string_view::npos) break;
    params.remove_prefix(comma + 1);
  }
  throw PreconditionError("missing parameter '" + std::string(key) + "'");
}

double first_positive_atom(const PointConfig& config) {
  const auto atoms = config.atoms();
  const auto it = std::upper_bound(atoms.begin(), atoms.end(), 0.0,
                                   [](double x, const Atom& a) { return x < a.location; });
  if (it == atoms.end()) {
    throw InsufficientWindow("Palm configuration has no atom right of zero; widen the window");
  }
  return it->location;
}

std::string append_meta(const std::string& meta, const std::string& step) {
  return meta.empty() ? step : meta + " | " + step;
}

}  // namespace

std::string_view to_string(BatchRole role) noexcept {
  return role == BatchRole::PalmSide ? "palm" : "stationary";
}

SampleBatch::SampleBatch(BatchRole role, std::vector<BatchItem> items, std::string meta)
    : role_(role), items_(std::move(items)), meta_(std::move(meta)) {
  if (items_.empty()) throw PreconditionError("a sample batch needs at least one item");
  double total = 0.0;
  for (const BatchItem& item : items_) {
    if (!(item.weight >= 0.0) || !std::isfinite(item.weight)) {
      throw PreconditionError("batch item weights must be finite and nonnegative");
    }
    if (!(item.config.domain() == items_.front().config.domain())) {
      throw DomainMismatch("batch items must share one group");
    }
    if (role_ == BatchRole::PalmSide && !item.config.has_atom_at(0.0)) {
      throw PreconditionError("every Palm-side item must have an atom at zero");
    }
    total += item.weight;
  }
  if (!(total > 0.0)) throw PreconditionError("batch total weight must be positive");
}

double SampleBatch::total_weight() const noexcept {
  double total = 0.0;
  for (const BatchItem& item : items_) total += item.weight;
  return total;
}

double SampleBatch::mass() const noexcept { return total_weight() / double(items_.size()); }

SampleBatch SampleBatch::relabeled(BatchRole role) const {
  return SampleBatch(role, items_, append_meta(meta_, "relabeled " + std::string(to_string(role))));
}

double WeightFunction::operator()(const GroupDomain& domain, double t) const noexcept {
  if (domain.is_discrete()) {
    const double r = std::floor(radius);
    double d = std::abs(t);
    if (domain.is_compact()) d = std::min(d, double(domain.order()) - d);
    return d <= r ? 1.0 / (2.0 * r + 1.0) : 0.0;
  }
  return std::abs(t) <= radius ? 1.0 / (2.0 * radius) : 0.0;
}

GapDistribution GapDistribution::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const auto head = spec.substr(0, colon);
  const auto params = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  GapDistribution out;
  if (head == "fixed") {
    out.law = Deterministic{param(params, "gap")};
  } else if (head == "gamma") {
    out.law = Gamma{param(params, "shape"), param(params, "scale")};
  } else if (head == "exp") {
    out.law = Exponential{param(params, "rate")};
  } else {
    throw PreconditionError("unknown gap distribution '" + std::string(spec) + "'");
  }
  if (!(out.mean() > 0.0) || !std::isfinite(out.mean())) {
    throw PreconditionError("gap distribution needs positive parameters");
  }
  std::visit(Overloaded{[](const Gamma& g) {
                          if (!(g.shape > 0.0 && g.scale > 0.0)) {
                            throw PreconditionError("gamma gaps need shape, scale > 0");
                          }
                        },
                        [](const auto&) {}},
             out.law);
  return out;
}

double GapDistribution::mean() const noexcept {
  return std::visit(Overloaded{[](const Deterministic& d) { return d.value; },
                               [](const Gamma& g) { return g.shape * g.scale; },
                               [](const Exponential& e) { return 1.0 / e.rate; }},
                    law);
}

double GapDistribution::draw(RandomStream& rng) const {
  for (;;) {
    const double gap = std::visit(
        Overloaded{[](const Deterministic& d) { return d.value; },
                   [&](const Gamma& g) { return std::gamma_distribution<double>(g.shape, g.scale)(rng); },
                   [&](const Exponential& e) {
                     return std::exponential_distribution<double>(e.rate)(rng);
                   }},
        law);
    if (gap > 0.0) return gap;
  }
}

std::string GapDistribution::name() const {
  return std::visit(
      Overloaded{[](const Deterministic& d) { return "fixed:gap=" + format_number(d.value); },
                 [](const Gamma& g) {
                   return "gamma:shape=" + format_number(g.shape) + ",scale=" + format_number(g.scale);
                 },
                 [](const Exponential& e) { return "exp:rate=" + format_number(e.rate); }},
      law);
}

PalmSource PalmSource::parse(std::string_view spec) {
  if (spec == "lattice") return {Lattice{}};
  if (spec == "shifted-lattice") return {ShiftedLattice{}};
  if (spec.starts_with("poisson:")) {
    const double lambda = param(spec.substr(8), "lambda");
    if (!(lambda > 0.0)) throw PreconditionError("Poisson intensity must be positive");
    return {Poisson{lambda}};
  }
  if (spec.starts_with("renewal:")) return {Renewal{GapDistribution::parse(spec.substr(8))}};
  throw PreconditionError("unknown Palm source '" + std::string(spec) + "'");
}

std::string PalmSource::name() const {
  return std::visit(
      Overloaded{[](const Lattice&) { return std::string("lattice"); },
                 [](const Poisson& p) { return "poisson:lambda=" + format_number(p.lambda); },
                 [](const Renewal& r) { return "renewal:" + r.gaps.name(); },
                 [](const ShiftedLattice&) { return std::string("shifted-lattice"); }},
      kind);
}

double PalmSource::mean_gap() const noexcept {
  return std::visit(Overloaded{[](const Poisson& p) { return 1.0 / p.lambda; },
                               [](const Renewal& r) { return r.gaps.mean(); },
                               [](const auto&) { return 1.0; }},
                    kind);
}

PointConfig sample_lattice_palm(const Window& window) {
  if (window.domain().is_compact()) {
    throw PreconditionError("lattice Palm configurations live on the real line or the lattice");
  }
  std::vector<Atom> atoms;
  for (double k = std::ceil(window.lo()); k <= window.hi(); k += 1.0) atoms.push_back({k, 1.0});
  return PointConfig(window, std::move(atoms));
}

BatchItem sample_poisson_palm(double lambda, const Window& window, RandomStream& rng) {
  if (window.domain().kind() != GroupKind::RealLine) {
    throw PreconditionError("Poisson Palm sampler needs a real-line window");
  }
  std::poisson_distribution<long> count(lambda * haar_volume(window));
  const long n = count(rng);
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(n) + 1);
  atoms.push_back({0.0, 1.0});
  for (long i = 0; i < n; ++i) atoms.push_back({sample_haar(window, rng), 1.0});
  return {PointConfig::from_unsorted(window, std::move(atoms), 0.0), lambda};
}

BatchItem sample_renewal_palm(const GapDistribution& gaps, const Window& window,
                              RandomStream& rng) {
  if (window.domain().kind() != GroupKind::RealLine) {
    throw PreconditionError("renewal Palm sampler needs a real-line window");
  }
  std::vector<Atom> atoms{{0.0, 1.0}};
  for (double x = gaps.draw(rng); x <= window.hi(); x += gaps.draw(rng)) atoms.push_back({x, 1.0});
  for (double x = -gaps.draw(rng); x >= window.lo(); x -= gaps.draw(rng)) atoms.push_back({x, 1.0});
  return {PointConfig::from_unsorted(window, std::move(atoms), 0.0), 1.0 / gaps.mean()};
}

BatchItem sample_shifted_lattice_control(const Window& window, RandomStream& rng) {
  if (window.domain().kind() != GroupKind::RealLine) {
    throw PreconditionError("shifted lattice control needs a real-line window");
  }
  const double u = rng.uniform_open();
  std::vector<Atom> atoms{{0.0, 1.0}};
  for (double k = std::ceil(window.lo() - u); k + u <= window.hi(); k += 1.0) {
    if (k + u >= window.lo()) atoms.push_back({k + u, 1.0});
  }
  return {PointConfig::from_unsorted(window, std::move(atoms), 0.0), 1.0};
}

BatchItem sample_bernoulli_palm(double p, const Window& window, RandomStream& rng) {
  const GroupDomain& g = window.domain();
  if (!g.is_compact()) throw PreconditionError("Bernoulli Palm sampler needs the cyclic group");
  if (!(p > 0.0 && p <= 1.0)) throw PreconditionError("Bernoulli probability must lie in (0, 1]");
  std::vector<Atom> atoms{{0.0, 1.0}};
  for (std::int64_t k = 1; k < g.order(); ++k) {
    if (rng.uniform() < p) atoms.push_back({double(k), 1.0});
  }
  return {PointConfig(window, std::move(atoms)), p};
}

BatchItem sample_palm(const PalmSource& source, const Window& window, RandomStream& rng) {
  return std::visit(
      Overloaded{[&](const PalmSource::Lattice&) { return BatchItem{sample_lattice_palm(window), 1.0}; },
                 [&](const PalmSource::Poisson& p) { return sample_poisson_palm(p.lambda, window, rng); },
                 [&](const PalmSource::Renewal& r) { return sample_renewal_palm(r.gaps, window, rng); },
                 [&](const PalmSource::ShiftedLattice&) {
                   return sample_shifted_lattice_control(window, rng);
                 }},
      source.kind);
}

SampleBatch sample_palm_batch(const PalmSource& source, const Window& window, std::size_t n,
                              const RandomStream& base) {
  const RandomStream lane = base.lane(lanes::kPalm);
  std::vector<std::optional<BatchItem>> slots(n);
  parallel_for(n, [&](std::size_t i) {
    RandomStream rng = lane.for_item(i);
    slots[i] = sample_palm(source, window, rng);
  });
  std::vector<BatchItem> items;
  items.reserve(n);
  for (auto& slot : slots) items.push_back(std::move(*slot));
  std::ostringstream meta;
  meta << source.name() << " window=[" << window.lo() << "," << window.hi()
       << "] seed=" << base.seed();
  return SampleBatch(BatchRole::PalmSide, std::move(items), meta.str());
}

SampleBatch perturb_palm(const SampleBatch& batch, const IncrementSampler& sampler,
                         const RandomStream& base) {
  if (batch.role() != BatchRole::PalmSide) {
    throw PreconditionError("perturb_palm expects a Palm-side batch");
  }
  if (!sampler.supports(batch.domain())) {
    throw DomainMismatch("field " + sampler.name() + " is not defined on " + batch.domain().name());
  }
  const RandomStream lane = base.lane(lanes::kField);
  const auto source = batch.items();
  std::vector<std::optional<BatchItem>> slots(source.size());
  parallel_for(source.size(), [&](std::size_t i) {
    RandomStream rng = lane.for_item(i);
    const std::vector<double> locations = source[i].config.locations();
    const DisplacementTable field = sample_field(sampler, batch.domain(), locations, rng);
    slots[i] = BatchItem{perturb(source[i].config, field), source[i].weight * sampler.mass()};
  });
  std::vector<BatchItem> items;
  items.reserve(slots.size());
  for (auto& slot : slots) items.push_back(std::move(*slot));
  return SampleBatch(BatchRole::PalmSide, std::move(items),
                     append_meta(batch.meta(), "perturbed " + sampler.name()));
}

PointConfig stationary_from_palm(const PointConfig& palm, double shift) {
  return translate(palm, shift);
}

SampleBatch invert_palm_realline(const SampleBatch& batch, const RandomStream& base) {
  if (batch.role() != BatchRole::PalmSide) {
    throw PreconditionError("invert_palm_realline expects a Palm-side batch");
  }
  if (batch.domain().kind() != GroupKind::RealLine) {
    throw PreconditionError("invert_palm_realline is defined on the real line");
  }
  const RandomStream lane = base.lane(lanes::kInversion);
  const auto source = batch.items();
  std::vector<std::optional<BatchItem>> slots(source.size());
  parallel_for(source.size(), [&](std::size_t i) {
    RandomStream rng = lane.for_item(i);
    const double first = first_positive_atom(source[i].config);
    const double shift = first * rng.uniform();
    slots[i] = BatchItem{stationary_from_palm(source[i].config, shift), source[i].weight * first};
  });
  std::vector<BatchItem> items;
  items.reserve(slots.size());
  for (auto& slot : slots) items.push_back(std::move(*slot));
  return SampleBatch(BatchRole::StationarySide, std::move(items),
                     append_meta(batch.meta(), "inverted (real line)"));
}

MeanEstimate inversion_mass_estimate(const SampleBatch& batch) {
  std::vector<double> values;
  values.reserve(batch.size());
  for (const BatchItem& item : batch.items()) {
    values.push_back(item.weight * first_positive_atom(item.config));
  }
  return mean_estimate(values);
}

CompactInversion invert_palm_compact(const SampleBatch& batch, const RandomStream& base) {
  if (batch.role() != BatchRole::PalmSide) {
    throw PreconditionError("invert_palm_compact expects a Palm-side batch");
  }
  const GroupDomain& g = batch.domain();
  if (!g.is_compact()) throw PreconditionError("invert_palm_compact needs the cyclic group");
  const double order = static_cast<double>(g.order());
  const RandomStream lane = base.lane(lanes::kInversion);
  std::vector<BatchItem> items;
  std::vector<double> weights;
  items.reserve(batch.size());
  weights.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const BatchItem& item = batch.items()[i];
    const double total = item.config.total_weight();
    if (!(total > 0.0)) throw PreconditionError("empty configuration in a Palm batch");
    RandomStream rng = lane.for_item(i);
    const double shift = sample_haar(Window::full(g), rng);
    const double weight = item.weight * order / total;
    items.push_back({stationary_from_palm(item.config, shift), weight});
    weights.push_back(weight);
  }
  return {SampleBatch(BatchRole::StationarySide, std::move(items),
                      append_meta(batch.meta(), "inverted (compact)")),
          mean_estimate(weights)};
}

SampleBatch palm_of_stationary(const SampleBatch& batch, const WeightFunction& omega) {
  if (batch.role() != BatchRole::StationarySide) {
    throw PreconditionError("palm_of_stationary expects a stationary-side batch");
  }
  const GroupDomain& g = batch.domain();
  std::vector<BatchItem> items;
  for (const BatchItem& item : batch.items()) {
    if (!g.is_compact() && omega.radius > item.config.window().inner_radius() / 2.0) {
      throw BiasError("weight function radius exceeds the core window of a batch item");
    }
    for (const Atom& atom : item.config.atoms()) {
      const double w = omega(g, atom.location);
      if (w > 0.0 && item.weight > 0.0) {
        items.push_back({translate(item.config, atom.location), item.weight * w * atom.weight});
      }
    }
  }
  if (items.empty()) throw PreconditionError("no atom inside the weight function support");
  // One output item per atom: rescale so mass() keeps the input's 1/n
  // normalization.
  const double scale = double(items.size()) / double(batch.size());
  for (BatchItem& item : items) item.weight *= scale;
  return SampleBatch(BatchRole::PalmSide, std::move(items),
                     append_meta(batch.meta(), "palm extraction r=" + format_number(omega.radius)));
}

MeanEstimate voronoi_mass_estimate(const SampleBatch& batch) {
  std::vector<double> values;
  values.reserve(batch.size());
  for (const BatchItem& item : batch.items()) {
    values.push_back(item.weight * voronoi_zero_volume(item.config));
  }
  return mean_estimate(values);
}

DivergenceReport heavy_tail_divergence_demo(const IncrementSampler& sampler,
                                            std::span<const std::size_t> sizes,
                                            std::span<const std::uint64_t> seeds,
                                            double growth_factor, std::size_t required_seeds) {
  const GroupDomain lattice = GroupDomain::integer_lattice();
  if (!sampler.supports(lattice)) {
    throw DomainMismatch("divergence demo needs a lattice field, got " + sampler.name());
  }
  if (sizes.empty() || seeds.empty() || !std::is_sorted(sizes.begin(), sizes.end())) {
    throw PreconditionError("divergence demo needs sorted sizes and at least one seed");
  }
  const double locations[] = {0.0, 1.0};
  DivergenceReport report;
  std::vector<std::vector<double>> per_size(sizes.size());
  for (std::uint64_t seed : seeds) {
    RandomStream rng(seed, scenario_hash("heavy-tail"), 0, lanes::kField);
    double mean = 0.0, m2 = 0.0;
    std::size_t drawn = 0;
    std::vector<double> means;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      for (; drawn < sizes[k]; ++drawn) {
        const double v = 1.0 + sample_field(sampler, lattice, locations, rng).at(1.0);
        const double delta = v - mean;
        mean += delta / double(drawn + 1);
        m2 += delta * (v - mean);
      }
      const double se = drawn > 1 ? std::sqrt(m2 / double(drawn - 1) / double(drawn)) : 0.0;
      report.rows.push_back({seed, sizes[k], mean, se});
      per_size[k].push_back(mean);
      means.push_back(mean);
    }
    const double growth = means.back() / means.front();
    report.growth.push_back(growth);
    if (growth >= growth_factor) ++report.seeds_meeting_gate;
  }
  for (auto& values : per_size) {
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    report.medians.push_back(m % 2 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]));
  }
  report.gate_met = report.seeds_meeting_gate >= required_seeds;
  report.medians_nondecreasing = std::is_sorted(report.medians.begin(), report.medians.end());
  return report;
}

}  // namespace palm_forge

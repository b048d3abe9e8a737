#include "palm_forge/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "palm_forge/errors.hpp"

namespace palm_forge {
namespace {

bool same_location(const GroupDomain& domain, double a, double b, double tolerance) {
  return domain.is_discrete() ? a == b : std::abs(a - b) <= tolerance;
}

// Sorts and merges runs of coinciding atoms. A run keeps the location of
// its first member unless some member sits exactly at zero.
std::vector<Atom> sort_and_merge(const GroupDomain& domain, std::vector<Atom> atoms,
                                 double tolerance) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (const Atom& atom : atoms) {
    if (!merged.empty() &&
        same_location(domain, merged.back().location, atom.location, tolerance)) {
      merged.back().weight += atom.weight;
      if (atom.location == 0.0) merged.back().location = 0.0;
      continue;
    }
    merged.push_back(atom);
  }
  return merged;
}

}  // namespace

PointConfig::PointConfig(Window window, std::vector<Atom> atoms)
    : window_(std::move(window)), atoms_(std::move(atoms)) {
  const GroupDomain& g = window_.domain();
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    g.require_element(a.location);
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw PreconditionError("atom weights must be positive and finite");
    }
    if (!window_.contains(a.location)) {
      throw PreconditionError("atom at " + std::to_string(a.location) +
                              " lies outside the window");
    }
    if (i > 0 && !(atoms_[i - 1].location < a.location)) {
      throw PreconditionError("atoms must be sorted strictly increasing by location");
    }
  }
}

PointConfig PointConfig::from_unsorted(Window window, std::vector<Atom> atoms,
                                       double merge_tolerance) {
  auto merged = sort_and_merge(window.domain(), std::move(atoms), merge_tolerance);
  return PointConfig(std::move(window), std::move(merged));
}

PointConfig PointConfig::simple(Window window, std::vector<double> locations) {
  std::vector<Atom> atoms;
  atoms.reserve(locations.size());
  for (double x : locations) atoms.push_back({x, 1.0});
  return from_unsorted(std::move(window), std::move(atoms), 0.0);
}

std::vector<double> PointConfig::locations() const {
  std::vector<double> out;
  out.reserve(atoms_.size());
  for (const Atom& a : atoms_) out.push_back(a.location);
  return out;
}

double PointConfig::total_weight() const noexcept {
  double total = 0.0;
  for (const Atom& a : atoms_) total += a.weight;
  return total;
}

bool PointConfig::is_simple() const noexcept {
  return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.weight == 1.0; });
}

bool PointConfig::has_atom_at(double location) const noexcept {
  return weight_at(location) > 0.0;
}

double PointConfig::weight_at(double location) const noexcept {
  const auto it = std::lower_bound(
      atoms_.begin(), atoms_.end(), location,
      [](const Atom& a, double x) { return a.location < x; });
  return (it != atoms_.end() && it->location == location) ? it->weight : 0.0;
}

std::pair<std::size_t, std::size_t> PointConfig::range(double lo, double hi) const noexcept {
  const auto first = std::lower_bound(atoms_.begin(), atoms_.end(), lo,
                                      [](const Atom& a, double x) { return a.location < x; });
  const auto last = std::upper_bound(first, atoms_.end(), hi,
                                     [](double x, const Atom& a) { return x < a.location; });
  return {static_cast<std::size_t>(first - atoms_.begin()),
          static_cast<std::size_t>(last - atoms_.begin())};
}

double PointConfig::mass_in(double lo, double hi) const noexcept {
  const auto first = std::lower_bound(atoms_.begin(), atoms_.end(), lo,
                                      [](const Atom& a, double x) { return a.location < x; });
  double mass = 0.0;
  for (auto it = first; it != atoms_.end() && it->location < hi; ++it) mass += it->weight;
  return mass;
}

DisplacementTable::DisplacementTable(GroupDomain domain, std::vector<Entry> entries)
    : domain_(domain), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.location < b.location; });
  bool has_zero = false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Entry& e = entries_[i];
    domain_.require_element(e.location);
    domain_.require_element(e.displacement);
    if (i > 0 && entries_[i - 1].location == e.location) {
      throw PreconditionError("displacement table locations must be distinct");
    }
    if (e.location == 0.0) {
      if (e.displacement != 0.0) {
        throw PreconditionError("displacement at zero must be zero (B_0 = 0)");
      }
      has_zero = true;
    }
  }
  if (!has_zero) throw PreconditionError("displacement table must contain (0, 0)");
}

DisplacementTable DisplacementTable::zero(GroupDomain domain, std::span<const double> locations) {
  std::vector<Entry> entries;
  entries.reserve(locations.size() + 1);
  bool has_zero = false;
  for (double x : locations) {
    entries.push_back({x, 0.0});
    has_zero = has_zero || x == 0.0;
  }
  if (!has_zero) entries.push_back({0.0, 0.0});
  return DisplacementTable(domain, std::move(entries));
}

std::optional<double> DisplacementTable::find(double location) const noexcept {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), location,
      [](const Entry& e, double x) { return e.location < x; });
  if (it != entries_.end() && it->location == location) return it->displacement;
  return std::nullopt;
}

std::optional<double> DisplacementTable::find_near(double location,
                                                   double tolerance) const noexcept {
  if (domain_.is_discrete()) return find(location);
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), location - tolerance,
      [](const Entry& e, double x) { return e.location < x; });
  if (it != entries_.end() && std::abs(it->location - location) <= tolerance) {
    return it->displacement;
  }
  return std::nullopt;
}

double DisplacementTable::at(double location) const {
  if (auto d = find(location)) return *d;
  throw IncompleteTable("no displacement recorded at location " + std::to_string(location));
}

PointConfig translate(const PointConfig& config, double t) {
  const GroupDomain& g = config.domain();
  g.require_element(t);
  std::vector<Atom> moved;
  moved.reserve(config.size());
  for (const Atom& a : config.atoms()) moved.push_back({g.subtract(a.location, t), a.weight});
  if (g.is_compact()) {
    // Residues wrap; a rotation of the sorted order.
    std::sort(moved.begin(), moved.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });
  }
  return PointConfig(config.window().translated(t), std::move(moved));
}

PointConfig perturb(const PointConfig& config, const DisplacementTable& field,
                    double merge_tolerance) {
  const GroupDomain& g = config.domain();
  if (!(field.domain() == g)) {
    throw DomainMismatch("field over " + field.domain().name() + " applied to configuration over " +
                         g.name());
  }
  std::vector<Atom> moved;
  moved.reserve(config.size());
  Window window = config.window();
  for (const Atom& a : config.atoms()) {
    const auto d = field.find(a.location);
    if (!d) {
      throw IncompleteTable("no displacement for atom at " + std::to_string(a.location));
    }
    const double image = g.add(a.location, *d);
    window = window.expanded_to(image);
    moved.push_back({image, a.weight});
  }
  return PointConfig(window, sort_and_merge(g, std::move(moved), merge_tolerance));
}

std::size_t collision_count(const PointConfig& config, const DisplacementTable& field,
                            double merge_tolerance) {
  if (!config.is_simple()) {
    throw PreconditionError("collision_count is defined on simple configurations only");
  }
  const GroupDomain& g = config.domain();
  std::vector<double> images;
  images.reserve(config.size());
  for (const Atom& a : config.atoms()) images.push_back(g.add(a.location, field.at(a.location)));
  std::sort(images.begin(), images.end());
  std::size_t pairs = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= images.size(); ++i) {
    if (i < images.size() && same_location(g, images[i - 1], images[i], merge_tolerance)) {
      ++run;
      continue;
    }
    pairs += run * (run - 1);
    run = 1;
  }
  return pairs;
}

ZeroNeighbors neighbors_of_zero(const PointConfig& config) {
  if (config.domain().is_compact()) {
    throw PreconditionError("neighbors_of_zero needs an ordered group");
  }
  const auto atoms = config.atoms();
  const auto first_nonneg = std::lower_bound(
      atoms.begin(), atoms.end(), 0.0, [](const Atom& a, double x) { return a.location < x; });
  if (first_nonneg == atoms.begin()) {
    throw InsufficientWindow("no atom below zero inside the window");
  }
  if (first_nonneg == atoms.end() || first_nonneg + 1 == atoms.end()) {
    throw InsufficientWindow("fewer than two atoms at or above zero inside the window");
  }
  return {(first_nonneg - 1)->location, first_nonneg->location, (first_nonneg + 1)->location};
}

double voronoi_zero_volume(const PointConfig& config) {
  if (config.domain().kind() != GroupKind::RealLine) {
    throw PreconditionError("voronoi_zero_volume is defined on the real line");
  }
  if (!config.has_atom_at(0.0)) {
    throw PreconditionError("zero is not an atom of the configuration");
  }
  const ZeroNeighbors n = neighbors_of_zero(config);
  return (n.next - n.before) / 2.0;
}

double max_atom_discrepancy(const PointConfig& a, const PointConfig& b) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (a.size() != b.size()) return kInf;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Atom& x = a.atoms()[i];
    const Atom& y = b.atoms()[i];
    if (std::abs(x.weight - y.weight) > 1e-12 * std::max(x.weight, y.weight)) return kInf;
    worst = std::max(worst, std::abs(x.location - y.location));
  }
  return worst;
}

}  // namespace palm_forge

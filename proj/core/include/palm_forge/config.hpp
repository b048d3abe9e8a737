#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "palm_forge/group.hpp"

namespace palm_forge {

/// Two displaced real-line atoms closer than this are the same location.
inline constexpr double kMergeTolerance = 1e-9;

struct Atom {
  double location;
  double weight;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// A finite windowed counting measure sum_n weight_n * delta(location_n).
///
/// Atoms are sorted strictly increasing by location (by residue on the
/// cyclic group), carry positive finite weights and lie inside the window.
class PointConfig {
 public:
  /// Validates the invariants; throws PreconditionError on violation.
  PointConfig(Window window, std::vector<Atom> atoms);

  /// Sorts `atoms` and merges entries whose locations coincide (exact on
  /// discrete groups, within `merge_tolerance` on the real line).
  static PointConfig from_unsorted(Window window, std::vector<Atom> atoms,
                                   double merge_tolerance = kMergeTolerance);

  /// Unit-weight atoms at the given locations.
  static PointConfig simple(Window window, std::vector<double> locations);

  [[nodiscard]] const GroupDomain& domain() const noexcept { return window_.domain(); }
  [[nodiscard]] const Window& window() const noexcept { return window_; }
  [[nodiscard]] std::span<const Atom> atoms() const noexcept { return atoms_; }
  [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }
  [[nodiscard]] bool empty() const noexcept { return atoms_.empty(); }
  [[nodiscard]] std::vector<double> locations() const;

  [[nodiscard]] double total_weight() const noexcept;
  [[nodiscard]] bool is_simple() const noexcept;
  [[nodiscard]] bool has_atom_at(double location) const noexcept;
  /// Weight at `location`, 0 if there is no atom there.
  [[nodiscard]] double weight_at(double location) const noexcept;

  /// Index range [first, last) of atoms with location in [lo, hi].
  [[nodiscard]] std::pair<std::size_t, std::size_t> range(double lo, double hi) const noexcept;
  /// Total weight of atoms in the half-open interval [lo, hi).
  [[nodiscard]] double mass_in(double lo, double hi) const noexcept;

  friend bool operator==(const PointConfig&, const PointConfig&) = default;

 private:
  Window window_;
  std::vector<Atom> atoms_;
};

/// Values of a displacement path B at finitely many locations. Always
/// contains the entry (0, 0).
class DisplacementTable {
 public:
  struct Entry {
    double location;
    double displacement;

    friend bool operator==(const Entry&, const Entry&) = default;
  };

  /// Sorts entries; requires distinct valid locations and B(0) = 0.
  DisplacementTable(GroupDomain domain, std::vector<Entry> entries);

  /// B = 0 at the given locations (zero is added if missing).
  static DisplacementTable zero(GroupDomain domain, std::span<const double> locations);

  [[nodiscard]] const GroupDomain& domain() const noexcept { return domain_; }
  [[nodiscard]] std::span<const Entry> entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

  /// Exact-location lookup.
  [[nodiscard]] std::optional<double> find(double location) const noexcept;
  /// Lookup that tolerates `tolerance` of location mismatch on the real line.
  [[nodiscard]] std::optional<double> find_near(double location, double tolerance) const noexcept;
  /// Exact lookup; throws IncompleteTable when absent.
  [[nodiscard]] double at(double location) const;

  friend bool operator==(const DisplacementTable&, const DisplacementTable&) = default;

 private:
  GroupDomain domain_;
  std::vector<Entry> entries_;
};

/// tau_t: every atom x moves to x - t, so translate(c, x) re-centers the
/// atom x at zero. Cyclic windows are unchanged.
PointConfig translate(const PointConfig& config, double t);

/// Push-forward of the configuration under x -> x + B(x). Coinciding
/// images merge with summed weights; the window grows to cover them.
PointConfig perturb(const PointConfig& config, const DisplacementTable& field,
                    double merge_tolerance = kMergeTolerance);

/// Ordered pairs (s, t), s != t, of atoms with s + B(s) == t + B(t).
/// Requires a simple configuration.
std::size_t collision_count(const PointConfig& config, const DisplacementTable& field,
                            double merge_tolerance = kMergeTolerance);

/// Largest atom < 0, smallest atom >= 0, and the next atom after that.
struct ZeroNeighbors {
  double before;
  double at_or_after;
  double next;
};

ZeroNeighbors neighbors_of_zero(const PointConfig& config);

/// Length of the real-line Voronoi cell of the atom at zero.
double voronoi_zero_volume(const PointConfig& config);

/// Largest location error between atoms of two configurations, or +inf
/// when they differ in atom count or in any weight.
double max_atom_discrepancy(const PointConfig& a, const PointConfig& b);

}  // namespace palm_forge

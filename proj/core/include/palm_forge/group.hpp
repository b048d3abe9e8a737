#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "palm_forge/random.hpp"

namespace palm_forge {

enum class GroupKind { RealLine, IntegerLattice, CyclicGroup };

/// One of the three concrete groups, with its Haar structure.
///
/// Elements of every group are carried as `double`. Integer-lattice and
/// cyclic elements are integral values (|x| < 2^53), so addition on them is
/// exact; cyclic results are always reduced into [0, order).
class GroupDomain {
 public:
  static GroupDomain real_line() noexcept { return GroupDomain(GroupKind::RealLine, 0); }
  static GroupDomain integer_lattice() noexcept {
    return GroupDomain(GroupKind::IntegerLattice, 0);
  }
  static GroupDomain cyclic(std::int64_t order);

  /// Parses "real", "integer" or "cyclic:<m>".
  static GroupDomain parse(std::string_view text);

  [[nodiscard]] GroupKind kind() const noexcept { return kind_; }
  /// Group order; 0 for the non-compact groups.
  [[nodiscard]] std::int64_t order() const noexcept { return order_; }
  [[nodiscard]] bool is_discrete() const noexcept { return kind_ != GroupKind::RealLine; }
  [[nodiscard]] bool is_compact() const noexcept { return kind_ == GroupKind::CyclicGroup; }

  [[nodiscard]] double zero() const noexcept { return 0.0; }
  [[nodiscard]] double add(double x, double y) const noexcept;
  [[nodiscard]] double negate(double x) const noexcept;
  [[nodiscard]] double subtract(double x, double y) const noexcept;

  /// True iff `x` is a valid element (finite; integral for discrete groups;
  /// in [0, order) for the cyclic group).
  [[nodiscard]] bool is_element(double x) const noexcept;
  /// Throws PreconditionError unless is_element(x).
  void require_element(double x) const;

  /// "real", "integer", "cyclic:<m>".
  [[nodiscard]] std::string name() const;

  friend bool operator==(const GroupDomain&, const GroupDomain&) = default;

 private:
  GroupDomain(GroupKind kind, std::int64_t order) noexcept : kind_(kind), order_(order) {}

  GroupKind kind_;
  std::int64_t order_;
};

/// An element tagged with its group; the checked arithmetic surface.
struct GroupElement {
  GroupDomain domain;
  double value;
};

/// Throws DomainMismatch on operands from different groups.
GroupElement add(const GroupElement& x, const GroupElement& y);
GroupElement negate(const GroupElement& x);

/// Finite observation region. Real line: [lo, hi]; integer lattice: the
/// integers in [lo, hi]; cyclic group: always the whole group.
class Window {
 public:
  /// Interval window; requires lo <= 0 <= hi (and integral bounds on the
  /// lattice). Cyclic domains ignore the bounds and get the full group.
  static Window centered(const GroupDomain& domain, double lo, double hi);
  /// Symmetric [-radius, radius].
  static Window symmetric(const GroupDomain& domain, double radius);
  static Window full(const GroupDomain& cyclic_domain);
  /// Interval window without the zero-containment requirement; used for
  /// translated copies of centered windows.
  static Window interval(const GroupDomain& domain, double lo, double hi);

  [[nodiscard]] const GroupDomain& domain() const noexcept { return domain_; }
  [[nodiscard]] double lo() const noexcept { return lo_; }
  [[nodiscard]] double hi() const noexcept { return hi_; }
  [[nodiscard]] bool contains(double x) const noexcept;
  /// Largest r with [-r, r] inside the window (0 if zero is outside).
  [[nodiscard]] double inner_radius() const noexcept;

  /// Window shifted by -t, matching translate() on configurations.
  [[nodiscard]] Window translated(double t) const;
  /// Smallest window containing this one and `x`.
  [[nodiscard]] Window expanded_to(double x) const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  Window(GroupDomain domain, double lo, double hi) : domain_(domain), lo_(lo), hi_(hi) {}

  GroupDomain domain_;
  double lo_;
  double hi_;
};

/// Real line: hi - lo; lattice: number of integers; cyclic: the order
/// (counting measure, not normalized).
double haar_volume(const Window& window) noexcept;

/// Uniform element of the window under Haar measure.
double sample_haar(const Window& window, RandomStream& rng);

}  // namespace palm_forge

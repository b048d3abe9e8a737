#include "palm_forge/group.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "palm_forge/errors.hpp"

namespace palm_forge {

GroupDomain GroupDomain::cyclic(std::int64_t order) {
  if (order < 1) {
    throw PreconditionError("cyclic group order must be positive, got " +
                            std::to_string(order));
  }
  return GroupDomain(GroupKind::CyclicGroup, order);
}

GroupDomain GroupDomain::parse(std::string_view text) {
  if (text == "real") return real_line();
  if (text == "integer") return integer_lattice();
  constexpr std::string_view prefix = "cyclic:";
  if (text.starts_with(prefix)) {
    std::int64_t order = 0;
    const auto digits = text.substr(prefix.size());
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), order);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return cyclic(order);
  }
  throw PreconditionError("unknown group domain '" + std::string(text) + "'");
}

double GroupDomain::add(double x, double y) const noexcept {
  if (kind_ != GroupKind::CyclicGroup) return x + y;
  const auto m = static_cast<double>(order_);
  double s = x + y;
  if (s >= m) s -= m;
  return s;
}

double GroupDomain::negate(double x) const noexcept {
  if (kind_ != GroupKind::CyclicGroup) return -x;
  return x == 0.0 ? 0.0 : static_cast<double>(order_) - x;
}

double GroupDomain::subtract(double x, double y) const noexcept {
  if (kind_ != GroupKind::CyclicGroup) return x - y;
  double d = x - y;
  if (d < 0.0) d += static_cast<double>(order_);
  return d;
}

bool GroupDomain::is_element(double x) const noexcept {
  if (!std::isfinite(x)) return false;
  switch (kind_) {
    case GroupKind::RealLine:
      return true;
    case GroupKind::IntegerLattice:
      return std::trunc(x) == x;
    case GroupKind::CyclicGroup:
      return std::trunc(x) == x && x >= 0.0 && x < static_cast<double>(order_);
  }
  return false;
}

void GroupDomain::require_element(double x) const {
  if (!is_element(x)) {
    throw PreconditionError(std::to_string(x) + " is not an element of " + name());
  }
}

std::string GroupDomain::name() const {
  switch (kind_) {
    case GroupKind::RealLine:
      return "real";
    case GroupKind::IntegerLattice:
      return "integer";
    case GroupKind::CyclicGroup:
      return "cyclic:" + std::to_string(order_);
  }
  return "?";
}

GroupElement add(const GroupElement& x, const GroupElement& y) {
  if (!(x.domain == y.domain)) {
    throw DomainMismatch("cannot add elements of " + x.domain.name() + " and " +
                         y.domain.name());
  }
  x.domain.require_element(x.value);
  y.domain.require_element(y.value);
  return {x.domain, x.domain.add(x.value, y.value)};
}

GroupElement negate(const GroupElement& x) {
  x.domain.require_element(x.value);
  return {x.domain, x.domain.negate(x.value)};
}

Window Window::centered(const GroupDomain& domain, double lo, double hi) {
  if (domain.is_compact()) return full(domain);
  if (!(lo <= 0.0 && 0.0 <= hi)) {
    throw PreconditionError("window must contain zero");
  }
  return interval(domain, lo, hi);
}

Window Window::symmetric(const GroupDomain& domain, double radius) {
  if (domain.kind() == GroupKind::IntegerLattice) radius = std::floor(radius);
  return centered(domain, -radius, radius);
}

Window Window::full(const GroupDomain& cyclic_domain) {
  if (!cyclic_domain.is_compact()) {
    throw PreconditionError("full window only exists for the cyclic group");
  }
  return Window(cyclic_domain, 0.0, static_cast<double>(cyclic_domain.order() - 1));
}

Window Window::interval(const GroupDomain& domain, double lo, double hi) {
  if (domain.is_compact()) return full(domain);
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    throw PreconditionError("window bounds must be finite with lo <= hi");
  }
  if (domain.kind() == GroupKind::IntegerLattice) {
    if (!domain.is_element(lo) || !domain.is_element(hi)) {
      throw PreconditionError("lattice window bounds must be integers");
    }
  } else if (!(hi > lo)) {
    throw PreconditionError("real-line window must have positive length");
  }
  return Window(domain, lo, hi);
}

bool Window::contains(double x) const noexcept { return x >= lo_ && x <= hi_; }

double Window::inner_radius() const noexcept {
  if (domain_.is_compact()) return static_cast<double>(domain_.order()) / 2.0;
  if (lo_ > 0.0 || hi_ < 0.0) return 0.0;
  return std::min(-lo_, hi_);
}

Window Window::translated(double t) const {
  if (domain_.is_compact()) return *this;
  return Window(domain_, lo_ - t, hi_ - t);
}

Window Window::expanded_to(double x) const {
  if (domain_.is_compact()) return *this;
  return Window(domain_, std::min(lo_, x), std::max(hi_, x));
}

double haar_volume(const Window& window) noexcept {
  switch (window.domain().kind()) {
    case GroupKind::RealLine:
      return window.hi() - window.lo();
    case GroupKind::IntegerLattice:
      return window.hi() - window.lo() + 1.0;
    case GroupKind::CyclicGroup:
      return static_cast<double>(window.domain().order());
  }
  return 0.0;
}

double sample_haar(const Window& window, RandomStream& rng) {
  if (window.domain().kind() == GroupKind::RealLine) {
    return window.lo() + (window.hi() - window.lo()) * rng.uniform();
  }
  std::uniform_int_distribution<std::int64_t> pick(static_cast<std::int64_t>(window.lo()),
                                                   static_cast<std::int64_t>(window.hi()));
  return static_cast<double>(pick(rng));
}

}  // namespace palm_forge

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "palm_forge/config.hpp"
#include "palm_forge/random.hpp"

namespace palm_forge {

/// Integer step law for lattice random walks.
struct StepDistribution {
  struct Constant {
    std::int64_t value;
  };
  struct UniformInt {
    std::int64_t lo;
    std::int64_t hi;
  };
  struct Poisson {
    double mean;
  };

  std::variant<Constant, UniformInt, Poisson> law;

  [[nodiscard]] double mean() const noexcept;
  [[nodiscard]] std::int64_t draw(RandomStream& rng) const;
  [[nodiscard]] std::string name() const;
};

/// Law of a stationary-increment displacement field (the measure nu).
class IncrementSampler {
 public:
  /// Independent N(0, sigma^2 |gap|) increments outward from 0. Real line.
  struct TwoSidedBrownian {
    double sigma;
  };
  /// Sums of i.i.d. integer steps between consecutive integers. Lattice.
  struct IidWalk {
    StepDistribution step;
  };
  /// Increasing walk with steps ceil(Pareto(alpha, scale 1)) >= 1, so the
  /// mean step is infinite for alpha <= 1. Lattice.
  struct HeavyTailWalk {
    double alpha;
  };
  /// B_x = V_x - V_0 with V_x i.i.d. uniform on the group. Cyclic group.
  struct IidDifference {};
  /// Deterministic B_x = -x. Any group.
  struct NegationField {};
  /// Deterministic B_x = 0. Any group.
  struct ZeroField {};
  /// Deterministic B_t = c t with |c| < 1. Real line.
  struct LinearDrift {
    double c;
  };

  using Kind = std::variant<TwoSidedBrownian, IidWalk, HeavyTailWalk, IidDifference,
                            NegationField, ZeroField, LinearDrift>;

  /// `mass` is the total mass nu(F); 1 for probability laws.
  explicit IncrementSampler(Kind kind, double mass = 1.0);

  /// Parses specs such as "brownian:sigma=0.5", "walk:poisson=2",
  /// "walk:uniform=-1,1", "heavy:alpha=0.8", "drift:c=0.5", "negation",
  /// "zero", "iid-difference". An optional ",mass=<m>" suffix sets nu(F).
  static IncrementSampler parse(std::string_view spec);

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
  [[nodiscard]] double mass() const noexcept { return mass_; }
  /// True when every marginal B_t, t != 0, is diffuse.
  [[nodiscard]] bool pointwise_non_atomic() const noexcept;
  [[nodiscard]] bool is_deterministic() const noexcept;
  [[nodiscard]] bool supports(const GroupDomain& domain) const noexcept;
  [[nodiscard]] std::string name() const;

 private:
  Kind kind_;
  double mass_;
};

/// Jointly consistent draw of B at `locations` (sorted, distinct, containing
/// zero). Throws DomainMismatch for an unsupported group and
/// PreconditionError when zero is missing.
DisplacementTable sample_field(const IncrementSampler& sampler, const GroupDomain& domain,
                               std::span<const double> locations, RandomStream& rng);

/// theta_t: the table s -> B(t + s) - B(t) over every s = x - t with x a
/// location of `table`. Throws IncompleteTable if t itself is missing.
DisplacementTable shift_table(const DisplacementTable& table, double t);

/// theta_t restricted to `outputs`; each t + s must be present (real-line
/// lookups tolerate 1e-12 relative rounding in t + s).
DisplacementTable shift_table(const DisplacementTable& table, double t,
                              std::span<const double> outputs);

/// Mean over `paths` draws of max |B_t| / |t| for |t| on a grid in
/// [radius / 2, radius] on both sides of zero.
double sublinear_diagnostic(const IncrementSampler& sampler, const GroupDomain& domain,
                            double radius, int paths, RandomStream& rng);

/// Throws GateFailure unless sublinear_diagnostic(...) < 1.
void require_sublinear(const IncrementSampler& sampler, const GroupDomain& domain, double radius,
                       int paths, RandomStream& rng);

}  // namespace palm_forge

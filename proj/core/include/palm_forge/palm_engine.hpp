#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "palm_forge/config.hpp"
#include "palm_forge/increments.hpp"
#include "palm_forge/random.hpp"
#include "palm_forge/stats.hpp"

namespace palm_forge {

enum class BatchRole { PalmSide, StationarySide };

std::string_view to_string(BatchRole role) noexcept;

struct BatchItem {
  PointConfig config;
  double weight;
};

/// Weighted empirical measure (1/n) sum_i weight_i delta(config_i).
///
/// Weights carry sigma-finite mass, so mass() estimates the total mass of
/// the measure the batch stands for (e.g. the intensity for a Palm batch).
class SampleBatch {
 public:
  /// Validates: nonempty, finite nonnegative weights with positive total,
  /// one domain, and an atom at zero in every PalmSide item.
  SampleBatch(BatchRole role, std::vector<BatchItem> items, std::string meta = {});

  [[nodiscard]] BatchRole role() const noexcept { return role_; }
  [[nodiscard]] std::span<const BatchItem> items() const noexcept { return items_; }
  [[nodiscard]] std::size_t size() const noexcept { return items_.size(); }
  [[nodiscard]] const std::string& meta() const noexcept { return meta_; }
  [[nodiscard]] const GroupDomain& domain() const noexcept { return items_.front().config.domain(); }

  [[nodiscard]] double total_weight() const noexcept;
  /// total_weight() / size().
  [[nodiscard]] double mass() const noexcept;

  /// Same items under another role; for negative controls. Relabeling to
  /// PalmSide still requires atoms at zero.
  [[nodiscard]] SampleBatch relabeled(BatchRole role) const;

 private:
  BatchRole role_;
  std::vector<BatchItem> items_;
  std::string meta_;
};

/// Uniform bump omega = 1/(2 radius) on [-radius, radius]; on discrete
/// groups 1/(2 floor(radius) + 1) on the integers it covers.
struct WeightFunction {
  double radius;

  [[nodiscard]] double operator()(const GroupDomain& domain, double t) const noexcept;
};

/// Positive inter-point gap law for renewal Palm configurations.
struct GapDistribution {
  struct Deterministic {
    double value;
  };
  struct Gamma {
    double shape;
    double scale;
  };
  struct Exponential {
    double rate;
  };

  std::variant<Deterministic, Gamma, Exponential> law;

  /// "fixed:gap=1", "gamma:shape=2,scale=0.5", "exp:rate=2".
  static GapDistribution parse(std::string_view spec);

  [[nodiscard]] double mean() const noexcept;
  /// Strictly positive draw; nonpositive raw draws are resampled.
  [[nodiscard]] double draw(RandomStream& rng) const;
  [[nodiscard]] std::string name() const;
};

/// Reference Palm families.
struct PalmSource {
  struct Lattice {};
  struct Poisson {
    double lambda;
  };
  struct Renewal {
    GapDistribution gaps;
  };
  /// Negative control: the stationary lattice Z + U with an atom appended at
  /// zero. Not a Palm measure.
  struct ShiftedLattice {};

  std::variant<Lattice, Poisson, Renewal, ShiftedLattice> kind;

  /// "lattice", "poisson:lambda=2", "renewal:gamma:shape=2,scale=0.5",
  /// "shifted-lattice".
  static PalmSource parse(std::string_view spec);

  [[nodiscard]] std::string name() const;
  /// Mean distance between consecutive atoms.
  [[nodiscard]] double mean_gap() const noexcept;
};

/// Atoms at every integer of the window, unit weights.
PointConfig sample_lattice_palm(const Window& window);

/// Poisson(lambda) points on the window plus an atom at zero; item weight
/// lambda so the batch stands for a Palm measure of mass lambda.
BatchItem sample_poisson_palm(double lambda, const Window& window, RandomStream& rng);

/// Atom at zero plus cumulative i.i.d. gaps to the right and left until the
/// window is exhausted; item weight 1 / mean gap.
BatchItem sample_renewal_palm(const GapDistribution& gaps, const Window& window,
                              RandomStream& rng);

/// Z + U with U ~ Uniform(0, 1), plus an atom at zero; weight 1.
BatchItem sample_shifted_lattice_control(const Window& window, RandomStream& rng);

/// Cyclic group: each nonzero residue is an atom independently with
/// probability p, plus an atom at zero; weight p (the Palm measure of
/// Bernoulli site percolation on Z_m).
BatchItem sample_bernoulli_palm(double p, const Window& window, RandomStream& rng);

BatchItem sample_palm(const PalmSource& source, const Window& window, RandomStream& rng);

/// n items; item i draws from base.lane(lanes::kPalm).for_item(i).
SampleBatch sample_palm_batch(const PalmSource& source, const Window& window, std::size_t n,
                              const RandomStream& base);

/// P_0 (x) nu pushed through Gamma: each item gets an independent field at
/// its atom locations (stream base.lane(lanes::kField).for_item(i)) and is
/// perturbed; item weight is multiplied by the field mass nu(F).
SampleBatch perturb_palm(const SampleBatch& batch, const IncrementSampler& sampler,
                         const RandomStream& base);

/// translate(palm, shift): the origin moves to the point `shift` of the
/// Palm configuration, so for shift in (0, xi_1) it falls in the cycle that
/// starts at the atom 0.
PointConfig stationary_from_palm(const PointConfig& palm, double shift);

/// Real-line Palm inversion by importance weights: origin moved to
/// t ~ U(0, xi_1) (atoms x -> x - t) with weight w xi_1, xi_1 the first atom
/// right of zero.
SampleBatch invert_palm_realline(const SampleBatch& batch, const RandomStream& base);

/// Mean of w xi_1 over the Palm batch: the inversion estimate of P's mass.
MeanEstimate inversion_mass_estimate(const SampleBatch& batch);

struct CompactInversion {
  SampleBatch stationary;
  MeanEstimate mass;
};

/// Cyclic-group inversion with kernel k(xi, t) = 1 / xi(G): shift uniform
/// on the group, weight w m / xi(G).
CompactInversion invert_palm_compact(const SampleBatch& batch, const RandomStream& base);

/// Palm extraction by the change of measure with weight function omega.
/// Requires omega.radius <= half the inner radius of every item window.
SampleBatch palm_of_stationary(const SampleBatch& batch, const WeightFunction& omega);

/// Weighted mean of the zero-cell Voronoi length.
MeanEstimate voronoi_mass_estimate(const SampleBatch& batch);

struct RunningMeanRow {
  std::uint64_t seed;
  std::size_t n;
  double running_mean;
  double se;
};

struct DivergenceReport {
  std::vector<RunningMeanRow> rows;
  /// Per seed: running mean at the largest size over the smallest.
  std::vector<double> growth;
  /// Per size: median of running means across seeds.
  std::vector<double> medians;
  std::size_t seeds_meeting_gate = 0;
  bool gate_met = false;
  bool medians_nondecreasing = false;
};

/// Running mean of (1 + B_1) under `sampler` (lattice field) at each size,
/// one nested sequence per seed. The gate needs growth >= growth_factor in
/// at least `required_seeds` seeds.
DivergenceReport heavy_tail_divergence_demo(const IncrementSampler& sampler,
                                            std::span<const std::size_t> sizes,
                                            std::span<const std::uint64_t> seeds,
                                            double growth_factor = 5.0,
                                            std::size_t required_seeds = 4);

}  // namespace palm_forge

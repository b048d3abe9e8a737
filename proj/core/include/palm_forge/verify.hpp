#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "palm_forge/palm_engine.hpp"

namespace palm_forge {

/// height * max(0, 1 - |x - center| / radius).
struct TriangleBump {
  double center;
  double radius;
  double height;

  [[nodiscard]] double operator()(double x) const noexcept;
  [[nodiscard]] double lo() const noexcept { return center - radius; }
  [[nodiscard]] double hi() const noexcept { return center + radius; }
  /// max |x| over the support.
  [[nodiscard]] double reach() const noexcept;
};

/// f(xi, t) = g(t) exp(-xi(h)) with triangle bumps g (in t) and h >= 0 (on
/// locations). Bounded by g.height; compactly supported in t.
struct TestFunction {
  TriangleBump g;
  TriangleBump h;

  [[nodiscard]] double operator()(const PointConfig& config, double t) const;
  [[nodiscard]] std::string label() const;
};

/// The fixed eight-function battery: g centers {-2, 0, 2}, radii {1, 2};
/// h centers {0, 1}, radius 1, heights {0.5, 1}.
std::vector<TestFunction> canonical_test_functions();

/// One row of a report. Mecke rows fill lhs/rhs/residual/se/z; KS rows put
/// the KS distance in `residual` and fill `p_value`.
struct TestEntry {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  bool pass = true;
};

struct TestReport {
  std::string scenario;
  std::string test;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double level = 0.0;
  /// |z| bound for Mecke rows, p-value floor for KS rows.
  double threshold = 0.0;
  std::vector<TestEntry> entries;
  std::vector<std::string> notes;
  bool pass = false;

  [[nodiscard]] double max_abs_z() const noexcept;
  [[nodiscard]] double min_p_value() const noexcept;
};

/// Monte Carlo estimate of
///   E[sum_t mu_t f(tau_t xi, -t)] - E[sum_t mu_t f(xi, t)]
/// under the batch's weighted empirical measure, with the SE of the
/// per-item paired differences. Both terms vanish in expectation for a
/// Palm measure. Throws BiasError if f reaches outside an item's core
/// window (half its inner radius).
TestEntry mecke_residual(const SampleBatch& batch, const TestFunction& f);

/// Bonferroni battery: passes iff every |z| <= z_(level / count).
TestReport mecke_battery(const SampleBatch& batch, std::span<const TestFunction> functions,
                         double level);

/// Weighted counts xi(bin + offset) compared across offsets by pairwise
/// two-sample KS with Bonferroni over pairs. Items are dealt round-robin
/// to offsets so the compared samples are independent.
TestReport stationarity_test(const SampleBatch& batch, std::span<const double> offsets,
                             const Window& bin, double level);

/// F(xi) = xi([lo, hi)), averaged over shifts of the core window.
struct CountFunctional {
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] double operator()(const PointConfig& config, double shift) const noexcept {
    return config.mass_in(shift + lo, shift + hi);
  }
};

struct ErgodicScenario {
  PalmSource palm;
  /// nullopt: the unperturbed process.
  std::optional<IncrementSampler> field;
  /// Stationary samples via real-line inversion; false keeps the Palm
  /// configuration itself (the degenerate, non-mixing case for a lattice).
  bool random_origin = true;
};

struct DecayRow {
  double window = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
  std::size_t replicas = 0;
};

/// For each window radius W: per replica the shift average
///   A_W = (1/W) integral over s in [-W/2, W/2] of F(tau_s xi),
/// discretized on a grid of spacing `grid_step`; then the weighted
/// across-replica variance of A_W.
std::vector<DecayRow> ergodic_average_decay(const ErgodicScenario& scenario,
                                            const CountFunctional& functional,
                                            std::span<const double> window_sizes,
                                            std::size_t replicas, const RandomStream& base,
                                            double grid_step = 1.0 / 16.0);

struct LemmaCheckResult {
  std::size_t cases = 0;
  /// Worst location error on the real line over both identities.
  double max_real_error = 0.0;
  /// Cases on discrete groups where either identity failed to hold exactly.
  std::size_t discrete_failures = 0;
  bool pass = false;
};

/// Tolerance for the real-line identities.
inline constexpr double kLemmaRealTolerance = 1e-12;

/// Randomized checks of B_t = -(theta_t B)_{-t} and
/// tau_{t + B_t} Gamma(xi, B) = Gamma(tau_t xi, theta_t B),
/// `cases_per_group` cases on each of the three groups.
LemmaCheckResult lemma_identity_check(std::size_t cases_per_group, const RandomStream& base);

}  // namespace palm_forge

#pragma once

#include <cstddef>
#include <span>

namespace palm_forge {

/// Sample mean with its standard error sd / sqrt(n).
struct MeanEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

MeanEstimate mean_estimate(std::span<const double> values);

/// Standard normal quantile.
double normal_quantile(double p);

/// Two-sided Bonferroni critical value: |z| above it rejects at family
/// level `level` across `count` tests.
double bonferroni_z(double level, std::size_t count);

/// Survival function of the Kolmogorov limit law, P(K > lambda).
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double effective_n = 0.0;
};

/// Two-sample Kolmogorov-Smirnov test on weighted samples. The statistic is
/// the sup distance between weighted ECDFs; the p-value uses the asymptotic
/// Kolmogorov law with Kish effective sizes (sum w)^2 / sum w^2. Ties make
/// the test conservative.
KsResult weighted_ks_two_sample(std::span<const double> x, std::span<const double> wx,
                                std::span<const double> y, std::span<const double> wy);

}  // namespace palm_forge

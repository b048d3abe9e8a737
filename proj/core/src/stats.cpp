#include "palm_forge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "palm_forge/errors.hpp"

namespace palm_forge {

MeanEstimate mean_estimate(std::span<const double> values) {
  MeanEstimate out;
  out.n = values.size();
  if (values.empty()) return out;
  // Two-pass for accuracy; batches are at most a few 1e5 items.
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  out.value = mean;
  if (values.size() > 1) {
    out.se = std::sqrt(ss / double(values.size() - 1) / double(values.size()));
  }
  return out;
}

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double bonferroni_z(double level, std::size_t count) {
  if (!(level > 0.0 && level < 1.0) || count == 0) {
    throw PreconditionError("bonferroni_z needs level in (0, 1) and count >= 1");
  }
  return normal_quantile(1.0 - level / (2.0 * double(count)));
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // Q(0.2) > 1 - 1e-12
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-16 * sum) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult weighted_ks_two_sample(std::span<const double> x, std::span<const double> wx,
                                std::span<const double> y, std::span<const double> wy) {
  if (x.size() != wx.size() || y.size() != wy.size() || x.empty() || y.empty()) {
    throw PreconditionError("weighted KS needs two nonempty samples with matching weights");
  }
  struct Point {
    double value;
    double weight;
    int side;
  };
  std::vector<Point> pooled;
  pooled.reserve(x.size() + y.size());
  double sx = 0.0, sx2 = 0.0, sy = 0.0, sy2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    pooled.push_back({x[i], wx[i], 0});
    sx += wx[i];
    sx2 += wx[i] * wx[i];
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    pooled.push_back({y[i], wy[i], 1});
    sy += wy[i];
    sy2 += wy[i] * wy[i];
  }
  if (!(sx > 0.0) || !(sy > 0.0)) throw PreconditionError("weighted KS needs positive total weight");
  std::sort(pooled.begin(), pooled.end(),
            [](const Point& a, const Point& b) { return a.value < b.value; });

  double fx = 0.0, fy = 0.0, d = 0.0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    (pooled[i].side == 0 ? fx : fy) += pooled[i].weight / (pooled[i].side == 0 ? sx : sy);
    // Only compare after the last member of a tie block.
    if (i + 1 < pooled.size() && pooled[i + 1].value == pooled[i].value) continue;
    d = std::max(d, std::abs(fx - fy));
  }

  const double nx = sx * sx / sx2;
  const double ny = sy * sy / sy2;
  const double ne = nx * ny / (nx + ny);
  const double root = std::sqrt(ne);
  KsResult out;
  out.statistic = d;
  out.effective_n = ne;
  out.p_value = kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
  return out;
}

}  // namespace palm_forge

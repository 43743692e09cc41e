#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "edgesign/harness.hpp"

namespace edgesign {

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("paired t-test needs equal lengths");
  if (a.size() < 2) throw ArgumentError("paired t-test needs at least two pairs");
  const double n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) mean += a[k] - b[k];
  mean /= n;
  double ss = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k] - mean;
    ss += d * d;
    scale = std::max(scale, std::abs(a[k] - b[k]));
  }
  TTestResult r;
  r.df = n - 1.0;
  const double var = ss / r.df;
  // Rounding noise on a constant shift still counts as zero variance.
  if (!(std::sqrt(var) > 1e-12 * scale)) {
    r.degenerate = true;
    r.t = mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean);
    r.p_value = mean == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = mean / std::sqrt(var / n);
  const boost::math::students_t dist(r.df);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  return r;
}

}  // namespace edgesign

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gsr/error.hpp"

namespace gsr {

/// Two-sided standard-normal quantile z with P(|Z| <= z) = confidence.
inline double z_for_confidence(double confidence) {
  require(confidence > 0 && confidence < 1, "confidence must lie in (0, 1)");
  // erfc is monotone, so bisection on P(|Z| > z) = erfc(z / sqrt 2) is enough.
  double lo = 0, hi = 40;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid / std::sqrt(2.0)) > 1 - confidence ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct BinomialInterval {
  double lo = 0;
  double hi = 1;
  double half_width() const { return 0.5 * (hi - lo); }
};

/// Wilson score interval for hits successes out of n.
inline BinomialInterval wilson_interval(std::size_t hits, std::size_t n, double confidence = 0.95) {
  require(n >= 1, "wilson_interval needs n >= 1");
  require(hits <= n, "wilson_interval needs hits <= n");
  const double z = z_for_confidence(confidence);
  const double nd = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nd;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * nd)) / (1 + z2 / nd);
  const double half = z / (1 + z2 / nd) * std::sqrt(p * (1 - p) / nd + z2 / (4 * nd * nd));
  // The interval touches 0 (resp. 1) exactly when hits = 0 (resp. n).
  return {hits == 0 ? 0.0 : std::max(0.0, centre - half),
          hits == n ? 1.0 : std::min(1.0, centre + half)};
}

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "ks_statistic needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, k = 0;
  double d = 0;
  while (i < a.size() && k < b.size()) {
    const double x = std::min(a[i], b[k]);
    while (i < a.size() && a[i] == x) ++i;
    while (k < b.size() && b[k] == x) ++k;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(k) / nb));
  }
  return d;
}

/// Mean and sample standard deviation.
struct Moments {
  double mean = 0;
  double stddev = 0;
};

inline Moments moments(const std::vector<double>& x) {
  require(x.size() >= 2, "moments needs at least two values");
  long double m = 0;
  for (double v : x) m += v;
  m /= static_cast<long double>(x.size());
  long double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  return {static_cast<double>(m),
          static_cast<double>(std::sqrt(ss / static_cast<long double>(x.size() - 1)))};
}

}  // namespace gsr

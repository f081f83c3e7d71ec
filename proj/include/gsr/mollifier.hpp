#pragma once

// The smoothed Dirichlet series
//   zeta_N(s) = sum_n n^{-s} exp(-(n/N)^sigma1),
// its finite form zeta_{N,M}, and the mean distance between the smoothed and
// exact self-approximation differences over tau in [0, T].

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gsr/error.hpp"
#include "gsr/parallel.hpp"
#include "gsr/target.hpp"
#include "gsr/zeta.hpp"

namespace gsr {

struct MollifierParams {
  std::size_t N = 1;
  double sigma1 = 1.0;
  std::optional<std::size_t> M;  // nullopt: adaptive cut

  void validate() const {
    require(N >= 1, "mollifier N must be >= 1");
    require(sigma1 > 0.5, "mollifier sigma1 must exceed 1/2");
  }

  double weight(std::size_t n) const {
    return std::exp(-std::pow(static_cast<double>(n) / static_cast<double>(N), sigma1));
  }
};

/// Number of terms kept. Adaptive: the sum stops before the first n with
/// w(n) < target / (n^2 zeta(2)) and (n/N)^sigma1 >= 2/sigma1; past that
/// point n^2 w(n) decreases, so the dropped tail is below target for Re(s) > 0.
inline std::size_t mollifier_length(const MollifierParams& params, const EvalConfig& cfg) {
  params.validate();
  cfg.validate();
  if (params.M) return *params.M;
  constexpr double zeta2 = std::numbers::pi * std::numbers::pi / 6;
  const double knee = 2.0 / params.sigma1;
  for (std::size_t n = 1;; ++n) {
    if (n > cfg.max_terms)
      fail(ErrorKind::accuracy_exhausted, "adaptive mollifier cut exceeds max_terms",
           params.weight(n) * zeta2);
    const double nd = static_cast<double>(n);
    const double x = std::pow(nd / static_cast<double>(params.N), params.sigma1);
    if (x >= knee && std::exp(-x) < cfg.target_abs_error / (nd * nd * zeta2)) return n - 1;
  }
}

/// Precomputed weights for repeated evaluation at many points.
class MollifiedSeries {
 public:
  MollifiedSeries(const MollifierParams& params, const EvalConfig& cfg)
      : weights_(mollifier_length(params, cfg) + 1, 0.0) {
    for (std::size_t n = 1; n < weights_.size(); ++n) weights_[n] = params.weight(n);
  }

  std::size_t length() const { return weights_.size() - 1; }
  const std::vector<double>& weights() const { return weights_; }

  cplx operator()(cplx s) const {
    require(s.real() > 0, "mollified zeta needs Re(s) > 0");
    cplx sum(0, 0);
    for (std::size_t n = length(); n >= 1; --n)
      sum += weights_[n] * detail::inverse_power<double>(n, s.real(), s.imag());
    return sum;
  }

 private:
  std::vector<double> weights_;  // index 0 unused
};

inline cplx zeta_mollified(cplx s, const MollifierParams& params, const EvalConfig& cfg = {}) {
  return MollifiedSeries(params, cfg)(s);
}

/// Riemann-sum (midpoint) estimate of
///   T^{-1} int_0^T max_{s in K} |zeta_N(s+ij tau) - zeta_N(s+ik tau)
///                                - zeta(s+ij tau) + zeta(s+ik tau)| d tau.
inline double mean_gap(double T, const MollifierParams& params, const RecurrenceTarget& target,
                       const CompactRect& K, std::size_t tau_samples,
                       const EvalConfig& cfg = {}) {
  require(T > 0, "mean_gap needs T > 0");
  require(tau_samples >= 1, "mean_gap needs tau_samples >= 1");
  require(target.kind == RecurrenceTarget::Kind::rational, "mean_gap needs a rational target");
  K.validate();
  require(K.region != Region::unrestricted,
          "mean_gap needs a rectangle tagged absolute or critical-strip");
  if (target.j == target.k) return 0.0;

  const MollifiedSeries smooth(params, cfg);
  const double a = static_cast<double>(target.j);
  const double b = static_cast<double>(target.k);
  std::vector<double> integrand(tau_samples);
  parallel_for(tau_samples, [&](std::size_t i) {
    const double tau = (static_cast<double>(i) + 0.5) * T / static_cast<double>(tau_samples);
    try {
      integrand[i] = sup_on_grid(
                         [&](cplx s) {
                           const cplx sa = s + cplx(0, a * tau);
                           const cplx sb = s + cplx(0, b * tau);
                           return smooth(sa) - smooth(sb) - zeta(sa, cfg) + zeta(sb, cfg);
                         },
                         K)
                         .value;
    } catch (const Error& e) {
      throw Error(e.kind(), "mean_gap at tau = " + std::to_string(tau) + ": " + e.what(),
                  e.value());
    }
  });
  return compensated_sum(integrand) / static_cast<double>(tau_samples);
}

}  // namespace gsr

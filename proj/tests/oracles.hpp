#pragma once

// Reference computations used only by the test suites. Each one follows a
// route independent of the library code it is compared against.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace gsr::oracle {

inline bool is_prime_trial(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::size_t count_primes_trial(std::uint64_t limit) {
  std::size_t count = 0;
  for (std::uint64_t n = 2; n <= limit; ++n) count += is_prime_trial(n);
  return count;
}

/// zeta(s) through the alternating eta series accelerated by Borwein's
/// Chebyshev-weight scheme, evaluated in extended precision:
///   eta(s) = sum_{k<n} (-1)^k w_k (k+1)^{-s},  zeta = eta / (1 - 2^{1-s}).
/// The weights w_k = sum_{i>k} c_i / sum_i c_i are formed from log-scaled
/// c_i = n (n+i-1)! 4^i / ((n-i)! (2i)!).
inline std::complex<double> zeta_borwein(std::complex<double> s_in) {
  using R = long double;
  using C = std::complex<R>;
  const C s(s_in.real(), s_in.imag());
  const R t = std::abs(s.imag());
  const R rate = std::log(3.0L + std::sqrt(8.0L));
  const int n = static_cast<int>(
      std::ceil((std::numbers::pi_v<R> * t / 2 + std::log(3 * (1 + 2 * t)) + 40) / rate)) + 10;

  std::vector<R> logc(n + 1);
  R logc_max = -1e300L;
  for (int i = 0; i <= n; ++i) {
    logc[i] = std::log(static_cast<R>(n)) + std::lgamma(static_cast<R>(n + i)) +
              i * std::log(4.0L) - std::lgamma(static_cast<R>(n - i + 1)) -
              std::lgamma(static_cast<R>(2 * i + 1));
    logc_max = std::max(logc_max, logc[i]);
  }
  std::vector<R> suffix(n + 2, 0.0L);
  for (int i = n; i >= 0; --i) suffix[i] = suffix[i + 1] + std::exp(logc[i] - logc_max);
  const R total = suffix[0];

  C eta(0, 0);
  for (int k = n - 1; k >= 0; --k) {
    const R w = suffix[k + 1] / total;
    const R L = std::log(static_cast<R>(k + 1));
    const C term = std::exp(-s * L);
    eta += (k % 2 == 0 ? w : -w) * term;
  }
  const C z = eta / (C(1, 0) - std::exp((C(1, 0) - s) * std::log(2.0L)));
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

/// sum_{n<=M} n^{-sigma} for real sigma, summed from the small end up.
inline double partial_zeta_real(double sigma, std::uint64_t M) {
  long double acc = 0;
  for (std::uint64_t n = M; n >= 1; --n) acc += std::pow(static_cast<long double>(n), -sigma);
  return static_cast<double>(acc);
}

/// zeta(sigma) for real sigma > 1: direct sum to M plus the integral tail
/// M^{1-sigma}/(sigma-1) - M^{-sigma}/2 (trapezoid correction).
inline double zeta_real_direct(double sigma, std::uint64_t M = 2'000'000) {
  const double Md = static_cast<double>(M);
  return partial_zeta_real(sigma, M) + std::pow(Md, 1 - sigma) / (sigma - 1) -
         0.5 * std::pow(Md, -sigma) + sigma / 12.0 * std::pow(Md, -sigma - 1);
}

}  // namespace gsr::oracle

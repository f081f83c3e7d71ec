#pragma once

// Evaluation of zeta(s) by Euler-Maclaurin summation, truncated and
// torus-twisted Euler products, Euler-product tail bounds and grid maxima
// over rectangles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "gsr/error.hpp"
#include "gsr/primes.hpp"
#include "gsr/torus_point.hpp"

namespace gsr {

using cplx = std::complex<double>;

enum class Precision { binary64, extended };

struct EvalConfig {
  double target_abs_error = 1e-12;
  std::size_t max_terms = 100'000'000;
  int em_order = 60;  // largest Euler-Maclaurin order tried
  Precision precision = Precision::binary64;

  void validate() const {
    require(target_abs_error > 0, "target_abs_error must be positive");
    require(max_terms >= 1, "max_terms must be >= 1");
    require(em_order >= 1 && em_order <= 60, "em_order must lie in [1, 60]");
  }
};

enum class Region { unrestricted, critical_strip, absolute };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::unrestricted: return "unrestricted";
    case Region::critical_strip: return "critical-strip";
    case Region::absolute: return "absolute";
  }
  return "unrestricted";
}

/// Axis-aligned rectangle [sigma_min, sigma_max] x [t_min, t_max] with a
/// sampling grid of grid_sigma x grid_t nodes (endpoints included).
struct CompactRect {
  double sigma_min = 0;
  double sigma_max = 0;
  double t_min = 0;
  double t_max = 0;
  int grid_sigma = 2;
  int grid_t = 2;
  Region region = Region::unrestricted;

  void validate() const {
    require(sigma_min <= sigma_max, "rectangle needs sigma_min <= sigma_max");
    require(t_min <= t_max, "rectangle needs t_min <= t_max");
    require(grid_sigma >= 1 && grid_t >= 1, "grid counts must be >= 1");
    if (region == Region::critical_strip)
      require(sigma_min > 0.5 && sigma_max < 1.0,
              "critical-strip rectangle must satisfy 1/2 < sigma_min, sigma_max < 1");
    if (region == Region::absolute)
      require(sigma_min > 1.0, "absolute rectangle must satisfy sigma_min > 1");
  }

  double spacing_sigma() const {
    return grid_sigma > 1 ? (sigma_max - sigma_min) / (grid_sigma - 1) : 0.0;
  }
  double spacing_t() const { return grid_t > 1 ? (t_max - t_min) / (grid_t - 1) : 0.0; }

  /// Grid nodes, sigma-major.
  std::vector<cplx> nodes() const {
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(grid_sigma) * grid_t);
    for (int i = 0; i < grid_sigma; ++i)
      for (int j = 0; j < grid_t; ++j)
        out.emplace_back(sigma_min + i * spacing_sigma(), t_min + j * spacing_t());
    return out;
  }

  /// Same rectangle with each axis refined by `factor` (node count
  /// (g - 1) * factor + 1), so the original nodes are a subset.
  CompactRect refined(int factor) const {
    CompactRect r = *this;
    r.grid_sigma = (grid_sigma - 1) * factor + 1;
    r.grid_t = (grid_t - 1) * factor + 1;
    return r;
  }
};

namespace detail {

inline constexpr std::size_t kLogTableSize = std::size_t{1} << 17;

inline const std::vector<long double>& log_table() {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(kLogTableSize);
    for (std::size_t n = 1; n < kLogTableSize; ++n) t[n] = std::log(static_cast<long double>(n));
    return t;
  }();
  return table;
}

inline long double log_n(std::uint64_t n) {
  return n < kLogTableSize ? log_table()[n] : std::log(static_cast<long double>(n));
}

/// Reduces x to about [-pi, pi] in extended precision. The quotient is
/// rounded in double with the 1.5 * 2^52 trick (nearbyintl is a slow libm call
/// here); an off-by-one at a half-integer only moves the result by 2 pi.
inline long double reduce_phase(long double x) {
  constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  constexpr long double inv_two_pi = 1.0L / two_pi;
  const double q = static_cast<double>(x * inv_two_pi);
  if (!(std::abs(q) < 0x1.0p51)) return x - two_pi * std::nearbyint(x * inv_two_pi);
  volatile double shifted = q + 0x1.8p52;
  const double k = shifted - 0x1.8p52;
  return x - two_pi * static_cast<long double>(k);
}

/// log n as an unevaluated sum hi + lo of doubles.
struct SplitLog {
  double hi;
  double lo;
};

inline const std::vector<SplitLog>& split_log_table() {
  static const std::vector<SplitLog> table = [] {
    std::vector<SplitLog> t(kLogTableSize);
    for (std::size_t n = 1; n < kLogTableSize; ++n) {
      const long double L = log_table()[n];
      const double hi = static_cast<double>(L);
      t[n] = {hi, static_cast<double>(L - hi)};
    }
    return t;
  }();
  return table;
}

inline SplitLog split_log(std::uint64_t n) {
  if (n < kLogTableSize) return split_log_table()[n];
  const long double L = std::log(static_cast<long double>(n));
  const double hi = static_cast<double>(L);
  return {hi, static_cast<double>(L - hi)};
}

/// t (hi + lo) reduced mod 2 pi in double arithmetic: Dekker's exact product
/// for t hi and a three-part Cody-Waite split of 2 pi. Valid while the
/// quotient stays below 2^29; larger arguments go through long double.
inline double reduce_product(double t, SplitLog L) {
  const double p = t * L.hi;
  const double q = p * 0x1.45f306dc9c883p-3;  // 1 / (2 pi)
  if (!(std::abs(q) < 0x1.0p29))
    return static_cast<double>(
        reduce_phase(static_cast<long double>(t) * (static_cast<long double>(L.hi) + L.lo)));
  constexpr double split = 134217729.0;  // 2^27 + 1
  const double ct = split * t, th = ct - (ct - t), tl = t - th;
  const double ch = split * L.hi, hh = ch - (ch - L.hi), hl = L.hi - hh;
  const double err = ((th * hh - p) + th * hl + tl * hh) + tl * hl;
  volatile double shifted = q + 0x1.8p52;
  const double k = shifted - 0x1.8p52;
  constexpr double c1 = 6.2831854820251465, c2 = -1.7484555314695172e-07,
                   c3 = -6.8604979977715316e-15;
  return ((p - k * c1) - k * c2) - k * c3 + (err + t * L.lo);
}

/// n^{-s} with the phase t log n formed and reduced beyond working precision.
template <class Real>
std::complex<Real> inverse_power(std::uint64_t n, Real sigma, Real t) {
  if constexpr (std::is_same_v<Real, double>) {
    const SplitLog L = split_log(n);
    const double mag = std::exp(-sigma * L.hi);
    const double ph = reduce_product(t, L);
    return {mag * std::cos(ph), -mag * std::sin(ph)};
  } else {
    const long double L = log_n(n);
    const Real mag = std::exp(-sigma * static_cast<Real>(L));
    const Real ph = static_cast<Real>(reduce_phase(static_cast<long double>(t) * L));
    return {mag * std::cos(ph), -mag * std::sin(ph)};
  }
}

/// B_{2k}/(2k)! for k = 1..kmax via B_{2k}/(2k)! = (-1)^{k+1} 2 zeta(2k)/(2 pi)^{2k}.
inline const std::vector<long double>& bernoulli_ratios() {
  static const std::vector<long double> table = [] {
    std::vector<long double> c(62, 0.0L);
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    for (int k = 1; k < 62; ++k) {
      long double z2k;
      if (k == 1) {
        z2k = std::numbers::pi_v<long double> * std::numbers::pi_v<long double> / 6.0L;
      } else {
        // Direct sum to N - 1 plus the Euler-Maclaurin tail from N.
        const long double a = 2.0L * k;
        const long double N = 1000.0L;
        z2k = 0.0L;
        for (int n = 999; n >= 1; --n) z2k += std::pow(static_cast<long double>(n), -a);
        z2k += std::pow(N, 1 - a) / (a - 1) + std::pow(N, -a) / 2 + a / 12 * std::pow(N, -a - 1) -
               a * (a + 1) * (a + 2) / 720 * std::pow(N, -a - 3);
      }
      const long double mag = 2.0L * z2k / std::pow(two_pi, 2.0L * k);
      c[k] = (k % 2 == 1) ? mag : -mag;
    }
    return c;
  }();
  return table;
}

}  // namespace detail

template <class Real>
struct ZetaResult {
  std::complex<Real> value;
  Real error_bound;   // Euler-Maclaurin remainder bound
  std::size_t terms;  // length M of the direct sum
};

/// zeta(s) for Re(s) > 0, s != 1, by Euler-Maclaurin summation. The order
/// p <= cfg.em_order and the cut M are chosen together to minimise M subject
/// to the remainder bound |R| <= |s+2p+1|/(sigma+2p+1) |T_{p+1}| meeting the
/// target and 2 pi M >= |s| + 2p, which keeps the correction terms decreasing.
template <class Real>
ZetaResult<Real> zeta_em(std::complex<Real> s, const EvalConfig& cfg) {
  cfg.validate();
  const Real sigma = s.real();
  const Real t = s.imag();
  require(sigma > 0, "zeta needs Re(s) > 0");
  if (sigma == Real(1) && t == Real(0)) fail(ErrorKind::pole, "zeta has a pole at s = 1");

  const auto& c = detail::bernoulli_ratios();
  const long double log_target = std::log(static_cast<long double>(cfg.target_abs_error));
  const long double abs_s = std::abs(std::complex<long double>(sigma, t));
  int p = 1;
  long double M_real = std::numeric_limits<long double>::infinity();
  long double log_a_best = 0;
  // log of the M-independent part of the remainder bound, built up in p.
  long double log_rising = std::log(abs_s);  // sum_{i <= 2p} log|s + i|
  for (int q = 1; q <= cfg.em_order; ++q) {
    log_rising += std::log(std::abs(std::complex<long double>(sigma + 2 * q - 1, t))) +
                  std::log(std::abs(std::complex<long double>(sigma + 2 * q, t)));
    const long double log_a = std::log(std::abs(c[q + 1])) + log_rising +
                              std::log(std::abs(std::complex<long double>(sigma + 2 * q + 1, t)) /
                                       (static_cast<long double>(sigma) + 2 * q + 1));
    const long double decay = static_cast<long double>(sigma) + 2 * q + 1;
    const long double wanted = std::ceil(std::exp((log_a - log_target) / decay));
    const long double floor_m = std::ceil((abs_s + 2 * q) / (2 * std::numbers::pi_v<long double>));
    const long double m = std::max({2.0L, floor_m, wanted});
    if (m < M_real) {
      M_real = m;
      p = q;
      log_a_best = log_a;
    }
  }
  const long double decay = static_cast<long double>(sigma) + 2 * p + 1;
  auto bound_at = [&](long double M) { return std::exp(log_a_best - decay * std::log(M)); };
  if (M_real > static_cast<long double>(cfg.max_terms)) {
    fail(ErrorKind::accuracy_exhausted,
         "zeta accuracy target unreachable within max_terms",
         static_cast<double>(bound_at(static_cast<long double>(cfg.max_terms))));
  }
  const auto M = static_cast<std::uint64_t>(M_real);

  std::complex<Real> sum(0, 0);
  for (std::uint64_t n = M - 1; n >= 1; --n) sum += detail::inverse_power<Real>(n, sigma, t);

  const std::complex<Real> m_pow = detail::inverse_power<Real>(M, sigma, t);  // M^{-s}
  const Real Mr = static_cast<Real>(M);
  sum += m_pow * Mr / (s - Real(1));
  sum += m_pow / Real(2);
  // T_k = c_k s(s+1)...(s+2k-2) M^{-s-2k+1}
  std::complex<Real> rising = s * m_pow / Mr;
  for (int k = 1; k <= p; ++k) {
    sum += static_cast<Real>(c[k]) * rising;
    rising *= (s + Real(2 * k - 1)) * (s + Real(2 * k)) / (Mr * Mr);
  }
  return {sum, static_cast<Real>(bound_at(M_real)), static_cast<std::size_t>(M)};
}

/// zeta(s) to within cfg.target_abs_error (plus floating-point rounding).
inline cplx zeta(cplx s, const EvalConfig& cfg = {}) {
  if (cfg.precision == Precision::extended) {
    const auto r = zeta_em<long double>(std::complex<long double>(s.real(), s.imag()), cfg);
    return {static_cast<double>(r.value.real()), static_cast<double>(r.value.imag())};
  }
  return zeta_em<double>(s, cfg).value;
}

/// prod_{n <= N} (1 - omega(p_n)^power p_n^{-s})^{-1}.
inline cplx euler_product(cplx s, const TorusPoint& omega, long power, std::size_t N,
                          const EvalConfig& cfg = {}) {
  (void)cfg;
  require(s.real() > 0.5, "euler_product needs Re(s) > 1/2");
  require(N <= omega.size(), "euler_product: N = " + std::to_string(N) +
                                 " exceeds torus support " + std::to_string(omega.size()));
  const auto& primes = omega.table().primes();
  const auto& angles = omega.angles();
  cplx prod(1.0, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    const long double L = detail::log_n(primes[n]);
    const double mag = std::exp(-s.real() * static_cast<double>(L));
    const double ph = static_cast<double>(detail::reduce_phase(
        static_cast<long double>(power) * angles[n] - static_cast<long double>(s.imag()) * L));
    const cplx factor = cplx(1.0, 0.0) - std::polar(mag, ph);
    if (factor == cplx(0.0, 0.0))
      fail(ErrorKind::singular_factor,
           "vanishing Euler factor at p = " + std::to_string(primes[n]));
    prod /= factor;
  }
  return prod;
}

/// Sum over n <= N of the principal log(1 - omega(p_n)^power p_n^{-s})^{-1}.
inline cplx log_euler_product(cplx s, const TorusPoint& omega, long power, std::size_t N) {
  require(s.real() > 0.5, "log_euler_product needs Re(s) > 1/2");
  require(N <= omega.size(), "log_euler_product: N exceeds torus support");
  const auto& primes = omega.table().primes();
  const auto& angles = omega.angles();
  cplx acc(0.0, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    const long double L = detail::log_n(primes[n]);
    const double mag = std::exp(-s.real() * static_cast<double>(L));
    const double ph = static_cast<double>(detail::reduce_phase(
        static_cast<long double>(power) * angles[n] - static_cast<long double>(s.imag()) * L));
    acc -= std::log(cplx(1.0, 0.0) - std::polar(mag, ph));
  }
  return acc;
}

/// Upper bound B on |sum_{n > N} log(1 - z p_n^{-s})^{-1}| uniformly in |z| = 1
/// and Re(s) >= sigma_min, from |log(1 - x)^{-1}| <= |x|/(1 - |x|): tabulated
/// primes past p_N are summed exactly and the primes beyond the table are
/// dominated by the integers m > limit, sum_{m > P} m^{-sigma} <= P^{1-sigma}/(sigma-1).
inline double log_tail_bound(double sigma_min, std::size_t N,
                             const PrimeTable& table = *default_table()) {
  require(sigma_min > 1.0, "log_tail_bound needs sigma_min > 1 (the bound diverges)");
  const auto& primes = table.primes();
  const double P = static_cast<double>(table.limit());
  const double xP = std::pow(P, -sigma_min);
  double bound = std::pow(P, 1.0 - sigma_min) / (sigma_min - 1.0) / (1.0 - xP);
  for (std::size_t n = primes.size(); n > N; --n) {
    const double x = std::pow(static_cast<double>(primes[n - 1]), -sigma_min);
    bound += x / (1.0 - x);
  }
  return bound;
}

/// sum_{n <= N} p_n^{-sigma}/(1 - p_n^{-sigma}): the Lipschitz constant in the
/// phases of the N-term log Euler product at Re(s) >= sigma.
inline double phase_sensitivity(double sigma, std::size_t N,
                                const PrimeTable& table = *default_table()) {
  require(N <= table.size(), "phase_sensitivity: N exceeds prime table");
  double acc = 0.0;
  for (std::size_t n = N; n >= 1; --n) {
    const double x = std::pow(static_cast<double>(table.primes()[n - 1]), -sigma);
    acc += x / (1.0 - x);
  }
  return acc;
}

/// Minimal N >= 1 with log_tail_bound(K.sigma_min, N) < eps/2.
inline std::size_t choose_truncation(const CompactRect& K, double eps,
                                     const PrimeTable& table = *default_table()) {
  K.validate();
  require(K.region == Region::absolute, "choose_truncation needs an absolute-region rectangle");
  require(eps > 0, "choose_truncation needs eps > 0");
  const double sigma = K.sigma_min;
  const auto& primes = table.primes();
  // Suffix sums: tail[N] = bound for truncation N.
  std::vector<double> tail(primes.size() + 1);
  const double P = static_cast<double>(table.limit());
  tail[primes.size()] = std::pow(P, 1.0 - sigma) / (sigma - 1.0) / (1.0 - std::pow(P, -sigma));
  for (std::size_t n = primes.size(); n >= 1; --n) {
    const double x = std::pow(static_cast<double>(primes[n - 1]), -sigma);
    tail[n - 1] = tail[n] + x / (1.0 - x);
  }
  for (std::size_t N = 1; N <= primes.size(); ++N)
    if (tail[N] < eps / 2) return N;
  fail(ErrorKind::accuracy_exhausted,
       "no truncation within the prime table meets eps/2", tail[primes.size()]);
}

struct GridSup {
  double value = 0;  // max |f| over the grid
  cplx argmax{};
  double spacing_sigma = 0;
  double spacing_t = 0;
};

/// Maximum of |f| over the grid of K. Failures at a node are rethrown with
/// the node's coordinates.
template <class Fn>
GridSup sup_on_grid(Fn&& f, const CompactRect& K) {
  K.validate();
  require(K.grid_sigma >= 2 && K.grid_t >= 2, "sup_on_grid needs >= 2 nodes per axis");
  require(K.sigma_max > K.sigma_min && K.t_max > K.t_min,
          "sup_on_grid needs nonzero extent on both axes");
  GridSup out{0.0, cplx(K.sigma_min, K.t_min), K.spacing_sigma(), K.spacing_t()};
  for (const cplx& s : K.nodes()) {
    double v;
    try {
      v = std::abs(f(s));
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "at s = " << s.real() << " + " << s.imag() << "i: " << e.what();
      throw Error(e.kind(), msg.str(), e.value());
    }
    if (v > out.value || !(v == v)) {
      out.value = v;
      out.argmax = s;
    }
  }
  return out;
}

}  // namespace gsr

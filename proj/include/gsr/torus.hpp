#pragma once

// Haar-random points of the truncated torus, the random element
// zeta(s, omega^j) - zeta(s, omega^k), and witnesses x(s) in its support.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include "gsr/error.hpp"
#include "gsr/parallel.hpp"
#include "gsr/stats.hpp"
#include "gsr/torus_point.hpp"
#include "gsr/zeta.hpp"

namespace gsr {

/// R independent Haar angles. Angle n depends only on (seed, n), so a
/// sample on R primes is a prefix of the sample on R' > R primes.
inline TorusPoint sample_omega(std::size_t R, std::uint64_t seed,
                               std::shared_ptr<const PrimeTable> table = default_table()) {
  require(R >= 1, "sample_omega needs R >= 1");
  std::vector<double> angles(R);
  const std::uint64_t base = mix64(seed);
  for (std::size_t n = 0; n < R; ++n)
    angles[n] = 2 * std::numbers::pi * static_cast<double>(derive_seed(base, n) >> 11) * 0x1.0p-53;
  return TorusPoint(std::move(table), std::move(angles));
}

/// zeta_N(s, omega^j) - zeta_N(s, omega^k) through the Euler products.
inline cplx random_zeta_diff(cplx s, const TorusPoint& omega, long j, long k, std::size_t N,
                             const EvalConfig& cfg = {}) {
  require(std::gcd(j, k) == 1, "random_zeta_diff needs gcd(j, k) = 1");
  if (j == k) {
    require(N <= omega.size(), "random_zeta_diff: N exceeds torus support");
    require(s.real() > 0.5, "random_zeta_diff needs Re(s) > 1/2");
    return {0, 0};
  }
  return euler_product(s, omega, j, N, cfg) - euler_product(s, omega, k, N, cfg);
}

/// Per-node magnitudes p^{-sigma} and reduced phases t log p for the first
/// N primes; the omega-independent part of the Euler products at fixed nodes.
class EulerNodeCache {
 public:
  EulerNodeCache(const std::vector<cplx>& nodes, std::size_t N, const PrimeTable& table)
      : N_(N), mag_(nodes.size() * N), phase_(nodes.size() * N) {
    require(N <= table.size(), "EulerNodeCache: N exceeds prime table");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      require(nodes[i].real() > 0.5, "Euler products need Re(s) > 1/2");
      for (std::size_t n = 0; n < N; ++n) {
        const long double L = detail::log_n(table.primes()[n]);
        mag_[i * N + n] = std::exp(-nodes[i].real() * static_cast<double>(L));
        phase_[i * N + n] =
            static_cast<double>(detail::reduce_phase(static_cast<long double>(nodes[i].imag()) * L));
      }
    }
  }

  /// random_zeta_diff at node i.
  cplx diff(std::size_t i, const TorusPoint& omega, long j, long k) const {
    require(omega.size() >= N_, "EulerNodeCache: torus support below N");
    if (j == k) return {0, 0};
    const double* mag = &mag_[i * N_];
    const double* ph = &phase_[i * N_];
    const auto& a = omega.angles();
    const double dj = static_cast<double>(j), dk = static_cast<double>(k);
    cplx pj(1, 0), pk(1, 0);
    for (std::size_t n = 0; n < N_; ++n) {
      pj *= cplx(1, 0) - std::polar(mag[n], dj * a[n] - ph[n]);
      pk *= cplx(1, 0) - std::polar(mag[n], dk * a[n] - ph[n]);
    }
    if (pj == cplx(0, 0) || pk == cplx(0, 0))
      fail(ErrorKind::singular_factor, "vanishing Euler factor");
    return cplx(1, 0) / pj - cplx(1, 0) / pk;
  }

 private:
  std::size_t N_;
  std::vector<double> mag_;
  std::vector<double> phase_;
};

struct WitnessOptions {
  std::optional<std::size_t> N;  // primes pinned to omega(p) = 1
  std::optional<std::size_t> R;  // torus support; default max(N, 1000)
  bool randomize_tail = true;    // false: all angles 0, so x = 0
};

/// x(s) = zeta_R(s, omega^j) - zeta_R(s, omega^k) for an omega with
/// omega(p_n) = 1 on n <= N, sampled on the nodes of K.
struct WitnessFunction {
  CompactRect K;
  double eps = 0;
  long j = 1;
  long k = 1;
  std::size_t N = 0;
  std::size_t R = 0;
  std::uint64_t seed = 0;
  TorusPoint omega;
  std::vector<cplx> nodes;
  std::vector<cplx> samples;
  double sup_norm = 0;
  // zeta(sigma_min) (e^{2B} - 1) with B the tail bound past p_N; absent in
  // the critical strip, where the witness is heuristic.
  std::optional<double> analytic_bound;
  bool certified = false;

  cplx evaluate(cplx s, const EvalConfig& cfg = {}) const {
    return random_zeta_diff(s, omega, j, k, R, cfg);
  }
};

/// Builds and verifies a witness. In the absolute region N is the least
/// truncation with tail bound B below min(eps/2, log(1 + eps/zeta(sigma_min))/2):
/// since |zeta_R(s, omega^k)| <= zeta(sigma_min) and
/// x = zeta_R(s, omega^k) (e^{T_j - T_k} - 1) with |T_j|, |T_k| <= B,
/// every realisation of the tail gives |x| < eps. The grid sup is checked too.
inline WitnessFunction support_witness(const CompactRect& K, double eps, long j, long k,
                                       std::uint64_t seed, const EvalConfig& cfg = {},
                                       const WitnessOptions& opts = {}) {
  K.validate();
  require(eps > 0, "support_witness needs eps > 0");
  require(std::gcd(j, k) == 1, "support_witness needs gcd(j, k) = 1");
  require(K.region != Region::unrestricted,
          "support_witness needs a rectangle tagged absolute or critical-strip");

  WitnessFunction w;
  w.K = K;
  w.eps = eps;
  w.j = j;
  w.k = k;
  w.seed = seed;
  const auto table = default_table();
  if (K.region == Region::absolute) {
    const double zmax = zeta({K.sigma_min, 0}, cfg).real();
    const double b = std::min(eps / 2, 0.5 * std::log1p(eps / zmax));
    if (opts.N) {
      w.N = *opts.N;
    } else {
      w.N = 1;
      while (log_tail_bound(K.sigma_min, w.N, *table) >= b) {
        if (w.N >= table->size())
          fail(ErrorKind::accuracy_exhausted, "witness truncation exceeds the prime table",
               log_tail_bound(K.sigma_min, w.N, *table));
        ++w.N;
      }
    }
    w.analytic_bound = zmax * std::expm1(2 * log_tail_bound(K.sigma_min, w.N, *table));
    w.certified = *w.analytic_bound < eps;
  } else {
    w.N = opts.N.value_or(100);
  }
  require(w.N >= 1, "support_witness needs N >= 1");
  w.R = opts.R.value_or(std::max<std::size_t>(w.N, 1000));
  require(w.R >= w.N, "support_witness needs R >= N");

  std::vector<double> angles(w.R, 0.0);
  if (opts.randomize_tail) {
    const TorusPoint haar = sample_omega(w.R, seed, table);
    for (std::size_t n = w.N; n < w.R; ++n) angles[n] = haar.angles()[n];
  }
  w.omega = TorusPoint(table, std::move(angles));

  w.nodes = K.nodes();
  w.samples.resize(w.nodes.size());
  for (std::size_t i = 0; i < w.nodes.size(); ++i) {
    w.samples[i] = w.evaluate(w.nodes[i], cfg);
    w.sup_norm = std::max(w.sup_norm, std::abs(w.samples[i]));
  }
  if (!(w.sup_norm < eps)) {
    std::ostringstream msg;
    msg << "witness grid sup " << w.sup_norm << " >= eps = " << eps << " (N = " << w.N
        << ", R = " << w.R << ")";
    fail(ErrorKind::witness_failed, msg.str(), w.sup_norm);
  }
  return w;
}

struct MassEstimate {
  std::size_t hits = 0;
  std::size_t trials = 0;
  double value = 0;
  BinomialInterval ci;
  double half_width() const { return ci.half_width(); }
};

/// Fraction of Haar samples omega (on the witness's R primes) with
/// max over the grid of K of |zeta_R(s, omega^j) - zeta_R(s, omega^k) - x(s)| < 2 eps.
inline MassEstimate support_mass(const CompactRect& K, double eps, const WitnessFunction& witness,
                                 long j, long k, std::size_t trials, std::uint64_t seed,
                                 const EvalConfig& cfg = {}, double confidence = 0.95) {
  K.validate();
  require(trials >= 1, "support_mass needs trials >= 1");
  require(eps > 0, "support_mass needs eps > 0");
  const std::vector<cplx> nodes = K.nodes();
  std::vector<cplx> x(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) x[i] = witness.evaluate(nodes[i], cfg);

  require(std::gcd(j, k) == 1, "support_mass needs gcd(j, k) = 1");
  const EulerNodeCache cache(nodes, witness.R, witness.omega.table());

  std::vector<unsigned char> hit(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    const TorusPoint omega = sample_omega(witness.R, derive_seed(seed, t), witness.omega.table_ptr());
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (!(std::abs(cache.diff(i, omega, j, k) - x[i]) < 2 * eps)) return;
    hit[t] = 1;
  });
  MassEstimate m;
  m.trials = trials;
  m.hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  m.value = static_cast<double>(m.hits) / static_cast<double>(trials);
  m.ci = wilson_interval(m.hits, trials, confidence);
  return m;
}

}  // namespace gsr

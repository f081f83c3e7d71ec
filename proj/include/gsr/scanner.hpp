#pragma once

// Empirical self-approximation densities
//   nu_T = T^{-1} meas{tau in (0, T] : max_K |zeta(s + i a tau) - zeta(s + i b tau)| < eps},
// density curves along a T schedule, the tau-ensemble against the Haar
// ensemble, and the staged truncation / Kronecker / verification pipeline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gsr/error.hpp"
#include "gsr/kronecker.hpp"
#include "gsr/parallel.hpp"
#include "gsr/stats.hpp"
#include "gsr/target.hpp"
#include "gsr/torus.hpp"
#include "gsr/zeta.hpp"

namespace gsr {

struct ScanConfig {
  RecurrenceTarget target;
  CompactRect K;
  double eps = 0.1;
  double T = 1000;
  std::size_t tau_samples = 1000;
  std::uint64_t seed = 0;
  EvalConfig eval;
  double confidence = 0.95;
  double max_failure_fraction = 0.01;

  void validate() const {
    K.validate();
    require(K.region != Region::unrestricted,
            "scan rectangle must be tagged absolute or critical-strip");
    require(eps > 0, "scan eps must be positive");
    require(T > 0, "scan T must be positive");
    require(tau_samples >= 100, "scan needs tau_samples >= 100");
    require(confidence > 0 && confidence < 1, "scan confidence must lie in (0, 1)");
    require(max_failure_fraction >= 0 && max_failure_fraction < 1,
            "max_failure_fraction must lie in [0, 1)");
    eval.validate();
  }
};

struct DensityEstimate {
  double T = 0;
  std::size_t samples = 0;  // successful evaluations
  std::size_t hits = 0;
  std::size_t failures = 0;
  double value = 0;
  BinomialInterval ci;
  double eps = 0;
  std::string target;
  CompactRect K;
  bool exploratory = false;  // critical-strip rectangle: no density bound applies
  std::optional<std::string> first_failure;

  double ci_half_width() const { return ci.half_width(); }
};

/// tau_i = (i + 1 - u_i) T / n with u_i in [0, 1) drawn from (seed, i):
/// one point per stratum of (0, T].
inline double jittered_tau(std::size_t i, std::size_t n, double T, std::uint64_t seed) {
  const double u = static_cast<double>(derive_seed(seed, i) >> 11) * 0x1.0p-53;
  return (static_cast<double>(i) + 1.0 - u) * T / static_cast<double>(n);
}

/// max over the grid of K of |zeta(s + i a tau) - zeta(s + i b tau)|, stopping
/// at the first node where the value reaches stop_at.
inline double self_gap(const std::vector<cplx>& nodes, double a, double b, double tau,
                       const EvalConfig& cfg,
                       double stop_at = std::numeric_limits<double>::infinity()) {
  if (a == b) return 0.0;
  double best = 0;
  for (const cplx& s : nodes) {
    const double v = std::abs(zeta(s + cplx(0, a * tau), cfg) - zeta(s + cplx(0, b * tau), cfg));
    best = std::max(best, v);
    if (!(best < stop_at)) break;
  }
  return best;
}

namespace detail {

inline DensityEstimate tally(const ScanConfig& cfg, const std::vector<signed char>& outcome,
                             const std::optional<std::string>& first_failure) {
  DensityEstimate est;
  est.T = cfg.T;
  est.eps = cfg.eps;
  est.target = cfg.target.describe();
  est.K = cfg.K;
  est.exploratory = cfg.K.region == Region::critical_strip;
  est.first_failure = first_failure;
  for (signed char o : outcome) {
    if (o < 0) ++est.failures;
    else ++est.samples, est.hits += static_cast<std::size_t>(o);
  }
  const double fail_frac = static_cast<double>(est.failures) / static_cast<double>(outcome.size());
  if (fail_frac > cfg.max_failure_fraction) {
    std::ostringstream msg;
    msg << est.failures << " of " << outcome.size() << " evaluations failed at T = " << cfg.T;
    if (first_failure) msg << "; first: " << *first_failure;
    fail(ErrorKind::run_rejected, msg.str(), fail_frac);
  }
  require(est.samples > 0, "no successful evaluations");
  est.value = static_cast<double>(est.hits) / static_cast<double>(est.samples);
  est.ci = wilson_interval(est.hits, est.samples, cfg.confidence);
  return est;
}

}  // namespace detail

/// The empirical density nu_T over cfg.tau_samples jittered points. Failed
/// evaluations are counted; above cfg.max_failure_fraction the run is
/// rejected.
inline DensityEstimate nu_T(const ScanConfig& cfg) {
  cfg.validate();
  const auto [a, b] = cfg.target.shifts();
  const std::vector<cplx> nodes = cfg.K.nodes();
  const std::size_t n = cfg.tau_samples;
  std::vector<signed char> outcome(n, 0);
  std::vector<std::string> errors(n);
  parallel_for(n, [&](std::size_t i) {
    const double tau = jittered_tau(i, n, cfg.T, cfg.seed);
    try {
      outcome[i] = self_gap(nodes, a, b, tau, cfg.eval, cfg.eps) < cfg.eps ? 1 : 0;
    } catch (const Error& e) {
      outcome[i] = -1;
      errors[i] = "tau = " + std::to_string(tau) + ": " + e.what();
    }
  });
  std::optional<std::string> first;
  for (std::size_t i = 0; i < n && !first; ++i)
    if (outcome[i] < 0) first = errors[i];
  return detail::tally(cfg, outcome, first);
}

/// One estimate per T, each with the same seed and sample count.
inline std::vector<DensityEstimate> density_curve(const ScanConfig& cfg,
                                                  const std::vector<double>& schedule) {
  require(!schedule.empty(), "density_curve needs a nonempty T schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    require(schedule[i] > schedule[i - 1], "T schedule must be strictly increasing");
  std::vector<DensityEstimate> out;
  for (double T : schedule) {
    ScanConfig c = cfg;
    c.T = T;
    out.push_back(nu_T(c));
  }
  return out;
}

/// Finite stand-in for the liminf: running minima of the estimates and of
/// their lower confidence limits over the schedule, ignoring T < burn_in.
struct LiminfProxy {
  double running_min_value = 1;
  double running_min_lower = 1;
  std::size_t used = 0;
  bool positive() const { return used > 0 && running_min_lower > 0; }
};

inline LiminfProxy liminf_proxy(const std::vector<DensityEstimate>& curve, double burn_in = 0) {
  LiminfProxy p;
  for (const auto& e : curve) {
    if (e.T < burn_in) continue;
    ++p.used;
    p.running_min_value = std::min(p.running_min_value, e.value);
    p.running_min_lower = std::min(p.running_min_lower, e.ci.lo);
  }
  return p;
}

struct DistributionComparison {
  double statistic = 0;  // max of the two marginal statistics
  double ks_real = 0;
  double ks_imag = 0;
  std::size_t tau_samples = 0;
  std::size_t haar_trials = 0;
  cplx haar_mean{};
  double haar_std_real = 0;
  double haar_std_imag = 0;
};

/// Two-sample Kolmogorov-Smirnov comparison, marginally in the real and
/// imaginary parts, of zeta(s0 + i j tau) - zeta(s0 + i k tau) over jittered
/// tau in (0, T] against zeta_N(s0, omega^j) - zeta_N(s0, omega^k) over Haar
/// omega on the first N primes. Haar sample t depends only on (seed, t).
inline DistributionComparison compare_distributions(cplx s0, long j, long k, double T,
                                                    std::size_t tau_samples,
                                                    std::size_t haar_trials, std::size_t N,
                                                    std::uint64_t seed,
                                                    const EvalConfig& cfg = {}) {
  require(s0.real() > 1, "compare_distributions needs Re(s0) > 1");
  require(T > 0, "compare_distributions needs T > 0");
  require(tau_samples >= 2 && haar_trials >= 2, "compare_distributions needs >= 2 samples each");
  require(N >= 1, "compare_distributions needs N >= 1");
  require(std::gcd(j, k) == 1, "compare_distributions needs gcd(j, k) = 1");

  std::vector<double> tre(tau_samples), tim(tau_samples), hre(haar_trials), him(haar_trials);
  const std::uint64_t tau_seed = derive_seed(seed, 1), haar_seed = derive_seed(seed, 2);
  std::vector<signed char> failed(tau_samples, 0);
  parallel_for(tau_samples, [&](std::size_t i) {
    const double tau = jittered_tau(i, tau_samples, T, tau_seed);
    try {
      const cplx v = zeta(s0 + cplx(0, static_cast<double>(j) * tau), cfg) -
                     zeta(s0 + cplx(0, static_cast<double>(k) * tau), cfg);
      tre[i] = v.real();
      tim[i] = v.imag();
    } catch (const Error&) {
      failed[i] = 1;
    }
  });
  const auto n_failed = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  if (static_cast<double>(n_failed) > 0.01 * static_cast<double>(tau_samples))
    fail(ErrorKind::run_rejected, "more than 1% of tau evaluations failed",
         static_cast<double>(n_failed) / static_cast<double>(tau_samples));
  if (n_failed > 0) {
    std::vector<double> r, m;
    for (std::size_t i = 0; i < tau_samples; ++i)
      if (!failed[i]) r.push_back(tre[i]), m.push_back(tim[i]);
    tre = std::move(r);
    tim = std::move(m);
  }

  const EulerNodeCache cache({s0}, N, *default_table());
  parallel_for(haar_trials, [&](std::size_t t) {
    const cplx v = cache.diff(0, sample_omega(N, derive_seed(haar_seed, t)), j, k);
    hre[t] = v.real();
    him[t] = v.imag();
  });

  DistributionComparison out;
  out.tau_samples = tre.size();
  out.haar_trials = haar_trials;
  out.ks_real = ks_statistic(tre, hre);
  out.ks_imag = ks_statistic(tim, him);
  out.statistic = std::max(out.ks_real, out.ks_imag);
  const Moments mr = moments(hre), mi = moments(him);
  out.haar_mean = {mr.mean, mi.mean};
  out.haar_std_real = mr.stddev;
  out.haar_std_imag = mi.stddev;
  return out;
}

struct Theorem41Options {
  double search_bound = 1e12;
  double margin = 0.05;
  std::optional<CompactRect> verify_grid;  // default: K itself
  LatticeSearchOptions lattice;
};

struct Theorem41Stage {
  std::string name;
  std::string detail;
};

/// Everything the pipeline computed, stage by stage.
struct Theorem41Report {
  std::string target;
  double eps = 0;
  CompactRect K;
  std::size_t N = 0;
  double tail_bound = 0;         // B: log-tail past p_N, < eps / 2
  double sensitivity = 0;        // S_N = sum_{n <= N} p^-sigma / (1 - p^-sigma)
  double phi_max = 0;            // admissible phase per prime
  double delta = 0;              // 2 sin(phi_max / 2), capped at 2
  KroneckerQuery query;          // the query actually solved
  std::size_t conditions = 0;
  TauWindow window;
  double tau = 0;
  double shift_a = 1;            // compared: zeta(s + i a tau) against zeta(s + i b tau)
  double shift_b = 1;
  double exceptional_deviation = 0;  // post hoc phase cost of the declared A_d
  double staged_log_bound = 0;   // 2 B + 2 phi_max S_N + A_d deviation
  double log_sup = 0;            // max |Log(zeta_a / zeta_b)| on the grid
  double zeta_sup = 0;           // max |zeta_a - zeta_b| on the grid
  double zeta_level_bound = 0;   // zeta(sigma_min) (exp(staged_log_bound) - 1)
  double margin = 0;
  bool passed = false;
  std::vector<Theorem41Stage> stages;
};

namespace detail {

template <class Fn>
auto run_stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    // what() carries a "kind: " prefix that the rethrown error adds again.
    std::string msg = e.what();
    const std::string prefix = std::string(to_string(e.kind())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    throw Error(e.kind(), std::string("stage ") + name + ": " + msg, e.value());
  }
}

}  // namespace detail

/// The truncation / Kronecker / transfer / verification chain:
///  1. N with log-tail bound B < eps/2 on K;
///  2. phi_max = (eps/2) / S_N and delta = 2 sin(phi_max/2), so phases within
///     phi_max of 0 move the N-term log product by less than eps/2;
///  3. the conditions: the first N primes at delta, moved to the pair
///     (tau, (j/k) tau) by rational_condition_transfer, or with the targets
///     d log p (p outside A_d) for real d;
///  4. a certified window from find_tau_lattice; tau is its midpoint;
///  5. grid evaluation of zeta(s + i tau) against zeta(s + i d tau): the log
///     gap must respect the staged bound and the gap itself must be below
///     2 eps (1 + margin).
inline Theorem41Report theorem41_demo(const CompactRect& K, double eps,
                                      const RecurrenceTarget& target,
                                      const Theorem41Options& opts = {},
                                      const EvalConfig& cfg = {}) {
  K.validate();
  require(K.region == Region::absolute, "theorem41_demo needs an absolute-region rectangle");
  require(K.sigma_min > 1, "theorem41_demo needs sigma_min > 1");
  require(eps > 0, "theorem41_demo needs eps > 0");
  require(opts.margin >= 0, "theorem41_demo needs margin >= 0");

  Theorem41Report r;
  r.target = target.describe();
  r.eps = eps;
  r.K = K;
  r.margin = opts.margin;
  const auto table = default_table();
  auto log_stage = [&](const char* name, const std::string& detail) { r.stages.push_back({name, detail}); };

  detail::run_stage("truncation", [&] {
    r.N = choose_truncation(K, eps, *table);
    r.tail_bound = log_tail_bound(K.sigma_min, r.N, *table);
    std::ostringstream d;
    d << "N = " << r.N << ", tail bound " << r.tail_bound << " < eps/2 = " << eps / 2;
    log_stage("truncation", d.str());
    return 0;
  });

  detail::run_stage("delta", [&] {
    r.sensitivity = phase_sensitivity(K.sigma_min, r.N, *table);
    r.phi_max = (eps / 2) / r.sensitivity;
    r.delta = r.phi_max >= std::numbers::pi ? 2.0 : 2 * std::sin(r.phi_max / 2);
    std::ostringstream d;
    d << "S_N = " << r.sensitivity << ", phi_max = " << r.phi_max << ", delta = " << r.delta;
    log_stage("delta", d.str());
    return 0;
  });

  const std::vector<std::uint64_t> primes(table->primes().begin(),
                                          table->primes().begin() + static_cast<long>(r.N));
  const KroneckerQuery base{primes, r.delta, 1.0, {}};
  std::vector<std::uint64_t> exceptional;
  detail::run_stage("transfer", [&] {
    std::ostringstream d;
    if (r.delta >= 2) {
      // phi_max >= pi: every phase is admissible and no condition remains.
      r.query = base;
      const auto [a, b] = target.shifts();
      r.shift_a = 1;
      r.shift_b = b / a;
      d << "delta = 2: all conditions vacuous";
    } else if (target.kind == RecurrenceTarget::Kind::rational) {
      r.query = rational_condition_transfer(target.j, target.k, base);
      r.shift_a = 1;
      r.shift_b = static_cast<double>(target.j) / static_cast<double>(target.k);
      d << "rational " << target.j << "/" << target.k << ": frequencies log p / " << std::abs(target.k)
        << ", threshold " << r.query.delta;
    } else {
      r.query = base;
      r.shift_a = 1;
      r.shift_b = target.d;
      if (target.d != 0 && target.d != 1) {
        exceptional = target.declared_exceptional;
        for (auto p : primes)
          if (std::find(exceptional.begin(), exceptional.end(), p) == exceptional.end())
            r.query.extra_targets.push_back({target.d * std::log(static_cast<double>(p)), r.delta});
      }
      d << "d = " << target.d << ": " << r.query.extra_targets.size() << " extra targets d log p";
      if (!exceptional.empty()) d << ", " << exceptional.size() << " declared exceptional primes";
    }
    r.conditions = detail::conditions(r.query).size();
    d << "; " << r.conditions << " non-vacuous conditions";
    log_stage("transfer", d.str());
    return 0;
  });

  detail::run_stage("kronecker", [&] {
    if (r.conditions == 0) {
      r.window = TauWindow{0, opts.search_bound, true};
      r.tau = 1.0;
    } else {
      r.window = find_tau_lattice(r.query, opts.search_bound, opts.lattice);
      r.tau = r.window.midpoint();
    }
    require(r.window.certified, "window not certified");
    std::ostringstream d;
    d.precision(17);
    d << "window [" << r.window.tau_lo << ", " << r.window.tau_hi << "], tau = " << r.tau;
    log_stage("kronecker", d.str());
    return 0;
  });

  detail::run_stage("bounds", [&] {
    // Primes in A_d carry no condition on d log p; their actual phase at tau
    // is charged to the bound instead.
    for (auto p : exceptional) {
      const auto idx = table->index_of(p);
      if (!idx || *idx > r.N) continue;
      const double x = std::pow(static_cast<double>(p), -K.sigma_min);
      const long double ph = detail::reduce_phase(static_cast<long double>(target.d * r.tau) *
                                                  std::log(static_cast<long double>(p)));
      r.exceptional_deviation += x / (1 - x) * static_cast<double>(std::abs(ph));
    }
    r.staged_log_bound = 2 * r.tail_bound + 2 * r.phi_max * r.sensitivity + r.exceptional_deviation;
    r.zeta_level_bound = zeta({K.sigma_min, 0}, cfg).real() * std::expm1(r.staged_log_bound);
    std::ostringstream d;
    d << "log bound 2B + 2 phi S + A_d = " << r.staged_log_bound << ", zeta-level bound "
      << r.zeta_level_bound;
    log_stage("bounds", d.str());
    return 0;
  });

  detail::run_stage("verify", [&] {
    const CompactRect grid = opts.verify_grid.value_or(K);
    for (const cplx& s : grid.nodes()) {
      const cplx za = zeta(s + cplx(0, r.shift_a * r.tau), cfg);
      const cplx zb = zeta(s + cplx(0, r.shift_b * r.tau), cfg);
      r.zeta_sup = std::max(r.zeta_sup, std::abs(za - zb));
      r.log_sup = std::max(r.log_sup, std::abs(std::log(za / zb)));
    }
    std::ostringstream d;
    d << "grid sup " << r.zeta_sup << " vs 2 eps (1 + margin) = " << 2 * eps * (1 + opts.margin)
      << "; log sup " << r.log_sup << " vs staged " << r.staged_log_bound;
    log_stage("verify", d.str());
    if (!(r.log_sup <= r.staged_log_bound + 1e-9))
      fail(ErrorKind::witness_failed, "log gap exceeds the staged bound: " + d.str(), r.log_sup);
    if (!(r.zeta_sup < 2 * eps * (1 + opts.margin)))
      fail(ErrorKind::witness_failed, "gap exceeds 2 eps (1 + margin): " + d.str(), r.zeta_sup);
    return 0;
  });
  r.passed = true;
  return r;
}

}  // namespace gsr

#pragma once

// Simultaneous conditions |exp(i tau lambda) - 1| < delta on real tau:
// scanning and lattice search for windows of tau where all hold, their
// equidistribution density, and the bounds used to transfer such windows to
// shifted and fractional frequencies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gsr/error.hpp"
#include "gsr/lattice.hpp"
#include "gsr/parallel.hpp"
#include "gsr/primes.hpp"

namespace gsr {

/// An extra condition |exp(i tau log_value) - 1| < delta, e.g. log_value = d log p.
struct ExtraTarget {
  double log_value = 0;
  double delta = 0;
};

/// Conditions |exp(i tau scale log p) - 1| < delta for each listed prime,
/// plus the extra targets.
struct KroneckerQuery {
  std::vector<std::uint64_t> primes;
  double delta = 1;
  double frequency_scale = 1;
  std::vector<ExtraTarget> extra_targets;

  void validate() const {
    require(delta > 0 && delta <= 2, "query delta must lie in (0, 2]");
    require(std::isfinite(frequency_scale) && frequency_scale != 0,
            "query frequency_scale must be finite and nonzero");
    std::vector<std::uint64_t> sorted(primes);
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "query primes must be distinct");
    for (auto p : primes) require(is_prime(p), "query entry " + std::to_string(p) + " is not prime");
    for (const auto& e : extra_targets)
      require(std::isfinite(e.log_value) && e.delta > 0, "extra target needs finite log and delta > 0");
  }

  static bool is_prime(std::uint64_t p) {
    if (p < 2) return false;
    for (std::uint64_t d = 2; d * d <= p; ++d)
      if (p % d == 0) return false;
    return true;
  }
};

/// The first count primes.
inline KroneckerQuery first_primes_query(std::size_t count, double delta) {
  std::vector<std::uint64_t> primes = sieve_count(count).primes();
  primes.resize(count);
  return {std::move(primes), delta, 1.0, {}};
}

struct TauWindow {
  double tau_lo = 0;
  double tau_hi = 0;
  bool certified = false;
  double midpoint() const { return 0.5 * (tau_lo + tau_hi); }
  double length() const { return tau_hi - tau_lo; }
};

namespace detail {

struct Condition {
  long double lambda;  // frequency
  double delta;
  long double half_arc;  // condition holds iff dist(tau lambda, 2 pi Z) < half_arc
};

/// Non-vacuous conditions (delta < 2) of q.
inline std::vector<Condition> conditions(const KroneckerQuery& q) {
  q.validate();
  std::vector<Condition> out;
  auto add = [&](long double lambda, double delta) {
    if (delta >= 2 || lambda == 0) return;
    out.push_back({lambda, delta, 2 * std::asin(static_cast<long double>(delta) / 2)});
  };
  for (auto p : q.primes)
    add(static_cast<long double>(q.frequency_scale) * std::log(static_cast<long double>(p)), q.delta);
  for (const auto& e : q.extra_targets) add(e.log_value, e.delta);
  return out;
}

/// |exp(i x) - 1| = 2 |sin(x/2)| with the argument reduced in long double.
inline long double chord(long double x) {
  constexpr long double two_pi = 2 * std::numbers::pi_v<long double>;
  const long double r = x - two_pi * std::nearbyint(x / two_pi);
  return 2 * std::abs(std::sin(r / 2));
}

inline bool holds(const std::vector<Condition>& cs, long double tau) {
  for (const auto& c : cs)
    if (!(chord(tau * c.lambda) < c.delta)) return false;
  return true;
}

/// Sub-intervals of [lo, hi] on which every condition holds, computed from
/// the exact arcs (2 pi m - a, 2 pi m + a) / lambda.
inline std::vector<std::pair<long double, long double>> clip_to_arcs(
    const std::vector<Condition>& cs, long double lo, long double hi) {
  constexpr long double two_pi = 2 * std::numbers::pi_v<long double>;
  std::vector<std::pair<long double, long double>> cur{{lo, hi}};
  for (const auto& c : cs) {
    std::vector<std::pair<long double, long double>> next;
    const long double L = std::abs(c.lambda);
    for (const auto& [a, b] : cur) {
      const auto m0 = static_cast<std::int64_t>(std::floor((a * L - c.half_arc) / two_pi));
      const auto m1 = static_cast<std::int64_t>(std::ceil((b * L + c.half_arc) / two_pi));
      for (std::int64_t m = m0; m <= m1; ++m) {
        const long double x = std::max(a, (two_pi * m - c.half_arc) / L);
        const long double y = std::min(b, (two_pi * m + c.half_arc) / L);
        if (x < y) next.emplace_back(x, y);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

/// Shrinks [lo, hi] slightly so rounding at the arc boundaries cannot break
/// the strict inequalities, then checks the ends and midpoint.
inline std::optional<TauWindow> certify(const std::vector<Condition>& cs, long double lo,
                                        long double hi) {
  const long double margin =
      std::max<long double>(1e-9L * (hi - lo), 1e-15L * std::max<long double>(1, std::abs(hi)));
  if (lo != 0) lo += margin;
  hi -= margin;
  if (!(lo < hi)) return std::nullopt;
  const long double mid = (lo + hi) / 2;
  TauWindow w{static_cast<double>(lo), static_cast<double>(hi), false};
  if (!(w.tau_lo < w.tau_hi)) return std::nullopt;
  w.certified = holds(cs, w.tau_lo) && holds(cs, w.tau_hi) && holds(cs, mid);
  return w;
}

}  // namespace detail

/// Largest admissible scan step: min over conditions of delta / (2 lambda).
inline double max_scan_step(const KroneckerQuery& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : detail::conditions(q))
    best = std::min(best, static_cast<double>(c.delta / (2 * std::abs(c.lambda))));
  return best;
}

/// Maximal windows in [0, T] where every condition holds. The conditions are
/// sampled at multiples of step; a sample is flagged when each chord is within
/// the Lipschitz slack lambda step / 2 of its threshold, so every tau where all
/// conditions hold lies within step/2 of a flagged sample. Each run of flagged
/// samples is then intersected with the exact arcs, which fixes the endpoints
/// to rounding accuracy and splits runs that straddle a gap.
inline std::vector<TauWindow> find_tau_scan(const KroneckerQuery& q, double T, double step) {
  require(T > 0, "find_tau_scan needs T > 0");
  require(step > 0, "find_tau_scan needs step > 0");
  const auto cs = detail::conditions(q);
  if (cs.empty()) return {TauWindow{0, T, true}};
  const double bound = max_scan_step(q);
  if (step > bound) {
    std::ostringstream msg;
    msg << "scan step " << step << " exceeds the bound delta/(2 lambda) = " << bound;
    fail(ErrorKind::invalid_argument, msg.str(), bound);
  }

  const auto count = static_cast<std::size_t>(std::ceil(T / step)) + 1;
  std::vector<unsigned char> flagged(count);
  const std::size_t chunk = 1 << 16;
  parallel_for((count + chunk - 1) / chunk, [&](std::size_t c) {
    const std::size_t end = std::min(count, (c + 1) * chunk);
    for (std::size_t i = c * chunk; i < end; ++i) {
      const long double tau = static_cast<long double>(i) * step;
      bool all = true;
      for (const auto& cond : cs)
        all = all && detail::chord(tau * cond.lambda) < cond.delta + std::abs(cond.lambda) * step * 0.5000001L;
      flagged[i] = all;
    }
  });

  std::vector<TauWindow> out;
  for (std::size_t i = 0; i < count;) {
    if (!flagged[i]) {
      ++i;
      continue;
    }
    std::size_t e = i;
    while (e + 1 < count && flagged[e + 1]) ++e;
    const long double lo = std::max<long double>(0, (static_cast<long double>(i) - 0.5L) * step);
    const long double hi = std::min<long double>(T, (static_cast<long double>(e) + 0.5L) * step);
    for (const auto& [a, b] : detail::clip_to_arcs(cs, lo, hi))
      if (auto w = detail::certify(cs, a, b)) out.push_back(*w);
    i = e + 1;
  }
  return out;
}

inline double total_measure(const std::vector<TauWindow>& windows) {
  double s = 0;
  for (const auto& w : windows) s += w.length();
  return s;
}

/// prod over conditions of 2 arcsin(delta/2) / pi, the equidistribution
/// density. Extra targets enter only when include_extra is set (their
/// frequencies must then be independent of the primes' logarithms).
inline double theoretical_density(const KroneckerQuery& q, bool include_extra = false) {
  q.validate();
  auto arc = [](double delta) { return delta >= 2 ? 1.0 : 2 * std::asin(delta / 2) / std::numbers::pi; };
  double d = 1;
  for (std::size_t n = 0; n < q.primes.size(); ++n) d *= arc(q.delta);
  if (include_extra)
    for (const auto& e : q.extra_targets) d *= arc(e.delta);
  return d;
}

struct LatticeSearchOptions {
  std::size_t max_nodes = 20'000'000;
  double initial_bound = 0;  // 0: one period of the slowest condition
};

/// First window in (0, search_bound] found by lattice reduction. With
/// alpha_c = lambda_c / 2 pi and eps_c = arcsin(delta_c / 2) / pi the task is
/// |tau alpha_c - m_c| < eps_c for integers m_c. Weighting by w_c = 1/eps_c and
/// eliminating tau by least squares maps m to the lattice vector
/// (w m - tau(m) u, c tau(m)) with u = w alpha; every window below B comes
/// from an m of squared length < 2R once c = sqrt(R)/B', so enumeration at
/// that radius is exhaustive. B doubles until a window appears.
inline TauWindow find_tau_lattice(const KroneckerQuery& q, double search_bound,
                                  const LatticeSearchOptions& opts = {}) {
  require(search_bound > 0, "find_tau_lattice needs search_bound > 0");
  const auto cs = detail::conditions(q);
  if (cs.empty()) return TauWindow{0, search_bound, true};
  const std::size_t R = cs.size();
  using lattice::Real;
  constexpr Real two_pi = 2 * std::numbers::pi_v<Real>;

  std::vector<Real> alpha(R), eps(R), w(R), u(R);
  Real uu = 0, slowest = 0;
  for (std::size_t c = 0; c < R; ++c) {
    alpha[c] = cs[c].lambda / two_pi;
    eps[c] = cs[c].half_arc / two_pi;
    w[c] = 1 / eps[c];
    u[c] = w[c] * alpha[c];
    uu += u[c] * u[c];
    slowest = std::max(slowest, 1 / std::abs(alpha[c]));
  }
  const Real unorm = std::sqrt(uu);

  // Window of tau values for the integer vector m.
  auto window_of = [&](const std::vector<std::int64_t>& m) -> std::optional<std::pair<Real, Real>> {
    Real lo = -std::numeric_limits<Real>::infinity(), hi = std::numeric_limits<Real>::infinity();
    for (std::size_t c = 0; c < R; ++c) {
      Real a = (static_cast<Real>(m[c]) - eps[c]) / alpha[c];
      Real b = (static_cast<Real>(m[c]) + eps[c]) / alpha[c];
      if (a > b) std::swap(a, b);
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    }
    if (!(lo < hi) || hi <= 0) return std::nullopt;
    return std::make_pair(std::max<Real>(lo, 0), hi);
  };

  Real B = opts.initial_bound > 0 ? opts.initial_bound : std::min<Real>(search_bound, slowest);
  for (;;) {
    B = std::min<Real>(B, search_bound);
    const Real Bp = B + std::sqrt(static_cast<Real>(R)) / unorm;
    const Real scale = std::sqrt(static_cast<Real>(R)) / Bp;
    std::vector<lattice::Vec> rows(R, lattice::Vec(R + 1, 0));
    for (std::size_t c = 0; c < R; ++c) {
      const Real t = u[c] * w[c] / uu;  // tau(e_c)
      for (std::size_t d = 0; d < R; ++d) rows[c][d] = (c == d ? w[c] : 0) - t * u[d];
      rows[c][R] = scale * t;
    }
    const lattice::Basis basis = lattice::lll(rows);
    std::optional<std::pair<Real, Real>> best;
    const bool complete = lattice::enumerate(basis, 2 * static_cast<Real>(R) * 1.0001L, opts.max_nodes,
                                             [&](const std::vector<std::int64_t>& m) {
                                               auto win = window_of(m);
                                               if (!win || win->first <= 0 || win->first > B) return;
                                               if (!best || win->first < best->first) best = win;
                                             });
    if (best) {
      // The enumeration may have been cut short; the window found is still
      // genuine, only its minimality is in doubt.
      if (auto cert = detail::certify(cs, best->first, std::min<Real>(best->second, search_bound)))
        if (cert->certified) return *cert;
    }
    if (!complete) {
      // Fall back to a scan of (0, B] when affordable.
      const double step = max_scan_step(q);
      if (static_cast<double>(B) / step <= 5e7) {
        for (const auto& win : find_tau_scan(q, static_cast<double>(B), step))
          if (win.tau_lo > 0 && win.certified) return win;
      } else {
        std::ostringstream msg;
        msg << "lattice enumeration exceeded " << opts.max_nodes << " nodes at bound " << static_cast<double>(B);
        fail(ErrorKind::not_found, msg.str(), search_bound);
      }
    }
    if (B >= search_bound) break;
    B *= 2;
  }
  std::ostringstream msg;
  msg << "no certified window in (0, " << search_bound << "]";
  fail(ErrorKind::not_found, msg.str(), search_bound);
}

struct LiftCheck {
  double lhs = 0;
  double rhs = 0;
};

/// Both sides of |e^{i j theta} - 1| = |e^{i k theta} - 1| |S_j| / |S_k| with
/// theta = tau log p / k and S_n = sum_{m < |n|} e^{i m theta}.
inline LiftCheck rational_lift_check(std::int64_t j, std::int64_t k, double tau, std::uint64_t p) {
  require(k != 0, "rational_lift_check needs k != 0");
  require(std::gcd(j, k) == 1, "rational_lift_check needs gcd(j, k) = 1");
  require(p >= 2, "rational_lift_check needs a prime p");
  // Both sides are 2 pi periodic in theta; reducing first keeps m theta small,
  // so rounding in the products does not swamp small geometric sums.
  const long double theta = std::remainder(
      static_cast<long double>(tau) * std::log(static_cast<long double>(p)) / static_cast<long double>(k),
      2 * std::numbers::pi_v<long double>);
  const std::int64_t aj = std::abs(j), ak = std::abs(k);
  auto geometric = [&](std::int64_t n) {
    long double re = 0, im = 0;
    for (std::int64_t m = 0; m < n; ++m) {
      re += std::cos(static_cast<long double>(m) * theta);
      im += std::sin(static_cast<long double>(m) * theta);
    }
    return std::hypot(re, im);
  };
  const long double den = geometric(ak);
  if (!(den > 1e-13L * static_cast<long double>(ak))) {
    std::ostringstream msg;
    msg << "theta = tau log " << p << " / " << k << " is a nontrivial " << ak
        << "-th root direction; the denominator sum vanishes";
    fail(ErrorKind::singular_direction, msg.str(), static_cast<double>(den));
  }
  const long double lhs = detail::chord(static_cast<long double>(aj) * theta);
  const long double rhs = detail::chord(static_cast<long double>(ak) * theta) * geometric(aj) / den;
  return {static_cast<double>(lhs), static_cast<double>(rhs)};
}

/// The threshold min{delta, |k/j| delta}.
inline double lifted_threshold(std::int64_t j, std::int64_t k, double delta) {
  require(j != 0 && k != 0, "lifted_threshold needs j k != 0");
  return std::min(delta, std::abs(static_cast<double>(k) / static_cast<double>(j)) * delta);
}

/// A query whose solutions tau satisfy both the conditions of q at tau and at
/// (j/k) tau. With phi = tau lambda / |k|, the query asks
/// |e^{i phi} - 1| < min{delta, |k/j| delta} / |k| = delta / max(|j|, |k|); then
/// |e^{i n phi} - 1| <= |n| |e^{i phi} - 1| < delta for n = j and n = k.
/// The threshold min{delta, |k/j| delta} on the unscaled frequency alone does
/// not suffice when |k| > 1: tau lambda = 2 pi passes it while
/// tau lambda / k does not.
inline KroneckerQuery rational_condition_transfer(std::int64_t j, std::int64_t k, const KroneckerQuery& q) {
  require(j != 0 && k != 0, "rational_condition_transfer needs j k != 0");
  require(std::gcd(j, k) == 1, "rational_condition_transfer needs gcd(j, k) = 1");
  q.validate();
  KroneckerQuery out = q;
  const double ak = static_cast<double>(std::abs(k));
  out.frequency_scale = q.frequency_scale / ak;
  out.delta = lifted_threshold(j, k, q.delta) / ak;
  for (auto& e : out.extra_targets) {
    e.log_value /= ak;
    e.delta = lifted_threshold(j, k, e.delta) / ak;
  }
  return out;
}

struct CombinationCheck {
  double achieved = 0;
  double bound = 0;
};

/// For a = prod p^{alpha_p} with alpha_p = a_p / b_p, returns |e^{i tau log a} - 1|
/// and delta sum |alpha_p|. The bound holds whenever
/// |e^{i tau log p / b_p} - 1| < delta / b_p for every p, since then
/// |e^{i a_p tau log p / b_p} - 1| <= |a_p| delta / b_p.
inline CombinationCheck combination_bound_check(const Factorization& target, double tau, double delta) {
  require(delta > 0, "combination_bound_check needs delta > 0");
  long double phase = 0;
  double weight = 0;
  for (const auto& [p, alpha] : target.entries) {
    const long double L = std::log(static_cast<long double>(p));
    const auto b = static_cast<long double>(alpha.den());
    if (!(detail::chord(static_cast<long double>(tau) * L / b) < delta / b)) {
      std::ostringstream msg;
      msg << "condition |exp(i tau log " << p << " / " << alpha.den() << ") - 1| < delta / "
          << alpha.den() << " fails at tau = " << tau;
      fail(ErrorKind::precondition_failed, msg.str(),
           static_cast<double>(detail::chord(static_cast<long double>(tau) * L / b)));
    }
    phase += static_cast<long double>(tau) * L * static_cast<long double>(alpha.num()) / b;
    weight += std::abs(alpha.to_double());
  }
  return {static_cast<double>(detail::chord(phase)), delta * weight};
}

}  // namespace gsr

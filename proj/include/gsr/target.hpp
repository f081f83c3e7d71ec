#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gsr/error.hpp"

namespace gsr {

struct Convergent {
  std::int64_t num;
  std::int64_t den;
};

/// Continued-fraction convergents of x with denominators up to max_den.
inline std::vector<Convergent> convergents(double x, std::int64_t max_den) {
  std::vector<Convergent> out;
  std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(x));
  std::int64_t k_prev = 0, k = 1;
  out.push_back({h, k});
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 64 && frac > 1e-15; ++iter) {
    const double inv = 1.0 / frac;
    const auto a = static_cast<std::int64_t>(std::floor(inv));
    frac = inv - static_cast<double>(a);
    const std::int64_t h_next = a * h + h_prev;
    const std::int64_t k_next = a * k + k_prev;
    if (k_next > max_den || k_next <= 0) break;
    h_prev = std::exchange(h, h_next);
    k_prev = std::exchange(k, k_next);
    out.push_back({h, k});
  }
  return out;
}

/// The rational p/q (q <= max_height) with |x - p/q| <= tol, if one exists
/// among the convergents of x.
inline std::optional<Convergent> small_rational_near(double x, std::int64_t max_height,
                                                     double tol = 1e-12) {
  for (const Convergent& c : convergents(x, max_height))
    if (std::abs(x - static_cast<double>(c.num) / static_cast<double>(c.den)) <=
        tol * std::max(1.0, std::abs(x)))
      return c;
  return std::nullopt;
}

/// The self-approximation comparison: zeta(s + i a tau) against
/// zeta(s + i b tau), where (a, b) = (j, k) for a coprime pair and (1, d)
/// for a real parameter d.
struct RecurrenceTarget {
  enum class Kind { rational, irrational, real };

  Kind kind = Kind::rational;
  std::int64_t j = 1;
  std::int64_t k = 1;
  double d = 1.0;
  std::vector<std::uint64_t> declared_exceptional;  // the finite prime set A_d
  std::optional<std::string> warning;

  static RecurrenceTarget rational(std::int64_t j, std::int64_t k) {
    require(j != 0 && k != 0, "rational target needs j k != 0");
    require(std::gcd(j, k) == 1, "rational target needs gcd(|j|, |k|) = 1");
    RecurrenceTarget t;
    t.kind = Kind::rational;
    t.j = j;
    t.k = k;
    t.d = static_cast<double>(j) / static_cast<double>(k);
    return t;
  }

  /// An irrational parameter. Irrationality cannot be certified numerically;
  /// a warning is attached when d is within 1e-12 of a rational of height
  /// <= max_height.
  static RecurrenceTarget irrational(double d, std::vector<std::uint64_t> exceptional = {},
                                     std::int64_t max_height = 1000) {
    require(std::isfinite(d), "irrational target needs finite d");
    RecurrenceTarget t;
    t.kind = Kind::irrational;
    t.d = d;
    t.declared_exceptional = std::move(exceptional);
    if (auto c = small_rational_near(d, max_height)) {
      std::ostringstream msg;
      msg << "d = " << d << " is within 1e-12 of " << c->num << "/" << c->den
          << "; irrationality is not numerically certifiable";
      t.warning = msg.str();
    }
    return t;
  }

  static RecurrenceTarget real(double d) {
    require(std::isfinite(d), "real target needs finite d");
    RecurrenceTarget t;
    t.kind = Kind::real;
    t.d = d;
    return t;
  }

  /// Shift multipliers (a, b).
  std::pair<double, double> shifts() const {
    if (kind == Kind::rational) return {static_cast<double>(j), static_cast<double>(k)};
    return {1.0, d};
  }

  /// True when both sides coincide identically (d = 1 or j = k).
  bool is_trivial() const {
    const auto [a, b] = shifts();
    return a == b;
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::rational: os << "rational(" << j << "," << k << ")"; break;
      case Kind::irrational: os << "irrational(" << d << ")"; break;
      case Kind::real: os << "real(" << d << ")"; break;
    }
    return os.str();
  }
};

inline const char* to_string(RecurrenceTarget::Kind k) {
  switch (k) {
    case RecurrenceTarget::Kind::rational: return "rational";
    case RecurrenceTarget::Kind::irrational: return "irrational";
    case RecurrenceTarget::Kind::real: return "real";
  }
  return "rational";
}

}  // namespace gsr

#pragma once

// Prime tables, exact rationals and factorizations over a prime table.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gsr/error.hpp"

namespace gsr {

/// Exact rational with normalized sign (den > 0) and gcd(num, den) = 1.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
    require(d != 0, "rational with zero denominator");
    normalize();
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }
  constexpr bool is_integer() const { return den_ == 1; }
  constexpr bool is_zero() const { return num_ == 0; }
  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  Rational abs() const { return Rational(num_ < 0 ? -num_ : num_, den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const std::int64_t g = std::gcd(a.den_, b.den_);
    return Rational(a.num_ * (b.den_ / g) + b.num_ * (a.den_ / g),
                    a.den_ / g * b.den_);
  }
  friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    const std::int64_t g1 = std::gcd(a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_, a.den_);
    const std::int64_t n1 = g1 ? a.num_ / g1 : a.num_;
    const std::int64_t d2 = g1 ? b.den_ / g1 : b.den_;
    const std::int64_t n2 = g2 ? b.num_ / g2 : b.num_;
    const std::int64_t d1 = g2 ? a.den_ / g2 : a.den_;
    return Rational(n1 * n2, d1 * d2);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    require(b.num_ != 0, "rational division by zero");
    return a * Rational(b.den_, b.num_);
  }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    os << r.num_;
    if (r.den_ != 1) os << '/' << r.den_;
    return os;
  }

 private:
  void normalize() {
    if (den_ < 0) {
      den_ = -den_;
      num_ = -num_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Immutable ordered list of all primes up to `limit()`. Ordinals are
/// 1-based: p_1 = 2.
class PrimeTable {
 public:
  PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> primes)
      : limit_(limit), primes_(std::move(primes)) {}

  std::uint64_t limit() const { return limit_; }
  std::size_t size() const { return primes_.size(); }
  const std::vector<std::uint64_t>& primes() const { return primes_; }

  /// p_n for 1-based n.
  std::uint64_t nth(std::size_t n) const {
    require(n >= 1 && n <= primes_.size(),
            "prime ordinal " + std::to_string(n) + " outside table of size " +
                std::to_string(primes_.size()));
    return primes_[n - 1];
  }

  /// Ordinal n with p_n == p, if p is a tabulated prime.
  std::optional<std::size_t> index_of(std::uint64_t p) const {
    const auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - primes_.begin()) + 1;
  }

  bool contains(std::uint64_t p) const { return index_of(p).has_value(); }

 private:
  std::uint64_t limit_;
  std::vector<std::uint64_t> primes_;
};

namespace detail {

inline std::vector<std::uint64_t> simple_sieve(std::uint64_t limit) {
  std::vector<char> composite(limit + 1, 0);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t m = i * i; m <= limit; m += i) composite[m] = 1;
  }
  return out;
}

inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace detail

/// Segment length (in integers) used once the limit exceeds what a single
/// flat sieve should allocate.
inline constexpr std::uint64_t kSieveSegment = std::uint64_t{1} << 20;

/// All primes <= limit. Flat Eratosthenes up to one segment, segmented
/// beyond that.
inline PrimeTable sieve(std::uint64_t limit) {
  require(limit >= 2, "sieve limit must be >= 2, got " + std::to_string(limit));
  if (limit <= kSieveSegment) return PrimeTable(limit, detail::simple_sieve(limit));

  const std::uint64_t root = detail::isqrt(limit);
  const std::vector<std::uint64_t> base = detail::simple_sieve(root);
  std::vector<std::uint64_t> out = base;
  out.reserve(static_cast<std::size_t>(
      1.1 * static_cast<double>(limit) / std::log(static_cast<double>(limit))));
  std::vector<char> segment(kSieveSegment);
  for (std::uint64_t lo = root + 1; lo <= limit; lo += kSieveSegment) {
    const std::uint64_t hi = std::min(limit, lo + kSieveSegment - 1);
    std::fill(segment.begin(), segment.end(), 0);
    for (std::uint64_t p : base) {
      if (p * p > hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      for (std::uint64_t m = start; m <= hi; m += p) segment[m - lo] = 1;
    }
    for (std::uint64_t n = lo; n <= hi; ++n)
      if (!segment[n - lo]) out.push_back(n);
  }
  return PrimeTable(limit, std::move(out));
}

/// Smallest table containing at least `count` primes.
inline PrimeTable sieve_count(std::size_t count) {
  require(count >= 1, "prime count must be >= 1");
  const double n = static_cast<double>(std::max<std::size_t>(count, 6));
  // p_n < n (ln n + ln ln n) for n >= 6.
  auto limit = static_cast<std::uint64_t>(n * (std::log(n) + std::log(std::log(n)))) + 16;
  PrimeTable t = sieve(limit);
  while (t.size() < count) t = sieve(limit *= 2);
  return t;
}

/// Shared process-wide table (primes up to 2e6, 148933 of them). Built once on
/// first use and immutable thereafter.
inline std::shared_ptr<const PrimeTable> default_table() {
  static const auto table = std::make_shared<const PrimeTable>(sieve(2'000'000));
  return table;
}

/// Prime-power decomposition with rational exponents. For factorizations of
/// integers every exponent is a positive integer.
struct Factorization {
  std::vector<std::pair<std::uint64_t, Rational>> entries;

  bool empty() const { return entries.empty(); }

  /// Reconstructs the integer; every exponent must be a non-negative integer.
  std::uint64_t value() const {
    std::uint64_t v = 1;
    for (const auto& [p, e] : entries) {
      require(e.is_integer() && e.num() >= 0,
              "value() needs non-negative integer exponents");
      for (std::int64_t i = 0; i < e.num(); ++i) v *= p;
    }
    return v;
  }

  /// Sum of e * log p.
  double log_value() const {
    double acc = 0.0;
    for (const auto& [p, e] : entries) acc += e.to_double() * std::log(static_cast<double>(p));
    return acc;
  }

  /// Sum of |e|.
  Rational abs_exponent_sum() const {
    Rational acc;
    for (const auto& [p, e] : entries) acc = acc + e.abs();
    return acc;
  }

  friend bool operator==(const Factorization&, const Factorization&) = default;
};

/// Trial division against `table`. A cofactor left after dividing out every
/// tabulated prime is prime provided it is below limit^2.
inline Factorization factorize(std::uint64_t n, const PrimeTable& table) {
  require(n >= 1, "factorize needs n >= 1");
  Factorization f;
  for (std::uint64_t p : table.primes()) {
    if (p * p > n) break;
    if (n % p != 0) continue;
    std::int64_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.entries.emplace_back(p, Rational(e));
  }
  if (n > 1) {
    const std::uint64_t lim = table.limit();
    require(lim >= detail::isqrt(n) || table.contains(n),
            "cofactor " + std::to_string(n) + " exceeds trial-division range");
    f.entries.emplace_back(n, Rational(1));
  }
  return f;
}

inline Factorization factorize(std::uint64_t n) { return factorize(n, *default_table()); }

}  // namespace gsr

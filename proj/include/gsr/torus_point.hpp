#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "gsr/error.hpp"
#include "gsr/primes.hpp"

namespace gsr {

/// A point of the torus truncated to the first R primes. Coordinates are
/// stored as angles so |omega(p)| = 1 holds exactly; complex values are
/// derived on demand.
class TorusPoint {
 public:
  TorusPoint() = default;
  TorusPoint(std::shared_ptr<const PrimeTable> table, std::vector<double> angles)
      : table_(std::move(table)), angles_(std::move(angles)) {
    require(table_ != nullptr, "torus point needs a prime table");
    require(angles_.size() <= table_->size(),
            "torus support " + std::to_string(angles_.size()) +
                " exceeds prime table size " + std::to_string(table_->size()));
    for (double& a : angles_) a = wrap(a);
  }

  /// The identity element (all angles 0) on R primes.
  static TorusPoint identity(std::size_t R,
                             std::shared_ptr<const PrimeTable> table = default_table()) {
    return TorusPoint(std::move(table), std::vector<double>(R, 0.0));
  }

  std::size_t size() const { return angles_.size(); }
  const std::vector<double>& angles() const { return angles_; }
  const PrimeTable& table() const { return *table_; }
  const std::shared_ptr<const PrimeTable>& table_ptr() const { return table_; }

  /// Angle of the coordinate at prime p_n (1-based n).
  double angle(std::size_t n) const {
    require(n >= 1 && n <= angles_.size(), "torus ordinal out of range");
    return angles_[n - 1];
  }

  void set_angle(std::size_t n, double a) {
    require(n >= 1 && n <= angles_.size(), "torus ordinal out of range");
    angles_[n - 1] = wrap(a);
  }

  /// omega(p_n).
  std::complex<double> at_ordinal(std::size_t n) const { return std::polar(1.0, angle(n)); }

  /// omega(m) = prod omega(p)^{v(m;p)}; every prime factor of m must lie in
  /// the support.
  std::complex<double> value(std::uint64_t m) const {
    require(m >= 1, "omega(m) needs m >= 1");
    double phase = 0.0;
    for (const auto& [p, e] : factorize(m, *table_).entries) {
      const auto idx = table_->index_of(p);
      require(idx && *idx <= angles_.size(),
              "prime " + std::to_string(p) + " outside torus support");
      phase += static_cast<double>(e.num()) * angles_[*idx - 1];
    }
    return std::polar(1.0, phase);
  }

  static double wrap(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, two_pi);
    if (r < 0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
  }

 private:
  std::shared_ptr<const PrimeTable> table_;
  std::vector<double> angles_;
};

}  // namespace gsr

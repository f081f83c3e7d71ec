#pragma once

// LLL reduction and short-vector enumeration for a real lattice given by a
// basis of row vectors, tracking the integer coefficients of every vector
// with respect to the input basis.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "gsr/error.hpp"

namespace gsr::lattice {

using Real = long double;
using Vec = std::vector<Real>;

struct Basis {
  std::vector<Vec> rows;                        // b_i
  std::vector<std::vector<std::int64_t>> coef;  // b_i = sum_c coef[i][c] * input_c
};

inline Real dot(const Vec& a, const Vec& b) {
  Real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct GramSchmidt {
  std::vector<std::vector<Real>> mu;
  std::vector<Real> norm2;  // |b*_i|^2
};

inline GramSchmidt gram_schmidt(const std::vector<Vec>& b) {
  const std::size_t n = b.size();
  GramSchmidt gs{std::vector<std::vector<Real>>(n, std::vector<Real>(n, 0)), std::vector<Real>(n)};
  std::vector<Vec> star(b);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      gs.mu[i][j] = dot(b[i], star[j]) / gs.norm2[j];
      for (std::size_t c = 0; c < star[i].size(); ++c) star[i][c] -= gs.mu[i][j] * star[j][c];
    }
    gs.norm2[i] = dot(star[i], star[i]);
    require(gs.norm2[i] > 0, "lattice basis is linearly dependent");
  }
  return gs;
}

/// Textbook LLL with parameter 3/4; Gram-Schmidt data are recomputed after
/// each change, which is fine for the small ranks used here.
inline Basis lll(std::vector<Vec> rows, Real delta = 0.75L) {
  const std::size_t n = rows.size();
  Basis B{std::move(rows), std::vector<std::vector<std::int64_t>>(n, std::vector<std::int64_t>(n, 0))};
  for (std::size_t i = 0; i < n; ++i) B.coef[i][i] = 1;
  if (n == 0) return B;
  GramSchmidt gs = gram_schmidt(B.rows);
  std::size_t k = 1;
  for (std::size_t iter = 0; k < n; ++iter) {
    require(iter < 1000000, "LLL did not terminate");
    for (std::size_t j = k; j-- > 0;) {
      const Real q = std::nearbyint(gs.mu[k][j]);
      if (q == 0) continue;
      const auto qi = static_cast<std::int64_t>(q);
      for (std::size_t c = 0; c < B.rows[k].size(); ++c) B.rows[k][c] -= q * B.rows[j][c];
      for (std::size_t c = 0; c < n; ++c) B.coef[k][c] -= qi * B.coef[j][c];
      for (std::size_t l = 0; l <= j; ++l) gs.mu[k][l] -= q * (l == j ? 1 : gs.mu[j][l]);
    }
    if (gs.norm2[k] >= (delta - gs.mu[k][k - 1] * gs.mu[k][k - 1]) * gs.norm2[k - 1]) {
      ++k;
    } else {
      std::swap(B.rows[k], B.rows[k - 1]);
      std::swap(B.coef[k], B.coef[k - 1]);
      gs = gram_schmidt(B.rows);
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
  return B;
}

/// Calls visit(coefficients w.r.t. the input basis) for every nonzero lattice
/// vector of squared length <= radius2. Returns false if more than max_nodes
/// search nodes would be needed (the enumeration is then incomplete).
template <class Visit>
bool enumerate(const Basis& B, Real radius2, std::size_t max_nodes, Visit&& visit) {
  const std::size_t n = B.rows.size();
  if (n == 0) return true;
  const GramSchmidt gs = gram_schmidt(B.rows);
  std::vector<std::int64_t> x(n, 0);
  std::vector<Real> partial(n + 1, 0);  // squared length contributed by levels >= i
  std::size_t nodes = 0;
  bool complete = true;

  auto recurse = [&](auto&& self, std::size_t level) -> void {
    if (!complete) return;
    Real centre = 0;
    for (std::size_t j = level + 1; j < n; ++j) centre -= gs.mu[j][level] * static_cast<Real>(x[j]);
    const Real room = radius2 - partial[level + 1];
    if (room < 0) return;
    const Real reach = std::sqrt(room / gs.norm2[level]);
    const auto lo = static_cast<std::int64_t>(std::ceil(centre - reach));
    const auto hi = static_cast<std::int64_t>(std::floor(centre + reach));
    for (std::int64_t v = lo; v <= hi; ++v) {
      if (++nodes > max_nodes) {
        complete = false;
        return;
      }
      x[level] = v;
      const Real d = static_cast<Real>(v) - centre;
      partial[level] = partial[level + 1] + d * d * gs.norm2[level];
      if (level == 0) {
        bool zero = true;
        for (auto xi : x) zero = zero && xi == 0;
        if (zero) continue;
        std::vector<std::int64_t> m(n, 0);
        for (std::size_t i = 0; i < n; ++i)
          if (x[i] != 0)
            for (std::size_t c = 0; c < n; ++c) m[c] += x[i] * B.coef[i][c];
        visit(m);
      } else {
        self(self, level - 1);
      }
      if (!complete) return;
    }
    x[level] = 0;
  };
  recurse(recurse, n - 1);
  return complete;
}

}  // namespace gsr::lattice

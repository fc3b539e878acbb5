#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include "subspec/error.hpp"
#include "subspec/linalg_exact.hpp"
#include "subspec/polynomial.hpp"
#include "subspec/rational.hpp"

namespace subspec {

/// Structure constants c_{ij}^k of a Lie algebra over a fixed basis E_1..E_n (0-based here).
class StructureConstants {
 public:
  struct Entry {
    std::size_t i, j, k;
    Rational c;
  };

  StructureConstants() = default;
  explicit StructureConstants(std::size_t dim) : dim_(dim), c_(dim * dim * dim, Rational(0)) {}

  std::size_t dim() const { return dim_; }

  const Rational& operator()(std::size_t i, std::size_t j, std::size_t k) const { return c_[index(i, j, k)]; }

  /// Sets [E_i, E_j] component k to c and [E_j, E_i] component k to -c.
  void set_bracket(std::size_t i, std::size_t j, std::size_t k, const Rational& c) {
    if (i >= dim_ || j >= dim_ || k >= dim_)
      throw Error(ErrorKind::InvalidStructure, "bracket index out of range");
    if (i == j) {
      if (c != 0) throw Error(ErrorKind::InvalidStructure, "[E_i, E_i] must vanish (i = " + std::to_string(i + 1) + ")");
      return;
    }
    c_[index(i, j, k)] = c;
    c_[index(j, i, k)] = -c;
    entries_ = nonzero_entries();
  }

  /// Raw setter without antisymmetrization, for validating externally supplied tables.
  void set_raw(std::size_t i, std::size_t j, std::size_t k, const Rational& c) {
    c_[index(i, j, k)] = c;
    entries_ = nonzero_entries();
  }

  bool is_antisymmetric() const {
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        for (std::size_t k = 0; k < dim_; ++k)
          if ((*this)(i, j, k) != -(*this)(j, i, k)) return false;
    return true;
  }

  std::vector<Entry> nonzero_entries() const {
    std::vector<Entry> out;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        for (std::size_t k = 0; k < dim_; ++k)
          if ((*this)(i, j, k) != 0) out.push_back({i, j, k, (*this)(i, j, k)});
    return out;
  }

  RationalVector bracket(const RationalVector& u, const RationalVector& v) const {
    RationalVector out(dim_, Rational(0));
    for (const auto& e : entries())
      if (u[e.i] != 0 && v[e.j] != 0) out[e.k] += e.c * u[e.i] * v[e.j];
    return out;
  }

  /// Bracket of Lie-algebra elements whose coordinates are polynomials.
  std::vector<Polynomial> bracket(const std::vector<Polynomial>& u, const std::vector<Polynomial>& v) const {
    std::size_t nv = u.front().nvars();
    std::vector<Polynomial> out(dim_, Polynomial(nv));
    for (const auto& e : entries()) {
      if (u[e.i].is_zero() || v[e.j].is_zero()) continue;
      out[e.k] += (u[e.i] * v[e.j]) * e.c;
    }
    return out;
  }

 private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * dim_ + j) * dim_ + k; }

  const std::vector<Entry>& entries() const { return entries_; }

  std::size_t dim_ = 0;
  std::vector<Rational> c_;
  std::vector<Entry> entries_;
};

inline RationalVector basis_vector(std::size_t dim, std::size_t i) {
  RationalVector v(dim, Rational(0));
  v[i] = 1;
  return v;
}

/// Reduced basis of span{[a, b] : a in A, b in B} + extra.
inline RationalMatrix bracket_span(const StructureConstants& sc, const RationalMatrix& a, const RationalMatrix& b,
                                   const RationalMatrix& extra = {}) {
  RationalMatrix rows = extra;
  for (const auto& u : a)
    for (const auto& v : b) rows.push_back(sc.bracket(u, v));
  return reduced_row_echelon(std::move(rows), sc.dim()).rows;
}

/// Throws JacobiViolation naming the first offending basis triple.
inline void check_jacobi(const StructureConstants& sc) {
  std::size_t n = sc.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t l = j + 1; l < n; ++l) {
        auto ei = basis_vector(n, i), ej = basis_vector(n, j), el = basis_vector(n, l);
        auto a = sc.bracket(ei, sc.bracket(ej, el));
        auto b = sc.bracket(ej, sc.bracket(el, ei));
        auto c = sc.bracket(el, sc.bracket(ei, ej));
        for (std::size_t k = 0; k < n; ++k)
          if (a[k] + b[k] + c[k] != 0)
            throw Error(ErrorKind::JacobiViolation, "Jacobi identity fails for basis triple (" + std::to_string(i + 1) +
                                                        ", " + std::to_string(j + 1) + ", " + std::to_string(l + 1) +
                                                        ")");
      }
}

/// Nilpotency step from the lower central series; throws NotNilpotent if it stalls.
inline std::size_t nilpotency_step(const StructureConstants& sc) {
  std::size_t n = sc.dim();
  RationalMatrix full;
  for (std::size_t i = 0; i < n; ++i) full.push_back(basis_vector(n, i));
  RationalMatrix current = full;
  std::size_t step = 1;
  while (true) {
    RationalMatrix next = bracket_span(sc, full, current);
    if (next.empty()) return step;
    if (next.size() == current.size() || step > n)
      throw Error(ErrorKind::NotNilpotent, "lower central series stabilizes at a nonzero ideal of dimension " +
                                               std::to_string(next.size()));
    current = std::move(next);
    ++step;
  }
}

/// Bernoulli numbers B_0..B_m (B_1 = -1/2 convention).
inline std::vector<Rational> bernoulli_numbers(std::size_t m) {
  std::vector<Rational> b(m + 1, Rational(0));
  b[0] = 1;
  for (std::size_t k = 1; k <= m; ++k) {
    Rational sum = 0;
    mpz_class binom = 1;  // C(k+1, j)
    for (std::size_t j = 0; j < k; ++j) {
      sum += binom * b[j];
      binom = binom * static_cast<unsigned long>(k + 1 - j) / static_cast<unsigned long>(j + 1);
    }
    b[k] = -sum / static_cast<unsigned long>(k + 1);
    b[k].canonicalize();
  }
  return b;
}

/// Baker–Campbell–Hausdorff product log(exp(A) exp(B)) as n polynomials in the 2n variables
/// (a_1..a_n, b_1..b_n), exact because all brackets of length > step vanish.
///
/// Homogeneous components follow the recursion
///   Z_1 = A + B,
///   (m+1) Z_{m+1} = 1/2 [A - B, Z_m]
///       + sum_{p>=1, 2p<=m} B_{2p}/(2p)! sum_{k_1+..+k_{2p}=m} [Z_{k_1}, [..., [Z_{k_{2p}}, A + B]...]].
inline std::vector<Polynomial> bch_product_law(const StructureConstants& sc, std::size_t step) {
  std::size_t n = sc.dim();
  std::size_t nv = 2 * n;
  std::vector<Polynomial> a(n), b(n), sum(n), diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = Polynomial::variable(nv, i);
    b[i] = Polynomial::variable(nv, n + i);
    sum[i] = a[i] + b[i];
    diff[i] = a[i] - b[i];
  }
  std::vector<Rational> bern = bernoulli_numbers(step + 1);
  std::vector<std::vector<Polynomial>> z(step + 1);
  z[1] = sum;

  auto add_into = [](std::vector<Polynomial>& acc, const std::vector<Polynomial>& v, const Rational& s) {
    for (std::size_t i = 0; i < acc.size(); ++i)
      if (!v[i].is_zero()) acc[i] += v[i] * s;
  };

  for (std::size_t m = 1; m < step; ++m) {
    std::vector<Polynomial> next(n, Polynomial(nv));
    add_into(next, sc.bracket(diff, z[m]), Rational(1, 2));
    mpz_class factorial = 1;
    for (std::size_t p = 1; 2 * p <= m; ++p) {
      factorial *= static_cast<unsigned long>((2 * p - 1) * (2 * p));
      Rational coef = bern[2 * p] / Rational(factorial);
      std::vector<std::size_t> parts(2 * p);
      std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t pos, std::size_t remaining) {
        if (pos + 1 == parts.size()) {
          parts[pos] = remaining;
          std::vector<Polynomial> acc = sum;
          for (std::size_t q = parts.size(); q-- > 0;) acc = sc.bracket(z[parts[q]], acc);
          add_into(next, acc, coef);
          return;
        }
        for (std::size_t k = 1; k + (parts.size() - pos - 1) <= remaining; ++k) {
          parts[pos] = k;
          visit(pos + 1, remaining - k);
        }
      };
      visit(0, m);
    }
    Rational scale(1, static_cast<unsigned long>(m + 1));
    for (auto& c : next) c *= scale;
    z[m + 1] = std::move(next);
  }

  std::vector<Polynomial> law(n, Polynomial(nv));
  for (std::size_t m = 1; m <= step; ++m) add_into(law, z[m], Rational(1));
  return law;
}

}  // namespace subspec

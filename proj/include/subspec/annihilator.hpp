#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subspec/error.hpp"
#include "subspec/group_model.hpp"
#include "subspec/linalg_exact.hpp"
#include "subspec/polynomial.hpp"
#include "subspec/qmc.hpp"
#include "subspec/vector_field.hpp"

namespace subspec {

/// Vector-valued polynomial map G -> R^m in exponential coordinates.
struct GroupPolynomial {
  std::vector<Polynomial> components;
  std::optional<int> declared_degree;

  GroupPolynomial() = default;
  GroupPolynomial(Polynomial p) : components{std::move(p)} {}
  explicit GroupPolynomial(std::vector<Polynomial> c) : components(std::move(c)) {}

  std::size_t nvars() const { return components.empty() ? 0 : components.front().nvars(); }
  bool is_zero() const {
    return std::all_of(components.begin(), components.end(), [](const Polynomial& p) { return p.is_zero(); });
  }
  int degree() const {
    int d = 0;
    for (const auto& c : components)
      if (!c.is_zero()) d = std::max(d, c.degree());
    return d;
  }
  /// |p|^2 as a scalar polynomial.
  Polynomial squared_norm() const {
    Polynomial s(nvars());
    for (const auto& c : components) s += c * c;
    return s;
  }
  friend bool operator==(const GroupPolynomial& a, const GroupPolynomial& b) { return a.components == b.components; }
};

enum class Verdict { Discrete, NotDiscrete };

inline std::string to_string(Verdict v) { return v == Verdict::Discrete ? "Discrete" : "NotDiscrete"; }

struct AnnihilatorResult {
  std::vector<RationalVector> kernel_basis;
  Verdict verdict = Verdict::Discrete;
  std::optional<RationalVector> witness;
};

inline GroupPolynomial apply_field(const VectorFieldOp& v, const GroupPolynomial& p) {
  GroupPolynomial out;
  for (const auto& c : p.components) out.components.push_back(v.apply(c));
  return out;
}

/// X^R for X = sum_j x_j E_j.
inline VectorFieldOp right_field_of(const GroupModel& g, const RationalVector& x) {
  std::vector<VectorFieldOp> basis;
  for (std::size_t j = 0; j < g.dim(); ++j) basis.push_back(g.right_invariant_field(j));
  return linear_combination(basis, x);
}

namespace detail {

/// Coordinates of a list of vector polynomials in a shared monomial basis (component, exponent).
class MonomialIndex {
 public:
  std::size_t index(std::size_t component, const Exponents& e) {
    auto [it, inserted] = map_.try_emplace({component, e}, keys_.size());
    if (inserted) keys_.emplace_back(component, e);
    return it->second;
  }
  std::size_t size() const { return map_.size(); }

  RationalVector coordinates(const GroupPolynomial& p) {
    std::vector<std::pair<std::size_t, Rational>> entries;
    for (std::size_t c = 0; c < p.components.size(); ++c)
      for (const auto& [e, coef] : p.components[c].terms()) entries.emplace_back(index(c, e), coef);
    RationalVector v(size(), Rational(0));
    for (auto& [i, coef] : entries) v[i] = coef;
    return v;
  }

  GroupPolynomial polynomial(const RationalVector& v, std::size_t ncomponents, std::size_t nvars) const {
    GroupPolynomial q;
    for (std::size_t c = 0; c < ncomponents; ++c) q.components.emplace_back(nvars);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) q.components[keys_[i].first].add_term(keys_[i].second, v[i]);
    return q;
  }

 private:
  std::map<std::pair<std::size_t, Exponents>, std::size_t> map_;
  std::vector<std::pair<std::size_t, Exponents>> keys_;
};

inline void pad(RationalMatrix& rows, std::size_t n) {
  for (auto& r : rows) r.resize(n, Rational(0));
}

}  // namespace detail

/// Smallest m with every (m+1)-fold composition of right-invariant basis fields killing p.
/// Tracks the span of the k-fold images rather than individual tuples.
inline int leibman_degree(const GroupModel& g, const GroupPolynomial& p, std::optional<int> cap = std::nullopt) {
  if (p.is_zero()) throw Error(ErrorKind::InvalidArgument, "leibman_degree requires a nonzero polynomial");
  int limit = cap.value_or(static_cast<int>(g.step()) * p.degree() + 1);
  std::vector<GroupPolynomial> level{p};
  int m = 0;
  while (true) {
    detail::MonomialIndex index;
    std::vector<GroupPolynomial> images;
    RationalMatrix rows;
    for (const auto& q : level)
      for (std::size_t a = 0; a < g.dim(); ++a) {
        GroupPolynomial r = apply_field(g.right_invariant_field(a), q);
        if (r.is_zero()) continue;
        images.push_back(r);
        rows.push_back(index.coordinates(r));
      }
    if (images.empty()) return m;
    ++m;
    if (m > limit)
      throw Error(ErrorKind::DegreeSearchOverflow,
                  "Leibman degree exceeds cap " + std::to_string(limit) + " (termination is guaranteed; this is a bug)");
    // The echelon rows span the same space as the images and are independent.
    detail::pad(rows, index.size());
    RowEchelon rre = reduced_row_echelon(rows, index.size());
    std::vector<GroupPolynomial> basis;
    for (const auto& row : rre.rows) basis.push_back(index.polynomial(row, p.components.size(), p.nvars()));
    level = std::move(basis);
  }
}

/// Exact kernel of X -> X^R p on the Lie algebra.
inline AnnihilatorResult right_annihilator(const GroupModel& g, const GroupPolynomial& p) {
  const std::size_t n = g.dim();
  AnnihilatorResult out;
  if (p.is_zero()) {
    for (std::size_t j = 0; j < n; ++j) out.kernel_basis.push_back(basis_vector(n, j));
  } else {
    detail::MonomialIndex index;
    std::vector<RationalVector> columns;
    for (std::size_t j = 0; j < n; ++j) columns.push_back(index.coordinates(apply_field(g.right_invariant_field(j), p)));
    RationalMatrix m(index.size(), RationalVector(n, Rational(0)));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < columns[j].size(); ++i) m[i][j] = columns[j][i];
    out.kernel_basis = nullspace(m, n);
  }
  if (!out.kernel_basis.empty()) {
    out.verdict = Verdict::NotDiscrete;
    out.witness = out.kernel_basis.front();
  }
  return out;
}

struct WitnessReport {
  bool identity_holds = false;
  std::vector<double> sup_values;  // sup |p|^2 over B(exp(kX), r), k = 1..samples
  bool bounded = false;
};

/// Confirms p(exp(tX) y) = p(y) symbolically in (t, y), then samples |p|^2 on the balls
/// B(exp(kX), r) along the one-parameter subgroup.
inline WitnessReport witness_check(const GroupModel& g, const GroupPolynomial& p, const RationalVector& x,
                                   int samples, double radius = 1.0, std::size_t points = 4096,
                                   std::uint64_t seed = 0x5eed) {
  const std::size_t n = g.dim();
  if (x.size() != n) throw Error(ErrorKind::InvalidArgument, "kernel vector has wrong dimension");
  // Variables: t, y_1..y_n.
  std::vector<Polynomial> subs;
  Polynomial t = Polynomial::variable(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) subs.push_back(t * x[i]);
  for (std::size_t i = 0; i < n; ++i) subs.push_back(Polynomial::variable(n + 1, i + 1));
  std::vector<Polynomial> moved;  // exp(tX) * y
  for (const auto& law : g.product_law()) moved.push_back(law.compose(subs));
  std::vector<Polynomial> plain(subs.begin() + n, subs.end());
  for (const auto& c : p.components)
    if (!(c.compose(moved) == c.compose(plain)))
      throw Error(ErrorKind::IdentityFailed, "p(exp(tX)y) differs from p(y); X is not in the right annihilator");

  WitnessReport rep;
  rep.identity_holds = true;
  if (samples <= 0) return rep;
  Polynomial v = p.squared_norm();
  CompiledPolynomial cv(v);
  auto hw = g.ball_box_halfwidths(radius);
  std::vector<Point> offsets;
  ShiftedSobol qmc(n, seed);
  std::vector<double> u(n);
  Point zero(n, 0.0);
  for (std::size_t k = 0; k < points; ++k) {
    qmc.next(u);
    Point z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = (2.0 * u[i] - 1.0) * hw[i];
    if (g.in_ball(zero, radius, z)) offsets.push_back(std::move(z));
  }
  for (int k = 1; k <= samples; ++k) {
    Point c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = k * to_double(x[i]);
    double sup = 0.0;
    for (const auto& z : offsets) sup = std::max(sup, cv(g.multiply(c, z)));
    rep.sup_values.push_back(sup);
  }
  double lo = *std::min_element(rep.sup_values.begin(), rep.sup_values.end());
  double hi = *std::max_element(rep.sup_values.begin(), rep.sup_values.end());
  rep.bounded = hi <= lo * (1.0 + 1e-9) + 1e-12;
  return rep;
}

}  // namespace subspec

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subspec/error.hpp"
#include "subspec/lie_algebra.hpp"
#include "subspec/linalg_exact.hpp"
#include "subspec/polynomial.hpp"
#include "subspec/qmc.hpp"
#include "subspec/rational.hpp"
#include "subspec/vector_field.hpp"

namespace subspec {

/// Exponential coordinates of the first kind: x = exp(sum_i x_i E_i).
using Point = std::vector<double>;
using ExactPoint = std::vector<Rational>;

enum class NormKind {
  Gauge,   // max_i |x_i|^(1/w_i)
  Kaplan,  // ((sum_h x_h^2)^2 + 16 t^2)^(1/4) on Heisenberg groups
};

struct GroupOptions {
  std::vector<std::string> variables;  // default x1..xn
  NormKind norm = NormKind::Gauge;
  std::string name = "custom";
};

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

class GroupModel;
GroupModel build_group(const StructureConstants& structure, const std::vector<std::size_t>& horizontal,
                       GroupOptions options = {});

/// A validated simply connected nilpotent Lie group (unimodular; Haar measure is Lebesgue
/// measure in exponential coordinates). Immutable after construction.
class GroupModel {
 public:
  std::size_t dim() const { return structure_.dim(); }
  const StructureConstants& structure() const { return structure_; }
  const std::vector<std::size_t>& horizontal() const { return horizontal_; }
  std::size_t step() const { return step_; }
  const std::vector<int>& weights() const { return weights_; }
  int homogeneous_dimension() const { return homogeneous_dimension_; }
  bool stratified() const { return stratified_; }
  bool modular_trivial() const { return true; }
  NormKind norm_kind() const { return norm_; }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::string& name() const { return name_; }

  /// Group law as n polynomials in (a_1..a_n, b_1..b_n).
  const std::vector<Polynomial>& product_law() const { return law_; }

  ExactPoint multiply(const ExactPoint& a, const ExactPoint& b) const {
    check_dim(a.size());
    check_dim(b.size());
    ExactPoint ab(a);
    ab.insert(ab.end(), b.begin(), b.end());
    ExactPoint out(dim());
    for (std::size_t i = 0; i < dim(); ++i) out[i] = law_[i].evaluate(ab);
    return out;
  }

  Point multiply(const Point& a, const Point& b) const {
    check_dim(a.size());
    check_dim(b.size());
    double buf[64];
    std::vector<double> heap;
    double* ab = buf;
    if (2 * dim() > 64) {
      heap.resize(2 * dim());
      ab = heap.data();
    }
    std::copy(a.begin(), a.end(), ab);
    std::copy(b.begin(), b.end(), ab + dim());
    Point out(dim());
    for (std::size_t i = 0; i < dim(); ++i) out[i] = compiled_law_[i](std::span<const double>(ab, 2 * dim()));
    return out;
  }

  template <class T>
  static std::vector<T> inverse(std::vector<T> a) {
    for (auto& v : a) v = -v;
    return a;
  }

  const VectorFieldOp& left_invariant_field(std::size_t j) const { return left_.at(j); }
  const VectorFieldOp& right_invariant_field(std::size_t j) const { return right_.at(j); }

  /// Left-invariant horizontal frame X_1..X_nu.
  std::vector<VectorFieldOp> horizontal_fields() const {
    std::vector<VectorFieldOp> out;
    for (auto h : horizontal_) out.push_back(left_[h]);
    return out;
  }

  double homogeneous_norm(std::span<const double> x) const {
    if (norm_ == NormKind::Kaplan) {
      double s = 0.0;
      for (auto h : horizontal_) s += x[h] * x[h];
      double t = x[center_index_];
      return std::pow(s * s + 16.0 * t * t, 0.25);
    }
    double n = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) n = std::max(n, std::pow(std::abs(x[i]), 1.0 / weights_[i]));
    return n;
  }

  /// Exact test N(x) < r (strict) or N(x) <= r.
  bool norm_within(const ExactPoint& x, const Rational& r, bool strict) const {
    auto cmp = [strict](const Rational& lhs, const Rational& rhs) { return strict ? lhs < rhs : lhs <= rhs; };
    if (norm_ == NormKind::Kaplan) {
      Rational s = 0;
      for (auto h : horizontal_) s += x[h] * x[h];
      Rational r2 = r * r;
      return cmp(s * s + 16 * x[center_index_] * x[center_index_], r2 * r2);
    }
    for (std::size_t i = 0; i < dim(); ++i) {
      Rational bound = 1;
      for (int k = 0; k < weights_[i]; ++k) bound *= r;
      if (!cmp(abs(x[i]), bound)) return false;
    }
    return true;
  }

  /// Membership node in B(center, r), i.e. N(center^{-1} node) < r. Decided in double precision
  /// away from the sphere and exactly near it.
  bool in_ball(const Point& center, double r, const Point& node) const {
    Point rel = multiply(inverse(center), node);
    double n = homogeneous_norm(rel);
    if (std::abs(n - r) > 1e-9 * (1.0 + r)) return n < r;
    ExactPoint c(dim()), x(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      c[i] = rational_from_double(center[i]);
      x[i] = rational_from_double(node[i]);
    }
    return norm_within(multiply(inverse(c), x), rational_from_double(r), true);
  }

  template <class T>
  std::vector<T> dilate(std::vector<T> x, const T& lambda) const {
    for (std::size_t i = 0; i < dim(); ++i)
      for (int k = 0; k < weights_[i]; ++k) x[i] *= lambda;
    return x;
  }

  /// Half-widths of the coordinate box containing B(e, r).
  std::vector<double> ball_box_halfwidths(double r) const {
    std::vector<double> hw(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      double base = (norm_ == NormKind::Kaplan && i == center_index_) ? 0.25 : 1.0;
      hw[i] = base * std::pow(r, weights_[i]);
    }
    return hw;
  }

  /// Conservative coordinate box containing B(center, r) = center * B(e, r).
  std::pair<std::vector<double>, std::vector<double>> ball_bounding_box(const Point& center, double r) const {
    auto hw = ball_box_halfwidths(r);
    std::vector<double> lo(2 * dim()), hi(2 * dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      lo[i] = hi[i] = center[i];
      lo[dim() + i] = -hw[i];
      hi[dim() + i] = hw[i];
    }
    std::vector<double> blo(dim()), bhi(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      auto [a, b] = law_[i].bounds(lo, hi);
      double pad = 1e-12 * (1.0 + std::abs(a) + std::abs(b));
      blo[i] = a - pad;
      bhi[i] = b + pad;
    }
    return {blo, bhi};
  }

  /// mu(B(e, r)). Gauge balls are boxes and have exact volume; Kaplan balls use
  /// r^Q times the quasi-Monte Carlo unit-ball volume computed at construction.
  VolumeEstimate ball_volume(double r) const {
    if (norm_ == NormKind::Gauge) {
      double v = 1.0;
      for (std::size_t i = 0; i < dim(); ++i) v *= 2.0 * std::pow(r, weights_[i]);
      return {v, 0.0};
    }
    double scale = std::pow(r, homogeneous_dimension_);
    return {unit_volume_.value * scale, unit_volume_.std_error * scale};
  }

  VolumeEstimate unit_ball_volume() const { return ball_volume(1.0); }

  /// Either the points k*spacing*ray, k = 1..floor(extent/spacing), or, without a ray, the grid
  /// spacing*Z^n filtered by N(x) <= extent (lexicographic order).
  std::vector<Point> center_net(double extent, double spacing, const std::optional<Point>& ray = std::nullopt) const {
    if (!(spacing > 0.0) || !(spacing <= extent))
      throw Error(ErrorKind::InvalidArgument, "center_net requires 0 < spacing <= extent");
    std::vector<Point> out;
    if (ray) {
      check_dim(ray->size());
      bool nonzero = std::any_of(ray->begin(), ray->end(), [](double v) { return v != 0.0; });
      if (!nonzero) throw Error(ErrorKind::InvalidArgument, "center_net: ray direction must be nonzero");
      auto count = static_cast<long>(std::floor(extent / spacing + 1e-9));
      for (long k = 1; k <= count; ++k) {
        Point p(dim());
        for (std::size_t i = 0; i < dim(); ++i) p[i] = static_cast<double>(k) * spacing * (*ray)[i];
        out.push_back(std::move(p));
      }
      return out;
    }
    auto hw = ball_box_halfwidths(extent);
    std::vector<long> lo(dim()), hi(dim()), idx(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      hi[i] = static_cast<long>(std::floor(hw[i] / spacing + 1e-9));
      lo[i] = -hi[i];
      idx[i] = lo[i];
    }
    Rational q_spacing = rational_from_double(spacing), q_extent = rational_from_double(extent);
    while (true) {
      ExactPoint x(dim());
      Point p(dim());
      for (std::size_t i = 0; i < dim(); ++i) {
        x[i] = q_spacing * idx[i];
        p[i] = to_double(x[i]);
      }
      if (norm_within(x, q_extent, false)) out.push_back(std::move(p));
      std::size_t d = dim();
      while (d-- > 0) {
        if (++idx[d] <= hi[d]) break;
        idx[d] = lo[d];
      }
      if (d == static_cast<std::size_t>(-1)) break;
    }
    return out;
  }

 private:
  friend GroupModel build_group(const StructureConstants&, const std::vector<std::size_t>&, GroupOptions);

  void check_dim(std::size_t n) const {
    if (n != dim()) throw Error(ErrorKind::InvalidArgument, "point has wrong dimension");
  }

  StructureConstants structure_;
  std::vector<std::size_t> horizontal_;
  std::size_t step_ = 1;
  std::vector<int> weights_;
  int homogeneous_dimension_ = 0;
  bool stratified_ = true;
  NormKind norm_ = NormKind::Gauge;
  std::size_t center_index_ = 0;
  std::vector<std::string> variables_;
  std::string name_;
  std::vector<Polynomial> law_;
  std::vector<CompiledPolynomial> compiled_law_;
  std::vector<VectorFieldOp> left_, right_;
  VolumeEstimate unit_volume_;
};

namespace detail {

inline std::string describe_span(const RationalMatrix& basis) {
  std::string s = "span{";
  for (std::size_t r = 0; r < basis.size(); ++r) {
    if (r) s += ", ";
    s += "(";
    for (std::size_t i = 0; i < basis[r].size(); ++i) s += (i ? "," : "") + to_string(basis[r][i]);
    s += ")";
  }
  return s + "}";
}

inline bool in_span(const RationalMatrix& basis, const RationalVector& v, std::size_t n) {
  RationalMatrix m = basis;
  m.push_back(v);
  return rank(m, n) == basis.size();
}

/// Quasi-Monte Carlo volume of B(e, 1): 8 independent shifts of 2^17 Sobol points each.
inline VolumeEstimate unit_ball_volume_qmc(const GroupModel& g, std::uint64_t seed) {
  constexpr int shifts = 8;
  constexpr std::size_t per_shift = std::size_t{1} << 17;
  auto hw = g.ball_box_halfwidths(1.0);
  double box = 1.0;
  for (double h : hw) box *= 2.0 * h;
  std::vector<double> est;
  std::vector<double> u(g.dim()), x(g.dim());
  for (int s = 0; s < shifts; ++s) {
    ShiftedSobol qrng(g.dim(), mix64(seed + s));
    std::size_t inside = 0;
    for (std::size_t k = 0; k < per_shift; ++k) {
      qrng.next(u);
      for (std::size_t i = 0; i < g.dim(); ++i) x[i] = (2.0 * u[i] - 1.0) * hw[i];
      if (g.homogeneous_norm(x) < 1.0) ++inside;
    }
    est.push_back(box * static_cast<double>(inside) / static_cast<double>(per_shift));
  }
  double mean = 0.0;
  for (double e : est) mean += e;
  mean /= shifts;
  double var = 0.0;
  for (double e : est) var += (e - mean) * (e - mean);
  var /= (shifts - 1);
  return {mean, std::sqrt(var / shifts)};
}

}  // namespace detail

/// Validates the structure (antisymmetry, Jacobi, nilpotency, bracket generation, adapted
/// basis), then derives layer weights, Q, the exact BCH group law and the invariant frames.
inline GroupModel build_group(const StructureConstants& structure, const std::vector<std::size_t>& horizontal,
                              GroupOptions options) {
  const std::size_t n = structure.dim();
  if (n == 0) throw Error(ErrorKind::InvalidStructure, "dimension must be positive");
  if (!structure.is_antisymmetric()) throw Error(ErrorKind::InvalidStructure, "structure constants are not antisymmetric");
  if (horizontal.empty()) throw Error(ErrorKind::NotBracketGenerating, "empty horizontal index set");
  {
    auto sorted = horizontal;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.back() >= n)
      throw Error(ErrorKind::InvalidArgument, "horizontal indices must be distinct and in range");
  }
  check_jacobi(structure);

  GroupModel g;
  g.structure_ = structure;
  g.horizontal_ = horizontal;
  g.step_ = nilpotency_step(structure);
  g.name_ = options.name;

  // Horizontal filtration F_1 = span(H), F_{k+1} = F_k + [F_1, F_k].
  RationalMatrix f1;
  for (auto h : horizontal) f1.push_back(basis_vector(n, h));
  f1 = reduced_row_echelon(f1, n).rows;
  std::vector<RationalMatrix> filtration{f1};
  while (true) {
    RationalMatrix next = bracket_span(structure, f1, filtration.back(), filtration.back());
    if (next.size() == filtration.back().size()) break;
    filtration.push_back(std::move(next));
  }
  if (filtration.back().size() < n)
    throw Error(ErrorKind::NotBracketGenerating,
                "horizontal vectors generate only the " + std::to_string(filtration.back().size()) +
                    "-dimensional subalgebra " + detail::describe_span(filtration.back()));

  g.weights_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < filtration.size(); ++k)
      if (detail::in_span(filtration[k], basis_vector(n, i), n)) {
        g.weights_[i] = static_cast<int>(k + 1);
        break;
      }
  for (std::size_t k = 0; k < filtration.size(); ++k) {
    auto count = std::count_if(g.weights_.begin(), g.weights_.end(), [&](int w) { return w <= static_cast<int>(k + 1); });
    if (static_cast<std::size_t>(count) != filtration[k].size())
      throw Error(ErrorKind::BasisNotAdapted, "basis is not adapted to the horizontal filtration at layer " +
                                                  std::to_string(k + 1));
  }
  g.homogeneous_dimension_ = 0;
  for (int w : g.weights_) g.homogeneous_dimension_ += w;
  g.stratified_ = true;
  for (const auto& e : structure.nonzero_entries())
    if (g.weights_[e.k] != g.weights_[e.i] + g.weights_[e.j]) g.stratified_ = false;

  if (options.variables.empty())
    for (std::size_t i = 0; i < n; ++i) options.variables.push_back("x" + std::to_string(i + 1));
  if (options.variables.size() != n) throw Error(ErrorKind::InvalidArgument, "variable name count must equal dim");
  g.variables_ = options.variables;

  g.norm_ = options.norm;
  if (g.norm_ == NormKind::Kaplan) {
    std::size_t centers = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (g.weights_[i] == 2) {
        g.center_index_ = i;
        ++centers;
      }
    if (centers != 1 || horizontal.size() + 1 != n || !g.stratified_)
      throw Error(ErrorKind::InvalidArgument, "Kaplan norm requires a Heisenberg-type algebra with one-dimensional center");
  }

  g.law_ = bch_product_law(structure, g.step_);
  for (const auto& p : g.law_) g.compiled_law_.emplace_back(p);

  // X_j f(x) = d/ds f(x * exp(s E_j)), X_j^R f(x) = d/ds f(exp(s E_j) * x) at s = 0.
  std::vector<Polynomial> at_left(2 * n), at_right(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    at_left[i] = Polynomial::variable(n, i);
    at_left[n + i] = Polynomial(n);
    at_right[i] = Polynomial(n);
    at_right[n + i] = Polynomial::variable(n, i);
  }
  for (std::size_t j = 0; j < n; ++j) {
    VectorFieldOp left{{}, FieldKind::LeftInvariant, j}, right{{}, FieldKind::RightInvariant, j};
    for (std::size_t i = 0; i < n; ++i) {
      left.coefficients.push_back(g.law_[i].derivative(n + j).compose(at_left));
      right.coefficients.push_back(g.law_[i].derivative(j).compose(at_right));
    }
    g.left_.push_back(std::move(left));
    g.right_.push_back(std::move(right));
  }

  if (g.norm_ == NormKind::Kaplan) g.unit_volume_ = detail::unit_ball_volume_qmc(g, 0x5eedULL);
  else g.unit_volume_ = g.ball_volume(1.0);
  return g;
}

}  // namespace subspec

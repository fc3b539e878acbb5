#pragma once

#include <Eigen/Sparse>
#include <boost/functional/hash.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "subspec/error.hpp"
#include "subspec/group_model.hpp"
#include "subspec/polynomial.hpp"

namespace subspec {

enum class Boundary { Dirichlet, Neumann };

inline std::string to_string(Boundary b) { return b == Boundary::Dirichlet ? "dirichlet" : "neumann"; }

inline Boundary parse_boundary(const std::string& s) {
  if (s == "dirichlet" || s == "D" || s == "Dirichlet") return Boundary::Dirichlet;
  if (s == "neumann" || s == "N" || s == "Neumann") return Boundary::Neumann;
  throw Error(ErrorKind::InvalidArgument, "unknown boundary condition '" + s + "'");
}

/// Closed coordinate box; the lattice is anchored at lo.
struct BoxDomain {
  Point lo, hi;
};

/// Open norm ball N(c^-1 x) < r; the lattice is anchored at the origin so that balls with
/// different centers share nodes.
struct BallDomain {
  Point center;
  double radius = 1.0;
};

using Domain = std::variant<BoxDomain, BallDomain>;
using ScalarField = std::function<double(std::span<const double>)>;
using LatticeKey = std::vector<std::int64_t>;

struct LatticeKeyHash {
  std::size_t operator()(const LatticeKey& k) const { return boost::hash_range(k.begin(), k.end()); }
};

struct Discretization {
  const GroupModel* model = nullptr;
  Domain domain;
  std::vector<double> h;
  Boundary bc = Boundary::Dirichlet;
  Point origin;
  double cell_volume = 0.0;
  std::vector<LatticeKey> keys;  // lattice nodes of the domain
  std::vector<Point> nodes;
  std::unordered_map<LatticeKey, std::size_t, LatticeKeyHash> index;

  std::size_t size() const { return nodes.size(); }
  Point position(const LatticeKey& k) const {
    Point p(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) p[i] = origin[i] + static_cast<double>(k[i]) * h[i];
    return p;
  }
  const std::size_t* find(const LatticeKey& k) const {
    auto it = index.find(k);
    return it == index.end() ? nullptr : &it->second;
  }
};

inline std::vector<double> isotropic(const GroupModel& g, double h) { return std::vector<double>(g.dim(), h); }

namespace detail {

inline void add_node(Discretization& d, LatticeKey k) {
  d.index.emplace(k, d.keys.size());
  d.nodes.push_back(d.position(k));
  d.keys.push_back(std::move(k));
}

// Visits every integer vector in [lo, hi] in lexicographic order.
template <class F>
void for_each_key(const LatticeKey& lo, const LatticeKey& hi, F&& f) {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i]) return;
  LatticeKey k = lo;
  while (true) {
    f(k);
    std::size_t i = k.size();
    while (i > 0) {
      --i;
      if (k[i] < hi[i]) {
        ++k[i];
        break;
      }
      k[i] = lo[i];
      if (i == 0) return;
    }
    if (k.empty()) return;
  }
}

}  // namespace detail

/// Lattice nodes of the domain. Dirichlet boxes keep strictly interior nodes, Neumann boxes the
/// closed box; balls keep the nodes inside the open ball for both conditions.
inline Discretization discretize(const GroupModel& g, const Domain& domain, std::vector<double> h, Boundary bc) {
  const std::size_t n = g.dim();
  if (h.size() != n) throw Error(ErrorKind::InvalidArgument, "grid spacing has wrong dimension");
  for (double v : h)
    if (!(v > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
  Discretization d;
  d.model = &g;
  d.domain = domain;
  d.h = h;
  d.bc = bc;
  d.cell_volume = 1.0;
  for (double v : h) d.cell_volume *= v;

  if (const auto* box = std::get_if<BoxDomain>(&domain)) {
    if (box->lo.size() != n || box->hi.size() != n) throw Error(ErrorKind::InvalidArgument, "box has wrong dimension");
    d.origin = box->lo;
    LatticeKey lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto last = static_cast<std::int64_t>(std::floor((box->hi[i] - box->lo[i]) / h[i] + 1e-9));
      if (last < 0) throw Error(ErrorKind::EmptyDomain, "box has hi < lo");
      lo[i] = bc == Boundary::Dirichlet ? 1 : 0;
      hi[i] = bc == Boundary::Dirichlet ? last - 1 : last;
    }
    detail::for_each_key(lo, hi, [&](const LatticeKey& k) { detail::add_node(d, k); });
  } else {
    const auto& ball = std::get<BallDomain>(domain);
    if (ball.center.size() != n) throw Error(ErrorKind::InvalidArgument, "ball center has wrong dimension");
    if (!(ball.radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be positive");
    d.origin.assign(n, 0.0);
    auto [blo, bhi] = g.ball_bounding_box(ball.center, ball.radius);
    LatticeKey lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = static_cast<std::int64_t>(std::ceil(blo[i] / h[i]));
      hi[i] = static_cast<std::int64_t>(std::floor(bhi[i] / h[i]));
    }
    detail::for_each_key(lo, hi, [&](const LatticeKey& k) {
      if (g.in_ball(ball.center, ball.radius, d.position(k))) detail::add_node(d, k);
    });
  }
  if (d.nodes.empty()) throw Error(ErrorKind::EmptyDomain, "no lattice nodes in the domain at this spacing");
  return d;
}

/// Discrete form f -> sum_j |D_j f|^2 vol + sum V |f|^2 vol with diagonal mass.
struct SparseOperator {
  Eigen::SparseMatrix<double> A;  // kinetic part, symmetric
  Eigen::VectorXd mass;
  Eigen::VectorXd potential;  // vol * V at nodes
  std::vector<Point> nodes;
  double cell_volume = 0.0;

  std::size_t size() const { return nodes.size(); }
  Eigen::SparseMatrix<double> form() const {
    Eigen::SparseMatrix<double> f = A;
    for (Eigen::Index i = 0; i < f.rows(); ++i) f.coeffRef(i, i) += potential[i];
    return f;
  }
  /// Smallest V over nodes, i.e. min potential/mass for the unweighted form.
  double min_potential() const { return (potential.array() / mass.array()).minCoeff(); }
};

/// Forward: D_j f(b) = sum_i a_ij(b + h_i e_i / 2) (f(b + e_i) - f(b)) / h_i, with
/// X_j = sum_i a_ij d_i a horizontal left-invariant field.
/// Symmetric: the average of the forward form and its mirror image built from backward
/// differences sum_i a_ij(b - h_i e_i / 2) (f(b) - f(b - e_i)) / h_i. On abelian groups both
/// cover the same edges and the forms coincide; with variable coefficients the forward form alone
/// leaves boundary nodes under-constrained and Neumann problems pick up spurious near-zero modes.
enum class DifferenceScheme { Forward, Symmetric };

inline std::string to_string(DifferenceScheme s) { return s == DifferenceScheme::Forward ? "forward" : "symmetric"; }

inline DifferenceScheme parse_scheme(const std::string& s) {
  if (s == "forward") return DifferenceScheme::Forward;
  if (s == "symmetric") return DifferenceScheme::Symmetric;
  throw Error(ErrorKind::InvalidArgument, "unknown difference scheme '" + s + "'");
}

struct AssembleOptions {
  ScalarField weight;  // optional w: kinetic rows weighted by w, mass by w at nodes
  DifferenceScheme scheme = DifferenceScheme::Symmetric;
};

namespace detail {

struct DifferenceRow {
  std::vector<std::pair<LatticeKey, double>> entries;
  Point centre;  // where a weight is evaluated
};

class RowBuilder {
 public:
  explicit RowBuilder(const Discretization& d) : d_(d) {
    const GroupModel& g = *d.model;
    for (std::size_t j : g.horizontal()) {
      std::vector<std::pair<std::size_t, CompiledPolynomial>> f;
      const auto& field = g.left_invariant_field(j);
      for (std::size_t i = 0; i < g.dim(); ++i)
        if (!field.coefficients[i].is_zero()) f.emplace_back(i, CompiledPolynomial(field.coefficients[i]));
      fields_.push_back(std::move(f));
    }
  }

  std::size_t fields() const { return fields_.size(); }

  /// Row of field f based at lattice key b, differencing towards +e_i (sign 1) or -e_i (sign -1).
  DifferenceRow row(const LatticeKey& b, std::size_t f, int sign) const {
    DifferenceRow r;
    Point base = d_.position(b);
    r.centre = base;
    double base_coef = 0.0;
    for (const auto& [i, a] : fields_[f]) {
      Point mid = base;
      mid[i] += 0.5 * sign * d_.h[i];
      double c = a(mid);
      if (c == 0.0) continue;
      c /= d_.h[i];
      r.centre[i] += 0.5 * sign * d_.h[i];
      base_coef -= sign * c;
      LatticeKey k = b;
      k[i] += sign;
      r.entries.emplace_back(std::move(k), sign * c);
    }
    if (base_coef != 0.0) r.entries.emplace_back(b, base_coef);
    return r;
  }

 private:
  const Discretization& d_;
  std::vector<std::vector<std::pair<std::size_t, CompiledPolynomial>>> fields_;
};

}  // namespace detail

/// Gram assembly A = vol * sum_rows w |D f|^2 over the difference rows of the scheme.
/// Dirichlet keeps every row touching a domain node, outside values being zero; Neumann keeps the
/// rows whose nodes all lie in the domain. Neumann rows are Dirichlet rows, so the Neumann bottom
/// never exceeds the Dirichlet one.
inline SparseOperator assemble(const Discretization& d, const ScalarField& potential, const AssembleOptions& opts = {}) {
  const GroupModel& g = *d.model;
  const std::size_t n = g.dim();
  const double vol = d.cell_volume;
  detail::RowBuilder builder(d);

  std::vector<int> signs{1};
  if (opts.scheme == DifferenceScheme::Symmetric) signs.push_back(-1);
  const double share = 1.0 / static_cast<double>(signs.size());

  struct Row {
    std::vector<std::pair<std::size_t, double>> entries;
    double weight;
  };
  std::vector<Row> rows;
  for (int sign : signs) {
    // Bases whose rows reach a domain node.
    std::vector<LatticeKey> bases = d.keys;
    if (d.bc == Boundary::Dirichlet) {
      std::unordered_set<LatticeKey, LatticeKeyHash> seen(d.keys.begin(), d.keys.end());
      for (const auto& k : d.keys)
        for (std::size_t i = 0; i < n; ++i) {
          LatticeKey b = k;
          b[i] -= sign;
          if (seen.insert(b).second) bases.push_back(std::move(b));
        }
    }
    for (const auto& b : bases)
      for (std::size_t f = 0; f < builder.fields(); ++f) {
        detail::DifferenceRow dr = builder.row(b, f, sign);
        Row r{{}, share};
        bool outside = false;
        for (auto& [k, c] : dr.entries) {
          if (const std::size_t* idx = d.find(k)) r.entries.emplace_back(*idx, c);
          else outside = true;
        }
        if (r.entries.empty() || (outside && d.bc == Boundary::Neumann)) continue;
        if (opts.weight) {
          double w = opts.weight(dr.centre);
          if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::WeightNonpositive, "weight is not positive at a cell center");
          r.weight *= w;
        }
        rows.push_back(std::move(r));
      }
  }

  // Neumann nodes that no row reaches carry no gradient information; dropping them removes
  // spurious zero modes.
  const std::size_t N = d.size();
  std::vector<std::size_t> remap(N);
  std::size_t kept = 0;
  if (d.bc == Boundary::Neumann) {
    std::vector<char> touched(N, 0);
    for (const auto& r : rows)
      for (const auto& e : r.entries) touched[e.first] = 1;
    for (std::size_t i = 0; i < N; ++i) remap[i] = touched[i] ? kept++ : N;
    if (kept == 0) throw Error(ErrorKind::EmptyDomain, "no difference row lies inside the domain at this spacing");
  } else {
    for (std::size_t i = 0; i < N; ++i) remap[i] = kept++;
  }

  SparseOperator op;
  op.cell_volume = vol;
  op.nodes.resize(kept);
  op.mass.resize(static_cast<Eigen::Index>(kept));
  op.potential.resize(static_cast<Eigen::Index>(kept));
  for (std::size_t i = 0; i < N; ++i) {
    if (remap[i] == N) continue;
    const auto m = static_cast<Eigen::Index>(remap[i]);
    const Point& x = d.nodes[i];
    double v = potential ? potential(x) : 0.0;
    if (!std::isfinite(v)) throw Error(ErrorKind::PotentialNotEvaluable, "potential is not finite at a grid node");
    op.potential[m] = vol * v;
    op.mass[m] = vol;
    if (opts.weight) {
      double w = opts.weight(x);
      if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::WeightNonpositive, "weight is not positive at a grid node");
      op.mass[m] = vol * w;
    }
    op.nodes[remap[i]] = x;
  }

  std::vector<Eigen::Triplet<double>> upper;
  for (const auto& r : rows)
    for (const auto& [p, cp] : r.entries)
      for (const auto& [q, cq] : r.entries) {
        std::size_t a = remap[p], b = remap[q];
        if (a <= b) upper.emplace_back(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b), vol * r.weight * cp * cq);
      }
  Eigen::SparseMatrix<double> U(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(kept));
  U.setFromTriplets(upper.begin(), upper.end());
  op.A = U.selfadjointView<Eigen::Upper>();
  op.A.makeCompressed();
  return op;
}

inline SparseOperator assemble(const GroupModel& g, const Domain& domain, const std::vector<double>& h,
                               const ScalarField& potential, Boundary bc, const AssembleOptions& opts = {}) {
  return assemble(discretize(g, domain, h, bc), potential, opts);
}

/// Exact (bitwise) symmetry check.
inline bool is_symmetric(const Eigen::SparseMatrix<double>& m) {
  if (m.rows() != m.cols()) return false;
  Eigen::SparseMatrix<double> t = m.transpose();
  if (t.nonZeros() != m.nonZeros()) return false;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    Eigen::SparseMatrix<double>::InnerIterator a(m, k), b(t, k);
    for (; a && b; ++a, ++b)
      if (a.index() != b.index() || a.value() != b.value()) return false;
    if (a || b) return false;
  }
  return true;
}

}  // namespace subspec

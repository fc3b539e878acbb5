// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "subspec/subspec.hpp"
#include "test_util.hpp"

using namespace subspec;
using subspec::testing::random_point;
using subspec::testing::random_polynomial;
using subspec::testing::random_rational;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScalarField field(const GroupModel& g, const std::string& text) { return as_scalar_field(g, parse_expression(text, g.variables())); }

ScalarField poly_field(const Polynomial& p) {
  auto c = std::make_shared<CompiledPolynomial>(p);
  return [c](std::span<const double> x) { return (*c)(x); };
}

// ---- 1: symbolic decisions ----

Outcome symbolic_decisions() {
  Outcome o;
  GroupModel h = heisenberg(1);
  struct Case {
    const char* p;
    Verdict verdict;
    std::vector<RationalVector> kernel;
  };
  std::vector<Case> cases{
      {"x^2+y^2", Verdict::NotDiscrete, {{0, 0, 1}}},
      {"t^2", Verdict::Discrete, {}},
      {"y^2*x + 2*y*t", Verdict::Discrete, {}},
      {"y^2*x - 2*y*t", Verdict::NotDiscrete, {{1, 0, 0}}},
  };
  double slowest = 0.0;
  for (const auto& c : cases) {
    auto t0 = std::chrono::steady_clock::now();
    auto res = right_annihilator(h, GroupPolynomial(parse_polynomial(c.p, h.variables())));
    double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    o.require(res.verdict == c.verdict, std::string(c.p) + " verdict " + to_string(res.verdict));
    // Kernel as a subspace: same dimension and each expected vector in the span.
    bool same = res.kernel_basis.size() == c.kernel.size();
    if (same && !c.kernel.empty()) {
      RationalMatrix m = res.kernel_basis;
      std::size_t r0 = rank(m, 3);
      for (const auto& v : c.kernel) {
        m.push_back(v);
        same = same && rank(m, 3) == r0;
        m.pop_back();
      }
    }
    o.require(same, std::string(c.p) + " kernel mismatch");
    o.require(dt < 1.0, std::string(c.p) + " took " + num(dt) + " s");
  }
  if (o.pass) o.detail = "4/4 exact, slowest " + num(slowest) + " s";
  return o;
}

// ---- 2: oscillator spectrum ----

Outcome oscillator_spectrum() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  GroupModel r1 = euclidean(1);
  auto op = assemble(r1, BoxDomain{{-8}, {8}}, {1.0 / 64}, field(r1, "x^2"), Boundary::Dirichlet);
  auto e = smallest_eigenvalues(op, 5);
  double dt = seconds_since(t0), worst = 0.0;
  for (int n = 0; n < 5; ++n) worst = std::max(worst, std::abs(e.values[n] - (2 * n + 1)) / (2 * n + 1));
  o.require(worst <= 0.01, "max relative error " + num(worst));
  o.require(dt < 10.0, "took " + num(dt) + " s");
  o.detail = o.pass ? "max relative error " + num(worst) + ", " + num(dt) + " s" : o.detail;
  return o;
}

// ---- 3: ground-state transform ----

Outcome ground_state_transform() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  GroupModel r1 = euclidean(1);
  Expr w = parse_expression("exp(-x^2)", r1.variables());
  auto wp = potential_from_weight(r1, w);
  auto exact = wp.potential.to_polynomial(1);
  o.require(exact && *exact == parse_polynomial("x^2 - 1", {"x"}), "V_w = " + wp.potential.to_string(r1.variables()));
  auto rep = equivalence_check(r1, w, BoxDomain{{-8}, {8}}, {1.0 / 64}, 5);
  double worst = 0.0;
  for (int n = 0; n < 5; ++n)
    for (double v : {rep.weighted[n], rep.schrodinger[n]})
      worst = std::max(worst, std::abs(v - 2 * n) / std::max(1.0, 2.0 * n));
  double dt = seconds_since(t0);
  o.require(worst <= 0.02, "spectra off by " + num(worst));
  o.require(dt < 30.0, "took " + num(dt) + " s");
  if (o.pass) o.detail = "V_w = x^2 - 1 exact, both spectra within " + num(worst) + ", " + num(dt) + " s";
  return o;
}

// ---- 4: cross-criterion consistency on H^1 ----

Outcome cross_criterion() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  GroupModel h = heisenberg(1);
  const Point x_ray{1, 0, 0}, t_ray{0, 0, 1};
  const int K = 8;

  auto sym = [&](const char* p) { return right_annihilator(h, GroupPolynomial(parse_polynomial(p, h.variables()))).verdict; };
  ScalarField radial = field(h, "x^2 + y^2"), vertical = field(h, "t^2");

  o.require(sym("x^2 + y^2") == Verdict::NotDiscrete, "x^2+y^2 symbolic");
  auto scan = sigma_scan(h, radial, ray_centers(h, t_ray, K, 1.0), 1.0, isotropic(h, 1.0 / 16), Boundary::Dirichlet);
  o.require(scan.verdict == ScanVerdict::Bounded, "x^2+y^2 sigma_scan " + to_string(scan.verdict));
  auto ig = integral_growth_check(h, radial, 1.0, {t_ray}, K);
  o.require(ig.verdict == ScanVerdict::Bounded, "x^2+y^2 integral growth " + to_string(ig.verdict));
  auto st = sublevel_thinness(h, radial, {1.0, 4.0}, 1.0, {t_ray}, K);
  o.require(!st.pass, "x^2+y^2 sublevel thinness passed");

  o.require(sym("t^2") == Verdict::Discrete, "t^2 symbolic");
  auto ig2 = integral_growth_check(h, vertical, 1.0, {x_ray, t_ray}, K);
  for (const auto& r : ig2.rays) o.require(r.verdict == ScanVerdict::Growth, "t^2 integral growth ray " + to_string(r.verdict));

  double dt = seconds_since(t0);
  o.require(dt < 600.0, "took " + num(dt) + " s");
  if (o.pass)
    o.detail = "x^2+y^2: NotDiscrete/Bounded/Bounded/thinness fails (sigma " + num(scan.values.front()) + ".." +
               num(scan.values.back()) + "); t^2: Discrete/Growth on x and t rays; " + num(dt) + " s";
  return o;
}

// ---- 5: Muckenhoupt oracles ----

std::vector<BallStatistics> g_all_balls;  // for the sublevel monotonicity property

Outcome muckenhoupt_oracles() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  GroupModel r1 = euclidean(1);
  Quadrature q;
  o.require(q.samples * static_cast<std::size_t>(q.shifts) >= 100000, "too few samples per ball");
  auto family = ball_family(r1.center_net(6, 1), 1.0);

  auto e = ap_constant(r1, field(r1, "exp(x)"), 2.0, family, 100.0, q);
  double target = std::pow(std::sinh(1.0), 2), rel = std::abs(e.constant_estimate - target) / target;
  o.require(rel <= 0.05 && e.pass, "e^x: constant " + num(e.constant_estimate) + (e.pass ? " pass" : " fail"));

  ScalarField gauss = field(r1, "exp(x^2)");
  auto g = ap_constant(r1, gauss, 2.0, family, 100.0, q);
  double outer = INFINITY;
  for (double c : {-6.0, 6.0}) {
    auto b = ball_stats(r1, gauss, {c}, 1.0, 2.0, q);
    outer = std::min(outer, ap_product(b, 2.0));
    g_all_balls.push_back(b);
  }
  o.require(outer > 1e3 && !g.pass, "e^{x^2}: outer product " + num(outer) + (g.pass ? " pass" : " fail"));
  g_all_balls.insert(g_all_balls.end(), e.balls.begin(), e.balls.end());
  g_all_balls.insert(g_all_balls.end(), g.balls.begin(), g.balls.end());

  double dt = seconds_since(t0);
  o.require(dt < 120.0, "took " + num(dt) + " s");
  if (o.pass)
    o.detail = "e^x: " + num(e.constant_estimate) + " vs " + num(target) + " (rel " + num(rel) + "), pass; e^{x^2}: " +
               num(outer) + " at |c| = 6, fail; " + num(dt) + " s";
  return o;
}

// ---- 6: tail mass ----

// Largest eigenvalue of tail F^-1 tail by power iteration on a caller-supplied solve.
double power_top(const Eigen::VectorXd& tail, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& solve) {
  Eigen::VectorXd u = tail;
  u.normalize();
  double theta = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd v = tail.cwiseProduct(solve(tail.cwiseProduct(u)));
    double next = u.dot(v);
    u = v.normalized();
    if (std::abs(next - theta) <= 1e-12 * std::abs(next)) return next;
    theta = next;
  }
  return theta;
}

Eigen::VectorXd tail_vector(const GroupModel& g, const SparseOperator& op, double R) {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.size()));
  for (std::size_t i = 0; i < op.size(); ++i)
    if (g.homogeneous_norm(op.nodes[i]) >= R) t[static_cast<Eigen::Index>(i)] = std::sqrt(op.mass[static_cast<Eigen::Index>(i)]);
  return t;
}

// R^1: dense generalized eigensolve of (T, F) with F = form + mass.
double dense_tail_1d(const GroupModel& g, const SparseOperator& op, double R) {
  Eigen::MatrixXd F(op.form());
  F += Eigen::MatrixXd(op.mass.asDiagonal());
  Eigen::VectorXd t = tail_vector(g, op, R);
  Eigen::MatrixXd T = t.cwiseProduct(t).asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(T, F, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// R^2 with V = x1^2 on a box: F = h [(A + P) (x) I + I (x) A + h I] is a Kronecker sum, so F^-1
// comes from the dense eigendecompositions of the 1D factors.
struct SeparableSolver {
  Eigen::MatrixXd U, W;
  Eigen::VectorXd la, lb;
  double h;
  std::vector<Eigen::Index> i1, i2;  // 2D node -> (row in x1 grid, row in x2 grid)

  SeparableSolver(const SparseOperator& op2, double hh) : h(hh) {
    GroupModel r1 = euclidean(1);
    auto kin = assemble(r1, BoxDomain{{-8}, {8}}, {h}, ScalarField{}, Boundary::Dirichlet);
    Eigen::MatrixXd A(kin.A);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) P(i, i) = h * kin.nodes[static_cast<std::size_t>(i)][0] * kin.nodes[static_cast<std::size_t>(i)][0];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A + P), eb(A);
    U = ea.eigenvectors();
    la = ea.eigenvalues();
    W = eb.eigenvectors();
    lb = eb.eigenvalues();
    auto index = [&](double x) {
      for (std::size_t i = 0; i < kin.nodes.size(); ++i)
        if (std::abs(kin.nodes[i][0] - x) < 1e-9) return static_cast<Eigen::Index>(i);
      throw Error(ErrorKind::InvalidArgument, "2D node not on the 1D grid");
    };
    for (const auto& x : op2.nodes) {
      i1.push_back(index(x[0]));
      i2.push_back(index(x[1]));
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(U.rows(), W.rows());
    for (std::size_t k = 0; k < i1.size(); ++k) B(i1[k], i2[k]) = b[static_cast<Eigen::Index>(k)];
    Eigen::MatrixXd C = U.transpose() * B * W;
    for (Eigen::Index i = 0; i < C.rows(); ++i)
      for (Eigen::Index j = 0; j < C.cols(); ++j) C(i, j) /= h * (la[i] + lb[j] + h);
    Eigen::MatrixXd X = U * C * W.transpose();
    Eigen::VectorXd x(b.size());
    for (std::size_t k = 0; k < i1.size(); ++k) x[static_cast<Eigen::Index>(k)] = X(i1[k], i2[k]);
    return x;
  }
};

Outcome tail_mass_behavior() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> radii{2, 3, 4, 5, 6};
  const double h = 1.0 / 8;

  GroupModel r1 = euclidean(1);
  ScalarField osc = field(r1, "x^2");
  auto op1 = assemble(r1, BoxDomain{{-8}, {8}}, {h}, osc, Boundary::Dirichlet);
  std::vector<double> v1, fine;
  double oracle_gap = 0.0;
  for (double R : radii) {
    double v = tail_mass_sup(r1, osc, BoxDomain{{-8}, {8}}, {h}, R).value;
    v1.push_back(v);
    fine.push_back(tail_mass_sup(r1, osc, BoxDomain{{-8}, {8}}, {1.0 / 64}, R).value);
    double d = dense_tail_1d(r1, op1, R);
    oracle_gap = std::max(oracle_gap, std::abs(v - d) / d);
  }
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    o.require(v1[i + 1] < v1[i], "R^1 h=1/8 not strictly decreasing at R=" + num(radii[i + 1]));
    o.require(fine[i + 1] < fine[i], "R^1 h=1/64 not strictly decreasing at R=" + num(radii[i + 1]));
  }

  GroupModel r2 = euclidean(2);
  ScalarField v = field(r2, "x1^2");
  BoxDomain box{{-8, -8}, {8, 8}};
  auto op2 = assemble(r2, box, isotropic(r2, h), v, Boundary::Dirichlet);
  SeparableSolver sep(op2, h);
  std::vector<double> v2;
  for (double R : radii) {
    auto t = tail_mass_sup(r2, v, box, isotropic(r2, h), R);
    o.require(t.shift == 1.0, "unexpected shift " + num(t.shift));
    v2.push_back(t.value);
    double d = power_top(tail_vector(r2, op2, R), [&](const Eigen::VectorXd& b) { return sep.solve(b); });
    oracle_gap = std::max(oracle_gap, std::abs(t.value - d) / d);
  }
  o.require(v2.back() >= 0.5 * v2.front(), "R^2 final/initial " + num(v2.back() / v2.front()));
  o.require(oracle_gap <= 0.10, "oracle gap " + num(oracle_gap));

  double dt = seconds_since(t0);
  if (o.pass)
    o.detail = "R^1 " + num(v1.front()) + " -> " + num(v1.back()) + " strictly decreasing; R^2 final/initial " +
               num(v2.back() / v2.front()) + "; max gap to dense oracles at h=1/8 " + num(oracle_gap) + "; " + num(dt) + " s";
  return o;
}

// ---- 7: property suites ----

GroupModel upper_triangular_group(std::size_t k) {
  subspec::testing::UpperTriangular ut(k);
  StructureConstants sc(ut.basis.size());
  for (std::size_t p = 0; p < ut.basis.size(); ++p)
    for (std::size_t r = 0; r < ut.basis.size(); ++r) {
      auto [a, b] = ut.basis[p];
      auto [c, d] = ut.basis[r];
      if (b == c) sc.set_raw(p, r, ut.index(a, d), sc(p, r, ut.index(a, d)) + 1);
      if (d == a) sc.set_raw(p, r, ut.index(c, b), sc(p, r, ut.index(c, b)) - 1);
    }
  std::vector<std::size_t> horizontal;
  for (std::size_t a = 0; a + 1 < k; ++a) horizontal.push_back(ut.index(a, a + 1));
  return build_group(sc, horizontal);
}

Polynomial translate(const GroupModel& g, const Polynomial& p, const ExactPoint& a, bool left) {
  std::size_t n = g.dim();
  std::vector<Polynomial> subs;
  for (std::size_t i = 0; i < n; ++i) subs.push_back(left ? Polynomial::constant(n, a[i]) : Polynomial::variable(n, i));
  for (std::size_t i = 0; i < n; ++i) subs.push_back(left ? Polynomial::variable(n, i) : Polynomial::constant(n, a[i]));
  std::vector<Polynomial> law;
  for (const auto& l : g.product_law()) law.push_back(l.compose(subs));
  return p.compose(law);
}

bool psd_by_pivots(const Eigen::SparseMatrix<double>& A) {
  double eps = 1e-9 * std::max(1.0, Eigen::VectorXd(A.diagonal()).maxCoeff());
  Eigen::SparseMatrix<double> B = A;
  for (Eigen::Index i = 0; i < B.rows(); ++i) B.coeffRef(i, i) += eps;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(B);
  return ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0;
}

Outcome property_suites() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7);
  std::vector<GroupModel> groups{heisenberg(1), heisenberg(2), engel(), upper_triangular_group(4)};

  // Group law, exact.
  int bad = 0;
  for (const auto& g : groups)
    for (int i = 0; i < 1000; ++i) {
      auto a = random_point(rng, g.dim()), b = random_point(rng, g.dim()), c = random_point(rng, g.dim());
      if (g.multiply(a, g.multiply(b, c)) != g.multiply(g.multiply(a, b), c)) ++bad;
      if (g.multiply(a, GroupModel::inverse(a)) != ExactPoint(g.dim(), Rational(0))) ++bad;
    }
  o.require(bad == 0, std::to_string(bad) + " BCH associativity/inverse failures");

  // [X_i, X_j] = sum_k c_ijk X_k for left fields, with the sign flipped for right fields.
  bad = 0;
  for (const auto& g : groups) {
    std::size_t n = g.dim();
    std::vector<VectorFieldOp> left, right;
    for (std::size_t j = 0; j < n; ++j) {
      left.push_back(g.left_invariant_field(j));
      right.push_back(g.right_invariant_field(j));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        RationalVector c(n), m(n);
        for (std::size_t k = 0; k < n; ++k) {
          c[k] = g.structure()(i, j, k);
          m[k] = -c[k];
        }
        if (commutator(left[i], left[j]).coefficients != linear_combination(left, c).coefficients) ++bad;
        if (commutator(right[i], right[j]).coefficients != linear_combination(right, m).coefficients) ++bad;
      }
  }
  o.require(bad == 0, std::to_string(bad) + " bracket fidelity failures");

  // Annihilator dimension under translation and scaling.
  bad = 0;
  int cases = 0;
  for (const auto& g : {heisenberg(1), engel()})
    while (cases < (g.dim() == 3 ? 50 : 100)) {
      Polynomial p = random_polynomial(rng, g.dim(), 2, 3);
      if (cases % 2 == 0) p = g.right_invariant_field(g.dim() - 1).apply(p * p);
      if (p.is_zero()) continue;
      ++cases;
      auto k = right_annihilator(g, GroupPolynomial(p)).kernel_basis;
      auto a = random_point(rng, g.dim());
      Rational c = random_rational(rng);
      if (c == 0) c = 3;
      if (right_annihilator(g, GroupPolynomial(translate(g, p, a, true))).kernel_basis.size() != k.size()) ++bad;
      if (right_annihilator(g, GroupPolynomial(translate(g, p, a, false))).kernel_basis.size() != k.size()) ++bad;
      if (right_annihilator(g, GroupPolynomial(p * c)).kernel_basis != k) ++bad;
    }
  o.require(bad == 0 && cases == 100, std::to_string(bad) + " annihilator invariance failures in " + std::to_string(cases));

  // Assembly symmetry and PSD; sigma_N <= sigma_D; monotone in V. 20 random configurations.
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int asm_bad = 0, order_bad = 0, mono_bad = 0;
  for (int i = 0; i < 20; ++i) {
    GroupModel g = i % 3 == 0 ? euclidean(1) : i % 3 == 1 ? euclidean(2) : heisenberg(1);
    Point c(g.dim());
    for (auto& x : c) x = std::round(4 * u(rng)) / 4;
    double r = 1.0 + 0.5 * (u(rng) + 1.0);
    auto h = isotropic(g, g.dim() == 1 ? 1.0 / 32 : g.dim() == 2 ? 1.0 / 8 : 1.0 / 6);
    Polynomial p = random_polynomial(rng, g.dim(), 2, 3);
    Polynomial V = p * p + Polynomial::constant(g.dim(), Rational(1, 2));
    for (auto bc : {Boundary::Dirichlet, Boundary::Neumann})
      for (auto scheme : {DifferenceScheme::Symmetric, DifferenceScheme::Forward}) {
        AssembleOptions ao;
        ao.scheme = scheme;
        auto op = assemble(discretize(g, BallDomain{c, r}, h, bc), poly_field(V), ao);
        if (!is_symmetric(op.A) || !psd_by_pivots(op.A)) ++asm_bad;
      }
    double d = sigma(g, poly_field(V), c, r, h, Boundary::Dirichlet).value;
    double n = sigma(g, poly_field(V), c, r, h, Boundary::Neumann).value;
    if (n > d * (1 + 1e-9)) ++order_bad;
    Polynomial q = random_polynomial(rng, g.dim(), 1, 2);
    double d2 = sigma(g, poly_field(V + q * q), c, r, h, Boundary::Dirichlet).value;
    if (d > d2 + 1e-7 * std::max(1.0, d2)) ++mono_bad;
  }
  o.require(asm_bad == 0, std::to_string(asm_bad) + " assembly symmetry/PSD failures");
  o.require(order_bad == 0, std::to_string(order_bad) + " sigma_N > sigma_D");
  o.require(mono_bad == 0, std::to_string(mono_bad) + " V-monotonicity failures");

  // A_p constants non-increasing in p, five weights.
  GroupModel r1 = euclidean(1);
  Quadrature light;
  light.samples = 8192;
  auto fam = ball_family(r1.center_net(3, 1), 1.0, 2);
  bad = 0;
  for (const char* w : {"exp(x)", "exp(x^2)", "sqrt(abs(x))", "1 + x^2", "(1 + x^2)^2"}) {
    double prev = INFINITY;
    for (double pp : {1.0, 1.5, 2.0, 3.0, 6.0}) {
      auto v = ap_constant(r1, field(r1, w), pp, fam, 1e300, light);
      g_all_balls.insert(g_all_balls.end(), v.balls.begin(), v.balls.end());
      if (v.constant_estimate > prev * (1 + 1e-12) || v.constant_estimate < 1.0 - 1e-12) ++bad;
      prev = v.constant_estimate;
    }
  }
  o.require(bad == 0, std::to_string(bad) + " Jensen monotonicity failures");

  // The fraction of B where w > delta avg_w shrinks as delta grows, on every ball computed here and
  // in the Muckenhoupt criterion.
  bad = 0;
  for (const auto& b : g_all_balls)
    for (std::size_t i = 0; i + 1 < b.sublevel.size(); ++i)
      if (b.sublevel[i + 1].second > b.sublevel[i].second || b.sublevel[i + 1].second < 0.0 || b.sublevel[i].second > 1.0) ++bad;
  o.require(bad == 0 && !g_all_balls.empty(), std::to_string(bad) + " sublevel monotonicity failures");

  if (o.pass)
    o.detail = "4000 BCH triples, bracket fidelity, 100 annihilator cases, 20 spectral configs, 5 weights, " +
               std::to_string(g_all_balls.size()) + " balls; " + num(seconds_since(t0)) + " s";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"symbolic decisions on H^1", symbolic_decisions},
      {"oscillator eigenvalues", oscillator_spectrum},
      {"ground-state transform", ground_state_transform},
      {"cross-criterion consistency on H^1", cross_criterion},
      {"Muckenhoupt oracles", muckenhoupt_oracles},
      {"tail-mass behavior", tail_mass_behavior},
      {"property suites", property_suites},
  };
  int failures = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}

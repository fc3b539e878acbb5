#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "subspec/eigensolver.hpp"
#include "subspec/group_io.hpp"
#include "subspec/spectral.hpp"
#include "test_util.hpp"

using namespace subspec;

namespace {

const double kPi = std::numbers::pi;

ErrorKind error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;
}

ScalarField zero_potential() { return {}; }
ScalarField square(std::size_t i) {
  return [i](std::span<const double> x) { return x[i] * x[i]; };
}

// All eigenvalues of the pencil, dense; the reference for the sparse path.
Eigen::VectorXd dense_spectrum(const SparseOperator& op) {
  Eigen::MatrixXd K(op.form());
  Eigen::VectorXd s = op.mass.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd C = s.asDiagonal() * K * s.asDiagonal();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(C, Eigen::EigenvaluesOnly).eigenvalues();
}

EigenOptions dense_only() {
  EigenOptions o;
  o.method = EigenMethod::Dense;
  return o;
}

EigenOptions lanczos_only() {
  EigenOptions o;
  o.method = EigenMethod::Lanczos;
  return o;
}

struct RandomConfig {
  GroupModel group;
  Point center;
  double r;
  std::vector<double> h;
  Polynomial v;
};

// Random balls and nonnegative polynomial potentials on R^1, R^2 and H^1.
RandomConfig random_config(std::mt19937_64& rng, int i) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  GroupModel g = i % 3 == 0 ? euclidean(1) : i % 3 == 1 ? euclidean(2) : heisenberg(1);
  Point c(g.dim());
  for (auto& x : c) x = std::round(4 * u(rng)) / 4;
  double r = 1.0 + 0.5 * (u(rng) + 1.0);
  double h = g.dim() == 1 ? 1.0 / 32 : g.dim() == 2 ? 1.0 / 8 : 1.0 / 6;
  Polynomial p = subspec::testing::random_polynomial(rng, g.dim(), 2, 3);
  Polynomial v = p * p + Polynomial::constant(g.dim(), Rational(1, 2));
  return {g, c, r, isotropic(g, h), v};
}

ScalarField as_field(const Polynomial& p) {
  auto c = std::make_shared<CompiledPolynomial>(p);
  return [c](std::span<const double> x) { return (*c)(x); };
}

}  // namespace

TEST(Assemble, HandStencil) {
  GroupModel r1 = euclidean(1);
  auto op = assemble(r1, BoxDomain{{-1}, {1}}, {1.0}, zero_potential(), Boundary::Dirichlet);
  ASSERT_EQ(op.size(), 1u);
  EXPECT_EQ(Eigen::MatrixXd(op.A)(0, 0), 2.0);

  // Neumann path graph on 0..3 with unit spacing.
  auto nop = assemble(r1, BoxDomain{{0}, {3}}, {1.0}, zero_potential(), Boundary::Neumann);
  Eigen::MatrixXd want(4, 4);
  want << 1, -1, 0, 0, -1, 2, -1, 0, 0, -1, 2, -1, 0, 0, -1, 1;
  EXPECT_EQ(Eigen::MatrixXd(nop.A), want);
}

TEST(Assemble, SchemesAgreeOnAbelianGroups) {
  GroupModel r2 = euclidean(2);
  for (auto bc : {Boundary::Dirichlet, Boundary::Neumann}) {
    Discretization d = discretize(r2, BallDomain{{0.25, 0}, 1.3}, {0.125, 0.25}, bc);
    AssembleOptions f, s;
    f.scheme = DifferenceScheme::Forward;
    s.scheme = DifferenceScheme::Symmetric;
    Eigen::MatrixXd a = Eigen::MatrixXd(assemble(d, square(0), f).A), b = Eigen::MatrixXd(assemble(d, square(0), s).A);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Assemble, SymmetricAndPositiveSemidefinite) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 20; ++i) {
    auto cfg = random_config(rng, i);
    for (auto bc : {Boundary::Dirichlet, Boundary::Neumann})
      for (auto scheme : {DifferenceScheme::Forward, DifferenceScheme::Symmetric}) {
        AssembleOptions o;
        o.scheme = scheme;
        auto op = assemble(discretize(cfg.group, BallDomain{cfg.center, cfg.r}, cfg.h, bc), as_field(cfg.v), o);
        EXPECT_TRUE(is_symmetric(op.A));
        EXPECT_TRUE(is_symmetric(op.form()));
        // Positive pivots of A + eps I certify semidefiniteness up to eps.
        Eigen::SparseMatrix<double> shifted = op.A;
        double eps = 1e-9 * std::max(1.0, Eigen::VectorXd(op.A.diagonal()).maxCoeff());
        for (Eigen::Index j = 0; j < shifted.rows(); ++j) shifted.coeffRef(j, j) += eps;
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
        ASSERT_EQ(ldlt.info(), Eigen::Success);
        EXPECT_GT(ldlt.vectorD().minCoeff(), 0.0);
      }
  }
}

TEST(Assemble, ConstantShiftMovesSpectrum) {
  GroupModel h = heisenberg(1);
  auto v = [](std::span<const double> x) { return x[2] * x[2]; };
  auto v7 = [](std::span<const double> x) { return x[2] * x[2] + 7.0; };
  auto a = smallest_eigenvalues(assemble(h, BallDomain{{0, 0, 1}, 1.0}, isotropic(h, 0.125), v, Boundary::Dirichlet), 3);
  auto b = smallest_eigenvalues(assemble(h, BallDomain{{0, 0, 1}, 1.0}, isotropic(h, 0.125), v7, Boundary::Dirichlet), 3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(b.values[i], a.values[i] + 7.0, 1e-7);
}

TEST(Assemble, Errors) {
  GroupModel r1 = euclidean(1);
  EXPECT_EQ(error_kind([&] { assemble(r1, BallDomain{{0.5}, 0.1}, {1.0}, zero_potential(), Boundary::Dirichlet); }),
            ErrorKind::EmptyDomain);
  ScalarField bad = [](std::span<const double> x) { return std::log(x[0]); };
  EXPECT_EQ(error_kind([&] { assemble(r1, BoxDomain{{-1}, {1}}, {0.25}, bad, Boundary::Dirichlet); }),
            ErrorKind::PotentialNotEvaluable);
  AssembleOptions w;
  w.weight = [](std::span<const double> x) { return x[0]; };
  EXPECT_EQ(error_kind([&] { assemble(discretize(r1, BoxDomain{{-1}, {1}}, {0.25}, Boundary::Dirichlet), {}, w); }),
            ErrorKind::WeightNonpositive);
}

TEST(Eigensolver, DiagonalMatrix) {
  const int n = 300;
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, static_cast<double>((i * 37) % n + 1));
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(t.begin(), t.end());
  Eigen::VectorXd m = Eigen::VectorXd::Ones(n);
  for (auto opts : {dense_only(), lanczos_only()}) {
    auto r = smallest_eigenvalues(K, m, 0.0, 4, opts);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.values[i], i + 1.0, 1e-9) << r.method;
  }
}

TEST(Eigensolver, RepeatedEigenvalues) {
  const int n = 400;
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, i < 3 ? 2.0 : 5.0 + i);
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(t.begin(), t.end());
  auto r = smallest_eigenvalues(K, Eigen::VectorXd::Ones(n), 0.0, 4, lanczos_only());
  EXPECT_NEAR(r.values[0], 2.0, 1e-9);
  EXPECT_NEAR(r.values[1], 2.0, 1e-9);
  EXPECT_NEAR(r.values[2], 2.0, 1e-9);
  EXPECT_NEAR(r.values[3], 8.0, 1e-9);
}

TEST(Eigensolver, RandomSparseSpdMatchesDense) {
  const int n = 500;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, 4.0 + u(rng));
  for (int e = 0; e < 3 * n; ++e) {
    int i = pick(rng), j = pick(rng);
    if (i == j) continue;
    double v = 0.3 * u(rng);
    t.emplace_back(i, j, v);
    t.emplace_back(j, i, v);
    t.emplace_back(i, i, std::abs(v));
    t.emplace_back(j, j, std::abs(v));
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(t.begin(), t.end());
  Eigen::VectorXd m(n);
  for (auto& x : m) x = 1.0 + 0.5 * (u(rng) + 1.0);
  EigenOptions lo = lanczos_only();
  auto a = smallest_eigenvalues(K, m, 0.0, 6, lo);
  auto b = smallest_eigenvalues(K, m, 0.0, 6, dense_only());
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(a.values[i], b.values[i], 10 * lo.tol * std::max(1.0, std::abs(b.values[i])));
    EXPECT_LE(a.residuals[i], lo.tol * std::max(1.0, std::abs(a.values[i])));
  }
  // M-orthonormal eigenvectors.
  Eigen::MatrixXd gram = a.vectors.transpose() * m.asDiagonal() * a.vectors;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Eigensolver, Errors) {
  Eigen::SparseMatrix<double> K(3, 3);
  K.insert(0, 1) = 1.0;
  K.insert(0, 0) = 1.0;
  K.insert(1, 1) = 1.0;
  K.insert(2, 2) = 1.0;
  EXPECT_EQ(error_kind([&] { smallest_eigenvalues(K, Eigen::VectorXd::Ones(3), 0.0, 1); }), ErrorKind::NotSymmetric);

  GroupModel r1 = euclidean(1);
  auto op = assemble(r1, BoxDomain{{-8}, {8}}, {1.0 / 64}, square(0), Boundary::Dirichlet);
  EigenOptions o = lanczos_only();
  o.max_krylov = 2;
  o.max_restarts = 0;
  EXPECT_EQ(error_kind([&] { smallest_eigenvalues(op, 3, o); }), ErrorKind::NoConvergence);
}

TEST(Eigensolver, DirichletLaplacianOnInterval) {
  GroupModel r1 = euclidean(1);
  auto op = assemble(r1, BoxDomain{{0}, {kPi}}, {kPi / 512}, zero_potential(), Boundary::Dirichlet);
  auto r = smallest_eigenvalues(op, 3);
  EXPECT_EQ(r.method, "lanczos");
  EXPECT_NEAR(r.values[0], 1.0, 0.01);
  EXPECT_NEAR(r.values[1], 4.0, 0.04);
  EXPECT_NEAR(r.values[2], 9.0, 0.09);
}

TEST(Eigensolver, SecondOrderGridConvergence) {
  GroupModel r1 = euclidean(1);
  std::vector<double> err;
  for (int m : {32, 64, 128}) {
    auto op = assemble(r1, BoxDomain{{0}, {kPi}}, {kPi / m}, zero_potential(), Boundary::Dirichlet);
    err.push_back(std::abs(smallest_eigenvalues(op, 2).values[1] - 4.0));
  }
  for (int i = 0; i + 1 < 2; ++i) {
    double ratio = err[i] / err[i + 1];
    EXPECT_GT(ratio, 4.0 * 0.7);
    EXPECT_LT(ratio, 4.0 * 1.3);
  }
}

TEST(Eigensolver, HarmonicOscillator) {
  GroupModel r1 = euclidean(1);
  auto op = assemble(r1, BoxDomain{{-8}, {8}}, {1.0 / 64}, square(0), Boundary::Dirichlet);
  auto r = smallest_eigenvalues(op, 5);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(r.values[i], 2 * i + 1, 0.01 * (2 * i + 1));
}

TEST(Eigensolver, LanczosMatchesDenseOnAssembledOperators) {
  std::mt19937_64 rng(43);
  int compared = 0;
  for (int i = 0; i < 20; ++i) {
    auto cfg = random_config(rng, i);
    auto op = assemble(cfg.group, BallDomain{cfg.center, cfg.r}, cfg.h, as_field(cfg.v), Boundary::Dirichlet);
    if (op.size() > 2000 || op.size() < 4) continue;
    EigenOptions lo = lanczos_only();
    auto a = smallest_eigenvalues(op, 3, lo);
    Eigen::VectorXd all = dense_spectrum(op);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(a.values[k], all[k], 10 * lo.tol * std::max(1.0, std::abs(all[k])));
    ++compared;
  }
  EXPECT_GE(compared, 15);
}

TEST(Sigma, IntervalExamples) {
  GroupModel r1 = euclidean(1);
  std::vector<double> h{1.0 / 128};
  EXPECT_NEAR(sigma(r1, zero_potential(), {0.0}, kPi / 2, h, Boundary::Dirichlet).value, 1.0, 0.02);
  EXPECT_NEAR(sigma(r1, zero_potential(), {0.0}, kPi / 2, h, Boundary::Neumann).value, 0.0, 1e-8);
}

TEST(Sigma, HeisenbergBallSelfConvergence) {
  GroupModel g = heisenberg(1);
  std::vector<double> v;
  for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 24}) v.push_back(sigma(g, zero_potential(), {0, 0, 0}, 1.0, isotropic(g, h), Boundary::Dirichlet).value);
  // Monotone approach from below with shrinking increments; regression baseline at h = 1/16.
  EXPECT_LT(v[0], v[1]);
  EXPECT_LT(v[1], v[2]);
  EXPECT_LT(v[2] - v[1], v[1] - v[0]);
  EXPECT_NEAR(v[1], 8.10981, 1e-4);
}

TEST(Sigma, NeumannBelowDirichletAndPotentialMonotone) {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 20; ++i) {
    auto cfg = random_config(rng, i);
    auto field = as_field(cfg.v);
    double d = sigma(cfg.group, field, cfg.center, cfg.r, cfg.h, Boundary::Dirichlet).value;
    double n = sigma(cfg.group, field, cfg.center, cfg.r, cfg.h, Boundary::Neumann).value;
    EXPECT_LE(n, d * (1 + 1e-9));

    // V2 = V + q^2 >= V at every node: every Ritz value moves up.
    Polynomial q = subspec::testing::random_polynomial(rng, cfg.group.dim(), 1, 2);
    auto op1 = assemble(cfg.group, BallDomain{cfg.center, cfg.r}, cfg.h, field, Boundary::Dirichlet);
    auto op2 = assemble(cfg.group, BallDomain{cfg.center, cfg.r}, cfg.h, as_field(cfg.v + q * q), Boundary::Dirichlet);
    int k = static_cast<int>(std::min<std::size_t>(4, op1.size()));
    auto e1 = smallest_eigenvalues(op1, k), e2 = smallest_eigenvalues(op2, k);
    for (int j = 0; j < k; ++j) EXPECT_LE(e1.values[j], e2.values[j] + 1e-7 * std::max(1.0, e2.values[j]));
  }
}

TEST(Sigma, DirichletDomainMonotonicity) {
  GroupModel g = heisenberg(1);
  auto v = as_field(Polynomial::variable(3, 2) * Polynomial::variable(3, 2));
  double prev = std::numeric_limits<double>::infinity();
  for (double r : {0.8, 1.0, 1.2, 1.4}) {
    double s = sigma(g, v, {0.25, 0, 0.5}, r, isotropic(g, 1.0 / 8), Boundary::Dirichlet).value;
    EXPECT_LE(s, prev);
    prev = s;
  }
}

TEST(SigmaScan, Verdicts) {
  GroupModel h = heisenberg(1);
  std::vector<double> grid = isotropic(h, 1.0 / 8);
  auto ray_t = h.center_net(8, 1, Point{0, 0, 1});
  auto bounded = sigma_scan(h, as_field(Polynomial::variable(3, 0) * Polynomial::variable(3, 0) + Polynomial::variable(3, 1) * Polynomial::variable(3, 1)), ray_t, 1.0, grid, Boundary::Dirichlet);
  EXPECT_EQ(bounded.verdict, ScanVerdict::Bounded);
  for (double v : bounded.values) EXPECT_NEAR(v, bounded.values[0], 1e-6 * bounded.values[0]);

  auto growth = sigma_scan(h, square(2), ray_t, 1.0, grid, Boundary::Dirichlet);
  EXPECT_EQ(growth.verdict, ScanVerdict::Growth);

  GroupModel r1 = euclidean(1);
  auto ray = r1.center_net(8, 1, Point{1});
  EXPECT_EQ(sigma_scan(r1, square(0), ray, 1.0, {1.0 / 32}, Boundary::Dirichlet).verdict, ScanVerdict::Growth);
}

TEST(SigmaScan, ThreadCountDoesNotChangeResults) {
  GroupModel r2 = euclidean(2);
  auto centers = r2.center_net(3, 1);
  auto a = sigma_scan(r2, square(0), centers, 1.0, isotropic(r2, 0.125), Boundary::Dirichlet, {}, {}, 1);
  auto b = sigma_scan(r2, square(0), centers, 1.0, isotropic(r2, 0.125), Boundary::Dirichlet, {}, {}, 3);
  EXPECT_EQ(a.values, b.values);
}

TEST(ScanVerdict, Heuristic) {
  EXPECT_EQ(classify_scan({1, 2, 4, 8, 16}), ScanVerdict::Growth);
  EXPECT_EQ(classify_scan({3, 3.1, 3.05, 3.2}), ScanVerdict::Bounded);
  EXPECT_EQ(classify_scan({1, 1.5, 2, 2.5}), ScanVerdict::Inconclusive);
  EXPECT_EQ(classify_scan({0, 0, 0}), ScanVerdict::Bounded);
  EXPECT_EQ(classify_scan({5}), ScanVerdict::Inconclusive);
  ScanThresholds strict{2.0, 1.01};
  EXPECT_EQ(classify_scan({1, 1.5, 2, 2.5}, strict), ScanVerdict::Growth);
  EXPECT_THROW(classify_scan({}), Error);
}

TEST(TailMass, HugeConstantPotential) {
  GroupModel r1 = euclidean(1);
  ScalarField big = [](std::span<const double>) { return 1e6; };
  auto t = tail_mass_sup(r1, big, BoxDomain{{-8}, {8}}, {1.0 / 8}, 2.0);
  EXPECT_LE(t.value, 1e-6);
  EXPECT_GT(t.value, 0.0);
}

TEST(TailMass, OscillatorDecaysAndMatchesDenseOracle) {
  GroupModel r1 = euclidean(1);
  double prev = std::numeric_limits<double>::infinity();
  for (double R : {2.0, 3.0, 4.0, 5.0, 6.0}) {
    auto t = tail_mass_sup(r1, square(0), BoxDomain{{-8}, {8}}, {1.0 / 8}, R);
    EXPECT_LT(t.value, prev);
    prev = t.value;
    // Dense generalized eigenproblem (M_tail, F).
    auto op = assemble(r1, BoxDomain{{-8}, {8}}, {1.0 / 8}, square(0), Boundary::Dirichlet);
    Eigen::MatrixXd F(op.form());
    F += normalizing_shift(op) * Eigen::MatrixXd(op.mass.asDiagonal());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(F.rows(), F.cols());
    for (Eigen::Index i = 0; i < F.rows(); ++i)
      if (std::abs(op.nodes[static_cast<std::size_t>(i)][0]) >= R) T(i, i) = op.mass[i];
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(T, F, Eigen::EigenvaluesOnly);
    EXPECT_NEAR(t.value, ges.eigenvalues().maxCoeff(), 1e-6 * t.value);
  }
}

TEST(TailMass, PlateauWhenConfinedInOneDirection) {
  GroupModel r2 = euclidean(2);
  auto first = tail_mass_sup(r2, square(0), BoxDomain{{-8, -8}, {8, 8}}, {0.5, 0.5}, 2.0);
  auto last = tail_mass_sup(r2, square(0), BoxDomain{{-8, -8}, {8, 8}}, {0.5, 0.5}, 6.0);
  EXPECT_GE(last.value, 0.5 * first.value);
}

TEST(Poincare, IntervalAndScaling) {
  GroupModel r1 = euclidean(1);
  for (double r : {1.0, 2.0}) {
    double want = std::pow(kPi / (2 * r), 2);
    EXPECT_NEAR(poincare_constant(r1, r, {1.0 / 256}).lambda1, want, 0.02 * want);
  }
  GroupModel r2 = euclidean(2);
  double a = poincare_constant(r2, 1.0, isotropic(r2, 1.0 / 32)).lambda1;
  double b = poincare_constant(r2, 2.0, isotropic(r2, 1.0 / 32)).lambda1;
  EXPECT_NEAR(a / b, 4.0, 0.2);
}

TEST(Poincare, HeisenbergDilation) {
  GroupModel h = heisenberg(1);
  // Grid spacing scaled with the radius so both balls carry comparable resolution.
  double a = poincare_constant(h, 1.0, isotropic(h, 1.0 / 16)).lambda1;
  double b = poincare_constant(h, 2.0, isotropic(h, 1.0 / 8)).lambda1;
  EXPECT_GT(a, 1.0);
  EXPECT_NEAR(a / b, 4.0, 0.6);
}

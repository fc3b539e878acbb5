#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "subspec/discretization.hpp"
#include "subspec/error.hpp"

namespace subspec {

enum class EigenMethod { Auto, Lanczos, Dense };

struct EigenOptions {
  double tol = 1e-8;
  int max_krylov = 300;  // Lanczos vectors per run before restarting
  int max_restarts = 40;
  std::size_t dense_limit = 2000;  // dense fallback bound when Lanczos fails
  std::size_t dense_below = 200;   // Auto uses the dense path for smaller problems
  EigenMethod method = EigenMethod::Auto;
  std::uint64_t seed = 0x1a2c05;
};

struct EigenResult {
  std::vector<double> values;     // ascending
  std::vector<double> residuals;  // ||C u - lambda u||, C = M^-1/2 K M^-1/2, ||u|| = 1
  Eigen::MatrixXd vectors;        // columns, M-orthonormal
  std::string method;
  int iterations = 0;
  double shift = 0.0;
};

using LinearMap = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;
using RitzTest = std::function<bool(double theta, const Eigen::VectorXd& u)>;

struct TopEigenpairs {
  std::vector<double> values;  // descending
  std::vector<Eigen::VectorXd> vectors;
  int iterations = 0;
};

/// Largest k eigenpairs of a symmetric operator by Lanczos with full reorthogonalization.
/// Each run locks its top Ritz pair once accepted, so repeated eigenvalues are found one copy
/// at a time; runs that exhaust the Krylov budget restart from their best Ritz vector.
inline TopEigenpairs lanczos_largest(Eigen::Index n, const LinearMap& op, int k, const RitzTest& accept,
                                     const EigenOptions& opts) {
  if (k < 1 || k > n) throw Error(ErrorKind::InvalidArgument, "requested eigenpair count out of range");
  TopEigenpairs out;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd locked(n, 0);

  auto orthogonalize = [&](Eigen::VectorXd& w, const Eigen::MatrixXd& basis, Eigen::Index cols) {
    for (int pass = 0; pass < 2; ++pass) {
      if (cols > 0) w -= basis.leftCols(cols) * (basis.leftCols(cols).transpose() * w);
      if (locked.cols() > 0) w -= locked * (locked.transpose() * w);
    }
  };

  Eigen::VectorXd start(n);
  for (auto& x : start) x = gauss(rng);
  int restarts = 0;
  const Eigen::Index m = std::min<Eigen::Index>(opts.max_krylov, n - locked.cols());

  while (static_cast<int>(out.values.size()) < k) {
    Eigen::Index budget = std::min<Eigen::Index>(m, n - locked.cols());
    Eigen::MatrixXd V(n, budget);
    std::vector<double> alpha, beta;
    Eigen::VectorXd v = start, w(n);
    orthogonalize(v, V, 0);
    double nv = v.norm();
    if (nv < 1e-300) {
      for (auto& x : v) x = gauss(rng);
      orthogonalize(v, V, 0);
      nv = v.norm();
    }
    V.col(0) = v / nv;
    bool done = false;
    double best_theta = 0.0;
    Eigen::VectorXd best_u;
    for (Eigen::Index j = 0; j < budget; ++j) {
      op(V.col(j), w);
      ++out.iterations;
      double a = V.col(j).dot(w);
      alpha.push_back(a);
      w -= a * V.col(j);
      if (j > 0) w -= beta.back() * V.col(j - 1);
      orthogonalize(w, V, j + 1);
      double b = w.norm();
      beta.push_back(b);
      double scale = std::abs(a) + (j > 0 ? beta[beta.size() - 2] : 0.0);
      bool exhausted = b <= 1e-13 * std::max(scale, 1e-300) || j + 1 == budget;
      if (exhausted || j % 4 == 3 || j < 4) {
        Eigen::Index s = j + 1;
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(s, s);
        for (Eigen::Index i = 0; i < s; ++i) {
          tri(i, i) = alpha[i];
          if (i + 1 < s) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        double theta = es.eigenvalues()(s - 1);
        Eigen::VectorXd y = es.eigenvectors().col(s - 1);
        double estimate = std::abs(b * y(s - 1));
        best_theta = theta;
        best_u = V.leftCols(s) * y;
        best_u.normalize();
        if (estimate <= std::max(opts.tol * std::abs(theta), 1e-15 * std::abs(theta)) || exhausted) {
          if (accept(theta, best_u)) {
            out.values.push_back(theta);
            out.vectors.push_back(best_u);
            locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
            locked.col(locked.cols() - 1) = best_u;
            done = true;
            break;
          }
        }
      }
      if (exhausted) break;
      V.col(j + 1) = w / b;
    }
    if (done) {
      for (auto& x : start) x = gauss(rng);
      restarts = 0;
      continue;
    }
    if (++restarts > opts.max_restarts)
      throw Error(ErrorKind::NoConvergence, "Lanczos did not converge within " + std::to_string(opts.max_restarts) +
                                                " restarts (last Ritz value " + std::to_string(best_theta) + ")");
    // Restart from the best Ritz vector with a small random component to escape stagnation.
    start = best_u;
    Eigen::VectorXd noise(n);
    for (auto& x : noise) x = gauss(rng);
    start += 1e-6 * noise / noise.norm();
  }
  return out;
}

namespace detail {

inline double pencil_residual(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& msq, double lambda,
                              const Eigen::VectorXd& u) {
  Eigen::VectorXd x = u.cwiseQuotient(msq);
  Eigen::VectorXd cu = (K * x).cwiseQuotient(msq);
  return (cu - lambda * u).norm() / u.norm();
}

inline EigenResult dense_pencil(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& mass, int k, double tol) {
  Eigen::VectorXd msq = mass.cwiseSqrt();
  Eigen::MatrixXd C = Eigen::MatrixXd(K);
  C = msq.cwiseInverse().asDiagonal() * C * msq.cwiseInverse().asDiagonal();
  C = 0.5 * (C + C.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "dense eigensolver failed");
  EigenResult r;
  r.method = "dense";
  r.vectors.resize(K.rows(), k);
  for (int i = 0; i < k; ++i) {
    double lambda = es.eigenvalues()(i);
    Eigen::VectorXd u = es.eigenvectors().col(i);
    r.values.push_back(lambda);
    r.residuals.push_back(pencil_residual(K, msq, lambda, u));
    r.vectors.col(i) = u.cwiseQuotient(msq);
  }
  (void)tol;
  return r;
}

}  // namespace detail

/// k smallest eigenvalues of K x = lambda M x (M diagonal positive). Lanczos runs on
/// M^1/2 (K + s M)^-1 M^1/2, whose largest eigenvalues are 1 / (lambda + s); s must make
/// K + s M positive definite.
inline EigenResult smallest_eigenvalues(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& mass, double shift,
                                        int k, const EigenOptions& opts = {}) {
  const Eigen::Index n = K.rows();
  if (!is_symmetric(K)) throw Error(ErrorKind::NotSymmetric, "operator matrix is not symmetric");
  if (mass.size() != n || (mass.array() <= 0.0).any()) throw Error(ErrorKind::InvalidArgument, "mass must be positive");
  if (k < 1 || k > n) throw Error(ErrorKind::InvalidArgument, "requested eigenvalue count out of range");

  bool dense = opts.method == EigenMethod::Dense ||
               (opts.method == EigenMethod::Auto && static_cast<std::size_t>(n) <= opts.dense_below);
  if (dense) {
    auto r = detail::dense_pencil(K, mass, k, opts.tol);
    r.shift = shift;
    return r;
  }

  Eigen::SparseMatrix<double> F = K;
  for (Eigen::Index i = 0; i < n; ++i) F.coeffRef(i, i) += shift * mass[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(F);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any())
    throw Error(ErrorKind::InvalidArgument, "shifted form is not positive definite");
  Eigen::VectorXd msq = mass.cwiseSqrt();
  LinearMap op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y = ldlt.solve(msq.cwiseProduct(x));
    y = msq.cwiseProduct(y);
  };
  RitzTest accept = [&](double theta, const Eigen::VectorXd& u) {
    double lambda = 1.0 / theta - shift;
    return detail::pencil_residual(K, msq, lambda, u) <= opts.tol * std::max(1.0, std::abs(lambda));
  };
  try {
    TopEigenpairs top = lanczos_largest(n, op, k, accept, opts);
    std::vector<int> order(top.values.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> lambdas;
    for (double th : top.values) lambdas.push_back(1.0 / th - shift);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return lambdas[a] < lambdas[b]; });
    EigenResult r;
    r.method = "lanczos";
    r.iterations = top.iterations;
    r.shift = shift;
    r.vectors.resize(n, k);
    for (int i = 0; i < k; ++i) {
      int o = order[i];
      r.values.push_back(lambdas[o]);
      r.residuals.push_back(detail::pencil_residual(K, msq, lambdas[o], top.vectors[o]));
      r.vectors.col(i) = top.vectors[o].cwiseQuotient(msq);
    }
    return r;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoConvergence || static_cast<std::size_t>(n) > opts.dense_limit ||
        opts.method == EigenMethod::Lanczos)
      throw;
    auto r = detail::dense_pencil(K, mass, k, opts.tol);
    r.method = "dense-fallback";
    r.shift = shift;
    return r;
  }
}

/// Shift chosen so that V + s >= 1 at every node.
inline double normalizing_shift(const SparseOperator& op) { return std::max(0.0, 1.0 - op.min_potential()); }

inline EigenResult smallest_eigenvalues(const SparseOperator& op, int k, const EigenOptions& opts = {}) {
  return smallest_eigenvalues(op.form(), op.mass, normalizing_shift(op), k, opts);
}

}  // namespace subspec

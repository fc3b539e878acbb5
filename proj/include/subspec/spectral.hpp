#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <string>
#include <vector>

#include "subspec/discretization.hpp"
#include "subspec/eigensolver.hpp"
#include "subspec/error.hpp"
#include "subspec/group_model.hpp"
#include "subspec/parallel.hpp"
#include "subspec/scan_verdict.hpp"

namespace subspec {

struct SigmaResult {
  double value = 0.0;
  double residual = 0.0;
  std::size_t nodes = 0;
};

/// Bottom of the discrete spectrum of L + V on B(center, r).
inline SigmaResult sigma(const GroupModel& g, const ScalarField& V, const Point& center, double r,
                         const std::vector<double>& h, Boundary bc, const EigenOptions& opts = {},
                         DifferenceScheme scheme = DifferenceScheme::Symmetric) {
  AssembleOptions ao;
  ao.scheme = scheme;
  SparseOperator op = assemble(g, BallDomain{center, r}, h, V, bc, ao);
  EigenResult e = smallest_eigenvalues(op, 1, opts);
  return {e.values.front(), e.residuals.front(), op.size()};
}

struct SigmaScanResult {
  std::vector<Point> centers;
  std::vector<double> values;
  std::vector<double> residuals;
  std::vector<std::size_t> nodes;
  Boundary bc = Boundary::Dirichlet;
  double r = 1.0;
  std::vector<double> h;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
};

inline SigmaScanResult sigma_scan(const GroupModel& g, const ScalarField& V, const std::vector<Point>& centers, double r,
                                  const std::vector<double>& h, Boundary bc, const EigenOptions& opts = {},
                                  const ScanThresholds& thresholds = {}, unsigned threads = 1,
                                  DifferenceScheme scheme = DifferenceScheme::Symmetric) {
  if (centers.empty()) throw Error(ErrorKind::InvalidArgument, "sigma_scan needs at least one center");
  SigmaScanResult out;
  out.centers = centers;
  out.bc = bc;
  out.r = r;
  out.h = h;
  out.values.resize(centers.size());
  out.residuals.resize(centers.size());
  out.nodes.resize(centers.size());
  parallel_for(centers.size(), threads, [&](std::size_t i) {
    SigmaResult s = sigma(g, V, centers[i], r, h, bc, opts, scheme);
    out.values[i] = s.value;
    out.residuals[i] = s.residual;
    out.nodes[i] = s.nodes;
  });
  out.verdict = classify_scan(out.values, thresholds);
  return out;
}

struct TailMassResult {
  double value = 0.0;
  double residual = 0.0;
  std::size_t tail_nodes = 0;
  double shift = 0.0;
};

/// sup of sum_{N(x) >= R} |f|^2 vol over f with Q(f) + s ||f||^2 <= 1, where s normalizes V + s >= 1.
/// Largest eigenvalue of T^1/2 F^-1 T^1/2 with T the tail part of the mass, by Lanczos.
inline TailMassResult tail_mass_sup(const GroupModel& g, const ScalarField& V, const Domain& domain,
                                    const std::vector<double>& h, double tail_radius, Boundary bc = Boundary::Dirichlet,
                                    const EigenOptions& opts = {},
                                    DifferenceScheme scheme = DifferenceScheme::Symmetric) {
  AssembleOptions ao;
  ao.scheme = scheme;
  SparseOperator op = assemble(g, domain, h, V, bc, ao);
  const auto n = static_cast<Eigen::Index>(op.size());
  Eigen::VectorXd tail = Eigen::VectorXd::Zero(n);
  TailMassResult out;
  out.shift = normalizing_shift(op);
  for (Eigen::Index i = 0; i < n; ++i)
    if (g.homogeneous_norm(op.nodes[static_cast<std::size_t>(i)]) >= tail_radius) {
      tail[i] = std::sqrt(op.mass[i]);
      ++out.tail_nodes;
    }
  if (out.tail_nodes == 0) return out;
  Eigen::SparseMatrix<double> F = op.form();
  for (Eigen::Index i = 0; i < n; ++i) F.coeffRef(i, i) += out.shift * op.mass[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(F);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::InvalidArgument, "shifted form is not positive definite");
  LinearMap map = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y = ldlt.solve(tail.cwiseProduct(x));
    y = tail.cwiseProduct(y);
  };
  double residual = 0.0;
  RitzTest accept = [&](double theta, const Eigen::VectorXd& u) {
    Eigen::VectorXd tu;
    map(u, tu);
    residual = (tu - theta * u).norm();
    return residual <= opts.tol * std::abs(theta);
  };
  TopEigenpairs top = lanczos_largest(n, map, 1, accept, opts);
  out.value = top.values.front();
  out.residual = residual;
  return out;
}

struct PoincareResult {
  double lambda1 = 0.0;  // smallest nonzero Neumann eigenvalue
  std::vector<double> spectrum;
};

/// Smallest nonzero Neumann eigenvalue of the potential-free form on B(e, r).
inline PoincareResult poincare_constant(const GroupModel& g, double r, const std::vector<double>& h,
                                        const EigenOptions& opts = {}) {
  SparseOperator op = assemble(g, BallDomain{Point(g.dim(), 0.0), r}, h, ScalarField{}, Boundary::Neumann);
  int k = static_cast<int>(std::min<std::size_t>(4, op.size()));
  EigenResult e = smallest_eigenvalues(op, k, opts);
  PoincareResult out;
  out.spectrum = e.values;
  double scale = std::max(1.0, std::abs(e.values.back()));
  for (double v : e.values)
    if (v > 1e-7 * scale) {
      out.lambda1 = v;
      return out;
    }
  throw Error(ErrorKind::NoConvergence, "no nonzero Neumann eigenvalue among the computed ones");
}

}  // namespace subspec

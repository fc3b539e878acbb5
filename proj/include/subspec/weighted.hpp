#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "subspec/discretization.hpp"
#include "subspec/eigensolver.hpp"
#include "subspec/error.hpp"
#include "subspec/expression.hpp"
#include "subspec/group_model.hpp"

namespace subspec {

struct WeightPotential {
  Expr potential;
  bool exponential_form = false;  // w = c exp(P) with P polynomial; V_w is then a polynomial
  double lower_bound = 0.0;       // min of V_w over the sample set
};

/// V_w = -|grad_H w|^2 / (4 w^2) + (sum_j X_j^2 w) / (2 w), by symbolic differentiation.
/// For w = c exp(P) this reduces to the polynomial (1/4) sum (X_j P)^2 + (1/2) sum X_j^2 P,
/// used unless `exponential_shortcut` is off.
inline Expr weight_potential(const GroupModel& g, const Expr& w, bool exponential_shortcut = true) {
  if (w.uses_norm()) throw Error(ErrorKind::NotDifferentiable, "weights using norm() cannot be differentiated");
  auto fields = g.horizontal_fields();
  auto ep = exponential_shortcut ? as_exp_polynomial(w, g.dim()) : std::nullopt;
  if (ep) {
    const Polynomial& P = ep->second;
    Polynomial v(g.dim());
    for (const auto& X : fields) {
      Polynomial xp = X.apply(P);
      v += xp * xp * Rational(1, 4) + X.apply(xp) * Rational(1, 2);
    }
    return from_polynomial(v);
  }
  std::vector<Expr> grad_sq, second;
  for (const auto& X : fields) {
    Expr xw = apply_field(X, w);
    grad_sq.push_back(xw * xw);
    second.push_back(apply_field(X, xw));
  }
  Expr w2 = w * w;
  return Expr::sum({Expr::constant(Rational(-1, 4)) * Expr::sum(grad_sq) * w2.pow(-1),
                    Expr::constant(Rational(1, 2)) * Expr::sum(second) * w.pow(-1)});
}

inline double sampled_minimum(const GroupModel& g, const Expr& e, const std::vector<Point>& points) {
  CompiledExpr f(e, &g);
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& x : points) {
    double v = f(x);
    if (!std::isfinite(v)) throw Error(ErrorKind::PotentialNotEvaluable, "expression is not finite at a sample point");
    lo = std::min(lo, v);
  }
  return lo;
}

/// V_w together with its minimum over `samples` (default: the center net of radius 2, spacing 1/4).
inline WeightPotential potential_from_weight(const GroupModel& g, const Expr& w,
                                             std::optional<std::vector<Point>> samples = std::nullopt) {
  WeightPotential out;
  out.exponential_form = as_exp_polynomial(w, g.dim()).has_value() && !w.uses_norm();
  out.potential = weight_potential(g, w);
  auto pts = samples ? *samples : g.center_net(2.0, 0.25);
  pts.push_back(Point(g.dim(), 0.0));
  out.lower_bound = sampled_minimum(g, out.potential, pts);
  return out;
}

inline ScalarField as_scalar_field(const GroupModel& g, const Expr& e) {
  auto c = std::make_shared<CompiledExpr>(e, &g);
  return [c](std::span<const double> x) { return (*c)(x); };
}

/// Q_w on the grid: difference rows weighted by w at their centers, mass vol * w at nodes.
inline SparseOperator weighted_form_matrix(const GroupModel& g, const ScalarField& w, const Domain& domain,
                                           const std::vector<double>& h, Boundary bc,
                                           DifferenceScheme scheme = DifferenceScheme::Symmetric) {
  AssembleOptions o;
  o.weight = w;
  o.scheme = scheme;
  return assemble(discretize(g, domain, h, bc), ScalarField{}, o);
}

struct EquivalenceReport {
  std::vector<double> weighted;     // pencil (Q_w, w mass)
  std::vector<double> schrodinger;  // pencil (Q_{V_w}, unit mass)
  std::vector<double> differences;
  std::vector<double> h;
  std::size_t nodes = 0;
  double lower_bound = 0.0;  // min of V_w over the grid nodes
  double max_log_gradient = 0.0;  // max |grad_H w| / w over the nodes
  double max_sqrt_gradient = 0.0;  // max |grad_H w| / sqrt(w) over the nodes
  std::vector<std::string> warnings;
};

/// Both sides of the ground-state transform f -> f w^(1/2) on the same grid. With
/// `declared_m`, V_w sampled below 1 - m raises LowerBoundViolated.
inline EquivalenceReport equivalence_check(const GroupModel& g, const Expr& w, const Domain& domain,
                                           const std::vector<double>& h, int k, Boundary bc = Boundary::Dirichlet,
                                           std::optional<double> declared_m = std::nullopt,
                                           const EigenOptions& opts = {}) {
  Expr V = weight_potential(g, w);
  ScalarField wf = as_scalar_field(g, w), vf = as_scalar_field(g, V);
  Discretization d = discretize(g, domain, h, bc);
  EquivalenceReport rep;
  rep.h = h;
  rep.nodes = d.size();
  rep.lower_bound = sampled_minimum(g, V, d.nodes);
  if (declared_m && rep.lower_bound < 1.0 - *declared_m)
    throw Error(ErrorKind::LowerBoundViolated, "sampled V_w = " + std::to_string(rep.lower_bound) + " is below 1 - m = " +
                                                   std::to_string(1.0 - *declared_m));

  std::vector<CompiledExpr> grads;
  for (const auto& X : g.horizontal_fields()) grads.emplace_back(apply_field(X, w), &g);
  for (const auto& x : d.nodes) {
    double s = 0.0;
    for (const auto& gr : grads) s += std::pow(gr(x), 2);
    double wx = wf(x);
    rep.max_log_gradient = std::max(rep.max_log_gradient, std::sqrt(s) / wx);
    rep.max_sqrt_gradient = std::max(rep.max_sqrt_gradient, std::sqrt(s / wx));
  }
  if (!std::isfinite(rep.max_log_gradient) || rep.max_log_gradient > 1e8)
    rep.warnings.push_back("|grad w| / w blows up on the grid");
  if (!std::isfinite(rep.max_sqrt_gradient) || rep.max_sqrt_gradient > 1e8)
    rep.warnings.push_back("|grad w| / sqrt(w) blows up on the grid");

  AssembleOptions wo;
  wo.weight = wf;
  SparseOperator qw = assemble(d, ScalarField{}, wo);
  SparseOperator qv = assemble(d, vf);
  auto ew = smallest_eigenvalues(qw, k, opts);
  auto ev = smallest_eigenvalues(qv, k, opts);
  rep.weighted = ew.values;
  rep.schrodinger = ev.values;
  for (int i = 0; i < k; ++i) rep.differences.push_back(ew.values[i] - ev.values[i]);
  return rep;
}

}  // namespace subspec

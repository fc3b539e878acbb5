#pragma once

#include <cstddef>
#include <vector>

#include "subspec/error.hpp"
#include "subspec/linalg_exact.hpp"
#include "subspec/polynomial.hpp"

namespace subspec {

enum class FieldKind { LeftInvariant, RightInvariant, General };

/// First-order operator sum_i a_i(x) d/dx_i with polynomial coefficients.
struct VectorFieldOp {
  std::vector<Polynomial> coefficients;
  FieldKind kind = FieldKind::General;
  std::size_t index = 0;  // basis index for invariant fields

  std::size_t dim() const { return coefficients.size(); }

  Polynomial apply(const Polynomial& p) const {
    Polynomial out(p.nvars());
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
      if (coefficients[i].is_zero()) continue;
      Polynomial d = p.derivative(i);
      if (!d.is_zero()) out += coefficients[i] * d;
    }
    return out;
  }

  bool is_zero() const {
    for (const auto& c : coefficients)
      if (!c.is_zero()) return false;
    return true;
  }

  friend bool operator==(const VectorFieldOp& a, const VectorFieldOp& b) { return a.coefficients == b.coefficients; }
};

/// [U, V] as differential operators: component i is U(v_i) - V(u_i).
inline VectorFieldOp commutator(const VectorFieldOp& u, const VectorFieldOp& v) {
  VectorFieldOp out;
  for (std::size_t i = 0; i < u.dim(); ++i) out.coefficients.push_back(u.apply(v.coefficients[i]) - v.apply(u.coefficients[i]));
  return out;
}

/// sum_k weights[k] * fields[k]
inline VectorFieldOp linear_combination(const std::vector<VectorFieldOp>& fields, const RationalVector& weights) {
  if (fields.empty() || fields.size() != weights.size())
    throw Error(ErrorKind::InvalidArgument, "linear_combination: size mismatch");
  VectorFieldOp out;
  std::size_t n = fields.front().dim();
  std::size_t nv = fields.front().coefficients.front().nvars();
  out.coefficients.assign(n, Polynomial(nv));
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (weights[k] == 0) continue;
    for (std::size_t i = 0; i < n; ++i) out.coefficients[i] += fields[k].coefficients[i] * weights[k];
  }
  return out;
}

}  // namespace subspec

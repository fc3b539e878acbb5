#pragma once

#include <cstddef>
#include <vector>

#include "subspec/rational.hpp"

namespace subspec {

using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>;  // row-major

struct RowEchelon {
  RationalMatrix rows;              // nonzero rows of the reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column of each row
};

/// Reduced row echelon form over Q; the result is unique, hence deterministic.
inline RowEchelon reduced_row_echelon(RationalMatrix m, std::size_t ncols) {
  RowEchelon out;
  std::size_t r = 0;
  for (std::size_t col = 0; col < ncols && r < m.size(); ++col) {
    std::size_t pivot = r;
    while (pivot < m.size() && m[pivot][col] == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[r], m[pivot]);
    Rational inv = 1 / m[r][col];
    for (auto& v : m[r]) v *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][col] == 0) continue;
      Rational f = m[i][col];
      for (std::size_t j = col; j < ncols; ++j) m[i][j] -= f * m[r][j];
    }
    out.pivots.push_back(col);
    ++r;
  }
  m.resize(r);
  out.rows = std::move(m);
  return out;
}

inline std::size_t rank(const RationalMatrix& m, std::size_t ncols) {
  return reduced_row_echelon(m, ncols).pivots.size();
}

/// Basis of {v : m v = 0}, one vector per free column in increasing column order.
inline std::vector<RationalVector> nullspace(const RationalMatrix& m, std::size_t ncols) {
  RowEchelon rre = reduced_row_echelon(m, ncols);
  std::vector<bool> is_pivot(ncols, false);
  for (auto p : rre.pivots) is_pivot[p] = true;
  std::vector<RationalVector> basis;
  for (std::size_t free = 0; free < ncols; ++free) {
    if (is_pivot[free]) continue;
    RationalVector v(ncols, Rational(0));
    v[free] = 1;
    for (std::size_t i = 0; i < rre.rows.size(); ++i) v[rre.pivots[i]] = -rre.rows[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace subspec

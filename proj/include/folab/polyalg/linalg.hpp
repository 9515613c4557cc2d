#pragma once

#include <vector>

#include "folab/polyalg/exact_complex.hpp"

namespace folab {

template <class S>
using Matrix = std::vector<std::vector<S>>;

inline bool field_is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool field_is_zero(const ExactComplex& z) { return z.is_zero(); }

/// Basis of the right kernel of an exact matrix with `cols` columns (reduced row echelon form).
template <class S>
std::vector<std::vector<S>> kernel_basis(Matrix<S> m, std::size_t cols) {
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t p = row;
    while (p < m.size() && field_is_zero(m[p][col])) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[row]);
    S inv = S(1) / m[row][col];
    for (auto& v : m[row]) v = v * inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || field_is_zero(m[r][col])) continue;
      S f = m[r][col];
      for (std::size_t c = 0; c < cols; ++c) m[r][c] = m[r][c] - f * m[row][c];
    }
    pivot_cols.push_back(col);
    ++row;
  }
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<S>> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<S> v(cols, S(0));
    v[free] = S(1);
    for (std::size_t r = 0; r < pivot_cols.size(); ++r) v[pivot_cols[r]] = -m[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class S>
std::size_t matrix_rank(const Matrix<S>& m, std::size_t cols) {
  return cols - kernel_basis(m, cols).size();
}

}  // namespace folab

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "folab/polyalg/poly1.hpp"

namespace folab {

/// Quotient a / b when b divides a exactly; nullopt otherwise.
inline std::optional<Poly2> exact_division(const Poly2& a, const Poly2& b) {
  if (b.is_zero()) throw DomainError("division by the zero polynomial");
  if (a.is_zero()) return Poly2{};
  if (a.degree() < b.degree()) return std::nullopt;
  auto [lm_b, lc_b] = b.leading_term();
  ExactComplex inv = lc_b.inverse();
  Poly2 q, r = a;
  while (!r.is_zero()) {
    auto [lm_r, lc_r] = r.leading_term();
    if (lm_r.i < lm_b.i || lm_r.j < lm_b.j) return std::nullopt;
    Poly2 t = Poly2::monomial(lc_r * inv, lm_r.i - lm_b.i, lm_r.j - lm_b.j);
    q += t;
    r -= t * b;
  }
  return q;
}

/// Leading coefficient of the lex-leading term normalised to one.
inline Poly2 normalize_unit(const Poly2& p) {
  if (p.is_zero()) return p;
  return p.leading_term().second.inverse() * p;
}

namespace detail {

using YPoly = std::vector<Poly1>;  // coefficients in y, each a polynomial in x

inline void trim(YPoly& p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

inline Poly1 content(const YPoly& p) {
  Poly1 g;
  for (const auto& c : p) g = gcd(g, c);
  return g;
}

inline YPoly primitive_part(const YPoly& p) {
  Poly1 c = content(p);
  YPoly r;
  for (const auto& coef : p) r.push_back(exact_quotient(coef, c));
  if (!r.empty()) {
    ExactComplex scale = r.back().leading().inverse();
    for (auto& coef : r) coef = coef * Poly1(scale);
  }
  return r;
}

// lc(b)^(deg a - deg b + 1) * a mod b
inline YPoly pseudo_remainder(YPoly a, const YPoly& b) {
  const int db = static_cast<int>(b.size()) - 1;
  const Poly1& lb = b.back();
  while (!a.empty() && static_cast<int>(a.size()) - 1 >= db) {
    int shift = static_cast<int>(a.size()) - 1 - db;
    Poly1 la = a.back();
    for (auto& c : a) c = lb * c;
    for (int k = 0; k <= db; ++k) a[k + shift] -= la * b[k];
    trim(a);
  }
  return a;
}

}  // namespace detail

/// Greatest common divisor of bivariate polynomials, normalised so its lex-leading
/// coefficient is one. Primitive remainder sequence in y over Q(i)[x].
inline Poly2 gcd2(const Poly2& a, const Poly2& b) {
  if (a.is_zero() && b.is_zero()) throw DomainError("gcd of two zero polynomials");
  if (a.is_zero()) return normalize_unit(b);
  if (b.is_zero()) return normalize_unit(a);
  detail::YPoly pa = coefficients_in(a, Axis::Y), pb = coefficients_in(b, Axis::Y);
  Poly1 cont = gcd(detail::content(pa), detail::content(pb));
  pa = detail::primitive_part(pa);
  pb = detail::primitive_part(pb);
  if (pa.size() < pb.size()) std::swap(pa, pb);
  detail::YPoly g;
  while (true) {
    if (pb.size() == 1) {  // degree zero in y and primitive: a unit
      g = {Poly1(ExactComplex(1))};
      break;
    }
    detail::YPoly r = detail::pseudo_remainder(pa, pb);
    if (r.empty()) {
      g = pb;
      break;
    }
    pa = std::move(pb);
    pb = detail::primitive_part(r);
  }
  for (auto& c : g) c = c * cont;
  return normalize_unit(from_coefficients_in(g, Axis::Y));
}

/// True when gcd2(a, b) is a nonzero constant.
inline bool coprime(const Poly2& a, const Poly2& b) { return gcd2(a, b).is_constant(); }

/// Determinant of a square matrix over Q(i)[t] by fraction-free Bareiss elimination.
inline Poly1 bareiss_determinant(std::vector<std::vector<Poly1>> m) {
  const std::size_t n = m.size();
  if (n == 0) return Poly1(ExactComplex(1));
  Poly1 prev(ExactComplex(1));
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k].is_zero()) ++swap_row;
      if (swap_row == n) return {};
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = exact_quotient(m[k][k] * m[i][j] - m[i][k] * m[k][j], prev);
      m[i][k] = Poly1{};
    }
    prev = m[k][k];
  }
  Poly1 det = m[n - 1][n - 1];
  return sign < 0 ? -det : det;
}

/// Resultant of a and b with respect to `eliminate`, as a polynomial in the other variable.
inline Poly1 resultant(const Poly2& a, const Poly2& b, Axis eliminate = Axis::Y) {
  if (a.is_zero() || b.is_zero()) return {};
  auto ca = coefficients_in(a, eliminate), cb = coefficients_in(b, eliminate);
  const int m = static_cast<int>(ca.size()) - 1, n = static_cast<int>(cb.size()) - 1;
  const int size = m + n;
  if (size == 0) return Poly1(ExactComplex(1));
  std::vector<std::vector<Poly1>> syl(size, std::vector<Poly1>(size));
  // rows hold coefficients from highest degree down
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) syl[r][r + k] = ca[m - k];
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) syl[n + r][r + k] = cb[n - k];
  return bareiss_determinant(std::move(syl));
}

}  // namespace folab

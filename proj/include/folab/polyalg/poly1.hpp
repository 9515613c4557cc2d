#pragma once

#include <string>
#include <utility>
#include <vector>

#include "folab/polyalg/poly2.hpp"

namespace folab {

/// Dense univariate polynomial, coefficients in increasing degree, no trailing zeros.
template <class S>
class BasicPoly1 {
 public:
  BasicPoly1() = default;
  explicit BasicPoly1(std::vector<S> coeffs) : c_(std::move(coeffs)) { trim(); }
  explicit BasicPoly1(const S& constant) : c_{constant} { trim(); }

  static BasicPoly1 x() { return BasicPoly1(std::vector<S>{S{}, S(1)}); }
  static BasicPoly1 monomial(const S& c, int k) {
    std::vector<S> v(static_cast<std::size_t>(k) + 1);
    v.back() = c;
    return BasicPoly1(std::move(v));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  const std::vector<S>& coeffs() const { return c_; }
  S coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : S{}; }
  const S& leading() const {
    if (c_.empty()) throw DomainError("leading coefficient of zero polynomial");
    return c_.back();
  }

  /// Largest k with x^k dividing the polynomial (0 for zero).
  int valuation() const {
    for (std::size_t k = 0; k < c_.size(); ++k)
      if (!ScalarTraits<S>::is_zero(c_[k])) return static_cast<int>(k);
    return 0;
  }

  BasicPoly1 operator-() const {
    BasicPoly1 r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
  }
  BasicPoly1& operator+=(const BasicPoly1& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  BasicPoly1& operator-=(const BasicPoly1& o) { return *this += -o; }
  friend BasicPoly1 operator+(BasicPoly1 a, const BasicPoly1& b) { return a += b; }
  friend BasicPoly1 operator-(BasicPoly1 a, const BasicPoly1& b) { return a -= b; }
  friend BasicPoly1 operator*(const BasicPoly1& a, const BasicPoly1& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<S> r(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (ScalarTraits<S>::is_zero(a.c_[i])) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    return BasicPoly1(std::move(r));
  }
  friend BasicPoly1 operator*(const S& s, const BasicPoly1& p) {
    std::vector<S> r = p.c_;
    for (auto& c : r) c = s * c;
    return BasicPoly1(std::move(r));
  }
  friend bool operator==(const BasicPoly1& a, const BasicPoly1& b) { return a.c_ == b.c_; }

  BasicPoly1 pow(int e) const {
    if (e < 0) throw DomainError("negative exponent in polynomial power");
    BasicPoly1 r(S(1)), b = *this;
    while (e > 0) {
      if (e & 1) r = r * b;
      e >>= 1;
      if (e > 0) b = b * b;
    }
    return r;
  }

  BasicPoly1 derivative() const {
    std::vector<S> r;
    for (std::size_t k = 1; k < c_.size(); ++k) r.push_back(S(static_cast<long>(k)) * c_[k]);
    return BasicPoly1(std::move(r));
  }

  BasicPoly1 shifted_down(int k) const {
    if (k > valuation() && !is_zero()) throw DomainError("x-power does not divide polynomial");
    if (is_zero()) return {};
    return BasicPoly1(std::vector<S>(c_.begin() + k, c_.end()));
  }

  /// Euclidean division over the coefficient field.
  std::pair<BasicPoly1, BasicPoly1> divmod(const BasicPoly1& d) const {
    if (d.is_zero()) throw DomainError("polynomial division by zero");
    BasicPoly1 q, r = *this;
    if (degree() < d.degree()) return {q, r};
    std::vector<S> qc(static_cast<std::size_t>(degree() - d.degree()) + 1);
    S inv_lead = S(1) / d.leading();
    while (!r.is_zero() && r.degree() >= d.degree()) {
      int shift = r.degree() - d.degree();
      S f = r.leading() * inv_lead;
      qc[shift] = f;
      std::vector<S> rc = r.c_;
      for (std::size_t k = 0; k < d.c_.size(); ++k) rc[k + shift] -= f * d.c_[k];
      rc.pop_back();
      r = BasicPoly1(std::move(rc));
    }
    return {BasicPoly1(std::move(qc)), r};
  }

  BasicPoly1 monic() const {
    if (is_zero()) return *this;
    return (S(1) / leading()) * *this;
  }

  template <class T>
  T evaluate(const T& v) const {
    T acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * v + T(*it);
    return acc;
  }

  ApproxComplex evaluate_approx(ApproxComplex v) const {
    ApproxComplex acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * v + ScalarTraits<S>::approx(*it);
    return acc;
  }

  /// Embed as a polynomial in the given variable of Poly2.
  BasicPoly2<S> to_poly2(Axis a = Axis::X) const {
    BasicPoly2<S> r;
    for (std::size_t k = 0; k < c_.size(); ++k)
      r.add_term(a == Axis::X ? Monomial{static_cast<int>(k), 0} : Monomial{0, static_cast<int>(k)},
                 c_[k]);
    return r;
  }

  std::string to_string(const std::string& var = "x") const { return to_poly2().to_string(var); }

 private:
  void trim() {
    while (!c_.empty() && ScalarTraits<S>::is_zero(c_.back())) c_.pop_back();
  }
  std::vector<S> c_;
};

using Poly1 = BasicPoly1<ExactComplex>;
using Poly1d = BasicPoly1<ApproxComplex>;

inline Poly1d to_approx(const Poly1& p) {
  std::vector<ApproxComplex> v;
  for (const auto& c : p.coeffs()) v.push_back(c.to_approx());
  return Poly1d(std::move(v));
}

/// Monic gcd over the coefficient field; gcd(0, 0) = 0.
inline Poly1 gcd(Poly1 a, Poly1 b) {
  while (!b.is_zero()) {
    auto r = a.divmod(b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// Quotient a / b, throwing if the division leaves a remainder.
inline Poly1 exact_quotient(const Poly1& a, const Poly1& b) {
  auto [q, r] = a.divmod(b);
  if (!r.is_zero()) throw DomainError("inexact univariate division");
  return q;
}

/// Restriction of a bivariate polynomial to a line through a coordinate:
/// Axis::X fixes x = value and returns a polynomial in y, and vice versa.
inline Poly1 restrict_to(const Poly2& p, Axis fixed, const ExactComplex& value) {
  std::vector<ExactComplex> c;
  for (const auto& [m, coef] : p.terms()) {
    int k = fixed == Axis::X ? m.j : m.i;
    int e = fixed == Axis::X ? m.i : m.j;
    if (static_cast<int>(c.size()) <= k) c.resize(static_cast<std::size_t>(k) + 1);
    c[k] += coef * value.pow(e);
  }
  return Poly1(std::move(c));
}

/// Coefficients of p viewed as a polynomial in `main` with coefficients in the other variable.
inline std::vector<Poly1> coefficients_in(const Poly2& p, Axis main) {
  std::vector<std::vector<ExactComplex>> raw(static_cast<std::size_t>(std::max(0, p.degree_in(main) + 1)));
  for (const auto& [m, c] : p.terms()) {
    int k = main == Axis::Y ? m.j : m.i;
    int e = main == Axis::Y ? m.i : m.j;
    auto& v = raw[k];
    if (static_cast<int>(v.size()) <= e) v.resize(static_cast<std::size_t>(e) + 1);
    v[e] += c;
  }
  std::vector<Poly1> out;
  for (auto& v : raw) out.emplace_back(std::move(v));
  return out;
}

inline Poly2 from_coefficients_in(const std::vector<Poly1>& coeffs, Axis main) {
  Poly2 r;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const auto& c = coeffs[k].coeffs();
    for (std::size_t e = 0; e < c.size(); ++e) {
      int ki = static_cast<int>(k), ei = static_cast<int>(e);
      r.add_term(main == Axis::Y ? Monomial{ei, ki} : Monomial{ki, ei}, c[e]);
    }
  }
  return r;
}

}  // namespace folab

#pragma once

#include <utility>

#include "folab/polyalg/poly1.hpp"

namespace folab {

/// Univariate rational function kept with gcd(num, den) = 1 and a monic denominator.
class RationalFunction1 {
 public:
  RationalFunction1(Poly1 num, Poly1 den) {
    if (den.is_zero()) throw DomainError("rational function with zero denominator");
    Poly1 g = gcd(num, den);
    if (!g.is_zero() && g.degree() > 0) {
      num = exact_quotient(num, g);
      den = exact_quotient(den, g);
    }
    ExactComplex lead = den.leading();
    num_ = lead.inverse() * num;
    den_ = den.monic();
  }

  const Poly1& numerator() const { return num_; }
  const Poly1& denominator() const { return den_; }

  /// Logarithmic derivative r'/r of a nonzero polynomial.
  static RationalFunction1 log_derivative(const Poly1& r) { return {r.derivative(), r}; }

 private:
  Poly1 num_, den_;
};

/// Coefficient of x^-1 in the Laurent expansion at 0, computed exactly by power-series
/// division after splitting the x-power off the denominator.
inline ExactComplex residue_at_zero(const RationalFunction1& r, int max_pole_order = 64) {
  const Poly1& num = r.numerator();
  const Poly1& den = r.denominator();
  int k = den.valuation();
  if (k == 0 || num.is_zero()) return {};
  if (k > max_pole_order)
    throw DomainError("pole order " + std::to_string(k) + " exceeds series depth " +
                      std::to_string(max_pole_order));
  Poly1 unit = den.shifted_down(k);
  // coefficient of x^(k-1) in num / unit
  const int n = k;
  std::vector<ExactComplex> inv(n);
  ExactComplex u0inv = unit.coeff(0).inverse();
  inv[0] = u0inv;
  for (int m = 1; m < n; ++m) {
    ExactComplex acc;
    for (int j = 1; j <= m; ++j) acc += unit.coeff(j) * inv[m - j];
    inv[m] = -(acc * u0inv);
  }
  ExactComplex res;
  for (int j = 0; j < n; ++j) res += num.coeff(j) * inv[n - 1 - j];
  return res;
}

}  // namespace folab

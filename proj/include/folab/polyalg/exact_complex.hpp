#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <ostream>
#include <string>

#include "folab/error.hpp"

namespace folab {

using Rational = mpq_class;
using ApproxComplex = std::complex<double>;

/// Gaussian rational a + b*i with both parts kept in lowest terms.
class ExactComplex {
 public:
  ExactComplex() = default;
  ExactComplex(long v) : re_(v), im_(0) {}  // NOLINT(google-explicit-constructor)
  ExactComplex(Rational re) : re_(std::move(re)), im_(0) { re_.canonicalize(); }  // NOLINT
  ExactComplex(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static ExactComplex i() { return {Rational(0), Rational(1)}; }
  static ExactComplex fraction(long num, long den) {
    if (den == 0) throw DomainError("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return ExactComplex(q);
  }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

  ExactComplex conj() const { return {re_, -im_}; }
  Rational norm2() const { return re_ * re_ + im_ * im_; }

  ExactComplex operator-() const { return {-re_, -im_}; }
  ExactComplex& operator+=(const ExactComplex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  ExactComplex& operator-=(const ExactComplex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  ExactComplex& operator*=(const ExactComplex& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    Rational m = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(m);
    return *this;
  }
  ExactComplex& operator/=(const ExactComplex& o) {
    if (o.is_zero()) throw DomainError("division by zero in Gaussian rationals");
    Rational n = o.norm2();
    Rational r = (re_ * o.re_ + im_ * o.im_) / n;
    Rational m = (im_ * o.re_ - re_ * o.im_) / n;
    re_ = std::move(r);
    im_ = std::move(m);
    return *this;
  }

  friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
  friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
  friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
  friend ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  ApproxComplex to_approx() const { return {re_.get_d(), im_.get_d()}; }

  ExactComplex inverse() const { return ExactComplex(1) / *this; }

  ExactComplex pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    ExactComplex result(1), base = *this;
    while (e > 0) {
      if (e & 1) result *= base;
      base *= base;
      e >>= 1;
    }
    return result;
  }

  /// Canonical text form, parseable by parse_poly: "3", "-1/2", "2i", "1/2+3/4i".
  std::string to_string() const {
    if (sgn(im_) == 0) return re_.get_str();
    std::string im_part;
    Rational a = abs(im_);
    if (a != 1) im_part = a.get_str();
    im_part += "i";
    if (sgn(re_) == 0) return (sgn(im_) < 0 ? "-" : "") + im_part;
    return re_.get_str() + (sgn(im_) < 0 ? "-" : "+") + im_part;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExactComplex& z) {
    return os << z.to_string();
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

inline ExactComplex make_exact(long re, long im = 0) {
  return {Rational(re), Rational(im)};
}

/// Exact binary value of a finite double.
inline Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite value cannot be made exact");
  Rational q(v);
  q.canonicalize();
  return q;
}

inline std::optional<Rational> rational_sqrt(const Rational& q) {
  if (sgn(q) < 0) return std::nullopt;
  if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t()))
    return std::nullopt;
  mpz_class n, d;
  mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
  Rational r(n, d);
  r.canonicalize();
  return r;
}

/// Square root inside Q(i) when it exists (principal branch: Re > 0, or Re = 0 and Im >= 0).
inline std::optional<ExactComplex> exact_sqrt(const ExactComplex& z) {
  if (z.is_zero()) return ExactComplex{};
  if (z.is_real()) {
    if (sgn(z.re()) > 0) {
      auto r = rational_sqrt(z.re());
      if (!r) return std::nullopt;
      return ExactComplex(*r);
    }
    auto r = rational_sqrt(-z.re());
    if (!r) return std::nullopt;
    return ExactComplex(Rational(0), *r);
  }
  auto modulus = rational_sqrt(z.norm2());
  if (!modulus) return std::nullopt;
  auto p = rational_sqrt((z.re() + *modulus) / 2);
  if (!p || sgn(*p) == 0) return std::nullopt;
  Rational q = z.im() / (2 * *p);
  return ExactComplex(*p, q);
}

/// Best rational approximation with denominator <= max_den (continued fractions).
inline Rational best_rational(double v, long max_den) {
  if (!std::isfinite(v)) throw DomainError("non-finite value");
  Rational x = rational_from_double(v);
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Rational rest = x;
  for (int iter = 0; iter < 200; ++iter) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
    mpz_class q2 = a * q1 + q0;
    if (q2 > max_den) {
      // best semiconvergent bounded by max_den
      mpz_class k = (mpz_class(max_den) - q0) / q1;
      mpz_class ps = k * p1 + p0, qs = k * q1 + q0;
      Rational cand1(p1, q1), cand2(ps, qs);
      cand1.canonicalize();
      cand2.canonicalize();
      return abs(cand2 - x) < abs(cand1 - x) ? cand2 : cand1;
    }
    mpz_class p2 = a * p1 + p0;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    Rational frac = rest - Rational(a);
    if (sgn(frac) == 0) break;
    rest = 1 / frac;
  }
  Rational r(p1, q1);
  r.canonicalize();
  return r;
}

/// Gaussian rational within rel_tol of z whose parts have denominators <= max_den, if any.
inline std::optional<ExactComplex> rationalize(ApproxComplex z, long max_den = 1000000,
                                               double rel_tol = 1e-9) {
  Rational re = best_rational(z.real(), max_den);
  Rational im = best_rational(z.imag(), max_den);
  ExactComplex cand(re, im);
  double scale = std::max(1.0, std::abs(z));
  if (std::abs(cand.to_approx() - z) > rel_tol * scale) return std::nullopt;
  return cand;
}

}  // namespace folab

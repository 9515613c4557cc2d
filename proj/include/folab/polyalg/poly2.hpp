#pragma once

#include <algorithm>
#include <compare>
#include <type_traits>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "folab/polyalg/exact_complex.hpp"

namespace folab {

enum class Axis { X = 0, Y = 1 };

/// Returned by order() for the zero polynomial.
inline constexpr int kInfiniteOrder = std::numeric_limits<int>::max();

struct Monomial {
  int i = 0;  // exponent of the first variable
  int j = 0;  // exponent of the second variable
  int degree() const { return i + j; }
  auto operator<=>(const Monomial&) const = default;
};

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<ExactComplex> {
  static bool is_zero(const ExactComplex& s) { return s.is_zero(); }
  static ApproxComplex approx(const ExactComplex& s) { return s.to_approx(); }
  static std::string text(const ExactComplex& s) { return s.to_string(); }
};

template <>
struct ScalarTraits<ApproxComplex> {
  static bool is_zero(const ApproxComplex& s) { return s == ApproxComplex{}; }
  static ApproxComplex approx(const ApproxComplex& s) { return s; }
  static std::string text(const ApproxComplex& s) {
    std::ostringstream os;
    os.precision(17);
    if (s.imag() == 0.0) {
      os << s.real();
    } else {
      os << "(" << s.real() << (s.imag() < 0 ? "-" : "+") << std::abs(s.imag()) << "i)";
    }
    return os.str();
  }
};

/// Sparse bivariate polynomial; no zero coefficient is ever stored.
template <class S>
class BasicPoly2 {
 public:
  using Scalar = S;
  using Terms = std::map<Monomial, S>;

  BasicPoly2() = default;
  explicit BasicPoly2(const S& c) { add_term({0, 0}, c); }

  static BasicPoly2 constant(const S& c) { return BasicPoly2(c); }
  static BasicPoly2 monomial(const S& c, int i, int j) {
    BasicPoly2 p;
    p.add_term({i, j}, c);
    return p;
  }
  static BasicPoly2 x() { return monomial(S(1), 1, 0); }
  static BasicPoly2 y() { return monomial(S(1), 0, 1); }
  static BasicPoly2 variable(Axis a) { return a == Axis::X ? x() : y(); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Monomial{0, 0});
  }

  S coeff(int i, int j) const {
    auto it = terms_.find({i, j});
    return it == terms_.end() ? S{} : it->second;
  }
  S constant_term() const { return coeff(0, 0); }

  void add_term(Monomial m, const S& c) {
    if (m.i < 0 || m.j < 0) throw DomainError("negative exponent in polynomial term");
    if (ScalarTraits<S>::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (ScalarTraits<S>::is_zero(it->second)) terms_.erase(it);
    }
  }

  /// Total degree; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  /// Minimal total degree of a term; kInfiniteOrder for zero.
  int order() const {
    int o = kInfiniteOrder;
    for (const auto& [m, c] : terms_) o = std::min(o, m.degree());
    return o;
  }

  int degree_in(Axis a) const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, a == Axis::X ? m.i : m.j);
    return d;
  }

  /// Largest power of the variable dividing every term (0 for the zero polynomial).
  int valuation_in(Axis a) const {
    if (terms_.empty()) return 0;
    int v = std::numeric_limits<int>::max();
    for (const auto& [m, c] : terms_) v = std::min(v, a == Axis::X ? m.i : m.j);
    return v;
  }

  BasicPoly2 homogeneous_part(int d) const {
    BasicPoly2 r;
    for (const auto& [m, c] : terms_)
      if (m.degree() == d) r.terms_.emplace(m, c);
    return r;
  }

  BasicPoly2 truncated(int max_degree) const {
    BasicPoly2 r;
    for (const auto& [m, c] : terms_)
      if (m.degree() <= max_degree) r.terms_.emplace(m, c);
    return r;
  }

  /// Leading term for lex order with the first variable dominant.
  std::pair<Monomial, S> leading_term() const {
    if (terms_.empty()) throw DomainError("leading term of zero polynomial");
    return *terms_.rbegin();
  }

  BasicPoly2 operator-() const {
    BasicPoly2 r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }
  BasicPoly2& operator+=(const BasicPoly2& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  BasicPoly2& operator-=(const BasicPoly2& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend BasicPoly2 operator+(BasicPoly2 a, const BasicPoly2& b) { return a += b; }
  friend BasicPoly2 operator-(BasicPoly2 a, const BasicPoly2& b) { return a -= b; }

  friend BasicPoly2 operator*(const BasicPoly2& a, const BasicPoly2& b) {
    BasicPoly2 r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term({ma.i + mb.i, ma.j + mb.j}, ca * cb);
    return r;
  }
  BasicPoly2& operator*=(const BasicPoly2& o) { return *this = *this * o; }

  friend BasicPoly2 operator*(const S& s, const BasicPoly2& p) {
    BasicPoly2 r;
    if (ScalarTraits<S>::is_zero(s)) return r;
    for (const auto& [m, c] : p.terms_) r.add_term(m, s * c);
    return r;
  }
  friend BasicPoly2 operator*(const BasicPoly2& p, const S& s) { return s * p; }

  friend bool operator==(const BasicPoly2& a, const BasicPoly2& b) { return a.terms_ == b.terms_; }

  BasicPoly2 pow(int e) const {
    if (e < 0) throw DomainError("negative exponent in polynomial power");
    BasicPoly2 result(S(1)), base = *this;
    while (e > 0) {
      if (e & 1) result *= base;
      e >>= 1;
      if (e > 0) base *= base;
    }
    return result;
  }

  /// Multiplication by x^i y^j.
  BasicPoly2 shifted(int di, int dj) const {
    BasicPoly2 r;
    for (const auto& [m, c] : terms_) r.add_term({m.i + di, m.j + dj}, c);
    return r;
  }

  /// Exact division by x^i y^j; throws if some term is not divisible.
  BasicPoly2 unshifted(int di, int dj) const {
    BasicPoly2 r;
    for (const auto& [m, c] : terms_) {
      if (m.i < di || m.j < dj) throw DomainError("monomial does not divide polynomial");
      r.add_term({m.i - di, m.j - dj}, c);
    }
    return r;
  }

  BasicPoly2 derivative(Axis a) const {
    BasicPoly2 r;
    for (const auto& [m, c] : terms_) {
      if (a == Axis::X && m.i > 0) r.add_term({m.i - 1, m.j}, S(m.i) * c);
      if (a == Axis::Y && m.j > 0) r.add_term({m.i, m.j - 1}, S(m.j) * c);
    }
    return r;
  }

  BasicPoly2 swapped() const {
    BasicPoly2 r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(Monomial{m.j, m.i}, c);
    return r;
  }

  /// Ring homomorphism x -> u, y -> v.
  BasicPoly2 substitute(const BasicPoly2& u, const BasicPoly2& v) const {
    std::vector<BasicPoly2> upow{BasicPoly2(S(1))}, vpow{BasicPoly2(S(1))};
    BasicPoly2 r;
    for (const auto& [m, c] : terms_) {
      while (static_cast<int>(upow.size()) <= m.i) upow.push_back(upow.back() * u);
      while (static_cast<int>(vpow.size()) <= m.j) vpow.push_back(vpow.back() * v);
      r += c * (upow[m.i] * vpow[m.j]);
    }
    return r;
  }

  BasicPoly2 translated(const S& dx, const S& dy) const {
    return substitute(x() + BasicPoly2(dx), y() + BasicPoly2(dy));
  }

  template <class T>
  T evaluate(const T& xv, const T& yv) const {
    T acc{};
    for (const auto& [m, c] : terms_) {
      T term = T(c);
      for (int k = 0; k < m.i; ++k) term *= xv;
      for (int k = 0; k < m.j; ++k) term *= yv;
      acc += term;
    }
    return acc;
  }

  ApproxComplex evaluate_approx(ApproxComplex xv, ApproxComplex yv) const {
    ApproxComplex acc{};
    for (const auto& [m, c] : terms_)
      acc += ScalarTraits<S>::approx(c) * std::pow(xv, m.i) * std::pow(yv, m.j);
    return acc;
  }

  /// Sum of |c|*|x|^i*|y|^j: the natural scale of a numeric evaluation.
  double evaluation_scale(ApproxComplex xv, ApproxComplex yv) const {
    double s = 0.0;
    for (const auto& [m, c] : terms_)
      s += std::abs(ScalarTraits<S>::approx(c)) * std::pow(std::abs(xv), m.i) *
           std::pow(std::abs(yv), m.j);
    return s;
  }

  template <class F>
  auto map_coefficients(F&& f) const {
    using T = std::decay_t<decltype(f(std::declval<const S&>()))>;
    BasicPoly2<T> r;
    for (const auto& [m, c] : terms_) r.add_term(m, f(c));
    return r;
  }

  std::string to_string(const std::string& xname = "x", const std::string& yname = "y") const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    // Graded order, highest degree first, for readability.
    std::vector<std::pair<Monomial, S>> sorted(terms_.begin(), terms_.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      if (a.first.degree() != b.first.degree()) return a.first.degree() > b.first.degree();
      return a.first.i > b.first.i;
    });
    for (const auto& [m, c] : sorted) {
      std::string mono;
      auto append = [&](const std::string& name, int e) {
        if (e == 0) return;
        if (!mono.empty()) mono += "*";
        mono += name;
        if (e > 1) mono += "^" + std::to_string(e);
      };
      append(xname, m.i);
      append(yname, m.j);
      std::string ctext = ScalarTraits<S>::text(c);
      bool negative = false;
      if constexpr (std::is_same_v<S, ExactComplex>) {
        if (c.is_real() && sgn(c.re()) < 0) {
          negative = true;
          ctext = ScalarTraits<S>::text(-c);
        } else if (!c.is_real() && sgn(c.re()) == 0 && sgn(c.im()) < 0) {
          negative = true;
          ctext = ScalarTraits<S>::text(-c);
        }
        if (!c.is_real() && sgn(c.re()) != 0) ctext = "(" + ctext + ")";
      }
      std::string piece;
      if (mono.empty()) {
        piece = ctext;
      } else if (ctext == "1") {
        piece = mono;
      } else {
        piece = ctext + "*" + mono;
      }
      if (first) {
        out += negative ? "-" + piece : piece;
      } else {
        out += negative ? " - " + piece : " + " + piece;
      }
      first = false;
    }
    return out;
  }

 private:
  Terms terms_;
};

using Poly2 = BasicPoly2<ExactComplex>;
using Poly2d = BasicPoly2<ApproxComplex>;

inline Poly2d to_approx(const Poly2& p) {
  return p.map_coefficients([](const ExactComplex& c) { return c.to_approx(); });
}

inline std::ostream& operator<<(std::ostream& os, const Poly2& p) { return os << p.to_string(); }

}  // namespace folab

#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "folab/polyalg.hpp"

namespace folab {

/// Affine charts of CP(2): XY is the standard chart, UV has u = 1/x, v = y/x and RS has
/// r = 1/y, s = x/y.
enum class Chart { XY, UV, RS };

inline std::string chart_name(Chart c) {
  switch (c) {
    case Chart::XY: return "XY";
    case Chart::UV: return "UV";
    case Chart::RS: return "RS";
  }
  return "?";
}

inline Chart parse_chart(const std::string& s) {
  if (s == "XY" || s == "xy") return Chart::XY;
  if (s == "UV" || s == "uv") return Chart::UV;
  if (s == "RS" || s == "rs") return Chart::RS;
  throw DomainError("unknown chart '" + s + "'");
}

inline std::array<std::string, 2> chart_variables(Chart c) {
  switch (c) {
    case Chart::XY: return {"x", "y"};
    case Chart::UV: return {"u", "v"};
    case Chart::RS: return {"r", "s"};
  }
  return {"x", "y"};
}

/// omega = P dy - Q dx on one chart; the dual vector field is P d/dx + Q d/dy.
/// `removed_factor` is the common factor divided out on construction (1 when none).
struct AffineFoliation1Form {
  Poly2 P, Q;
  Chart chart = Chart::XY;
  Poly2 removed_factor = Poly2(ExactComplex(1));

  int degree() const { return std::max(P.degree(), Q.degree()); }

  std::string field_string() const {
    auto [a, b] = chart_variables(chart);
    return "(" + P.to_string(a, b) + ", " + Q.to_string(a, b) + ")";
  }
  std::string form_string() const {
    auto [a, b] = chart_variables(chart);
    return "(" + P.to_string(a, b) + ")*d" + b + " - (" + Q.to_string(a, b) + ")*d" + a;
  }
};

inline AffineFoliation1Form make_foliation(const Poly2& P, const Poly2& Q, Chart chart = Chart::XY) {
  if (P.is_zero() && Q.is_zero()) throw DomainError("foliation needs (P, Q) != (0, 0)");
  Poly2 g = gcd2(P, Q);
  AffineFoliation1Form f;
  f.chart = chart;
  if (g.is_constant()) {
    f.P = P;
    f.Q = Q;
    return f;
  }
  f.P = *exact_division(P, g);
  f.Q = *exact_division(Q, g);
  f.removed_factor = g;
  return f;
}

/// Reads "P*dy - Q*dx" in the XY chart.
inline AffineFoliation1Form foliation_from_form(std::string_view text) {
  auto [P, Q] = parse_form(text);
  return make_foliation(P, Q);
}

/// Same foliation up to a nonzero constant: P1*Q2 - P2*Q1 == 0 and both coprime.
inline bool same_foliation(const AffineFoliation1Form& a, const AffineFoliation1Form& b) {
  return a.chart == b.chart && (a.P * b.Q - b.P * a.Q).is_zero();
}

inline std::pair<ApproxComplex, ApproxComplex> evaluate_field(const AffineFoliation1Form& f,
                                                               ApproxComplex x, ApproxComplex y) {
  return {f.P.evaluate_approx(x, y), f.Q.evaluate_approx(x, y)};
}

// ---- singular set ----------------------------------------------------------

struct SingularPoint {
  ApproxComplex x, y;
  std::optional<std::pair<ExactComplex, ExactComplex>> exact;
  int multiplicity = 0;  // min(ord P, ord Q) at the point
  double residual = 0.0; // |P| + |Q| at the reported location

  bool is_exact() const { return exact.has_value(); }
  std::string location_string() const;
};

inline std::string approx_to_string(ApproxComplex z) {
  std::ostringstream os;
  os.precision(12);
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

inline std::string SingularPoint::location_string() const {
  if (exact) return "(" + exact->first.to_string() + ", " + exact->second.to_string() + ")";
  return "(" + approx_to_string(x) + ", " + approx_to_string(y) + ")";
}

/// Order of a numerically known polynomial, ignoring coefficients below `rel_tol` times its largest.
inline int numeric_order(const Poly2d& p, double rel_tol = 1e-8) {
  double big = 0.0;
  for (const auto& [m, c] : p.terms()) big = std::max(big, std::abs(c));
  int o = kInfiniteOrder;
  for (const auto& [m, c] : p.terms())
    if (std::abs(c) > rel_tol * std::max(1.0, big)) o = std::min(o, m.degree());
  return o;
}

inline AffineFoliation1Form translated(const AffineFoliation1Form& f, const ExactComplex& a,
                                       const ExactComplex& b) {
  AffineFoliation1Form g = f;
  g.P = f.P.translated(a, b);
  g.Q = f.Q.translated(a, b);
  return g;
}

inline std::pair<Poly2d, Poly2d> translated_numeric(const AffineFoliation1Form& f, ApproxComplex a,
                                                    ApproxComplex b) {
  return {to_approx(f.P).translated(a, b), to_approx(f.Q).translated(a, b)};
}

inline int singular_multiplicity(const AffineFoliation1Form& f, const SingularPoint& p) {
  if (p.exact) {
    auto g = translated(f, p.exact->first, p.exact->second);
    return std::min(g.P.order(), g.Q.order());
  }
  auto [P, Q] = translated_numeric(f, p.x, p.y);
  return std::min(numeric_order(P), numeric_order(Q));
}

namespace detail {

inline double field_residual(const Poly2d& P, const Poly2d& Q, ApproxComplex x, ApproxComplex y) {
  return std::abs(P.evaluate_approx(x, y)) + std::abs(Q.evaluate_approx(x, y));
}

inline double field_scale(const Poly2d& P, const Poly2d& Q, ApproxComplex x, ApproxComplex y) {
  return std::max(1.0, P.evaluation_scale(x, y) + Q.evaluation_scale(x, y));
}

inline void newton_polish(const Poly2d& P, const Poly2d& Q, ApproxComplex& x, ApproxComplex& y) {
  Poly2d Px = P.derivative(Axis::X), Py = P.derivative(Axis::Y);
  Poly2d Qx = Q.derivative(Axis::X), Qy = Q.derivative(Axis::Y);
  for (int it = 0; it < 8; ++it) {
    ApproxComplex p = P.evaluate_approx(x, y), q = Q.evaluate_approx(x, y);
    ApproxComplex a = Px.evaluate_approx(x, y), b = Py.evaluate_approx(x, y);
    ApproxComplex c = Qx.evaluate_approx(x, y), d = Qy.evaluate_approx(x, y);
    ApproxComplex det = a * d - b * c;
    if (std::abs(det) < 1e-10 * (std::abs(a * d) + std::abs(b * c) + 1e-300)) return;
    ApproxComplex dx = (d * p - b * q) / det, dy = (a * q - c * p) / det;
    ApproxComplex nx = x - dx, ny = y - dy;
    if (field_residual(P, Q, nx, ny) > field_residual(P, Q, x, y)) return;
    x = nx;
    y = ny;
    if (std::abs(dx) + std::abs(dy) < 1e-16 * (1 + std::abs(x) + std::abs(y))) return;
  }
}

}  // namespace detail

/// Singular set of an affine foliation. Candidates come from the roots of Res_y and Res_x; each
/// returned point satisfies |P| + |Q| <= tol * scale, and points with small-denominator Gaussian
/// rational coordinates are confirmed by exact evaluation.
inline std::vector<SingularPoint> find_singularities(const AffineFoliation1Form& f,
                                                     double tol = 1e-9) {
  std::vector<SingularPoint> out;
  if (f.P.is_zero() || f.Q.is_zero()) {
    // coprimality forces the other component to be a nonzero constant
    return out;
  }
  Poly1 rx = resultant(f.P, f.Q, Axis::Y), ry = resultant(f.P, f.Q, Axis::X);
  if (rx.is_zero() || ry.is_zero())
    throw Error("internal error: resultant vanishes identically for a coprime pair");
  if (rx.is_constant() || ry.is_constant()) return out;

  std::vector<ApproxComplex> xs, ys;
  for (const auto& r : roots_with_multiplicity(rx)) xs.push_back(r.value);
  for (const auto& r : roots_with_multiplicity(ry)) ys.push_back(r.value);

  Poly2d P = to_approx(f.P), Q = to_approx(f.Q);
  for (auto x0 : xs) {
    for (auto y0 : ys) {
      double scale = detail::field_scale(P, Q, x0, y0);
      if (detail::field_residual(P, Q, x0, y0) > 1e-6 * scale) continue;
      ApproxComplex x = x0, y = y0;
      detail::newton_polish(P, Q, x, y);
      SingularPoint sp;
      sp.x = x;
      sp.y = y;
      auto ex = rationalize(x), ey = rationalize(y);
      if (ex && ey && f.P.evaluate(*ex, *ey).is_zero() && f.Q.evaluate(*ex, *ey).is_zero()) {
        sp.exact = std::make_pair(*ex, *ey);
        sp.x = ex->to_approx();
        sp.y = ey->to_approx();
      }
      sp.residual = detail::field_residual(P, Q, sp.x, sp.y);
      if (!sp.exact && sp.residual > tol * detail::field_scale(P, Q, sp.x, sp.y)) continue;
      bool duplicate = std::any_of(out.begin(), out.end(), [&](const SingularPoint& o) {
        return std::abs(o.x - sp.x) + std::abs(o.y - sp.y) < 1e-7 * (1 + std::abs(sp.x) + std::abs(sp.y));
      });
      if (duplicate) continue;
      sp.multiplicity = singular_multiplicity(f, sp);
      out.push_back(sp);
    }
  }
  std::sort(out.begin(), out.end(), [](const SingularPoint& a, const SingularPoint& b) {
    auto key = [](const SingularPoint& p) {
      return std::array<double, 4>{p.x.real(), p.x.imag(), p.y.real(), p.y.imag()};
    };
    return key(a) < key(b);
  });
  return out;
}

// ---- charts of CP(2) ------------------------------------------------------------------------

struct ChartChange {
  AffineFoliation1Form form;  // common factor removed
  int ell = 0;                // power of the new first coordinate multiplied in to clear poles
  Poly2 raw_P, raw_Q;         // the field after multiplying by that power, before gcd removal
};

namespace detail {

// Push the field forward by (a, b) -> (c, d) = (1/a, b/a), an involution:
//   c' = -c^2 P(1/c, d/c),  d' = c Q(1/c, d/c) - c d P(1/c, d/c).
inline ChartChange invert_first(const Poly2& P, const Poly2& Q, Chart target) {
  const int D = std::max({P.degree(), Q.degree(), 0});
  auto homogenized = [D](const Poly2& p) {
    // c^D p(1/c, d/c)
    Poly2 r;
    for (const auto& [m, coef] : p.terms()) r.add_term({D - m.degree(), m.j}, coef);
    return r;
  };
  Poly2 A = homogenized(P), B = homogenized(Q);
  Poly2 c = Poly2::x(), d = Poly2::y();
  Poly2 U = -(c * c * A);           // c^D * c'
  Poly2 V = c * B - c * d * A;      // c^D * d'
  int v = kInfiniteOrder;
  if (!U.is_zero()) v = std::min(v, U.valuation_in(Axis::X));
  if (!V.is_zero()) v = std::min(v, V.valuation_in(Axis::X));
  ChartChange out;
  out.ell = std::max(0, D - v);
  int shift = out.ell - D;
  out.raw_P = shift >= 0 ? U.shifted(shift, 0) : U.unshifted(-shift, 0);
  out.raw_Q = shift >= 0 ? V.shifted(shift, 0) : V.unshifted(-shift, 0);
  out.form = make_foliation(out.raw_P, out.raw_Q, target);
  return out;
}

inline AffineFoliation1Form swap_coordinates(const AffineFoliation1Form& f, Chart target) {
  AffineFoliation1Form g = f;
  g.P = f.Q.swapped();
  g.Q = f.P.swapped();
  g.chart = target;
  return g;
}

inline ChartChange to_xy(const AffineFoliation1Form& f) {
  switch (f.chart) {
    case Chart::XY: return {f, 0, f.P, f.Q};
    case Chart::UV: return invert_first(f.P, f.Q, Chart::XY);
    case Chart::RS: {
      // (r, s) -> (1/r, s/r) = (y, x)
      ChartChange c = invert_first(f.P, f.Q, Chart::XY);
      c.form = swap_coordinates(c.form, Chart::XY);
      std::swap(c.raw_P, c.raw_Q);
      c.raw_P = c.raw_P.swapped();
      c.raw_Q = c.raw_Q.swapped();
      return c;
    }
  }
  throw DomainError("bad chart");
}

}  // namespace detail

/// Moves the foliation to another affine chart of CP(2). Poles along the line at infinity are
/// cleared by the smallest power `ell` of the new first coordinate; any remaining common factor
/// (a power of that coordinate) is then divided out so the result is again coprime.
inline ChartChange chart_change(const AffineFoliation1Form& f, Chart target) {
  if (f.chart == target) return {f, 0, f.P, f.Q};
  ChartChange to = detail::to_xy(f);
  if (target == Chart::XY) return to;
  const AffineFoliation1Form& g = to.form;
  if (target == Chart::UV) return detail::invert_first(g.P, g.Q, Chart::UV);
  AffineFoliation1Form s = detail::swap_coordinates(g, Chart::XY);
  return detail::invert_first(s.P, s.Q, Chart::RS);
}

/// Whether the line at infinity is a leaf closure (invariant) for a foliation given on XY.
inline bool line_at_infinity_invariant(const AffineFoliation1Form& f) {
  if (f.chart != Chart::XY) throw DomainError("line_at_infinity_invariant expects the XY chart");
  ChartChange c = chart_change(f, Chart::UV);
  return c.form.P.is_zero() || c.form.P.valuation_in(Axis::X) >= 1;
}

// ---- affine changes and pull-backs -----------------------------------------------------------

/// Field in new coordinates w where z = M w + b: X~(w) = M^{-1} X(M w + b).
inline AffineFoliation1Form affine_change(const AffineFoliation1Form& f,
                                          const std::array<std::array<ExactComplex, 2>, 2>& M,
                                          const std::array<ExactComplex, 2>& b) {
  ExactComplex det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
  if (det.is_zero()) throw DomainError("affine change with singular matrix");
  Poly2 X = Poly2::x(), Y = Poly2::y();
  Poly2 zx = M[0][0] * X + M[0][1] * Y + Poly2(b[0]);
  Poly2 zy = M[1][0] * X + M[1][1] * Y + Poly2(b[1]);
  Poly2 P = f.P.substitute(zx, zy), Q = f.Q.substitute(zx, zy);
  ExactComplex inv = det.inverse();
  AffineFoliation1Form g = f;
  g.P = inv * (M[1][1] * P - M[0][1] * Q);
  g.Q = inv * (M[0][0] * Q - M[1][0] * P);
  return g;
}

/// Quotient of two bivariate polynomials, kept unreduced until `reduced()` is called.
struct RationalFunction2 {
  Poly2 num, den = Poly2(ExactComplex(1));

  RationalFunction2() = default;
  RationalFunction2(Poly2 n) : num(std::move(n)) {}
  RationalFunction2(Poly2 n, Poly2 d) : num(std::move(n)), den(std::move(d)) {
    if (den.is_zero()) throw DomainError("rational function with zero denominator");
  }

  /// x^a y^b with integer (possibly negative) exponents.
  static RationalFunction2 laurent_monomial(int a, int b) {
    Poly2 n = Poly2::monomial(ExactComplex(1), std::max(a, 0), std::max(b, 0));
    Poly2 d = Poly2::monomial(ExactComplex(1), std::max(-a, 0), std::max(-b, 0));
    return {n, d};
  }

  friend RationalFunction2 operator+(const RationalFunction2& a, const RationalFunction2& b) {
    if (a.den == b.den) return {a.num + b.num, a.den};
    return {a.num * b.den + b.num * a.den, a.den * b.den};
  }
  friend RationalFunction2 operator-(const RationalFunction2& a, const RationalFunction2& b) {
    if (a.den == b.den) return {a.num - b.num, a.den};
    return {a.num * b.den - b.num * a.den, a.den * b.den};
  }
  friend RationalFunction2 operator*(const RationalFunction2& a, const RationalFunction2& b) {
    return {a.num * b.num, a.den * b.den};
  }
  RationalFunction2 derivative(Axis ax) const {
    return {num.derivative(ax) * den - num * den.derivative(ax), den * den};
  }
  RationalFunction2 reduced() const {
    if (num.is_zero()) return {Poly2{}, Poly2(ExactComplex(1))};
    Poly2 g = gcd2(num, den);
    Poly2 n = *exact_division(num, g), d = *exact_division(den, g);
    ExactComplex lead = d.leading_term().second.inverse();
    return {lead * n, lead * d};
  }
  bool is_zero() const { return num.is_zero(); }
};

/// p(F1, F2) for rational F1, F2.
inline RationalFunction2 compose(const Poly2& p, const RationalFunction2& F1,
                                 const RationalFunction2& F2) {
  const int d1 = p.degree_in(Axis::X), d2 = p.degree_in(Axis::Y);
  if (p.is_zero()) return {};
  std::vector<Poly2> n1{Poly2(ExactComplex(1))}, n2{Poly2(ExactComplex(1))};
  std::vector<Poly2> e1{Poly2(ExactComplex(1))}, e2{Poly2(ExactComplex(1))};
  for (int k = 1; k <= d1; ++k) {
    n1.push_back(n1.back() * F1.num);
    e1.push_back(e1.back() * F1.den);
  }
  for (int k = 1; k <= d2; ++k) {
    n2.push_back(n2.back() * F2.num);
    e2.push_back(e2.back() * F2.den);
  }
  Poly2 num;
  for (const auto& [m, c] : p.terms()) num += c * (n1[m.i] * e1[d1 - m.i] * n2[m.j] * e2[d2 - m.j]);
  return {num, e1[d1] * e2[d2]};
}

/// phi^* of the foliation: omega = P dy - Q dx pulled back by phi = (F1, F2), with denominators
/// and common factors cleared.
inline AffineFoliation1Form pullback(const AffineFoliation1Form& f, const RationalFunction2& F1,
                                     const RationalFunction2& F2) {
  RationalFunction2 F1x = F1.derivative(Axis::X), F1y = F1.derivative(Axis::Y);
  RationalFunction2 F2x = F2.derivative(Axis::X), F2y = F2.derivative(Axis::Y);
  if ((F1x * F2y - F1y * F2x).is_zero()) throw DomainError("degenerate map: Jacobian vanishes identically");
  RationalFunction2 Pp = compose(f.P, F1, F2), Qp = compose(f.Q, F1, F2);
  RationalFunction2 newP = (Pp * F2y - Qp * F1y).reduced();
  RationalFunction2 newQ = (Qp * F1x - Pp * F2x).reduced();
  Poly2 P = newP.num * newQ.den, Q = newQ.num * newP.den;
  return make_foliation(P, Q, f.chart);
}

inline AffineFoliation1Form pullback(const AffineFoliation1Form& f, const Poly2& F1, const Poly2& F2) {
  return pullback(f, RationalFunction2(F1), RationalFunction2(F2));
}

}  // namespace folab

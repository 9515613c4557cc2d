#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "folab/foliation.hpp"

namespace folab {

template <class S>
using Mat2 = std::array<std::array<S, 2>, 2>;

enum class Domain { Poincare, Siegel, SaddleNode, Nilpotent, DegenerateLinearPart };

inline std::string domain_name(Domain d) {
  switch (d) {
    case Domain::Poincare: return "Poincare";
    case Domain::Siegel: return "Siegel";
    case Domain::SaddleNode: return "SaddleNode";
    case Domain::Nilpotent: return "Nilpotent";
    case Domain::DegenerateLinearPart: return "DegenerateLinearPart";
  }
  return "?";
}

/// Jacobian of (P, Q) at a singular point together with its eigenvalues.
/// Eigenvalues are ordered so that for a triangular matrix lambda1 = J_yy and lambda2 = J_xx;
/// the ratio reported by `classify` is lambda1 / lambda2, which is mu / lambda for (lambda x, mu y).
struct LinearPart {
  std::optional<Mat2<ExactComplex>> exact;
  Mat2<ApproxComplex> J{};
  std::optional<std::array<ExactComplex, 2>> eigen_exact;
  std::array<ApproxComplex, 2> eigen{};
  double eigen_error = 0.0;

  bool is_exact() const { return exact.has_value(); }
};

namespace detail {

inline double mat_norm(const Mat2<ApproxComplex>& J) {
  double s = 0;
  for (auto& r : J)
    for (auto& c : r) s += std::norm(c);
  return std::sqrt(s);
}

inline Mat2<ApproxComplex> approx_matrix(const Mat2<ExactComplex>& J) {
  Mat2<ApproxComplex> out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = J[i][j].to_approx();
  return out;
}

inline LinearPart numeric_linear_part(const Mat2<ApproxComplex>& J) {
  LinearPart lp;
  lp.J = J;
  const double eps = std::numeric_limits<double>::epsilon();
  if (J[0][1] == ApproxComplex{} || J[1][0] == ApproxComplex{}) {
    lp.eigen = {J[1][1], J[0][0]};
    lp.eigen_error = eps * mat_norm(J);
    return lp;
  }
  ApproxComplex tr = J[0][0] + J[1][1], det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  ApproxComplex s = std::sqrt(tr * tr - 4.0 * det);
  // stable pair: larger root by formula, other from the product
  ApproxComplex big = (std::abs(tr + s) >= std::abs(tr - s)) ? (tr + s) / 2.0 : (tr - s) / 2.0;
  ApproxComplex small = big == ApproxComplex{} ? ApproxComplex{} : det / big;
  lp.eigen = {big, small};
  double sep = std::abs(s);
  lp.eigen_error = eps * mat_norm(J) * (1.0 + mat_norm(J) / std::max(sep, 1e-300));
  if (sep == 0.0) lp.eigen_error = std::sqrt(eps) * mat_norm(J);
  return lp;
}

}  // namespace detail

inline LinearPart linear_part(const Mat2<ExactComplex>& J) {
  LinearPart lp = detail::numeric_linear_part(detail::approx_matrix(J));
  lp.exact = J;
  if (J[0][1].is_zero() || J[1][0].is_zero()) {
    lp.eigen_exact = std::array<ExactComplex, 2>{J[1][1], J[0][0]};
  } else {
    ExactComplex tr = J[0][0] + J[1][1], det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (auto s = exact_sqrt(tr * tr - ExactComplex(4) * det)) {
      ExactComplex half = ExactComplex::fraction(1, 2);
      lp.eigen_exact = std::array<ExactComplex, 2>{half * (tr + *s), half * (tr - *s)};
    }
  }
  if (lp.eigen_exact) {
    lp.eigen = {(*lp.eigen_exact)[0].to_approx(), (*lp.eigen_exact)[1].to_approx()};
    lp.eigen_error = 0.0;
  }
  return lp;
}

inline LinearPart linear_part(const Mat2<ApproxComplex>& J) { return detail::numeric_linear_part(J); }

/// Linear part of the field at the origin of the given chart.
inline Mat2<ExactComplex> jacobian_at_origin(const Poly2& P, const Poly2& Q) {
  return {{{P.coeff(1, 0), P.coeff(0, 1)}, {Q.coeff(1, 0), Q.coeff(0, 1)}}};
}

inline LinearPart linear_part(const AffineFoliation1Form& f, const SingularPoint& p) {
  if (p.exact) {
    auto g = translated(f, p.exact->first, p.exact->second);
    if (!g.P.constant_term().is_zero() || !g.Q.constant_term().is_zero())
      throw DomainError("linear_part: point is not singular");
    return linear_part(jacobian_at_origin(g.P, g.Q));
  }
  auto [P, Q] = translated_numeric(f, p.x, p.y);
  Mat2<ApproxComplex> J{{{P.coeff(1, 0), P.coeff(0, 1)}, {Q.coeff(1, 0), Q.coeff(0, 1)}}};
  return linear_part(J);
}

// ---- classification ---------------------------------------------------------------------------

class AmbiguousClassification : public Error {
 public:
  AmbiguousClassification(ApproxComplex r, Rational nearest_rational)
      : Error("eigenvalue ratio " + approx_to_string(r) + " is within tolerance of the rational " +
              nearest_rational.get_str() + "; supply exact data"),
        ratio(r),
        nearest(std::move(nearest_rational)) {}
  ApproxComplex ratio;
  Rational nearest;
};

struct SingularityReport {
  LinearPart linear;
  std::optional<ExactComplex> ratio_exact;
  std::optional<ApproxComplex> ratio;
  Domain domain = Domain::DegenerateLinearPart;
  std::optional<int> resonance;
  bool irreducible = false;
  std::optional<Rational> rational_ratio;
  bool exact_decision = false;  // every decision above was made in exact arithmetic
};

struct ClassifyOptions {
  double delta = 1e-9;
  long max_denominator = 1000000;
};

namespace detail {

inline std::optional<int> natural_at_least_two(const Rational& r) {
  if (r.get_den() != 1 || r < 2) return std::nullopt;
  if (r > 1000000) return std::nullopt;
  return static_cast<int>(r.get_num().get_si());
}

inline SingularityReport classify_exact(const LinearPart& lp) {
  SingularityReport rep;
  rep.linear = lp;
  rep.exact_decision = true;
  const auto& J = *lp.exact;
  ExactComplex tr = J[0][0] + J[1][1], det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  bool all_zero = J[0][0].is_zero() && J[0][1].is_zero() && J[1][0].is_zero() && J[1][1].is_zero();
  if (det.is_zero()) {
    if (!tr.is_zero()) {
      rep.domain = Domain::SaddleNode;
      rep.irreducible = true;
    } else {
      rep.domain = all_zero ? Domain::DegenerateLinearPart : Domain::Nilpotent;
    }
    return rep;
  }
  if (lp.eigen_exact) {
    ExactComplex r = (*lp.eigen_exact)[0] / (*lp.eigen_exact)[1];
    rep.ratio_exact = r;
    rep.ratio = r.to_approx();
    bool real = r.is_real();
    if (real) rep.rational_ratio = r.re();
    rep.domain = (real && sgn(r.re()) < 0) ? Domain::Siegel : Domain::Poincare;
    bool positive_rational = real && sgn(r.re()) > 0;
    rep.irreducible = !positive_rational;
    if (real) {
      if (auto k = natural_at_least_two(r.re())) rep.resonance = k;
      else if (sgn(r.re()) != 0) {
        if (auto k2 = natural_at_least_two(1 / r.re())) rep.resonance = k2;
      }
    }
    return rep;
  }
  // Eigenvalues in a quadratic extension: the ratio r satisfies r + 1/r = sigma with
  // sigma = (tr^2 - 2 det) / det, and r is rational only when tr = 0 (then r = -1).
  ExactComplex sigma = (tr * tr - ExactComplex(2) * det) / det;
  rep.ratio = lp.eigen[0] / lp.eigen[1];
  if (tr.is_zero()) {
    rep.ratio_exact = ExactComplex(-1);
    rep.ratio = ApproxComplex(-1.0);
    rep.rational_ratio = Rational(-1);
    rep.domain = Domain::Siegel;
    rep.irreducible = true;
    return rep;
  }
  rep.domain = (sigma.is_real() && sigma.re() <= -2) ? Domain::Siegel : Domain::Poincare;
  rep.irreducible = true;
  return rep;
}

inline SingularityReport classify_numeric(const LinearPart& lp, const ClassifyOptions& opt) {
  SingularityReport rep;
  rep.linear = lp;
  const double scale = std::max(1.0, mat_norm(lp.J));
  const double zero_tol = opt.delta * scale + lp.eigen_error;
  auto [l1, l2] = lp.eigen;
  bool z1 = std::abs(l1) <= zero_tol, z2 = std::abs(l2) <= zero_tol;
  if (z1 && z2) {
    bool all_zero = mat_norm(lp.J) <= opt.delta * scale;
    rep.domain = all_zero ? Domain::DegenerateLinearPart : Domain::Nilpotent;
    return rep;
  }
  if (z1 || z2) {
    rep.domain = Domain::SaddleNode;
    rep.irreducible = true;
    return rep;
  }
  ApproxComplex r = l1 / l2;
  rep.ratio = r;
  const double tol = opt.delta * std::max(1.0, std::abs(r));
  bool real = std::abs(r.imag()) <= tol;
  rep.domain = (real && r.real() < 0) ? Domain::Siegel : Domain::Poincare;
  if (real) {
    Rational nearest = best_rational(r.real(), opt.max_denominator);
    if (std::abs(nearest.get_d() - r.real()) <= tol) {
      if (r.real() > 0) throw AmbiguousClassification(r, nearest);
      rep.rational_ratio = nearest;
    }
  }
  rep.irreducible = true;
  return rep;
}

}  // namespace detail

inline SingularityReport classify(const LinearPart& lp, const ClassifyOptions& opt = {}) {
  return lp.is_exact() ? detail::classify_exact(lp) : detail::classify_numeric(lp, opt);
}

inline SingularityReport classify(const AffineFoliation1Form& f, const SingularPoint& p,
                                  const ClassifyOptions& opt = {}) {
  return classify(linear_part(f, p), opt);
}

/// Classification at the origin of the chart (the origin must be singular).
inline SingularityReport classify_at_origin(const AffineFoliation1Form& f, const ClassifyOptions& opt = {}) {
  if (!f.P.constant_term().is_zero() || !f.Q.constant_term().is_zero())
    throw DomainError("classify_at_origin: origin is not singular");
  return classify(linear_part(jacobian_at_origin(f.P, f.Q)), opt);
}

inline bool is_irreducible(const SingularityReport& r) { return r.irreducible; }

// ---- formal normal forms ----------------------------------------------------------------------

template <class S>
struct FormalConjugacy {
  int order = 0;                        // N: everything is exact through this degree
  BasicPoly2<S> xi_x, xi_y;             // z = xi(w), xi'(0) diagonalizes the linear part
  BasicPoly2<S> normal_P, normal_Q;     // the conjugated field through order N
  std::array<S, 2> eigenvalues{};       // along w_x and w_y
  std::vector<std::pair<int, Monomial>> resonant_terms;  // (component 0|1, monomial) kept
  int residual_order = kInfiniteOrder;  // order of the nonlinear part left in the normal form
};

class SmallDivisorError : public Error {
 public:
  SmallDivisorError(double v, Monomial m, int component)
      : Error("small divisor " + std::to_string(v) + " at monomial x^" + std::to_string(m.i) + " y^" +
              std::to_string(m.j) + " in component " + std::to_string(component)),
        value(v) {}
  double value;
};

namespace detail {

template <class S>
bool scalar_is_zero(const S& s) {
  return ScalarTraits<S>::is_zero(s);
}

template <class S>
BasicPoly2<S> mul_trunc(const BasicPoly2<S>& a, const BasicPoly2<S>& b, int N) {
  BasicPoly2<S> r;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms())
      if (ma.degree() + mb.degree() <= N) r.add_term({ma.i + mb.i, ma.j + mb.j}, ca * cb);
  return r;
}

template <class S>
BasicPoly2<S> substitute_trunc(const BasicPoly2<S>& p, const BasicPoly2<S>& u,
                               const BasicPoly2<S>& v, int N) {
  std::vector<BasicPoly2<S>> up{BasicPoly2<S>(S(1))}, vp{BasicPoly2<S>(S(1))};
  BasicPoly2<S> r;
  for (const auto& [m, c] : p.terms()) {
    while (static_cast<int>(up.size()) <= m.i) up.push_back(mul_trunc(up.back(), u, N));
    while (static_cast<int>(vp.size()) <= m.j) vp.push_back(mul_trunc(vp.back(), v, N));
    r += c * mul_trunc(up[m.i], vp[m.j], N);
  }
  return r;
}

template <class S>
Mat2<S> eigenvector_matrix(const Mat2<S>& J, const std::array<S, 2>& lam) {
  // columns are eigenvectors for lam[0] (x direction) and lam[1] (y direction)
  auto vec = [&](const S& l, int fallback) -> std::array<S, 2> {
    std::array<S, 2> v1{J[0][1], l - J[0][0]}, v2{l - J[1][1], J[1][0]};
    if (!scalar_is_zero(v1[0]) || !scalar_is_zero(v1[1])) {
      if (!scalar_is_zero(v2[0]) || !scalar_is_zero(v2[1])) {
        // prefer the better conditioned choice in floating point
        if constexpr (std::is_same_v<S, ApproxComplex>) {
          if (std::abs(v2[0]) + std::abs(v2[1]) > std::abs(v1[0]) + std::abs(v1[1])) return v2;
        }
      }
      return v1;
    }
    if (!scalar_is_zero(v2[0]) || !scalar_is_zero(v2[1])) return v2;
    return fallback == 0 ? std::array<S, 2>{S(1), S(0)} : std::array<S, 2>{S(0), S(1)};
  };
  auto a = vec(lam[0], 0), b = vec(lam[1], 1);
  return {{{a[0], b[0]}, {a[1], b[1]}}};
}

template <class S>
FormalConjugacy<S> normal_form_impl(const BasicPoly2<S>& P, const BasicPoly2<S>& Q,
                                    const Mat2<S>& J, std::array<S, 2> lam, int N,
                                    double small_divisor) {
  using Poly = BasicPoly2<S>;
  constexpr bool numeric = std::is_same_v<S, ApproxComplex>;
  FormalConjugacy<S> out;
  out.order = N;
  // lam[0] goes with the w_x direction and lam[1] with w_y
  Mat2<S> T{{{S(1), S(0)}, {S(0), S(1)}}};
  bool diagonal = scalar_is_zero(J[0][1]) && scalar_is_zero(J[1][0]);
  if (!diagonal) T = eigenvector_matrix(J, lam);
  S det = T[0][0] * T[1][1] - T[0][1] * T[1][0];
  if constexpr (numeric) {
    if (std::abs(det) < 1e-12 * (std::abs(T[0][0] * T[1][1]) + std::abs(T[0][1] * T[1][0])))
      throw DomainError("formal_normal_form: linear part is not diagonalizable");
  } else {
    if (det.is_zero()) throw DomainError("formal_normal_form: linear part is not diagonalizable");
  }
  Poly X = Poly::x(), Y = Poly::y();
  Poly zx = T[0][0] * X + T[0][1] * Y, zy = T[1][0] * X + T[1][1] * Y;
  out.xi_x = zx;
  out.xi_y = zy;
  S inv = S(1) / det;
  Poly Pw = substitute_trunc(P, zx, zy, N), Qw = substitute_trunc(Q, zx, zy, N);
  Poly cur_P = (inv * (T[1][1] * Pw - T[0][1] * Qw)).truncated(N);
  Poly cur_Q = (inv * (T[0][0] * Qw - T[1][0] * Pw)).truncated(N);
  if (!diagonal) {
    // the linear part is exactly diagonal in exact mode; clean rounding noise in numeric mode
    Poly lin_P = Poly::monomial(lam[0], 1, 0), lin_Q = Poly::monomial(lam[1], 0, 1);
    cur_P = cur_P - cur_P.homogeneous_part(1) + lin_P;
    cur_Q = cur_Q - cur_Q.homogeneous_part(1) + lin_Q;
  }
  out.eigenvalues = lam;

  for (int k = 2; k <= N; ++k) {
    Poly hx, hy;
    for (int comp = 0; comp < 2; ++comp) {
      const Poly& part = comp == 0 ? cur_P : cur_Q;
      const Poly degree_k = part.homogeneous_part(k);
      for (const auto& [m, c] : degree_k.terms()) {
        S divisor = S(m.i) * lam[0] + S(m.j) * lam[1] - lam[comp];
        bool resonant;
        if constexpr (numeric) {
          double mag = std::abs(divisor);
          if (mag < small_divisor) throw SmallDivisorError(mag, m, comp);
          resonant = false;
        } else {
          resonant = divisor.is_zero();
        }
        if (resonant) {
          out.resonant_terms.push_back({comp, m});
          continue;
        }
        (comp == 0 ? hx : hy).add_term(m, c / divisor);
      }
    }
    if (hx.is_zero() && hy.is_zero()) continue;
    // new field: (I + Dh)^{-1} Y(w + h)
    Poly ux = X + hx, uy = Y + hy;
    Poly Ys_P = substitute_trunc(cur_P, ux, uy, N), Ys_Q = substitute_trunc(cur_Q, ux, uy, N);
    Poly a = hx.derivative(Axis::X), b = hx.derivative(Axis::Y);
    Poly c = hy.derivative(Axis::X), d = hy.derivative(Axis::Y);
    Poly e = (a + d + mul_trunc(a, d, N) - mul_trunc(b, c, N)).truncated(N);
    Poly inv_det(S(1)), term(S(1));
    for (int n = 1; n * (k - 1) <= N; ++n) {
      term = mul_trunc(term, -e, N);
      inv_det += term;
    }
    Poly one(S(1));
    Poly nP = mul_trunc(one + d, Ys_P, N) - mul_trunc(b, Ys_Q, N);
    Poly nQ = mul_trunc(one + a, Ys_Q, N) - mul_trunc(c, Ys_P, N);
    cur_P = mul_trunc(inv_det, nP, N);
    cur_Q = mul_trunc(inv_det, nQ, N);
    // clear the degree-k non-resonant part exactly (numeric mode removes rounding residue)
    if constexpr (numeric) {
      for (int comp = 0; comp < 2; ++comp) {
        Poly& part = comp == 0 ? cur_P : cur_Q;
        Poly hk = part.homogeneous_part(k);
        part = part - hk;
      }
    }
    Poly nx = substitute_trunc(out.xi_x, ux, uy, N), ny = substitute_trunc(out.xi_y, ux, uy, N);
    out.xi_x = nx;
    out.xi_y = ny;
  }
  out.normal_P = cur_P;
  out.normal_Q = cur_Q;
  Poly nonlinear_P = cur_P - cur_P.homogeneous_part(1), nonlinear_Q = cur_Q - cur_Q.homogeneous_part(1);
  out.residual_order = std::min(nonlinear_P.order(), nonlinear_Q.order());
  return out;
}

}  // namespace detail

inline constexpr int kNormalFormCap = 20;

/// Exact Poincare / Poincare-Dulac normal form through order N of a field singular at the origin.
/// Requires eigenvalues in Q(i) and a diagonalizable linear part.
inline FormalConjugacy<ExactComplex> formal_normal_form(const AffineFoliation1Form& f, int N,
                                                        int cap = kNormalFormCap) {
  if (N < 1 || N > cap) throw DomainError("formal_normal_form: order out of range");
  if (!f.P.constant_term().is_zero() || !f.Q.constant_term().is_zero())
    throw DomainError("formal_normal_form: origin is not singular");
  auto J = jacobian_at_origin(f.P, f.Q);
  LinearPart lp = linear_part(J);
  if (!lp.eigen_exact) throw DomainError("formal_normal_form: eigenvalues not in Q(i); use the numeric variant");
  auto [l1, l2] = *lp.eigen_exact;
  if (l1.is_zero() || l2.is_zero()) throw DomainError("formal_normal_form: degenerate linear part");
  // x direction carries J_xx for triangular matrices
  std::array<ExactComplex, 2> lam{l2, l1};
  return detail::normal_form_impl<ExactComplex>(f.P, f.Q, J, lam, N, 0.0);
}

inline FormalConjugacy<ApproxComplex> formal_normal_form_numeric(const AffineFoliation1Form& f, int N,
                                                                 double small_divisor = 1e-12,
                                                                 int cap = kNormalFormCap) {
  if (N < 1 || N > cap) throw DomainError("formal_normal_form: order out of range");
  auto J = detail::approx_matrix(jacobian_at_origin(f.P, f.Q));
  LinearPart lp = linear_part(J);
  auto [l1, l2] = lp.eigen;
  if (std::abs(l1) < small_divisor || std::abs(l2) < small_divisor)
    throw DomainError("formal_normal_form: degenerate linear part");
  std::array<ApproxComplex, 2> lam{l2, l1};
  return detail::normal_form_impl<ApproxComplex>(to_approx(f.P), to_approx(f.Q), J, lam, N,
                                                 small_divisor);
}

/// X(xi(w)) - Dxi(w) * NF(w) truncated at the conjugacy order; zero means the conjugacy holds.
template <class S>
std::pair<BasicPoly2<S>, BasicPoly2<S>> normal_form_defect(const BasicPoly2<S>& P, const BasicPoly2<S>& Q,
                                                           const FormalConjugacy<S>& c) {
  const int N = c.order;
  auto lhs_P = detail::substitute_trunc(P, c.xi_x, c.xi_y, N);
  auto lhs_Q = detail::substitute_trunc(Q, c.xi_x, c.xi_y, N);
  auto a = c.xi_x.derivative(Axis::X), b = c.xi_x.derivative(Axis::Y);
  auto cc = c.xi_y.derivative(Axis::X), d = c.xi_y.derivative(Axis::Y);
  auto rhs_P = detail::mul_trunc(a, c.normal_P, N) + detail::mul_trunc(b, c.normal_Q, N);
  auto rhs_Q = detail::mul_trunc(cc, c.normal_P, N) + detail::mul_trunc(d, c.normal_Q, N);
  return {(lhs_P - rhs_P).truncated(N), (lhs_Q - rhs_Q).truncated(N)};
}

// ---- Camacho-Sad index ------------------------------------------------------------------------

/// Writes omega = A dx + B dy with A = -Q, B = P. For the invariant axis {y = 0}, A = y A1 and
/// the index at (a, 0) is the residue at x = a of -A1(x, 0) / B(x, 0) dx.
inline RationalFunction1 camacho_sad_form(const AffineFoliation1Form& f) {
  auto A1 = exact_division(f.Q, Poly2::y());
  if (!A1) throw DomainError("camacho_sad_index: axis {y=0} is not invariant");
  Poly1 num = restrict_to(*A1, Axis::Y, ExactComplex(0));
  Poly1 den = restrict_to(f.P, Axis::Y, ExactComplex(0));
  if (den.is_zero()) throw DomainError("camacho_sad_index: B(x, 0) vanishes identically");
  return RationalFunction1(num, den);
}

inline ExactComplex camacho_sad_index(const AffineFoliation1Form& f, const ExactComplex& a = ExactComplex(0)) {
  RationalFunction1 eta = camacho_sad_form(f);
  if (a.is_zero()) return residue_at_zero(eta);
  // move x = a to the origin
  Poly1 shift({a, ExactComplex(1)});
  auto compose1 = [&](const Poly1& p) {
    Poly1 r, power(ExactComplex(1));
    for (int k = 0; k <= p.degree(); ++k) {
      r = r + Poly1(p.coeff(k)) * power;
      power = power * shift;
    }
    return r;
  };
  return residue_at_zero(RationalFunction1(compose1(eta.numerator()), compose1(eta.denominator())));
}

/// Residue of num/den at a numerically known pole, by the trapezoid rule on a small circle.
inline ApproxComplex numeric_residue(const Poly1d& num, const Poly1d& den, ApproxComplex pole,
                                     double radius, int samples = 512) {
  ApproxComplex sum{};
  for (int k = 0; k < samples; ++k) {
    double t = 2.0 * std::numbers::pi * k / samples;
    ApproxComplex e = std::polar(1.0, t);
    ApproxComplex z = pole + radius * e;
    sum += num.evaluate_approx(z) / den.evaluate_approx(z) * radius * e;
  }
  return sum / static_cast<double>(samples);
}

// ---- index theorem ----------------------------------------------------------------------------

/// A projective line: a x + b y + c = 0 in the XY chart, or the line at infinity.
struct ProjectiveLine {
  ExactComplex a, b, c;
  bool at_infinity = false;

  static ProjectiveLine infinity() { return {ExactComplex(0), ExactComplex(0), ExactComplex(1), true}; }
  static ProjectiveLine affine(ExactComplex a, ExactComplex b, ExactComplex c) {
    if (a.is_zero() && b.is_zero()) throw DomainError("degenerate line");
    return {std::move(a), std::move(b), std::move(c), false};
  }
};

struct IndexEntry {
  std::string where;  // description of the point and chart
  ApproxComplex index;
  std::optional<ExactComplex> index_exact;
};

struct IndexTheoremReport {
  std::vector<IndexEntry> entries;
  ApproxComplex sum;
  std::optional<ExactComplex> sum_exact;
  int expected = 1;
  bool pass = false;
};

namespace detail {

// Indices at all finite points of the invariant axis {y = 0} of g.
inline void axis_indices(const AffineFoliation1Form& g, const std::string& label, IndexTheoremReport& rep) {
  RationalFunction1 eta = camacho_sad_form(g);
  Poly1 den = eta.denominator();
  if (den.degree() < 1) return;
  auto roots = roots_with_multiplicity(den);
  Poly1d nd = to_approx(eta.numerator()), dd = to_approx(den);
  for (std::size_t k = 0; k < roots.size(); ++k) {
    ApproxComplex a = roots[k].value;
    IndexEntry e;
    auto ex = rationalize(a);
    if (ex && den.evaluate(*ex).is_zero()) {
      e.index_exact = camacho_sad_index(g, *ex);
      e.index = e.index_exact->to_approx();
      e.where = label + ex->to_string();
    } else {
      double d = 1.0;
      for (std::size_t j = 0; j < roots.size(); ++j)
        if (j != k) d = std::min(d, std::abs(roots[j].value - a));
      e.index = numeric_residue(nd, dd, a, 0.3 * d);
      e.where = label + approx_to_string(a);
    }
    rep.entries.push_back(e);
  }
}

inline void origin_index(const AffineFoliation1Form& g, const std::string& label, IndexTheoremReport& rep) {
  IndexEntry e;
  e.index_exact = camacho_sad_index(g);
  e.index = e.index_exact->to_approx();
  e.where = label;
  rep.entries.push_back(e);
}

inline AffineFoliation1Form swap_axes(const AffineFoliation1Form& f) {
  AffineFoliation1Form g = f;
  g.P = f.Q.swapped();
  g.Q = f.P.swapped();
  return g;
}

}  // namespace detail

/// Sums the Camacho-Sad indices of all singular points on an invariant projective line and
/// compares with the self-intersection L.L = 1.
inline IndexTheoremReport index_theorem_check(const AffineFoliation1Form& f, const ProjectiveLine& L,
                                              double tol = 1e-8) {
  if (f.chart != Chart::XY) throw DomainError("index_theorem_check expects the XY chart");
  IndexTheoremReport rep;
  if (L.at_infinity) {
    if (!line_at_infinity_invariant(f)) throw DomainError("line at infinity is not invariant");
    // UV chart: the line is {u = 0}; swap so it becomes the second axis
    auto uv = detail::swap_axes(chart_change(f, Chart::UV).form);
    detail::axis_indices(uv, "UV chart, u = 0, v = ", rep);
    // the remaining point [0:1:0] is the origin of the RS chart, on {r = 0}
    auto rs = detail::swap_axes(chart_change(f, Chart::RS).form);
    detail::origin_index(rs, "RS chart, (r, s) = (0, 0)", rep);
  } else {
    Mat2<ExactComplex> M;
    std::array<ExactComplex, 2> s;
    if (!L.b.is_zero()) {
      M = {{{ExactComplex(1), ExactComplex(0)}, {-(L.a / L.b), ExactComplex(1)}}};
      s = {ExactComplex(0), -(L.c / L.b)};
    } else {
      M = {{{ExactComplex(0), ExactComplex(1)}, {ExactComplex(1), ExactComplex(0)}}};
      s = {-(L.c / L.a), ExactComplex(0)};
    }
    auto g = affine_change(f, M, s);
    if (!exact_division(g.Q, Poly2::y())) throw DomainError("line is not invariant");
    detail::axis_indices(g, "on the line at parameter ", rep);
    auto uv = chart_change(g, Chart::UV).form;
    detail::origin_index(uv, "line at its point at infinity", rep);
  }
  bool all_exact = true;
  ExactComplex exact_sum;
  for (const auto& e : rep.entries) {
    rep.sum += e.index;
    if (e.index_exact) exact_sum = exact_sum + *e.index_exact;
    else all_exact = false;
  }
  if (all_exact) {
    rep.sum_exact = exact_sum;
    rep.pass = exact_sum == ExactComplex(rep.expected);
  } else {
    rep.pass = std::abs(rep.sum - ApproxComplex(rep.expected)) <= tol;
  }
  return rep;
}

// ---- Ito sphere transversality ----------------------------------------------------------------

struct TransversalityReport {
  double minimum = 0.0;
  ApproxComplex at_x, at_y;
  bool transverse = false;  // minimum above the threshold at this resolution
};

/// Minimum over the sphere of radius R of |conj(x) P + conj(y) Q| / (|Z| R), by random sampling
/// followed by local refinement around the best samples.
inline TransversalityReport sphere_transversality(const AffineFoliation1Form& f, double R, int samples,
                                                  std::uint64_t seed = 1, double threshold = 1e-6) {
  if (!(R > 0)) throw DomainError("sphere_transversality: radius must be positive");
  Poly2d P = to_approx(f.P), Q = to_approx(f.Q);
  auto objective = [&](std::array<double, 4> v) {
    double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
    ApproxComplex x(R * v[0] / n, R * v[1] / n), y(R * v[2] / n, R * v[3] / n);
    ApproxComplex a = P.evaluate_approx(x, y), b = Q.evaluate_approx(x, y);
    double zn = std::sqrt(std::norm(a) + std::norm(b));
    if (zn == 0.0) return 0.0;
    return std::abs(std::conj(x) * a + std::conj(y) * b) / (zn * R);
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  struct Sample {
    double value;
    std::array<double, 4> v;
  };
  std::vector<Sample> pool;
  for (int s = 0; s < std::max(samples, 1); ++s) {
    std::array<double, 4> v{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
    pool.push_back({objective(v), v});
  }
  std::sort(pool.begin(), pool.end(), [](const Sample& a, const Sample& b) { return a.value < b.value; });
  pool.resize(std::min<std::size_t>(pool.size(), 8));
  for (auto& s : pool) {
    double step = 0.2;
    while (step > 1e-10) {
      bool improved = false;
      for (int dim = 0; dim < 4; ++dim)
        for (double sign : {1.0, -1.0}) {
          auto v = s.v;
          v[dim] += sign * step;
          double val = objective(v);
          if (val < s.value) {
            s = {val, v};
            improved = true;
          }
        }
      if (!improved) step *= 0.5;
    }
  }
  const Sample& best = *std::min_element(pool.begin(), pool.end(),
                                         [](const Sample& a, const Sample& b) { return a.value < b.value; });
  TransversalityReport rep;
  rep.minimum = best.value;
  double n = std::sqrt(best.v[0] * best.v[0] + best.v[1] * best.v[1] + best.v[2] * best.v[2] + best.v[3] * best.v[3]);
  rep.at_x = ApproxComplex(R * best.v[0] / n, R * best.v[1] / n);
  rep.at_y = ApproxComplex(R * best.v[2] / n, R * best.v[3] / n);
  rep.transverse = rep.minimum > threshold;
  return rep;
}

}  // namespace folab

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "folab/foliation.hpp"
#include "folab/polyalg/linalg.hpp"

namespace folab {

// X(c) = P c_x + Q c_y
inline Poly2 apply_field(const AffineFoliation1Form& f, const Poly2& c) {
  return f.P * c.derivative(Axis::X) + f.Q * c.derivative(Axis::Y);
}

struct InvariantCurve {
  Poly2 f;
  Poly2 cofactor;
};

struct NumericInvariantCurve {
  Poly2d f;
  Poly2d cofactor;
  double residual = 0.0;
};

inline std::optional<InvariantCurve> invariance_check(const AffineFoliation1Form& f, const Poly2& c) {
  if (c.is_constant()) throw DomainError("invariance_check needs a non-constant curve");
  auto K = exact_division(apply_field(f, c), c);
  if (!K) return std::nullopt;
  return InvariantCurve{c, *K};
}

struct InvariantLines {
  std::vector<InvariantCurve> exact;
  std::vector<NumericInvariantCurve> numeric;
  // a one-parameter family of invariant lines (a pencil, or all vertical lines)
  bool infinitely_many = false;
  std::string family;

  std::size_t size() const { return exact.size() + numeric.size(); }
};

namespace detail {

// Divide p by the monic-in-`main` factor (main - h(other)), h linear; returns quotient and the
// size of the remainder.
inline std::pair<Poly2d, double> divide_by_graph(const Poly2d& p, const Poly2d& h, Axis main) {
  std::map<int, Poly2d> by_power;
  int top = 0;
  for (const auto& [m, c] : p.terms()) {
    int k = main == Axis::Y ? m.j : m.i;
    Monomial rest = main == Axis::Y ? Monomial{m.i, 0} : Monomial{0, m.j};
    by_power[k].add_term(rest, c);
    top = std::max(top, k);
  }
  Poly2d var = main == Axis::Y ? Poly2d::y() : Poly2d::x();
  Poly2d b, quotient;
  for (int k = top; k >= 1; --k) {
    b = by_power[k] + h * b;
    quotient += b * var.pow(k - 1);
  }
  Poly2d rem = by_power[0] + h * b;
  double r = 0.0;
  for (const auto& [m, c] : rem.terms()) r += std::abs(c);
  return {quotient, r};
}

inline double coefficient_norm(const Poly2d& p) {
  double r = 0.0;
  for (const auto& [m, c] : p.terms()) r += std::abs(c);
  return r;
}

inline Rational binomial(int n, int k) {
  Rational r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Coefficients in x of Q(x, s x + r) - s P(x, s x + r), each a polynomial in (s, r) written
// with s as the first variable and r as the second.
inline std::vector<Poly2> graph_line_equations(const AffineFoliation1Form& f) {
  std::map<int, Poly2> eq;
  auto expand = [&](const Poly2& poly, int extra_s, const ExactComplex& sign) {
    for (const auto& [m, c] : poly.terms()) {
      for (int l = 0; l <= m.j; ++l) {
        ExactComplex coef = sign * c * ExactComplex(binomial(m.j, l), 0);
        eq[m.i + l].add_term({l + extra_s, m.j - l}, coef);
      }
    }
  };
  expand(f.Q, 0, ExactComplex(1));
  expand(f.P, 1, ExactComplex(-1));
  std::vector<Poly2> out;
  for (auto& [k, p] : eq)
    if (!p.is_zero()) out.push_back(p);
  return out;
}

}  // namespace detail

/// Affine invariant lines of the foliation. Vertical lines x = a come from the common roots of the
/// y-coefficients of P. The others, y = s x + r, are the common zeros of the coefficients of
/// Q(x, sx + r) - s P(x, sx + r), found with the singular-point solver and certified exactly when
/// (s, r) rationalize, otherwise by the division remainder.
inline InvariantLines find_invariant_lines(const AffineFoliation1Form& f, double tol = 1e-9) {
  InvariantLines out;
  const Poly2 x = Poly2::x(), y = Poly2::y();

  if (f.P.is_zero()) {
    out.infinitely_many = true;
    out.family = "x = const";
  } else {
    Poly1 g;
    for (const auto& c : coefficients_in(f.P, Axis::Y)) g = gcd(g, c);
    if (!g.is_constant()) {
      for (const auto& root : roots_with_multiplicity(g)) {
        auto a = rationalize(root.value);
        if (a && g.evaluate(*a).is_zero()) {
          if (auto curve = invariance_check(f, x - Poly2(*a))) out.exact.push_back(*curve);
          continue;
        }
        Poly2d line = Poly2d::x() - Poly2d(root.value);
        auto [K, rem] = detail::divide_by_graph(to_approx(f.P), Poly2d(root.value), Axis::X);
        out.numeric.push_back({line, K, rem});
      }
    }
  }

  std::vector<Poly2> eqs = detail::graph_line_equations(f);
  if (eqs.empty()) {
    out.infinitely_many = true;
    out.family = "every non-vertical line";
    return out;
  }
  Poly2 common = eqs.front();
  for (const auto& e : eqs) common = gcd2(common, e);
  if (!common.is_constant()) {
    out.infinitely_many = true;
    out.family = "y = s*x + r with " + common.to_string("s", "r") + " = 0";
    return out;
  }
  if (eqs.size() == 1) return out;  // a single nonzero constant equation

  Poly2 first = eqs.front(), combo;
  for (int attempt = 0;; ++attempt) {
    combo = Poly2{};
    for (std::size_t k = 1; k < eqs.size(); ++k)
      combo += ExactComplex(static_cast<long>(k * (attempt + 2) % 7 + 1)) * eqs[k];
    if (coprime(first, combo)) break;
    if (attempt > 8) throw Error("could not separate the line equations");
  }
  if (first.is_constant() || combo.is_constant()) return out;

  AffineFoliation1Form system = make_foliation(first, combo);
  Poly2d scale_P = to_approx(f.P), scale_Q = to_approx(f.Q);
  for (const auto& sol : find_singularities(system, tol)) {
    if (sol.exact) {
      const auto& [s, r] = *sol.exact;
      bool all_zero = std::all_of(eqs.begin(), eqs.end(), [&](const Poly2& e) { return e.evaluate(s, r).is_zero(); });
      if (!all_zero) continue;
      if (auto curve = invariance_check(f, y - Poly2(s) * x - Poly2(r))) out.exact.push_back(*curve);
      continue;
    }
    Poly2d h = Poly2d(sol.x) * Poly2d::x() + Poly2d(sol.y);
    Poly2d Xc = scale_Q - Poly2d(sol.x) * scale_P;
    auto [K, rem] = detail::divide_by_graph(Xc, h, Axis::Y);
    double scale = std::max(1.0, detail::coefficient_norm(Xc));
    if (rem > tol * scale * (1 + std::abs(sol.x) + std::abs(sol.y))) continue;
    out.numeric.push_back({Poly2d::y() - h, K, rem});
  }
  return out;
}

/// Number of curves beyond which a foliation of degree k has a rational first integral.
inline long jouanolou_bound(int k) {
  if (k < 1) throw DomainError("jouanolou_bound needs k >= 1");
  return 3L * k * (k + 1) / 2;
}

namespace detail {

inline Matrix<ExactComplex> cofactor_matrix(const std::vector<InvariantCurve>& curves) {
  std::map<Monomial, std::size_t> rows;
  for (const auto& c : curves)
    for (const auto& [m, coef] : c.cofactor.terms()) rows.emplace(m, 0);
  std::size_t idx = 0;
  for (auto& [m, r] : rows) r = idx++;
  Matrix<ExactComplex> M(rows.size(), std::vector<ExactComplex>(curves.size()));
  for (std::size_t j = 0; j < curves.size(); ++j)
    for (const auto& [m, coef] : curves[j].cofactor.terms()) M[rows[m]][j] = coef;
  return M;
}

inline std::vector<ExactComplex> normalized_direction(std::vector<ExactComplex> v) {
  auto it = std::find_if(v.begin(), v.end(), [](const ExactComplex& z) { return !z.is_zero(); });
  if (it == v.end()) return v;
  ExactComplex inv = it->inverse();
  for (auto& z : v) z = z * inv;
  return v;
}

}  // namespace detail

/// Basis of all exponent vectors with sum lambda_j K_j = 0, each scaled so its first nonzero entry is 1.
inline std::vector<std::vector<ExactComplex>> darboux_dependencies(const std::vector<InvariantCurve>& curves) {
  if (curves.size() < 2) throw DomainError("a cofactor dependency needs at least two curves");
  auto basis = kernel_basis(detail::cofactor_matrix(curves), curves.size());
  for (auto& v : basis) v = detail::normalized_direction(v);
  return basis;
}

inline std::optional<std::vector<ExactComplex>> darboux_dependency(const std::vector<InvariantCurve>& curves) {
  auto basis = darboux_dependencies(curves);
  if (basis.empty()) return std::nullopt;
  return basis.front();
}

struct FirstIntegralOutcome {
  enum class Kind { Rational, LogarithmicOnly };
  Kind kind = Kind::LogarithmicOnly;
  std::optional<RationalFunction2> F;
  std::vector<long> exponents;               // F = prod f_j^exponents[j] when rational
  std::vector<ExactComplex> log_exponents;   // the multivalued prod f_j^lambda_j otherwise
  bool verified = false;
};

inline std::string kind_name(FirstIntegralOutcome::Kind k) {
  return k == FirstIntegralOutcome::Kind::Rational ? "rational" : "logarithmic-only";
}

inline bool verify_first_integral(const AffineFoliation1Form& f, const RationalFunction2& F);

/// Looks for a rational vector in the span of the given dependencies: writing the coefficients as
/// a + ib, the imaginary part of sum (a_i + i b_i) v_i must vanish, a linear system over Q.
inline FirstIntegralOutcome rational_first_integral_from_dependencies(
    const AffineFoliation1Form& f, const std::vector<InvariantCurve>& curves,
    const std::vector<std::vector<ExactComplex>>& dependencies) {
  if (dependencies.empty()) throw DomainError("no dependency to integrate");
  const std::size_t n = curves.size(), r = dependencies.size();
  for (const auto& v : dependencies)
    if (v.size() != n) throw DomainError("dependency length differs from the number of curves");

  FirstIntegralOutcome out;
  out.log_exponents = dependencies.front();

  Matrix<Rational> im_rows(n, std::vector<Rational>(2 * r));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < r; ++i) {
      im_rows[j][i] = dependencies[i][j].im();
      im_rows[j][r + i] = dependencies[i][j].re();
    }
  }
  std::vector<Rational> w;
  for (const auto& c : kernel_basis(im_rows, 2 * r)) {
    std::vector<Rational> cand(n);
    bool nonzero = false;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < r; ++i)
        cand[j] += c[i] * dependencies[i][j].re() - c[r + i] * dependencies[i][j].im();
      nonzero = nonzero || sgn(cand[j]) != 0;
    }
    if (nonzero) {
      w = std::move(cand);
      break;
    }
  }
  if (w.empty()) return out;

  mpz_class den = 1, num_gcd = 0;
  for (const auto& q : w) den = lcm(den, mpz_class(q.get_den()));
  std::vector<mpz_class> ints;
  for (const auto& q : w) {
    Rational scaled = q * den;
    ints.push_back(scaled.get_num());
    num_gcd = gcd(num_gcd, mpz_class(abs(ints.back())));
  }
  int sign = 1;
  for (auto it = ints.rbegin(); it != ints.rend(); ++it) {
    if (sgn(*it) != 0) {
      sign = sgn(*it);
      break;
    }
  }
  Poly2 num(ExactComplex(1)), dnm(ExactComplex(1));
  for (std::size_t j = 0; j < n; ++j) {
    mpz_class e = sign * ints[j] / num_gcd;
    if (!e.fits_slong_p()) throw Error("exponent too large");
    long ej = e.get_si();
    out.exponents.push_back(ej);
    if (ej > 0) num = num * curves[j].f.pow(static_cast<int>(ej));
    if (ej < 0) dnm = dnm * curves[j].f.pow(static_cast<int>(-ej));
  }
  out.kind = FirstIntegralOutcome::Kind::Rational;
  out.F = RationalFunction2(num, dnm);
  out.verified = verify_first_integral(f, *out.F);
  return out;
}

/// Exact test of X(F) = 0 for F = N / D, i.e. X(N) D - N X(D) is the zero polynomial.
inline bool verify_first_integral(const AffineFoliation1Form& f, const RationalFunction2& F) {
  if (F.derivative(Axis::X).is_zero() && F.derivative(Axis::Y).is_zero())
    throw DomainError("a first integral must be non-constant");
  return (apply_field(f, F.num) * F.den - F.num * apply_field(f, F.den)).is_zero();
}

struct ExactPart {
  Poly2 g;
  std::vector<int> n;  // d(g / prod f_j^(n_j - 1))
};

// sum lambda_j df_j / f_j + optional exact part
struct LogarithmicForm {
  std::vector<std::pair<ExactComplex, Poly2>> terms;
  std::optional<ExactPart> exact_part;

  Poly2 exact_denominator() const {
    Poly2 h(ExactComplex(1));
    if (!exact_part) return h;
    for (std::size_t j = 0; j < terms.size(); ++j)
      if (exact_part->n[j] > 1) h = h * terms[j].second.pow(exact_part->n[j] - 1);
    return h;
  }
};

namespace detail {

inline void check_shape(const LogarithmicForm& L) {
  if (L.terms.empty()) throw DomainError("empty logarithmic form");
  for (const auto& [lam, fj] : L.terms)
    if (fj.is_constant()) throw DomainError("logarithmic form needs non-constant curves");
  if (L.exact_part) {
    if (L.exact_part->n.size() != L.terms.size()) throw DomainError("one exponent n_j per curve is required");
    for (int nj : L.exact_part->n)
      if (nj < 1) throw DomainError("exponents n_j must be at least 1");
  }
}

// (prod f_j) h^2 times (sum lambda_j X(f_j)/f_j + X(g/h))
inline Poly2 cleared_contraction(const LogarithmicForm& L, const std::function<Poly2(const Poly2&)>& X) {
  const Poly2 h = L.exact_denominator();
  const Poly2 h2 = h * h;
  Poly2 all(ExactComplex(1));
  for (const auto& t : L.terms) all = all * t.second;
  Poly2 total;
  for (std::size_t j = 0; j < L.terms.size(); ++j) {
    Poly2 others(ExactComplex(1));
    for (std::size_t i = 0; i < L.terms.size(); ++i)
      if (i != j) others = others * L.terms[i].second;
    total += L.terms[j].first * (others * X(L.terms[j].second) * h2);
  }
  if (L.exact_part) total += all * (X(L.exact_part->g) * h - L.exact_part->g * X(h));
  return total;
}

}  // namespace detail

/// Exact test that the closed form is constant along leaves: omega ^ L = 0 after clearing denominators.
inline bool verify_first_integral(const AffineFoliation1Form& f, const LogarithmicForm& L) {
  detail::check_shape(L);
  return detail::cleared_contraction(L, [&](const Poly2& c) { return apply_field(f, c); }).is_zero();
}

struct ClosedFormReport {
  bool coprime = true;
  bool simple_poles = true;
  ExactComplex degree_sum;  // sum lambda_j deg f_j
  bool degree_condition = true;
  AffineFoliation1Form foliation;
};

/// Checks the shape of L and returns the foliation L = 0 with denominators cleared. In projective
/// mode a nonzero sum lambda_j deg f_j is an error.
inline ClosedFormReport closed_form_validate(const LogarithmicForm& L, bool on_projective) {
  detail::check_shape(L);
  ClosedFormReport rep;
  for (std::size_t i = 0; i < L.terms.size(); ++i)
    for (std::size_t j = i + 1; j < L.terms.size(); ++j)
      if (!coprime(L.terms[i].second, L.terms[j].second)) rep.coprime = false;
  if (L.exact_part)
    rep.simple_poles = std::all_of(L.exact_part->n.begin(), L.exact_part->n.end(), [](int v) { return v == 1; });
  for (const auto& [lam, fj] : L.terms) rep.degree_sum += lam * ExactComplex(fj.degree());
  rep.degree_condition = rep.degree_sum.is_zero();
  if (on_projective && !rep.degree_condition)
    throw DomainError("sum of lambda_j deg f_j is " + rep.degree_sum.to_string() + ", not 0");
  // L = A dx + B dy, and omega = P dy - Q dx gives P = B, Q = -A
  Poly2 A = detail::cleared_contraction(L, [](const Poly2& c) { return c.derivative(Axis::X); });
  Poly2 B = detail::cleared_contraction(L, [](const Poly2& c) { return c.derivative(Axis::Y); });
  rep.foliation = make_foliation(B, -A);
  return rep;
}

}  // namespace folab

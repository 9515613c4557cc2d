#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "folab/polyalg.hpp"

namespace folab {

/// f(z) = sum_k c[k] z^k with c[0] = 0 and c[1] = lambda != 0, trusted only for |z| <= radius.
struct GermSeries {
  std::vector<ApproxComplex> c;
  std::optional<std::vector<ExactComplex>> exact;
  double radius = 0.5;

  static GermSeries from_poly(const Poly1& p, double radius = 0.5) {
    GermSeries g;
    g.radius = radius;
    g.exact = std::vector<ExactComplex>();
    for (int k = 0; k <= p.degree(); ++k) {
      g.exact->push_back(p.coeff(k));
      g.c.push_back(p.coeff(k).to_approx());
    }
    g.validate();
    return g;
  }

  static GermSeries from_coefficients(std::vector<ApproxComplex> coeffs, double radius = 0.5) {
    GermSeries g;
    g.c = std::move(coeffs);
    g.radius = radius;
    g.validate();
    return g;
  }

  /// Polynomial text in the variable z, e.g. "1/2*z + z^2".
  static GermSeries parse(std::string_view text, double radius = 0.5) {
    Poly2 p = parse_poly(text, {"z"});
    return from_poly(restrict_to(p, Axis::Y, ExactComplex()), radius);
  }

  void validate() const {
    if (c.size() < 2 || std::abs(c[1]) == 0.0) throw DomainError("germ needs a nonzero linear coefficient");
    if (std::abs(c[0]) != 0.0) throw DomainError("germ must fix the origin");
  }

  ApproxComplex lambda() const { return c[1]; }
  int order() const { return static_cast<int>(c.size()) - 1; }

  ApproxComplex operator()(ApproxComplex z) const {
    if (std::abs(z) > radius) throw DomainError("evaluation outside the radius hint");
    ApproxComplex v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
    return v;
  }

  ApproxComplex derivative(ApproxComplex z) const {
    if (std::abs(z) > radius) throw DomainError("evaluation outside the radius hint");
    ApproxComplex v = 0.0;
    for (std::size_t k = c.size() - 1; k >= 1; --k) v = v * z + static_cast<double>(k) * c[k];
    return v;
  }

  /// Local inverse near 0 by Newton's method on f(w) = z.
  ApproxComplex inverse(ApproxComplex z) const {
    ApproxComplex w = z / lambda();
    for (int it = 0; it < 60; ++it) {
      ApproxComplex step = ((*this)(w) - z) / derivative(w);
      w -= step;
      if (std::abs(step) <= 1e-17 * std::max(std::abs(w), 1e-300)) break;
    }
    if (std::abs((*this)(w) - z) > 1e-13 * std::max(std::abs(z), 1e-300))
      throw ConvergenceError("Newton inversion of the germ did not converge");
    return w;
  }
};

namespace detail {

// truncated product of series given by coefficient vectors
inline std::vector<ApproxComplex> series_mul(const std::vector<ApproxComplex>& a, const std::vector<ApproxComplex>& b,
                                             std::size_t n) {
  std::vector<ApproxComplex> r(n + 1, 0.0);
  for (std::size_t i = 0; i < a.size() && i <= n; ++i)
    for (std::size_t j = 0; j < b.size() && i + j <= n; ++j) r[i + j] += a[i] * b[j];
  return r;
}

}  // namespace detail

struct KoenigsResult {
  std::function<ApproxComplex(ApproxComplex)> phi;
  std::vector<ApproxComplex> series;  // Taylor coefficients of phi, series[1] = 1
  double residual = 0.0;              // max |phi(f(z)) - lambda phi(z)| on the test circle
  double test_radius = 0.0;
};

/// phi = lim lambda^{-n} f^n for |lambda| < 1; for |lambda| > 1 the same limit for the Newton
/// inverse of f, phi = lim lambda^n f^{-n}.
inline KoenigsResult koenigs_linearize(const GermSeries& f, int n_iter = 80, double radius = 0.05,
                                       int series_order = 12) {
  const ApproxComplex lam = f.lambda();
  const double m = std::abs(lam);
  if (std::abs(m - 1.0) < 1e-12) throw DomainError("Koenigs linearization needs |lambda| != 1");
  if (radius > f.radius) throw DomainError("test radius exceeds the radius hint");

  KoenigsResult out;
  out.test_radius = radius;
  const bool contracting = m < 1.0;
  auto phi = [f, lam, n_iter, contracting](ApproxComplex z) {
    ApproxComplex w = z, scale = 1.0;
    for (int n = 0; n < n_iter; ++n) {
      if (std::abs(w) > f.radius) throw ConvergenceError("Koenigs iteration left the convergence disc");
      if (contracting) {
        w = f(w);
        scale /= lam;
      } else {
        w = f.inverse(w);
        scale *= lam;
      }
      if (std::abs(w) < 1e-150) break;
    }
    return scale * w;
  };
  out.phi = phi;

  // phi(f(z)) = lambda phi(z) order by order: phi_k (lambda - lambda^k) = sum_{j<k} phi_j [f^j]_k
  const std::size_t N = static_cast<std::size_t>(series_order);
  std::vector<ApproxComplex> fc(f.c.begin(), f.c.begin() + std::min(f.c.size(), N + 1));
  std::vector<std::vector<ApproxComplex>> powers{{1.0}, fc};
  for (std::size_t j = 2; j <= N; ++j) powers.push_back(detail::series_mul(powers.back(), fc, N));
  out.series.assign(N + 1, 0.0);
  out.series[1] = 1.0;
  for (std::size_t k = 2; k <= N; ++k) {
    ApproxComplex acc = 0.0;
    for (std::size_t j = 1; j < k; ++j)
      if (k < powers[j].size()) acc += out.series[j] * powers[j][k];
    out.series[k] = acc / (lam - std::pow(lam, static_cast<double>(k)));
  }

  for (int k = 0; k < 64; ++k) {
    ApproxComplex z = std::polar(radius, 2 * std::numbers::pi * k / 64);
    out.residual = std::max(out.residual, std::abs(phi(f(z)) - lam * phi(z)));
  }
  return out;
}

struct OrbitProbe {
  ApproxComplex start;
  long iterations = 0;      // iterates performed
  double final_modulus = 0.0;
  bool reached = false;     // |z| < threshold within the budget
  std::vector<ApproxComplex> orbit;  // every iterate when requested
};

struct ParabolicReport {
  int k = 0;
  ApproxComplex a;
  std::vector<double> attracting;  // arguments of the attracting directions
  std::vector<double> repelling;
  OrbitProbe forward;   // under f, from the first attracting direction
  OrbitProbe backward;  // under f^{-1}, from the first repelling direction
};

inline OrbitProbe probe_orbit(const std::function<ApproxComplex(ApproxComplex)>& map, ApproxComplex z0,
                              long max_iter, double threshold, bool keep = false) {
  OrbitProbe p;
  p.start = z0;
  ApproxComplex z = z0;
  if (keep) p.orbit.push_back(z);
  while (p.iterations < max_iter && std::abs(z) >= threshold) {
    z = map(z);
    ++p.iterations;
    if (keep) p.orbit.push_back(z);
  }
  p.final_modulus = std::abs(z);
  p.reached = p.final_modulus < threshold;
  return p;
}

/// Flower data of z + a z^{k+1} + ...: attracting directions have a z^k < 0.
inline ParabolicReport parabolic_analyze(const GermSeries& f, double probe_radius = 0.1, long max_iter = 10000,
                                         double threshold = 1e-6) {
  if (std::abs(f.lambda() - 1.0) > 1e-12) throw DomainError("germ is not tangent to the identity");
  ParabolicReport r;
  for (std::size_t j = 2; j < f.c.size(); ++j) {
    if (std::abs(f.c[j]) > 0.0) {
      r.k = static_cast<int>(j) - 1;
      r.a = f.c[j];
      break;
    }
  }
  if (r.k == 0) throw DomainError("no nonlinear term up to the truncation order");
  const double base_attr = std::arg(-1.0 / r.a), base_rep = std::arg(1.0 / r.a);
  for (int q = 0; q < r.k; ++q) {
    r.attracting.push_back(std::remainder((base_attr + 2 * std::numbers::pi * q) / r.k, 2 * std::numbers::pi));
    r.repelling.push_back(std::remainder((base_rep + 2 * std::numbers::pi * q) / r.k, 2 * std::numbers::pi));
  }
  r.forward = probe_orbit([&](ApproxComplex z) { return f(z); }, std::polar(probe_radius, r.attracting[0]), max_iter,
                          threshold);
  r.backward = probe_orbit([&](ApproxComplex z) { return f.inverse(z); }, std::polar(probe_radius, r.repelling[0]),
                           max_iter, threshold);
  return r;
}

struct ArithmeticDiagnostic {
  int depth = 0;
  std::vector<mpz_class> partial_quotients;  // a_0, a_1, ...
  std::vector<mpz_class> denominators;       // q_0 = 1, q_1, ..., q_{depth+1}
  double brjuno_partial = 0.0;               // sum_{n <= depth} log(q_{n+1}) / q_n
  double cremer_log10 = 0.0;                 // log10 of max_{n <= depth} |{q_n theta}|^{-1/q_n}
  double cremer() const { return std::pow(10.0, cremer_log10); }
};

namespace detail {

inline double log_abs(const Rational& q) {
  long e1 = 0, e2 = 0;
  double m1 = mpz_get_d_2exp(&e1, q.get_num_mpz_t()), m2 = mpz_get_d_2exp(&e2, q.get_den_mpz_t());
  return std::log(std::abs(m1)) - std::log(m2) + static_cast<double>(e1 - e2) * std::numbers::ln2;
}

inline double log_mpz(const mpz_class& z) { return log_abs(Rational(z)); }

// distance from q theta to the nearest integer
inline Rational fractional_distance(const Rational& x) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  Rational frac = x - Rational(fl);
  Rational other = 1 - frac;
  return frac < other ? frac : other;
}

}  // namespace detail

/// Continued-fraction diagnostics of theta, computed exactly from the rational value given. The
/// Cremer quantity is taken along the convergent denominators, where |{n theta}| is smallest.
inline ArithmeticDiagnostic brjuno_cremer_diagnostic(const Rational& theta, int depth) {
  if (depth < 1) throw DomainError("depth must be at least 1");
  ArithmeticDiagnostic d;
  d.depth = depth;
  Rational x = theta;
  mpz_class q_prev = 0, q = 1;  // q_{-1}, q_0
  d.denominators.push_back(q);
  for (int n = 0; n <= depth + 1; ++n) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    d.partial_quotients.push_back(a);
    if (n > 0) {
      mpz_class q_next = a * q + q_prev;
      q_prev = q;
      q = q_next;
      d.denominators.push_back(q);
    }
    if (static_cast<int>(d.denominators.size()) >= depth + 2) break;
    Rational frac = x - Rational(a);
    if (sgn(frac) == 0) throw DomainError("theta is rational at working precision");
    x = 1 / frac;
  }
  double cremer = -std::numeric_limits<double>::infinity();
  for (int n = 0; n <= depth; ++n) {
    const mpz_class& qn = d.denominators[n];
    d.brjuno_partial += detail::log_mpz(d.denominators[n + 1]) / qn.get_d();
    Rational dist = detail::fractional_distance(Rational(qn) * theta);
    if (sgn(dist) == 0) throw DomainError("theta is rational at working precision");
    cremer = std::max(cremer, -detail::log_abs(dist) / qn.get_d());
  }
  d.cremer_log10 = cremer / std::numbers::ln10;
  return d;
}

/// Double input: the binary value is used exactly, and the depth is limited by what 53 bits can
/// resolve (q_{depth+1} q_{depth+2} below 2^52).
inline ArithmeticDiagnostic brjuno_cremer_diagnostic(double theta, int depth) {
  if (!std::isfinite(theta)) throw DomainError("theta must be finite");
  auto d = brjuno_cremer_diagnostic(rational_from_double(theta), depth);
  const auto& q = d.denominators;
  if (q.back().get_d() * q[q.size() - 2].get_d() > std::ldexp(1.0, 52))
    throw DomainError("depth exceeds the precision of a double; pass theta as an exact rational");
  return d;
}

struct CycleSearchResult {
  std::vector<ApproxComplex> points;  // one representative per cycle
  std::vector<double> residuals;
  bool degenerate = false;            // f is a rotation with f^n = id: every point is periodic
};

/// Periodic points of exact period n in the annulus r_in <= |z| <= r_out, by Newton on f^n(z) - z
/// from a polar grid of seeds.
inline CycleSearchResult small_cycle_search(const GermSeries& f, int n, double r_in, double r_out,
                                            int grid = 24) {
  if (n < 1) throw DomainError("period must be at least 1");
  if (r_out > f.radius || r_in <= 0 || r_in >= r_out) throw DomainError("bad annulus");
  CycleSearchResult out;
  bool linear = true;
  for (std::size_t j = 2; j < f.c.size(); ++j) linear = linear && std::abs(f.c[j]) == 0.0;
  if (linear && std::abs(std::pow(f.lambda(), n) - 1.0) < 1e-12) {
    out.degenerate = true;
    return out;
  }

  auto iterate = [&](ApproxComplex z, int m, ApproxComplex* deriv) -> std::optional<ApproxComplex> {
    ApproxComplex d = 1.0;
    for (int i = 0; i < m; ++i) {
      if (std::abs(z) > f.radius) return std::nullopt;
      d *= f.derivative(z);
      z = f(z);
    }
    if (deriv) *deriv = d;
    return z;
  };

  std::vector<std::vector<ApproxComplex>> orbits;
  for (int ir = 0; ir < grid; ++ir) {
    double r = r_in * std::pow(r_out / r_in, (ir + 0.5) / grid);
    for (int ia = 0; ia < grid; ++ia) {
      ApproxComplex z = std::polar(r, 2 * std::numbers::pi * (ia + 0.5) / grid);
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        ApproxComplex dn;
        auto w = iterate(z, n, &dn);
        if (!w || dn == 1.0) break;
        ApproxComplex step = (*w - z) / (dn - 1.0);
        z -= step;
        if (std::abs(step) < 1e-16 * std::max(std::abs(z), 1e-300)) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        auto w = iterate(z, n, nullptr);
        ok = w && std::abs(*w - z) <= 1e-12;
      }
      if (!ok || std::abs(z) < r_in || std::abs(z) > r_out) continue;
      auto w = iterate(z, n, nullptr);
      if (!w) continue;
      double res = std::abs(*w - z);
      if (res > 1e-12) continue;
      bool lower = false;
      for (int d = 1; d < n && !lower; ++d) {
        if (n % d) continue;
        auto v = iterate(z, d, nullptr);
        lower = v && std::abs(*v - z) < 1e-9 * std::max(std::abs(z), 1e-12);
      }
      if (lower) continue;
      bool seen = false;
      for (const auto& orb : orbits)
        for (const auto& p : orb) seen = seen || std::abs(p - z) < 1e-9 * std::max(std::abs(z), 1e-12);
      if (seen) continue;
      std::vector<ApproxComplex> orb{z};
      for (int i = 1; i < n; ++i) orb.push_back(f(orb.back()));
      orbits.push_back(orb);
      out.points.push_back(z);
      out.residuals.push_back(res);
    }
  }
  return out;
}

}  // namespace folab

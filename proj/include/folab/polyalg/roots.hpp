#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "folab/polyalg/poly1.hpp"

namespace folab {

struct RootWithMultiplicity {
  ApproxComplex value;
  int multiplicity = 1;
};

namespace detail {

inline double backward_scale(const Poly1d& p, ApproxComplex z) {
  double s = 0.0, az = std::abs(z), pw = 1.0;
  for (const auto& c : p.coeffs()) {
    s += std::abs(c) * pw;
    pw *= az;
  }
  return s;
}

inline void eval_with_derivative(const Poly1d& p, ApproxComplex z, ApproxComplex& v,
                                 ApproxComplex& dv) {
  v = 0.0;
  dv = 0.0;
  const auto& c = p.coeffs();
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    dv = dv * z + v;
    v = v * z + *it;
  }
}

}  // namespace detail

/// All roots of a numeric polynomial by Aberth–Ehrlich simultaneous iteration.
/// Every returned root satisfies |p(z)| <= tol * sum |a_k||z|^k.
inline std::vector<ApproxComplex> aberth_roots(const Poly1d& p, double tol = 1e-10,
                                               int max_iterations = 2000) {
  const int n = p.degree();
  if (n < 1) throw DomainError("root finding needs degree >= 1");
  const auto& a = p.coeffs();
  if (n == 1) return {-a[0] / a[1]};

  // Initial guesses on a circle sized by the Fujiwara bound.
  double radius = 0.0;
  for (int k = 1; k <= n; ++k)
    radius = std::max(radius, std::pow(std::abs(a[n - k] / a[n]), 1.0 / k));
  radius = std::max(radius, 1e-3);
  std::vector<ApproxComplex> z(n);
  for (int k = 0; k < n; ++k)
    z[k] = std::polar(0.5 * radius, 2.0 * std::numbers::pi * k / n + 0.4);

  bool converged = false;
  for (int iter = 0; iter < max_iterations && !converged; ++iter) {
    converged = true;
    for (int k = 0; k < n; ++k) {
      ApproxComplex v, dv;
      detail::eval_with_derivative(p, z[k], v, dv);
      if (v == ApproxComplex{}) continue;
      ApproxComplex ratio = dv == ApproxComplex{} ? ApproxComplex(1e300) : v / dv;
      ApproxComplex sum{};
      for (int j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      ApproxComplex corr = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(corr.real()) || !std::isfinite(corr.imag())) corr = ratio;
      z[k] -= corr;
      if (std::abs(corr) > 1e-15 * std::max(1.0, std::abs(z[k]))) converged = false;
    }
  }
  // Newton polish
  for (auto& root : z) {
    for (int s = 0; s < 3; ++s) {
      ApproxComplex v, dv;
      detail::eval_with_derivative(p, root, v, dv);
      if (dv == ApproxComplex{}) break;
      ApproxComplex next = root - v / dv;
      ApproxComplex nv, ndv;
      detail::eval_with_derivative(p, next, nv, ndv);
      if (std::abs(nv) < std::abs(v)) root = next;
    }
  }
  // a root accepts on a small backward error or, near 0 where that measure degenerates, on a small Newton step
  for (const auto& root : z) {
    ApproxComplex v, dv;
    detail::eval_with_derivative(p, root, v, dv);
    bool ok = std::abs(v) <= tol * detail::backward_scale(p, root) ||
              (std::abs(dv) > 0.0 && std::abs(v / dv) <= tol * std::max(1.0, std::abs(root)));
    if (!ok) throw ConvergenceError("root finder did not converge");
  }
  return z;
}

/// Square-free decomposition (Yun): pairs (factor, multiplicity) with monic factors.
inline std::vector<std::pair<Poly1, int>> squarefree_decomposition(const Poly1& f) {
  std::vector<std::pair<Poly1, int>> out;
  if (f.degree() < 1) return out;
  Poly1 fp = f.derivative();
  Poly1 a0 = gcd(f, fp);
  Poly1 b = exact_quotient(f, a0);
  Poly1 c = exact_quotient(fp, a0);
  Poly1 d = c - b.derivative();
  int i = 1;
  while (b.degree() > 0) {
    Poly1 a = gcd(b, d);
    if (a.degree() > 0) out.emplace_back(a, i);
    b = exact_quotient(b, a);
    c = exact_quotient(d, a);
    d = c - b.derivative();
    ++i;
  }
  return out;
}

/// Distinct roots of an exact polynomial with their multiplicities.
inline std::vector<RootWithMultiplicity> roots_with_multiplicity(const Poly1& p,
                                                                double tol = 1e-10) {
  if (p.degree() < 1) throw DomainError("root finding needs degree >= 1");
  std::vector<RootWithMultiplicity> out;
  for (const auto& [factor, mult] : squarefree_decomposition(p))
    for (auto z : aberth_roots(to_approx(factor), tol)) out.push_back({z, mult});
  return out;
}

/// All complex roots of p, each repeated according to its multiplicity.
inline std::vector<ApproxComplex> univariate_roots(const Poly1& p, double tol = 1e-10) {
  std::vector<ApproxComplex> out;
  for (const auto& r : roots_with_multiplicity(p, tol))
    for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.value);
  return out;
}

}  // namespace folab

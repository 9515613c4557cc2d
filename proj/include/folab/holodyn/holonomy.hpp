#pragma once

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "folab/foliation.hpp"

namespace folab {

/// Loop theta -> (x0 e^{i theta}, 0) on the invariant axis {y = 0} of omega = P dy - Q dx.
struct HolonomySetup {
  AffineFoliation1Form f;
  ApproxComplex x0{1.0, 0.0};
  double tol = 1e-10;
  long max_steps = 200000;
  double safety = 0.5;  // leaves with |y| > safety * |x0| are reported as escaped
};

inline HolonomySetup make_holonomy_setup(const AffineFoliation1Form& f, ApproxComplex x0 = 1.0,
                                         double tol = 1e-10) {
  if (!restrict_to(f.Q, Axis::Y, ExactComplex()).is_zero())
    throw DomainError("the axis {y = 0} is not invariant: Q(x, 0) is not identically zero");
  if (x0 == ApproxComplex(0.0)) throw DomainError("the base point x0 must be nonzero");
  if (std::abs(f.P.evaluate_approx(x0, 0.0)) < 1e-14)
    throw DomainError("P(x0, 0) = 0: the base point is singular");
  HolonomySetup s;
  s.f = f;
  s.x0 = x0;
  s.tol = tol;
  return s;
}

struct TracePoint {
  double theta;
  ApproxComplex y;
};

namespace detail {

using OdeState = ApproxComplex;

inline auto make_dopri5(double abs_tol, double rel_tol) {
  using namespace boost::numeric::odeint;
  return make_controlled(abs_tol, rel_tol,
                         runge_kutta_dopri5<OdeState, double, OdeState, double, vector_space_algebra>());
}

// Integrate y' = rhs(theta, y) from theta0 to theta1 (either direction). `guard` may throw.
// The absolute error target is tol times the initial size, so small leaves keep relative accuracy.
template <class Rhs, class Guard>
ApproxComplex integrate_arc(Rhs&& rhs, Guard&& guard, ApproxComplex y, double theta0, double theta1,
                            double tol, long max_steps, std::vector<TracePoint>* trace) {
  using boost::numeric::odeint::success;
  auto stepper = make_dopri5(tol * std::max(std::abs(y), 1e-300), tol);
  const double span = theta1 - theta0;
  // s runs over [0, 1] for both directions of the arc
  auto system = [&](const OdeState& v, OdeState& dv, double s) { dv = span * rhs(theta0 + s * span, v); };
  double s = 0.0, ds = 0.01;
  long steps = 0;
  if (trace) trace->push_back({theta0, y});
  while (s < 1.0) {
    if (++steps > max_steps) throw ConvergenceError("holonomy integration exceeded the step budget");
    if (s + ds > 1.0) ds = 1.0 - s;
    if (stepper.try_step(system, y, s, ds) == success) {
      guard(y);
      if (trace) trace->push_back({theta0 + s * span, y});
    }
    if (ds < 1e-14) throw IntegrationError("step size underflow along the loop");
  }
  return y;
}

}  // namespace detail

/// y(theta1) for the leaf through (x0 e^{i theta0}, y0), lifted over the circular path.
inline ApproxComplex holonomy_arc(const HolonomySetup& s, ApproxComplex y0, double theta0, double theta1,
                                  std::vector<TracePoint>* trace = nullptr) {
  if (y0 == ApproxComplex(0.0)) {
    if (trace) *trace = {{theta0, 0.0}, {theta1, 0.0}};
    return 0.0;
  }
  const Poly2d P = to_approx(s.f.P), Q = to_approx(s.f.Q);
  const double bound = s.safety * std::abs(s.x0);
  auto rhs = [&](double theta, ApproxComplex y) {
    ApproxComplex x = s.x0 * std::polar(1.0, theta);
    ApproxComplex p = P.evaluate_approx(x, y);
    if (std::abs(p) < 1e-14 * std::max(1.0, P.evaluation_scale(x, y)))
      throw IntegrationError("P vanished along the lifted path");
    return Q.evaluate_approx(x, y) / p * ApproxComplex(0.0, 1.0) * x;
  };
  auto guard = [&](ApproxComplex y) {
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag()) || std::abs(y) > bound)
      throw IntegrationError("leaf escaped the safety disc |y| <= " + std::to_string(bound));
  };
  return detail::integrate_arc(rhs, guard, y0, theta0, theta1, s.tol, s.max_steps, trace);
}

inline ApproxComplex holonomy_map(const HolonomySetup& s, ApproxComplex y0, std::vector<TracePoint>* trace = nullptr) {
  return holonomy_arc(s, y0, 0.0, 2 * std::numbers::pi, trace);
}

/// The loop run backwards; inverts holonomy_map.
inline ApproxComplex inverse_holonomy_map(const HolonomySetup& s, ApproxComplex y0) {
  return holonomy_arc(s, y0, 2 * std::numbers::pi, 0.0);
}

/// h'(0) from the first variational equation along y = 0: d log(delta)/dtheta = i x Q_y(x, 0) / P(x, 0).
inline ApproxComplex holonomy_multiplier(const HolonomySetup& s) {
  const Poly1d p0 = to_approx(restrict_to(s.f.P, Axis::Y, ExactComplex()));
  const Poly1d q1 = to_approx(restrict_to(s.f.Q.derivative(Axis::Y), Axis::Y, ExactComplex()));
  auto rhs = [&](double theta, ApproxComplex) {
    ApproxComplex x = s.x0 * std::polar(1.0, theta);
    ApproxComplex p = p0.evaluate_approx(x);
    if (std::abs(p) < 1e-14) throw IntegrationError("P vanished on the loop");
    return ApproxComplex(0.0, 1.0) * x * q1.evaluate_approx(x) / p;
  };
  // the state starts at 1 and carries 1 + integral, so the absolute tolerance is tol
  auto no_guard = [](ApproxComplex) {};
  ApproxComplex log_mult = detail::integrate_arc(rhs, no_guard, 1.0, 0.0, 2 * std::numbers::pi, s.tol, s.max_steps, nullptr);
  return std::exp(log_mult - 1.0);
}

inline std::vector<ApproxComplex> default_samples(double radius = 1e-2, int count = 8) {
  std::vector<ApproxComplex> out;
  for (int k = 0; k < count; ++k) out.push_back(std::polar(radius, 2 * std::numbers::pi * (k + 0.5) / count));
  return out;
}

/// Smallest n <= n_max with |h^n(y) - y| <= tol |y| on every sample. Escaping orbits propagate
/// the IntegrationError of h.
inline std::optional<int> finite_order_test(const std::function<ApproxComplex(ApproxComplex)>& h, int n_max,
                                            double tol = 1e-8,
                                            const std::vector<ApproxComplex>& samples = default_samples()) {
  if (n_max < 1) throw DomainError("n_max must be at least 1");
  std::vector<ApproxComplex> current = samples;
  for (int n = 1; n <= n_max; ++n) {
    bool closed = true;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      current[i] = h(current[i]);
      if (std::abs(current[i] - samples[i]) > tol * std::abs(samples[i])) closed = false;
    }
    if (closed) return n;
  }
  return std::nullopt;
}

inline std::optional<int> finite_order_test(const HolonomySetup& s, int n_max, double tol = 1e-8,
                                            const std::vector<ApproxComplex>& samples = default_samples()) {
  return finite_order_test([&](ApproxComplex y) { return holonomy_map(s, y); }, n_max, tol, samples);
}

}  // namespace folab

#pragma once

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "folab/foliation.hpp"

namespace folab {

// x' = p(x), y' = a(x) y^2 + b(x) y + c(x)
struct RiccatiField {
  Poly1 p, a, b, c;
};

inline std::optional<RiccatiField> detect_riccati(const AffineFoliation1Form& f) {
  if (f.P.is_zero() || f.P.degree_in(Axis::Y) > 0 || f.Q.degree_in(Axis::Y) > 2) return std::nullopt;
  auto coeffs = coefficients_in(f.Q, Axis::Y);
  coeffs.resize(3);
  return RiccatiField{restrict_to(f.P, Axis::Y, ExactComplex()), coeffs[2], coeffs[1], coeffs[0]};
}

/// Distinct roots of p: the vertical lines x = x* left invariant.
inline std::vector<ApproxComplex> invariant_fibers(const RiccatiField& r) {
  if (r.p.is_zero()) throw DomainError("p must be nonzero");
  std::vector<ApproxComplex> out;
  if (r.p.is_constant()) return out;
  for (const auto& root : roots_with_multiplicity(r.p)) out.push_back(root.value);
  return out;
}

/// Point of the Riemann sphere.
struct SpherePoint {
  ApproxComplex value;
  bool infinity = false;
};

/// Determinant-one 2x2 matrix acting by y -> (m00 y + m01) / (m10 y + m11), defined up to sign.
class MobiusMap {
 public:
  using Mat = std::array<std::array<ApproxComplex, 2>, 2>;

  MobiusMap() : m_{{{1.0, 0.0}, {0.0, 1.0}}} {}
  explicit MobiusMap(const Mat& m) : m_(m) { normalize(); }

  const Mat& matrix() const { return m_; }
  ApproxComplex det() const { return m_[0][0] * m_[1][1] - m_[0][1] * m_[1][0]; }
  ApproxComplex trace() const { return m_[0][0] + m_[1][1]; }

  friend MobiusMap operator*(const MobiusMap& A, const MobiusMap& B) {
    Mat r{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r[i][j] = A.m_[i][0] * B.m_[0][j] + A.m_[i][1] * B.m_[1][j];
    return MobiusMap(r);
  }

  MobiusMap inverse() const { return MobiusMap(Mat{{{m_[1][1], -m_[0][1]}, {-m_[1][0], m_[0][0]}}}); }

  SpherePoint operator()(SpherePoint z) const {
    if (z.infinity) {
      if (std::abs(m_[1][0]) == 0.0) return {0.0, true};
      return {m_[0][0] / m_[1][0]};
    }
    ApproxComplex den = m_[1][0] * z.value + m_[1][1];
    if (std::abs(den) == 0.0) return {0.0, true};
    return {(m_[0][0] * z.value + m_[0][1]) / den};
  }
  ApproxComplex operator()(ApproxComplex y) const { return (*this)(SpherePoint{y}).value; }

  /// Max entry distance to B or -B.
  double distance(const MobiusMap& B) const {
    double plus = 0.0, minus = 0.0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        plus = std::max(plus, std::abs(m_[i][j] - B.m_[i][j]));
        minus = std::max(minus, std::abs(m_[i][j] + B.m_[i][j]));
      }
    }
    return std::min(plus, minus);
  }

  bool is_identity(double tol) const { return distance(MobiusMap()) <= tol; }

  /// Eigenvector directions (y : 1), or infinity for (1 : 0). Empty when the map is the identity.
  std::vector<SpherePoint> fixed_points(double tol = 1e-9) const {
    if (is_identity(tol)) return {};
    const ApproxComplex a = m_[0][0], b = m_[0][1], c = m_[1][0], d = m_[1][1];
    // c y^2 + (d - a) y - b = 0
    double scale = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d);
    std::vector<SpherePoint> out;
    if (std::abs(c) <= tol * scale) {
      out.push_back({0.0, true});
      if (std::abs(d - a) > tol * scale) out.push_back({b / (d - a)});
      return out;
    }
    ApproxComplex disc = std::sqrt((d - a) * (d - a) + 4.0 * b * c);
    out.push_back({(a - d + disc) / (2.0 * c)});
    if (std::abs(disc) > tol * scale) out.push_back({(a - d - disc) / (2.0 * c)});
    return out;
  }

  bool fixes(SpherePoint z, double tol = 1e-8) const {
    // M (z, 1) parallel to (z, 1), or M (1, 0) parallel to (1, 0)
    ApproxComplex u = z.infinity ? 1.0 : z.value, v = z.infinity ? 0.0 : 1.0;
    ApproxComplex mu = m_[0][0] * u + m_[0][1] * v, mv = m_[1][0] * u + m_[1][1] * v;
    double scale = (std::abs(u) + std::abs(v)) * (std::abs(mu) + std::abs(mv));
    return std::abs(mu * v - mv * u) <= tol * std::max(scale, 1e-300);
  }

 private:
  void normalize() {
    ApproxComplex s = std::sqrt(det());
    if (std::abs(s) == 0.0) throw DomainError("singular matrix is not a Mobius map");
    for (auto& row : m_)
      for (auto& e : row) e /= s;
  }
  Mat m_;
};

/// A piece of a path in the x-plane: a segment, or an arc of the circle centered at `center`.
struct PathPiece {
  enum class Kind { Line, Arc } kind = Kind::Line;
  ApproxComplex from, to;  // Line
  ApproxComplex center;    // Arc
  double radius = 0.0, theta0 = 0.0, theta1 = 0.0;

  static PathPiece line(ApproxComplex a, ApproxComplex b) { return {Kind::Line, a, b, 0.0, 0.0, 0.0, 0.0}; }
  static PathPiece arc(ApproxComplex c, double r, double t0, double t1) { return {Kind::Arc, 0.0, 0.0, c, r, t0, t1}; }

  ApproxComplex at(double s) const {
    if (kind == Kind::Line) return from + s * (to - from);
    return center + std::polar(radius, theta0 + s * (theta1 - theta0));
  }
  ApproxComplex velocity(double s) const {
    if (kind == Kind::Line) return to - from;
    return ApproxComplex(0.0, radius * (theta1 - theta0)) * std::polar(1.0, theta0 + s * (theta1 - theta0));
  }
  PathPiece reversed() const {
    if (kind == Kind::Line) return line(to, from);
    return arc(center, radius, theta1, theta0);
  }
};

using Loop = std::vector<PathPiece>;

inline Loop circle_loop(ApproxComplex center, double radius, double start_angle = 0.0) {
  return {PathPiece::arc(center, radius, start_angle, start_angle + 2 * std::numbers::pi)};
}

inline Loop concatenate(const Loop& first, const Loop& second) {
  Loop out = first;
  out.insert(out.end(), second.begin(), second.end());
  return out;
}

inline Loop reversed(const Loop& l) {
  Loop out;
  for (auto it = l.rbegin(); it != l.rend(); ++it) out.push_back(it->reversed());
  return out;
}

struct MonodromyOptions {
  double tol = 1e-10;
  double margin = 1e-3;  // minimum distance from the path to an invariant fiber
  long max_steps = 200000;
};

/// Holonomy of the Riccati foliation along a closed loop in the x-plane, from the trace-free lift
/// W' = (1/p) [[b/2, c], [-a, -b/2]] W x'(s), with y = w1 / w2.
inline MobiusMap monodromy(const RiccatiField& r, const Loop& loop, const MonodromyOptions& opt = {}) {
  using State = std::vector<ApproxComplex>;
  using namespace boost::numeric::odeint;
  if (loop.empty()) throw DomainError("empty loop");
  for (std::size_t k = 0; k < loop.size(); ++k) {
    ApproxComplex end = loop[k].at(1.0), next = loop[(k + 1) % loop.size()].at(0.0);
    if (std::abs(end - next) > 1e-9 * std::max(1.0, std::abs(end))) throw DomainError("loop is not closed");
  }
  const auto fibers = invariant_fibers(r);
  for (const auto& piece : loop) {
    for (int k = 0; k <= 2000; ++k) {
      ApproxComplex x = piece.at(k / 2000.0);
      for (const auto& z : fibers)
        if (std::abs(x - z) < opt.margin) throw IntegrationError("path too close to an invariant fiber");
    }
  }
  const Poly1d p = to_approx(r.p), a = to_approx(r.a), b = to_approx(r.b), c = to_approx(r.c);

  State W{1.0, 0.0, 0.0, 1.0};  // row-major
  for (const auto& piece : loop) {
    auto system = [&](const State& w, State& dw, double s) {
      ApproxComplex x = piece.at(s), v = piece.velocity(s);
      ApproxComplex px = p.evaluate_approx(x);
      ApproxComplex al = 0.5 * b.evaluate_approx(x) / px * v, be = c.evaluate_approx(x) / px * v;
      ApproxComplex ga = -a.evaluate_approx(x) / px * v, de = -al;
      dw.resize(4);
      dw[0] = al * w[0] + be * w[2];
      dw[1] = al * w[1] + be * w[3];
      dw[2] = ga * w[0] + de * w[2];
      dw[3] = ga * w[1] + de * w[3];
    };
    auto stepper = make_controlled(opt.tol, opt.tol, runge_kutta_dopri5<State, double, State, double>());
    double s = 0.0, ds = 0.01;
    long steps = 0;
    while (s < 1.0) {
      if (++steps > opt.max_steps) throw ConvergenceError("monodromy integration exceeded the step budget");
      if (s + ds > 1.0) ds = 1.0 - s;
      stepper.try_step(system, W, s, ds);
      if (ds < 1e-14) throw IntegrationError("step size underflow along the loop");
    }
  }
  ApproxComplex det = W[0] * W[3] - W[1] * W[2];
  double size = 0.0;
  for (const auto& w : W) size = std::max(size, std::abs(w));
  if (std::abs(det - 1.0) > 1e-6 * std::max(1.0, size * size)) throw ConvergenceError("monodromy lost unimodularity");
  return MobiusMap(MobiusMap::Mat{{{W[0], W[1]}, {W[2], W[3]}}});
}

struct MonodromyGroupReport {
  ApproxComplex base;
  std::vector<ApproxComplex> fibers;
  std::vector<Loop> loops;
  std::vector<MobiusMap> generators;
  std::vector<std::vector<SpherePoint>> fixed_points;  // per generator; empty for the identity
  std::vector<SpherePoint> shared_fixed_points;
  bool all_commute = true;
};

/// One canonical loop per fiber: out along a segment from the base, once around a small circle
/// counterclockwise, and back.
inline Loop canonical_loop(ApproxComplex base, ApproxComplex fiber, double radius) {
  ApproxComplex dir = (base - fiber) / std::abs(base - fiber);
  ApproxComplex near = fiber + radius * dir;
  double t0 = std::arg(dir);
  return {PathPiece::line(base, near), PathPiece::arc(fiber, radius, t0, t0 + 2 * std::numbers::pi),
          PathPiece::line(near, base)};
}

/// Generators, their fixed points, commutation and common fixed points for the given loops based at `base`.
inline MonodromyGroupReport monodromy_group_for_loops(const RiccatiField& r, ApproxComplex base, std::vector<Loop> loops,
                                                      const MonodromyOptions& opt = {}) {
  MonodromyGroupReport rep;
  rep.fibers = invariant_fibers(r);
  rep.base = base;
  rep.loops = std::move(loops);
  for (const auto& loop : rep.loops) {
    rep.generators.push_back(monodromy(r, loop, opt));
    rep.fixed_points.push_back(rep.generators.back().fixed_points());
  }
  const double tol = 1e-6;
  for (std::size_t i = 0; i < rep.generators.size(); ++i)
    for (std::size_t j = i + 1; j < rep.generators.size(); ++j)
      if ((rep.generators[i] * rep.generators[j]).distance(rep.generators[j] * rep.generators[i]) > tol)
        rep.all_commute = false;

  std::optional<std::size_t> first;
  for (std::size_t i = 0; i < rep.generators.size() && !first; ++i)
    if (!rep.generators[i].is_identity(tol)) first = i;
  if (first) {
    for (const auto& z : rep.fixed_points[*first]) {
      bool shared = std::all_of(rep.generators.begin(), rep.generators.end(),
                                [&](const MobiusMap& g) { return g.is_identity(tol) || g.fixes(z, tol); });
      if (shared) rep.shared_fixed_points.push_back(z);
    }
  }
  return rep;
}

inline MonodromyGroupReport global_monodromy_group(const RiccatiField& r, std::optional<ApproxComplex> base = {},
                                                   const MonodromyOptions& opt = {}) {
  const auto fibers = invariant_fibers(r);
  double reach = 1.0;
  for (const auto& z : fibers) reach = std::max(reach, std::abs(z) + 1.0);
  const ApproxComplex b = base ? *base : std::polar(reach, 0.37 * std::numbers::pi);
  std::vector<Loop> loops;
  for (std::size_t k = 0; k < fibers.size(); ++k) {
    double radius = 0.5 * std::abs(b - fibers[k]);
    for (std::size_t j = 0; j < fibers.size(); ++j)
      if (j != k) radius = std::min(radius, 0.5 * std::abs(fibers[j] - fibers[k]));
    loops.push_back(canonical_loop(b, fibers[k], radius));
  }
  return monodromy_group_for_loops(r, b, std::move(loops), opt);
}

/// Closed polygon through the waypoints, returning to the first one.
inline Loop polygon_loop(const std::vector<ApproxComplex>& waypoints) {
  if (waypoints.size() < 2) throw DomainError("a polygonal loop needs at least two waypoints");
  Loop out;
  for (std::size_t k = 0; k < waypoints.size(); ++k) out.push_back(PathPiece::line(waypoints[k], waypoints[(k + 1) % waypoints.size()]));
  return out;
}

/// The vertical fiber through x1 is transverse when the x-component of the field is nonzero at every
/// sample, in the chart (x, y) and in the chart (x, Y = 1/y) where the field reads (p, -(a + b Y + c Y^2)).
inline bool fiber_transversality_check(const RiccatiField& r, ApproxComplex x1,
                                       const std::vector<ApproxComplex>& samples = {0.0, 1.0, {0.0, 2.0}, -3.0},
                                       double tol = 1e-12) {
  const Poly1d p = to_approx(r.p), a = to_approx(r.a), b = to_approx(r.b), c = to_approx(r.c);
  double scale = 0.0;
  for (int k = 0; k <= p.degree(); ++k) scale += std::abs(p.coeff(k)) * std::pow(std::abs(x1), k);
  for (const auto& y : samples) {
    std::array<ApproxComplex, 2> affine{p.evaluate_approx(x1), a.evaluate_approx(x1) * y * y + b.evaluate_approx(x1) * y + c.evaluate_approx(x1)};
    std::array<ApproxComplex, 2> at_infinity{p.evaluate_approx(x1), -(a.evaluate_approx(x1) + b.evaluate_approx(x1) * y + c.evaluate_approx(x1) * y * y)};
    if (std::abs(affine[0]) <= tol * scale || std::abs(at_infinity[0]) <= tol * scale) return false;
  }
  return true;
}

inline bool fiber_transversality_check(const RiccatiField& r, const ExactComplex& x1) {
  return !r.p.evaluate(x1).is_zero();
}

}  // namespace folab

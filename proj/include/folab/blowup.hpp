#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "folab/localclass.hpp"

namespace folab {

/// A point on the exceptional divisor of one blow-up. Chart 1 has coordinates (x, t) with
/// y = t x and divisor {x = 0}; chart 2 has (u, y) with x = u y and divisor {y = 0}.
struct DivisorPoint {
  int chart = 1;
  SingularPoint point;  // in the coordinates of that chart
};

struct BlowupResult {
  AffineFoliation1Form chart1, chart2;
  int nu = 0;  // multiplicity of the blown-up point
  int m = 0;   // power of the divisor equation cleared from the pulled-back form
  bool dicritical = false;
  std::vector<DivisorPoint> divisor_singularities;
  std::vector<DivisorPoint> tangencies;  // regular points where the leaves touch a non-invariant divisor
};

namespace detail {

inline int joint_valuation(const Poly2& a, const Poly2& b, Axis ax) {
  int v = kInfiniteOrder;
  if (!a.is_zero()) v = std::min(v, a.valuation_in(ax));
  if (!b.is_zero()) v = std::min(v, b.valuation_in(ax));
  return v;
}

inline std::vector<ApproxComplex> distinct_roots(const Poly1& p) {
  std::vector<ApproxComplex> out;
  if (p.degree() < 1) return out;
  for (const auto& r : roots_with_multiplicity(p)) out.push_back(r.value);
  return out;
}

inline SingularPoint point_on_axis(const AffineFoliation1Form& f, Axis along, ApproxComplex value) {
  SingularPoint sp;
  ApproxComplex x = along == Axis::Y ? ApproxComplex{} : value;
  ApproxComplex y = along == Axis::Y ? value : ApproxComplex{};
  sp.x = x;
  sp.y = y;
  auto ex = rationalize(value);
  if (ex) {
    ExactComplex zx = along == Axis::Y ? ExactComplex(0) : *ex;
    ExactComplex zy = along == Axis::Y ? *ex : ExactComplex(0);
    sp.exact = std::make_pair(zx, zy);
    sp.x = zx.to_approx();
    sp.y = zy.to_approx();
  }
  sp.residual = std::abs(f.P.evaluate_approx(sp.x, sp.y)) + std::abs(f.Q.evaluate_approx(sp.x, sp.y));
  return sp;
}

// Exact certification of a root of a univariate polynomial; falls back to numeric.
inline SingularPoint certified_axis_point(const AffineFoliation1Form& f, Axis along, ApproxComplex value,
                                          const Poly1& defining) {
  SingularPoint sp = point_on_axis(f, along, value);
  if (sp.exact) {
    const ExactComplex& v = along == Axis::Y ? sp.exact->second : sp.exact->first;
    if (!defining.evaluate(v).is_zero()) {
      sp.exact.reset();
      sp.x = along == Axis::Y ? ApproxComplex{} : value;
      sp.y = along == Axis::Y ? value : ApproxComplex{};
    }
  }
  return sp;
}

}  // namespace detail

/// Quadratic blow-up of the foliation at the origin of its chart.
inline BlowupResult blowup_at_origin(const AffineFoliation1Form& f) {
  BlowupResult r;
  r.nu = std::min(f.P.order(), f.Q.order());
  if (r.nu == kInfiniteOrder) throw DomainError("blowup of the zero form");
  const Poly2 X = Poly2::x(), Y = Poly2::y();

  // chart 1: (x, t) -> (x, t x); omega pulls back to x P dt + (t P - Q) dx
  Poly2 P1 = f.P.substitute(X, X * Y), Q1 = f.Q.substitute(X, X * Y);
  Poly2 a1 = X * P1, b1 = Q1 - Y * P1;
  r.m = detail::joint_valuation(a1, b1, Axis::X);
  r.chart1 = make_foliation(a1.unshifted(r.m, 0), b1.unshifted(r.m, 0));

  // chart 2: (u, y) -> (u y, y); omega pulls back to (P - u Q) dy - y Q du
  Poly2 P2 = f.P.substitute(X * Y, Y), Q2 = f.Q.substitute(X * Y, Y);
  Poly2 a2 = P2 - X * Q2, b2 = Y * Q2;
  int m2 = detail::joint_valuation(a2, b2, Axis::Y);
  r.chart2 = make_foliation(a2.unshifted(0, m2), b2.unshifted(0, m2));
  if (m2 != r.m) throw Error("internal error: blow-up charts cleared different powers");

  // divisor {x = 0} is invariant iff the d/dx component vanishes on it
  Poly1 tangent1 = restrict_to(r.chart1.P, Axis::X, ExactComplex(0));
  Poly1 normal1 = restrict_to(r.chart1.Q, Axis::X, ExactComplex(0));
  r.dicritical = !tangent1.is_zero();

  Poly1 sing1 = r.dicritical ? gcd(tangent1, normal1) : normal1;
  if (sing1.is_zero()) throw Error("internal error: chart 1 form vanishes on the divisor");
  for (auto t : detail::distinct_roots(sing1)) {
    DivisorPoint dp{1, detail::certified_axis_point(r.chart1, Axis::Y, t, sing1)};
    dp.point.multiplicity = singular_multiplicity(r.chart1, dp.point);
    r.divisor_singularities.push_back(dp);
  }
  // the point t = infinity is the origin of chart 2
  bool origin2_singular = r.chart2.P.constant_term().is_zero() && r.chart2.Q.constant_term().is_zero();
  if (origin2_singular) {
    DivisorPoint dp;
    dp.chart = 2;
    dp.point.exact = std::make_pair(ExactComplex(0), ExactComplex(0));
    dp.point.multiplicity = std::min(r.chart2.P.order(), r.chart2.Q.order());
    r.divisor_singularities.push_back(dp);
  }
  if (r.dicritical) {
    Poly1 tang = exact_quotient(tangent1, gcd(tangent1, normal1));
    for (auto t : detail::distinct_roots(tang))
      r.tangencies.push_back({1, detail::certified_axis_point(r.chart1, Axis::Y, t, tang)});
    if (!origin2_singular && r.chart2.Q.constant_term().is_zero()) {
      DivisorPoint dp;
      dp.chart = 2;
      dp.point.exact = std::make_pair(ExactComplex(0), ExactComplex(0));
      r.tangencies.push_back(dp);
    }
  }
  return r;
}

// ---- Seidenberg reduction ---------------------------------------------------------------------

class DepthExceeded : public Error {
 public:
  explicit DepthExceeded(int depth)
      : Error("reduction did not finish within max_depth = " + std::to_string(depth)), max_depth(depth) {}
  int max_depth;
};

struct DivisorComponent {
  int id = 0;              // 1-based, E1, E2, ...
  int self_intersection = -1;
  bool invariant = true;
  int created_by = 0;      // index into ReductionTree::nodes
};

struct BlowupNode {
  int id = 0;
  int parent = -1;         // node whose divisor contains this center, -1 for the original point
  std::string location;    // human-readable path to the center
  int nu = 0;
  bool dicritical = false;
  int component = 0;       // component created by this blow-up
  int depth = 1;
  std::vector<int> through;  // earlier components passing through the center
};

struct ReductionLeaf {
  std::string location;
  SingularPoint point;     // in the local chart it was found in
  AffineFoliation1Form local_form;  // germ translated to the origin when the point is exact
  SingularityReport report;
  std::vector<int> components;  // divisor components through the point
};

struct ReductionTangency {
  std::string location;
  int component = 0;
};

struct ReductionTree {
  std::vector<BlowupNode> nodes;
  std::vector<DivisorComponent> components;
  std::set<std::pair<int, int>> edges;  // intersecting components (corners)
  std::vector<ReductionLeaf> leaves;
  std::vector<ReductionTangency> tangencies;
  int depth = 0;

  bool has_dicritical_component() const {
    return std::any_of(components.begin(), components.end(), [](const DivisorComponent& c) { return !c.invariant; });
  }
};

struct ReduceOptions {
  int max_depth = 32;
  ClassifyOptions classify;
};

namespace detail {

struct PendingGerm {
  AffineFoliation1Form form;  // singular point at the origin
  std::string location;
  int parent = -1;
  int depth = 0;              // blow-ups already performed above this germ
  int on_x_axis = 0;          // component lying along {y = 0}, 0 for none
  int on_y_axis = 0;          // component lying along {x = 0}
  SingularPoint point;
  bool numeric = false;       // location only known approximately
  Poly2d numeric_P, numeric_Q;
};

inline std::array<double, 4> location_key(const SingularPoint& p) {
  return {p.x.real(), p.x.imag(), p.y.real(), p.y.imag()};
}

inline SingularityReport classify_germ(const PendingGerm& g, const ClassifyOptions& opt) {
  if (!g.numeric) return classify_at_origin(g.form, opt);
  Mat2<ApproxComplex> J{{{g.numeric_P.coeff(1, 0), g.numeric_P.coeff(0, 1)},
                         {g.numeric_Q.coeff(1, 0), g.numeric_Q.coeff(0, 1)}}};
  return classify(linear_part(J), opt);
}

}  // namespace detail

/// Resolves the singularity at `center` by repeated blow-ups of every non-irreducible point on
/// the exceptional divisor, level by level, highest multiplicity first.
inline ReductionTree seidenberg_reduce(const AffineFoliation1Form& f, const SingularPoint& center,
                                       const ReduceOptions& opt = {}) {
  if (opt.max_depth < 1) throw DomainError("max_depth must be at least 1");
  if (!center.exact) throw DomainError("seidenberg_reduce needs an exactly known center");
  ReductionTree tree;
  detail::PendingGerm root;
  root.form = translated(f, center.exact->first, center.exact->second);
  if (!root.form.P.constant_term().is_zero() || !root.form.Q.constant_term().is_zero())
    throw DomainError("seidenberg_reduce: center is not a singular point");
  root.location = "center " + center.location_string();
  root.point = center;

  std::vector<detail::PendingGerm> level{root};
  while (!level.empty()) {
    std::stable_sort(level.begin(), level.end(), [](const detail::PendingGerm& a, const detail::PendingGerm& b) {
      int na = a.numeric ? 1 : std::min(a.form.P.order(), a.form.Q.order());
      int nb = b.numeric ? 1 : std::min(b.form.P.order(), b.form.Q.order());
      if (na != nb) return na > nb;
      return detail::location_key(a.point) < detail::location_key(b.point);
    });
    std::vector<detail::PendingGerm> next;
    for (auto& g : level) {
      SingularityReport rep = detail::classify_germ(g, opt.classify);
      if (rep.irreducible) {
        ReductionLeaf leaf;
        leaf.location = g.location;
        leaf.point = g.point;
        leaf.local_form = g.form;
        leaf.report = rep;
        if (g.on_x_axis) leaf.components.push_back(g.on_x_axis);
        if (g.on_y_axis) leaf.components.push_back(g.on_y_axis);
        tree.leaves.push_back(leaf);
        continue;
      }
      if (g.numeric)
        throw DomainError("non-irreducible singular point at an approximately known location " + g.location);
      if (g.depth >= opt.max_depth) throw DepthExceeded(opt.max_depth);

      BlowupResult b = blowup_at_origin(g.form);
      BlowupNode node;
      node.id = static_cast<int>(tree.nodes.size());
      node.parent = g.parent;
      node.location = g.location;
      node.nu = b.nu;
      node.dicritical = b.dicritical;
      node.depth = g.depth + 1;
      DivisorComponent comp;
      comp.id = static_cast<int>(tree.components.size()) + 1;
      comp.invariant = !b.dicritical;
      comp.created_by = node.id;
      node.component = comp.id;
      tree.nodes.push_back(node);
      tree.components.push_back(comp);
      tree.depth = std::max(tree.depth, node.depth);
      for (int old : {g.on_x_axis, g.on_y_axis}) {
        if (!old) continue;
        tree.nodes.back().through.push_back(old);
        tree.components[old - 1].self_intersection -= 1;
        tree.edges.insert({std::min(old, comp.id), std::max(old, comp.id)});
      }
      if (g.on_x_axis && g.on_y_axis) tree.edges.erase({std::min(g.on_x_axis, g.on_y_axis), std::max(g.on_x_axis, g.on_y_axis)});

      const std::string prefix = "E" + std::to_string(comp.id);
      for (const auto& dp : b.divisor_singularities) {
        detail::PendingGerm child;
        child.parent = node.id;
        child.depth = g.depth + 1;
        child.point = dp.point;
        const AffineFoliation1Form& chart = dp.chart == 1 ? b.chart1 : b.chart2;
        if (dp.chart == 1) {
          child.on_y_axis = comp.id;  // divisor {x = 0}
          ApproxComplex t = dp.point.y;
          bool at_zero = dp.point.exact && dp.point.exact->second.is_zero();
          if (at_zero) child.on_x_axis = g.on_x_axis;  // strict transform of {y = 0} is {t = 0}
          child.location = prefix + " chart1 t=" + (dp.point.exact ? dp.point.exact->second.to_string() : approx_to_string(t));
        } else {
          child.on_x_axis = comp.id;  // divisor {y = 0}
          child.on_y_axis = g.on_y_axis;  // strict transform of {x = 0} is {u = 0}
          child.location = prefix + " chart2 u=0";
        }
        if (dp.point.exact) {
          child.form = translated(chart, dp.point.exact->first, dp.point.exact->second);
        } else {
          child.numeric = true;
          child.form = chart;
          std::tie(child.numeric_P, child.numeric_Q) = translated_numeric(chart, dp.point.x, dp.point.y);
        }
        next.push_back(std::move(child));
      }
      for (const auto& tp : b.tangencies) {
        std::string where = tp.chart == 1
                                ? prefix + " chart1 t=" + (tp.point.exact ? tp.point.exact->second.to_string()
                                                                          : approx_to_string(tp.point.y))
                                : prefix + " chart2 u=0";
        tree.tangencies.push_back({where, comp.id});
      }
    }
    level = std::move(next);
  }
  return tree;
}

inline bool dicritical_germ(const AffineFoliation1Form& f, const SingularPoint& center, const ReduceOptions& opt = {}) {
  return seidenberg_reduce(f, center, opt).has_dicritical_component();
}

/// The origin as an exact singular point, for germs already centred there.
inline SingularPoint origin_point() {
  SingularPoint p;
  p.exact = std::make_pair(ExactComplex(0), ExactComplex(0));
  return p;
}

}  // namespace folab

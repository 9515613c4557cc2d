#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "folab/blowup.hpp"
#include "folab/darboux.hpp"
#include "folab/holodyn.hpp"
#include "folab/localclass.hpp"
#include "folab/riccati.hpp"

#ifndef FOLAB_VERSION
#define FOLAB_VERSION "0.1.0"
#endif

namespace folab::report {

using json = nlohmann::ordered_json;

inline constexpr const char* tool_version() { return FOLAB_VERSION; }

// Numbers are tagged objects:
//   {"kind": "exact", "value": "3/2-1/4i"}
//   {"kind": "approx", "re": 0.5, "im": -0.25, "tol": 1e-10}
//   {"kind": "approx", "value": 2.5, "tol": 1e-10}           (real quantities)
// Non-finite reals are written as the strings "inf", "-inf", "nan".

namespace detail {

inline json real_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double read_real(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw ParseError("unknown real literal '" + s + "'", 0);
}

}  // namespace detail

inline json exact(const ExactComplex& z) { return {{"kind", "exact"}, {"value", z.to_string()}}; }
inline json exact(const Rational& q) { return exact(ExactComplex(q)); }
inline json exact(long n) { return exact(ExactComplex(Rational(n))); }

inline json approx(ApproxComplex z, double tol) {
  return {{"kind", "approx"}, {"re", detail::real_value(z.real())}, {"im", detail::real_value(z.imag())}, {"tol", tol}};
}
inline json approx_real(double v, double tol) {
  return {{"kind", "approx"}, {"value", detail::real_value(v)}, {"tol", tol}};
}

inline json number(const std::optional<ExactComplex>& e, ApproxComplex z, double tol) {
  return e ? exact(*e) : approx(z, tol);
}

inline bool is_exact(const json& j) { return j.at("kind") == "exact"; }

inline std::optional<ExactComplex> read_exact(const json& j) {
  if (!is_exact(j)) return std::nullopt;
  return parse_scalar(j.at("value").get<std::string>());
}

inline ApproxComplex read_number(const json& j) {
  if (is_exact(j)) return read_exact(j)->to_approx();
  if (j.contains("value")) return detail::read_real(j.at("value"));
  return {detail::read_real(j.at("re")), detail::read_real(j.at("im"))};
}

inline json poly(const Poly2& p, Chart chart = Chart::XY) {
  auto [a, b] = chart_variables(chart);
  return p.to_string(a, b);
}
inline json poly(const Poly1& p, const std::string& var = "x") { return p.to_string(var); }

inline json poly(const Poly2d& p, double tol) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) terms.push_back({{"x", m.i}, {"y", m.j}, {"coefficient", approx(c, tol)}});
  return {{"kind", "approx_polynomial"}, {"terms", terms}, {"tol", tol}};
}

inline json foliation(const AffineFoliation1Form& f) {
  return {{"P", poly(f.P, f.chart)}, {"Q", poly(f.Q, f.chart)}, {"chart", chart_name(f.chart)}, {"form", f.form_string()}};
}

inline json point(const SingularPoint& p, double tol) {
  json j;
  j["x"] = number(p.exact ? std::optional(p.exact->first) : std::nullopt, p.x, tol);
  j["y"] = number(p.exact ? std::optional(p.exact->second) : std::nullopt, p.y, tol);
  j["multiplicity"] = p.multiplicity;
  j["residual"] = approx_real(p.residual, tol);
  return j;
}

inline json singularity(const SingularityReport& r, double tol) {
  json j;
  j["domain"] = domain_name(r.domain);
  j["irreducible"] = r.irreducible;
  j["exact_decision"] = r.exact_decision;
  j["resonance"] = r.resonance ? json(*r.resonance) : json(nullptr);
  const double eig_tol = std::max(tol, r.linear.eigen_error);
  json eig = json::array();
  for (int k = 0; k < 2; ++k)
    eig.push_back(number(r.linear.eigen_exact ? std::optional((*r.linear.eigen_exact)[k]) : std::nullopt,
                         r.linear.eigen[k], eig_tol));
  j["eigenvalues"] = eig;
  if (r.ratio_exact) j["ratio"] = exact(*r.ratio_exact);
  else if (r.ratio) j["ratio"] = approx(*r.ratio, eig_tol);
  else j["ratio"] = nullptr;
  j["rational_ratio"] = r.rational_ratio ? exact(*r.rational_ratio) : json(nullptr);
  return j;
}

inline json reduction(const ReductionTree& t, double tol) {
  json j;
  j["depth"] = t.depth;
  j["dicritical"] = t.has_dicritical_component();
  json comps = json::array();
  for (const auto& c : t.components)
    comps.push_back({{"id", c.id}, {"name", "E" + std::to_string(c.id)}, {"self_intersection", c.self_intersection},
                     {"invariant", c.invariant}, {"created_by", c.created_by}});
  j["components"] = comps;
  json edges = json::array();
  for (const auto& [a, b] : t.edges) edges.push_back({a, b});
  j["edges"] = edges;
  json nodes = json::array();
  for (const auto& n : t.nodes)
    nodes.push_back({{"id", n.id}, {"parent", n.parent}, {"location", n.location}, {"nu", n.nu},
                     {"dicritical", n.dicritical}, {"component", n.component}, {"depth", n.depth},
                     {"through", n.through}});
  j["blowups"] = nodes;
  json leaves = json::array();
  for (const auto& l : t.leaves)
    leaves.push_back({{"location", l.location}, {"point", point(l.point, tol)}, {"report", singularity(l.report, tol)},
                      {"components", l.components}});
  j["leaves"] = leaves;
  json tang = json::array();
  for (const auto& g : t.tangencies) tang.push_back({{"location", g.location}, {"component", g.component}});
  j["tangencies"] = tang;
  return j;
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

namespace detail {

inline void dot_body(std::ostream& os, const ReductionTree& t, const std::string& prefix, const std::string& indent) {
  for (const auto& c : t.components) {
    os << indent << prefix << "E" << c.id << " [label=\"E" << c.id << "\\nself-intersection " << c.self_intersection
       << "\\n" << (c.invariant ? "invariant" : "non-invariant") << "\"];\n";
  }
  for (const auto& [a, b] : t.edges) os << indent << prefix << "E" << a << " -- " << prefix << "E" << b << ";\n";
}

}  // namespace detail

/// Divisor components as nodes, corners as edges.
inline std::string reduction_dot(const ReductionTree& t, const std::string& name = "reduction") {
  std::ostringstream os;
  os << "graph \"" << dot_escape(name) << "\" {\n";
  detail::dot_body(os, t, "", "  ");
  os << "}\n";
  return os.str();
}

/// Several reductions in one graph, one cluster per reduced point.
inline std::string reduction_dot(const std::vector<std::pair<std::string, ReductionTree>>& trees,
                                 const std::string& name = "reduction") {
  if (trees.size() == 1) return reduction_dot(trees.front().second, name);
  std::ostringstream os;
  os << "graph \"" << dot_escape(name) << "\" {\n";
  for (std::size_t k = 0; k < trees.size(); ++k) {
    os << "  subgraph cluster_" << k << " {\n    label=\"" << dot_escape(trees[k].first) << "\";\n";
    detail::dot_body(os, trees[k].second, "p" + std::to_string(k) + "_", "    ");
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

inline json index_report(const IndexTheoremReport& r, double tol) {
  json entries = json::array();
  for (const auto& e : r.entries) entries.push_back({{"where", e.where}, {"index", number(e.index_exact, e.index, tol)}});
  return {{"entries", entries}, {"sum", number(r.sum_exact, r.sum, tol)}, {"expected", r.expected}, {"pass", r.pass}};
}

inline json curve(const InvariantCurve& c) { return {{"f", poly(c.f)}, {"cofactor", poly(c.cofactor)}}; }

inline json curve(const NumericInvariantCurve& c, double tol) {
  return {{"f", poly(c.f, tol)}, {"cofactor", poly(c.cofactor, tol)}, {"residual", approx_real(c.residual, tol)}};
}

inline json lines(const InvariantLines& l, double tol) {
  json ex = json::array(), nu = json::array();
  for (const auto& c : l.exact) ex.push_back(curve(c));
  for (const auto& c : l.numeric) nu.push_back(curve(c, tol));
  json j{{"exact", ex}, {"numeric", nu}, {"infinitely_many", l.infinitely_many}};
  if (l.infinitely_many) j["family"] = l.family;
  return j;
}

inline json vector_exact(const std::vector<ExactComplex>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(exact(z));
  return out;
}

inline json first_integral(const FirstIntegralOutcome& o) {
  json j{{"kind", kind_name(o.kind)}, {"verified", o.verified}};
  if (o.F) j["F"] = {{"numerator", poly(o.F->num)}, {"denominator", poly(o.F->den)}};
  j["exponents"] = o.exponents;
  j["log_exponents"] = vector_exact(o.log_exponents);
  return j;
}

inline json koenigs(const KoenigsResult& k, double tol) {
  json series = json::array();
  for (const auto& c : k.series) series.push_back(approx(c, tol));
  return {{"series", series}, {"residual", approx_real(k.residual, tol)}, {"test_radius", k.test_radius}};
}

inline json orbit_probe(const OrbitProbe& p, double tol) {
  return {{"start", approx(p.start, tol)}, {"iterations", p.iterations},
          {"final_modulus", approx_real(p.final_modulus, tol)}, {"reached", p.reached}};
}

inline json parabolic(const ParabolicReport& r, double tol) {
  json attr = json::array(), rep = json::array();
  for (double a : r.attracting) attr.push_back(approx_real(a, tol));
  for (double a : r.repelling) rep.push_back(approx_real(a, tol));
  return {{"k", r.k},
          {"a", approx(r.a, tol)},
          {"attracting", attr},
          {"repelling", rep},
          {"forward", orbit_probe(r.forward, tol)},
          {"backward", orbit_probe(r.backward, tol)}};
}

inline json cycles(const CycleSearchResult& c, double tol) {
  json pts = json::array();
  for (std::size_t k = 0; k < c.points.size(); ++k)
    pts.push_back({{"point", approx(c.points[k], tol)}, {"residual", approx_real(c.residuals[k], tol)}});
  return {{"cycles", pts}, {"degenerate", c.degenerate}};
}

inline json arithmetic(const ArithmeticDiagnostic& d, double tol) {
  json a = json::array(), q = json::array();
  for (const auto& v : d.partial_quotients) a.push_back(v.get_str());
  for (const auto& v : d.denominators) q.push_back(v.get_str());
  return {{"depth", d.depth},
          {"partial_quotients", a},
          {"denominators", q},
          {"brjuno_partial", approx_real(d.brjuno_partial, tol)},
          {"cremer_log10", approx_real(d.cremer_log10, tol)}};
}

inline json sphere_point(const SpherePoint& p, double tol) {
  if (p.infinity) return "infinity";
  return approx(p.value, tol);
}

inline json mobius(const MobiusMap& m, double tol) {
  json rows = json::array();
  for (const auto& row : m.matrix()) rows.push_back({approx(row[0], tol), approx(row[1], tol)});
  return rows;
}

inline json riccati_field(const RiccatiField& r) {
  return {{"p", poly(r.p)}, {"a", poly(r.a)}, {"b", poly(r.b)}, {"c", poly(r.c)}};
}

inline json monodromy_group(const RiccatiField& r, const MonodromyGroupReport& g, double tol) {
  json fibers = json::array(), gens = json::array(), fixed = json::array(), shared = json::array();
  for (const auto& z : g.fibers) fibers.push_back(approx(z, tol));
  for (const auto& m : g.generators) gens.push_back(mobius(m, tol));
  for (const auto& pts : g.fixed_points) {
    json one = json::array();
    for (const auto& p : pts) one.push_back(sphere_point(p, tol));
    fixed.push_back(one);
  }
  for (const auto& p : g.shared_fixed_points) shared.push_back(sphere_point(p, tol));
  return {{"riccati", riccati_field(r)}, {"base", approx(g.base, tol)}, {"fibers", fibers},
          {"generators", gens}, {"fixed_points", fixed}, {"shared_fixed_points", shared},
          {"all_commute", g.all_commute}};
}

inline json error_object(const std::string& kind, const std::string& message) {
  return {{"error", {{"kind", kind}, {"message", message}}}, {"tool_version", tool_version()}};
}

}  // namespace folab::report

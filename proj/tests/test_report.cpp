#include <gtest/gtest.h>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/graphviz.hpp>

#include <cmath>
#include <random>

#include "folab/report.hpp"
#include "support/random.hpp"
#include "support/schema.hpp"

using namespace folab;
using report::json;

namespace {

Poly2 P(const char* s) { return parse_poly(s); }
AffineFoliation1Form F(const char* p, const char* q) { return make_foliation(P(p), P(q)); }
AffineFoliation1Form suzuki() { return F("2*x*y^2 + x*y - x^2", "y^3 + y^2 - x*y"); }

struct DotVertex {
  std::string name, label;
};
using DotGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS, DotVertex>;

DotGraph read_dot(const std::string& text) {
  DotGraph g;
  boost::dynamic_properties dp(boost::ignore_other_properties);
  dp.property("node_id", boost::get(&DotVertex::name, g));
  dp.property("label", boost::get(&DotVertex::label, g));
  if (!boost::read_graphviz(text, g, dp, "node_id")) throw std::runtime_error("not a graphviz graph");
  return g;
}

void expect_clean(const json& j) {
  auto problems = testgen::check_tags(j);
  EXPECT_TRUE(problems.empty()) << problems.front();
}

}  // namespace

TEST(ReportNumbers, ExactRoundTrip) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    ExactComplex z = testgen::random_scalar(rng);
    json j = json::parse(report::exact(z).dump());
    ASSERT_TRUE(report::is_exact(j));
    EXPECT_EQ(*report::read_exact(j), z);
  }
}

TEST(ReportNumbers, ApproxRoundTripIsBitExact) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int t = 0; t < 200; ++t) {
    ApproxComplex z(u(rng) * std::pow(10.0, t % 20 - 10), u(rng));
    json j = json::parse(report::approx(z, 1e-10).dump());
    EXPECT_EQ(report::read_number(j), z);
    EXPECT_EQ(j.at("tol").get<double>(), 1e-10);
  }
  json inf = json::parse(report::approx_real(-INFINITY, 0.0).dump());
  EXPECT_TRUE(std::isinf(report::read_number(inf).real()));
  EXPECT_TRUE(std::isnan(report::read_number(json::parse(report::approx_real(NAN, 0.0).dump())).real()));
}

TEST(ReportSchema, SingularitiesAndReduction) {
  auto f = suzuki();
  for (const auto& p : find_singularities(f)) {
    json pj = report::point(p, 1e-9);
    expect_clean(pj);
    auto rep = classify(f, p);
    json rj = report::singularity(rep, 1e-9);
    expect_clean(rj);
    EXPECT_TRUE(testgen::missing_keys(rj, {"domain", "irreducible", "resonance", "eigenvalues", "ratio"}).empty());
    EXPECT_EQ(json::parse(rj.dump()), rj);
  }
  auto tree = seidenberg_reduce(f, origin_point());
  json tj = report::reduction(tree, 1e-9);
  expect_clean(tj);
  EXPECT_EQ(tj["depth"], 1);
  EXPECT_EQ(tj["dicritical"], true);
  ASSERT_EQ(tj["components"].size(), 1u);
  EXPECT_EQ(tj["components"][0]["self_intersection"], -1);
  EXPECT_EQ(tj["components"][0]["invariant"], false);
  EXPECT_EQ(json::parse(tj.dump()), tj);
}

TEST(ReportSchema, ModuleReportsCarryTolerances) {
  expect_clean(report::lines(find_invariant_lines(F("y", "2*x")), 1e-9));
  expect_clean(report::index_report(index_theorem_check(F("x", "2*y"), ProjectiveLine::infinity()), 1e-8));
  auto g = GermSeries::parse("1/2*z + z^2");
  expect_clean(report::koenigs(koenigs_linearize(g), 1e-8));
  expect_clean(report::parabolic(parabolic_analyze(GermSeries::parse("z + z^2"), 0.1, 100), 1e-12));
  expect_clean(report::arithmetic(brjuno_cremer_diagnostic(Rational(13, 21), 5), 1e-12));
  auto r = detect_riccati(F("x^2 - x", "y^2 + x")).value();
  json mj = report::monodromy_group(r, global_monodromy_group(r), 1e-6);
  expect_clean(mj);
  EXPECT_TRUE(testgen::missing_keys(mj, {"riccati", "fibers", "generators", "shared_fixed_points"}).empty());
  EXPECT_EQ(mj["generators"].size(), 2u);
}

TEST(ReportDot, SuzukiParsesAsGraph) {
  auto tree = seidenberg_reduce(suzuki(), origin_point());
  auto g = read_dot(report::reduction_dot(tree));
  ASSERT_EQ(boost::num_vertices(g), 1u);
  EXPECT_EQ(boost::num_edges(g), 0u);
  EXPECT_EQ(g[0].name, "E1");
  EXPECT_NE(g[0].label.find("self-intersection -1"), std::string::npos);
  EXPECT_NE(g[0].label.find("non-invariant"), std::string::npos);
}

TEST(ReportDot, ChainsAndClustersParse) {
  // a cusp needs a chain of three blow-ups
  auto cusp = F("2*y", "3*x^2");
  auto tree = seidenberg_reduce(cusp, origin_point());
  auto g = read_dot(report::reduction_dot(tree));
  EXPECT_EQ(boost::num_vertices(g), tree.components.size());
  EXPECT_EQ(boost::num_edges(g), tree.edges.size());

  std::vector<std::pair<std::string, ReductionTree>> both{{"(0, 0)", tree}, {"again \"quoted\"", tree}};
  auto g2 = read_dot(report::reduction_dot(both));
  EXPECT_EQ(boost::num_vertices(g2), 2 * tree.components.size());
}

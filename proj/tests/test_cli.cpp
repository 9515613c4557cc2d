#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "support/schema.hpp"

using folab::report::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  json parsed() const { return json::parse(out); }
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run run(const std::vector<std::string>& args, const std::string& env = "") {
  std::string cmd = env.empty() ? "" : env + " ";
  cmd += quote(FOLAB_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "foliation_lab_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

const std::vector<std::string> kSuzuki{"--P", "2*x*y^2+x*y-x^2", "--Q", "y^3+y^2-x*y"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST(Cli, AnalyzeResonantNode) {
  auto r = run({"analyze", "--P", "x", "--Q", "2*y"});
  ASSERT_EQ(r.code, 0) << r.out;
  json j = r.parsed();
  EXPECT_TRUE(folab::testgen::check_tags(j).empty());
  EXPECT_EQ(j["tool_version"], FOLAB_VERSION);
  ASSERT_EQ(j["singularities"].size(), 1u);
  const auto& c = j["singularities"][0]["classification"];
  EXPECT_EQ(c["domain"], "Poincare");
  EXPECT_EQ(c["resonance"], 2);
  std::set<std::string> lines;
  for (const auto& l : j["darboux"]["lines"]["exact"]) lines.insert(l["f"].get<std::string>());
  EXPECT_EQ(lines, (std::set<std::string>{"x", "y"}));
}

TEST(Cli, AnalyzeSuzukiHasDicriticalDepthOneReduction) {
  auto r = run(with({"analyze"}, kSuzuki));
  ASSERT_EQ(r.code, 0) << r.out;
  bool found = false;
  const json j = r.parsed();
  for (const auto& s : j["singularities"]) {
    if (s["point"]["x"]["value"] == "0" && s["point"]["y"]["value"] == "0") {
      found = true;
      EXPECT_EQ(s["reduction"]["depth"], 1);
      EXPECT_EQ(s["reduction"]["dicritical"], true);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"analyze", "--P", "0", "--Q", "0"}).code, 1);
  EXPECT_EQ(run({"analyze", "--P", "x^", "--Q", "y"}).code, 1);
  EXPECT_EQ(run({"analyze", "--P", "x"}).code, 1);
  EXPECT_EQ(run({"analyze"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  auto failure = run({"holonomy", "--P", "1", "--Q", "x"});
  EXPECT_EQ(failure.code, 2);
  EXPECT_EQ(failure.parsed()["error"]["kind"], "analysis");
  EXPECT_EQ(run({"riccati", "--P", "x+y", "--Q", "y"}).code, 2);
  EXPECT_EQ(run({"--version"}).code, 0);
}

TEST(Cli, ReduceSuzukiDot) {
  auto r = run(with({"reduce", "--dot"}, kSuzuki));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("graph"), std::string::npos);
  EXPECT_NE(r.out.find("E1 [label=\"E1\\nself-intersection -1\\nnon-invariant\"]"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("E2"), std::string::npos);
  EXPECT_EQ(r.out.find("--"), std::string::npos);
}

TEST(Cli, IndexAlongAxis) {
  auto r = run({"index", "--P", "x", "--Q", "-3/2*y", "--axis", "y"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.parsed()["index"]["value"], "-3/2");
  EXPECT_EQ(r.parsed()["index_theorem"]["pass"], true);
  auto x = run({"index", "--P", "x", "--Q", "-3/2*y", "--axis", "x"});
  EXPECT_EQ(x.parsed()["index"]["value"], "-2/3");
}

TEST(Cli, GermPetals) {
  auto r = run({"germ", "--series", "z+z^2", "--cmd", "petals"});
  ASSERT_EQ(r.code, 0);
  json p = r.parsed()["petals"];
  EXPECT_EQ(p["k"], 1);
  ASSERT_EQ(p["attracting"].size(), 1u);
  EXPECT_NEAR(std::abs(folab::report::read_number(p["attracting"][0]).real()), std::numbers::pi, 1e-12);
}

TEST(Cli, HolonomyOrderAndTrace) {
  auto csv = scratch("trace.csv");
  auto r = run({"holonomy", "--form", "2*x*dy + 3*y*dx", "--csv", csv.string()});
  ASSERT_EQ(r.code, 0) << r.out;
  json j = r.parsed();
  EXPECT_EQ(j["order"], 2);
  EXPECT_NEAR(folab::report::read_number(j["multiplier"]).real(), -1.0, 1e-8);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "theta,re,im");
  auto saddle_node = run({"holonomy", "--P", "-x", "--Q", "-y^2"});
  EXPECT_TRUE(saddle_node.parsed()["order"].is_null());
}

TEST(Cli, DarbouxRationalFirstIntegral) {
  auto r = run({"darboux", "--P", "x", "--Q", "2/3*y", "--lines"});
  ASSERT_EQ(r.code, 0);
  json fi = r.parsed()["first_integral"];
  EXPECT_EQ(fi["kind"], "rational");
  EXPECT_EQ(fi["verified"], true);
  EXPECT_EQ(fi["F"]["numerator"], "y^3");
  EXPECT_EQ(fi["F"]["denominator"], "x^2");
  auto c = run(with({"darboux", "--curve", "y", "--curve", "x^2+y^2-1"}, kSuzuki)).parsed();
  EXPECT_EQ(c["curves"].size(), 1u);
  EXPECT_EQ(c["not_invariant"].size(), 1u);
}

TEST(Cli, RiccatiAutoAndWaypoints) {
  auto r = run({"riccati", "--P", "x", "--Q", "1/2*y"});
  ASSERT_EQ(r.code, 0);
  json j = r.parsed();
  ASSERT_EQ(j["generators"].size(), 1u);
  auto m00 = folab::report::read_number(j["generators"][0][0][0]);
  EXPECT_NEAR(std::abs(m00.real()), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(m00.imag()), 1.0, 1e-6);

  auto loops = scratch("loops.json");
  std::ofstream(loops) << R"({"loops": [[[2, 0], [0, 2], [-2, 0], [0, -2]], [[2, 0], [3, 1], [3, -1]]]})";
  auto w = run({"riccati", "--P", "x", "--Q", "1/2*y", "--loops", loops.string()});
  ASSERT_EQ(w.code, 0) << w.out;
  EXPECT_EQ(w.parsed()["generators"].size(), 2u);
}

TEST(Cli, DeterministicForFixedSeed) {
  std::vector<std::string> args{"analyze", "--P", "x + y^2", "--Q", "-y", "--sphere", "1", "--sphere-samples", "300"};
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.parsed()["seed"], 1);
  EXPECT_EQ(run(args, "FOLIATION_LAB_SEED=77").parsed()["seed"], 77);
  EXPECT_EQ(run(with(args, {"--seed", "5"}), "FOLIATION_LAB_SEED=77").parsed()["seed"], 5);
}

TEST(Cli, BatchKeepsInputOrder) {
  auto batch = scratch("batch.txt");
  std::ofstream(batch) << "x ; 2*y\n# skipped\n2*x*dy + 3*y*dx\n0 ; 0\n" << kSuzuki[1] << " ; " << kSuzuki[3] << "\n";
  auto r = run({"analyze", "--batch", batch.string(), "--threads", "4"});
  ASSERT_EQ(r.code, 0);
  json results = r.parsed()["results"];
  ASSERT_EQ(results.size(), 4u);
  EXPECT_EQ(results[0]["line"], "x ; 2*y");
  EXPECT_EQ(results[2]["error"]["kind"], "usage");
  auto single = run({"analyze", "--P", "x", "--Q", "2*y"}).parsed();
  EXPECT_EQ(results[0]["singularities"], single["singularities"]);
  EXPECT_EQ(results[3]["singularities"].size(), run(with({"analyze"}, kSuzuki)).parsed()["singularities"].size());
}

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "folab/report.hpp"

using namespace folab;
namespace rep = folab::report;
using rep::json;

namespace {

constexpr int kOk = 0, kUsage = 1, kFailure = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FieldInput {
  std::string P, Q, form;
};

void add_field_options(CLI::App* cmd, FieldInput& in) {
  auto* p = cmd->add_option("--P", in.P, "first component P of the field (P, Q), omega = P dy - Q dx");
  auto* q = cmd->add_option("--Q", in.Q, "second component Q");
  auto* form = cmd->add_option("--form", in.form, "one-form \"A*dx + B*dy\" instead of --P/--Q");
  p->needs(q);
  q->needs(p);
  form->excludes(p)->excludes(q);
}

AffineFoliation1Form read_field(const FieldInput& in) {
  if (in.form.empty() && in.P.empty()) throw UsageError("give --P and --Q, or --form");
  auto [P, Q] = in.form.empty() ? std::pair(parse_poly(in.P), parse_poly(in.Q)) : parse_form(in.form);
  if (P.is_zero() && Q.is_zero()) throw UsageError("the zero field does not define a foliation");
  return make_foliation(P, Q);
}

json input_echo(const FieldInput& in, const AffineFoliation1Form& f) {
  json j = rep::foliation(f);
  if (!in.form.empty()) j["input_form"] = in.form;
  else j["given"] = {{"P", in.P}, {"Q", in.Q}};
  if (!f.removed_factor.is_constant()) j["removed_common_factor"] = rep::poly(f.removed_factor);
  return j;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FOLIATION_LAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("FOLIATION_LAB_SEED must be a non-negative integer");
    }
  }
  return 1;
}

ApproxComplex parse_approx(const std::string& s) { return parse_scalar(s).to_approx(); }

std::optional<ProjectiveLine> line_of(const Poly2& f) {
  if (f.degree() != 1) return std::nullopt;
  return ProjectiveLine::affine(f.coeff(1, 0), f.coeff(0, 1), f.coeff(0, 0));
}

// ---- analyze ---------------------------------------------------------------------------------

struct AnalyzeOptions {
  double tol = 1e-9;
  int max_depth = 32;
  double delta = 1e-9;
  bool holonomy = false;
  double sphere = 0.0;
  int sphere_samples = 2000;
  std::uint64_t seed = 1;
};

template <class Fn>
json guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const AmbiguousClassification& e) {
    return {{"error", {{"kind", "ambiguous"}, {"message", e.what()}}}};
  } catch (const Error& e) {
    return {{"error", {{"kind", "analysis"}, {"message", e.what()}}}};
  }
}

json analyze(const FieldInput& in, const AnalyzeOptions& opt) {
  const AffineFoliation1Form f = read_field(in);
  json out;
  out["tool_version"] = rep::tool_version();
  out["input"] = input_echo(in, f);
  out["seed"] = opt.seed;

  const auto points = find_singularities(f, opt.tol);
  ClassifyOptions copt;
  copt.delta = opt.delta;
  json sings = json::array();
  for (const auto& p : points) {
    json s{{"point", rep::point(p, opt.tol)}};
    std::optional<SingularityReport> report;
    s["classification"] = guarded([&] {
      report = classify(f, p, copt);
      return rep::singularity(*report, opt.tol);
    });
    if (report && !report->irreducible) {
      s["reduction"] = guarded([&] {
        auto tree = seidenberg_reduce(f, p, {.max_depth = opt.max_depth, .classify = copt});
        json r = rep::reduction(tree, opt.tol);
        return json{{"depth", r["depth"]}, {"dicritical", r["dicritical"]}, {"components", r["components"]},
                    {"edges", r["edges"]}, {"leaves", r["leaves"].size()}};
      });
    }
    sings.push_back(s);
  }
  out["singularities"] = sings;

  std::optional<InvariantLines> lines;
  json darb = guarded([&] {
    lines = find_invariant_lines(f, opt.tol);
    json d{{"lines", rep::lines(*lines, opt.tol)}};
    if (lines->exact.size() >= 2) {
      auto deps = darboux_dependencies(lines->exact);
      json dj = json::array();
      for (const auto& v : deps) dj.push_back(rep::vector_exact(v));
      d["dependencies"] = dj;
      if (!deps.empty())
        d["first_integral"] = rep::first_integral(rational_first_integral_from_dependencies(f, lines->exact, deps));
    }
    return d;
  });
  out["darboux"] = darb;

  json idx = json::array();
  if (lines) {
    for (const auto& c : lines->exact) {
      auto L = line_of(c.f);
      if (!L) continue;
      idx.push_back({{"line", rep::poly(c.f)}, {"report", guarded([&] { return rep::index_report(index_theorem_check(f, *L, opt.tol), opt.tol); })}});
    }
  }
  if (line_at_infinity_invariant(f))
    idx.push_back({{"line", "infinity"},
                   {"report", guarded([&] { return rep::index_report(index_theorem_check(f, ProjectiveLine::infinity(), opt.tol), opt.tol); })}});
  out["index"] = idx;

  if (opt.holonomy) {
    out["holonomy"] = guarded([&] {
      auto s = make_holonomy_setup(f);
      return json{{"x0", rep::approx(s.x0, 0.0)}, {"multiplier", rep::approx(holonomy_multiplier(s), s.tol)}};
    });
  }
  if (auto r = detect_riccati(f)) {
    out["riccati"] = guarded([&] { return rep::monodromy_group(*r, global_monodromy_group(*r), 1e-6); });
  }
  if (opt.sphere > 0.0) {
    out["sphere_transversality"] = guarded([&] {
      auto t = sphere_transversality(f, opt.sphere, opt.sphere_samples, opt.seed);
      return json{{"radius", opt.sphere}, {"minimum", rep::approx_real(t.minimum, 1e-6)}, {"transverse", t.transverse}};
    });
  }
  return out;
}

FieldInput parse_batch_line(const std::string& line) {
  FieldInput in;
  auto semi = line.find(';');
  if (semi == std::string::npos) {
    in.form = line;
  } else {
    in.P = line.substr(0, semi);
    in.Q = line.substr(semi + 1);
  }
  return in;
}

json analyze_batch(const std::string& path, const AnalyzeOptions& opt, unsigned threads) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open batch file " + path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(file, line);) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    lines.push_back(line.substr(first));
  }
  std::vector<json> results(lines.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < lines.size(); k = next++) {
      try {
        results[k] = analyze(parse_batch_line(lines[k]), opt);
      } catch (const ParseError& e) {
        results[k] = {{"error", {{"kind", "parse"}, {"message", e.what()}}}};
      } catch (const UsageError& e) {
        results[k] = {{"error", {{"kind", "usage"}, {"message", e.what()}}}};
      } catch (const Error& e) {
        results[k] = {{"error", {{"kind", "analysis"}, {"message", e.what()}}}};
      }
      results[k]["line"] = lines[k];
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, lines.size()); ++t) pool.emplace_back(worker);
  pool.clear();
  return {{"tool_version", rep::tool_version()}, {"results", results}};
}

// ---- holonomy --------------------------------------------------------------------------------

void write_trace(const std::string& path, const std::vector<TracePoint>& trace) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out.precision(17);
  out << "theta,re,im\n";
  for (const auto& t : trace) out << t.theta << ',' << t.y.real() << ',' << t.y.imag() << '\n';
}

void write_orbit(const std::string& path, const std::vector<ApproxComplex>& orbit) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out.precision(17);
  out << "iterate,re,im\n";
  for (std::size_t k = 0; k < orbit.size(); ++k) out << k << ',' << orbit[k].real() << ',' << orbit[k].imag() << '\n';
}

std::vector<Loop> read_waypoint_loops(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open waypoint file " + path);
  json j;
  try {
    j = json::parse(file);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("waypoint file: ") + e.what());
  }
  std::vector<Loop> loops;
  for (const auto& loop : j.at("loops")) {
    std::vector<ApproxComplex> pts;
    for (const auto& p : loop) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    loops.push_back(polygon_loop(pts));
  }
  return loops;
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analysis of planar holomorphic foliations"};
  app.set_version_flag("--version", rep::tool_version());
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "seed for sampling steps (default: FOLIATION_LAB_SEED or 1)");

  FieldInput field;

  auto* cmd_analyze = app.add_subcommand("analyze", "full report: singularities, reduction, lines, indices");
  add_field_options(cmd_analyze, field);
  AnalyzeOptions aopt;
  std::string batch;
  unsigned threads = 0;
  cmd_analyze->add_option("--batch", batch, "file with one field per line: \"P ; Q\" or a one-form");
  cmd_analyze->add_option("--threads", threads, "worker threads for --batch (0: all cores)");
  cmd_analyze->add_option("--tol", aopt.tol, "numeric tolerance")->capture_default_str();
  cmd_analyze->add_option("--delta", aopt.delta, "classification tolerance")->capture_default_str();
  cmd_analyze->add_option("--max-depth", aopt.max_depth, "reduction depth limit")->capture_default_str();
  cmd_analyze->add_flag("--holonomy", aopt.holonomy, "add the holonomy multiplier of {y = 0}");
  cmd_analyze->add_option("--sphere", aopt.sphere, "also sample transversality to the sphere of this radius");
  cmd_analyze->add_option("--sphere-samples", aopt.sphere_samples)->capture_default_str();

  auto* cmd_reduce = app.add_subcommand("reduce", "Seidenberg reduction of a singular point (DOT or JSON)");
  add_field_options(cmd_reduce, field);
  bool dot = false;
  int max_depth = 32;
  double tol = 1e-9;
  std::string reduce_at = "0,0";
  bool reduce_all = false;
  cmd_reduce->add_flag("--dot", dot, "print the divisor graph in DOT instead of JSON");
  cmd_reduce->add_option("--at", reduce_at, "singular point \"x,y\" to reduce")->capture_default_str();
  cmd_reduce->add_flag("--all", reduce_all, "reduce every non-irreducible singular point instead");
  cmd_reduce->add_option("--max-depth", max_depth)->capture_default_str();
  cmd_reduce->add_option("--tol", tol)->capture_default_str();

  auto* cmd_index = app.add_subcommand("index", "Camacho-Sad index along an invariant axis or line");
  add_field_options(cmd_index, field);
  std::string axis = "y", at = "0";
  cmd_index->add_option("--axis", axis, "y: {y = 0}; x: {x = 0}; infinity; or a linear polynomial")->capture_default_str();
  cmd_index->add_option("--at", at, "coordinate of the point along the axis")->capture_default_str();

  auto* cmd_darboux = app.add_subcommand("darboux", "invariant curves, cofactors and first integrals");
  add_field_options(cmd_darboux, field);
  std::vector<std::string> curves;
  bool with_lines = false;
  cmd_darboux->add_option("--curve", curves, "candidate invariant curve (repeatable)");
  cmd_darboux->add_flag("--lines", with_lines, "add all invariant lines");

  auto* cmd_holonomy = app.add_subcommand("holonomy", "holonomy of {y = 0} around x = x0 e^{i theta}");
  add_field_options(cmd_holonomy, field);
  std::string x0 = "1", y0 = "1/100", csv;
  double htol = 1e-10;
  int n_max = 12;
  cmd_holonomy->add_option("--x0", x0)->capture_default_str();
  cmd_holonomy->add_option("--y0", y0)->capture_default_str();
  cmd_holonomy->add_option("--tol", htol)->capture_default_str();
  cmd_holonomy->add_option("--n-max", n_max, "order bound for the finite-order test (0 skips it)")->capture_default_str();
  cmd_holonomy->add_option("--csv", csv, "write the lifted path as theta,re,im");

  auto* cmd_germ = app.add_subcommand("germ", "dynamics of a one-variable germ");
  std::string series, germ_cmd = "koenigs", germ_csv;
  double radius = 0.05, probe = 0.1, r_in = 1e-3, r_out = 0.2;
  int period = 3, depth = 30;
  std::optional<double> theta;
  cmd_germ->add_option("--series", series, "polynomial in z, e.g. \"1/2*z + z^2\"");
  cmd_germ->add_option("--cmd", germ_cmd)->check(CLI::IsMember({"koenigs", "petals", "cycles", "brjuno"}))->capture_default_str();
  cmd_germ->add_option("--radius", radius, "test circle for --cmd koenigs")->capture_default_str();
  cmd_germ->add_option("--probe", probe, "start radius of the petal orbits")->capture_default_str();
  cmd_germ->add_option("--period", period, "cycle period for --cmd cycles")->capture_default_str();
  cmd_germ->add_option("--r-in", r_in)->capture_default_str();
  cmd_germ->add_option("--r-out", r_out)->capture_default_str();
  cmd_germ->add_option("--depth", depth, "continued fraction depth for --cmd brjuno")->capture_default_str();
  cmd_germ->add_option("--theta", theta, "rotation number for --cmd brjuno (default: arg(f'(0)) / 2 pi)");
  cmd_germ->add_option("--csv", germ_csv, "write the forward petal orbit as iterate,re,im");

  auto* cmd_riccati = app.add_subcommand("riccati", "monodromy of a Riccati foliation");
  add_field_options(cmd_riccati, field);
  std::string loops = "auto", base;
  cmd_riccati->add_option("--loops", loops, "auto, or a JSON file {\"loops\": [[[re, im], ...], ...]}")->capture_default_str();
  cmd_riccati->add_option("--base", base, "base point for the loops");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (seed_opt->count() == 0) seed = default_seed();
    if (cmd_analyze->parsed()) {
      aopt.seed = seed;
      if (!batch.empty()) print(analyze_batch(batch, aopt, threads));
      else print(analyze(field, aopt));
    } else if (cmd_reduce->parsed()) {
      auto f = read_field(field);
      std::vector<std::pair<std::string, ReductionTree>> trees;
      json reductions = json::array();
      std::vector<SingularPoint> centers;
      if (reduce_all) {
        for (const auto& p : find_singularities(f, tol))
          if (!classify(f, p).irreducible) centers.push_back(p);
      } else {
        auto comma = reduce_at.find(',');
        if (comma == std::string::npos) throw UsageError("--at expects \"x,y\"");
        SingularPoint p;
        p.exact = {parse_scalar(reduce_at.substr(0, comma)), parse_scalar(reduce_at.substr(comma + 1))};
        p.x = p.exact->first.to_approx();
        p.y = p.exact->second.to_approx();
        if (!f.P.evaluate(p.exact->first, p.exact->second).is_zero() || !f.Q.evaluate(p.exact->first, p.exact->second).is_zero())
          throw DomainError("the point " + p.location_string() + " is not singular");
        p.multiplicity = singular_multiplicity(f, p);
        centers.push_back(p);
      }
      for (const auto& p : centers) {
        auto tree = seidenberg_reduce(f, p, {.max_depth = max_depth, .classify = {}});
        reductions.push_back({{"point", rep::point(p, tol)}, {"tree", rep::reduction(tree, tol)}});
        trees.emplace_back(p.location_string(), std::move(tree));
      }
      if (dot) {
        if (trees.empty()) std::cout << "graph \"reduction\" {\n}\n";
        else std::cout << rep::reduction_dot(trees);
      } else {
        print({{"tool_version", rep::tool_version()}, {"input", input_echo(field, f)}, {"reductions", reductions}});
      }
    } else if (cmd_index->parsed()) {
      auto f = read_field(field);
      json out{{"tool_version", rep::tool_version()}, {"input", input_echo(field, f)}};
      std::optional<ProjectiveLine> L;
      if (axis == "infinity") {
        L = ProjectiveLine::infinity();
      } else if (axis == "y" || axis == "x") {
        ExactComplex a = parse_scalar(at);
        auto g = axis == "y" ? f : make_foliation(f.Q.swapped(), f.P.swapped());
        out["axis"] = axis == "y" ? "y = 0" : "x = 0";
        out["at"] = rep::exact(a);
        out["index"] = rep::exact(camacho_sad_index(g, a));
        L = axis == "y" ? ProjectiveLine::affine(ExactComplex(0), ExactComplex(1), ExactComplex(0))
                        : ProjectiveLine::affine(ExactComplex(1), ExactComplex(0), ExactComplex(0));
      } else {
        L = line_of(parse_poly(axis));
        if (!L) throw UsageError("--axis must be x, y, infinity or a polynomial of degree 1");
        out["axis"] = axis;
      }
      if (out.contains("index"))
        out["index_theorem"] = guarded([&] { return rep::index_report(index_theorem_check(f, *L), 1e-8); });
      else
        out["index_theorem"] = rep::index_report(index_theorem_check(f, *L), 1e-8);
      print(out);
    } else if (cmd_darboux->parsed()) {
      auto f = read_field(field);
      std::vector<InvariantCurve> found;
      json rejected = json::array();
      for (const auto& text : curves) {
        Poly2 c = parse_poly(text);
        if (auto ic = invariance_check(f, c)) found.push_back(*ic);
        else rejected.push_back(text);
      }
      json out{{"tool_version", rep::tool_version()}, {"input", input_echo(field, f)}};
      if (with_lines) {
        auto lines = find_invariant_lines(f);
        out["lines"] = rep::lines(lines, 1e-9);
        for (const auto& l : lines.exact) {
          bool dup = std::any_of(found.begin(), found.end(), [&](const InvariantCurve& c) {
            return c.f.degree() == 1 && (c.f * l.f.leading_term().second - l.f * c.f.leading_term().second).is_zero();
          });
          if (!dup) found.push_back(l);
        }
      }
      json cj = json::array();
      for (const auto& c : found) cj.push_back(rep::curve(c));
      out["curves"] = cj;
      out["not_invariant"] = rejected;
      out["dependency"] = nullptr;
      out["first_integral"] = nullptr;
      if (found.size() >= 2) {
        auto deps = darboux_dependencies(found);
        if (!deps.empty()) {
          out["dependency"] = rep::vector_exact(deps.front());
          out["first_integral"] = rep::first_integral(rational_first_integral_from_dependencies(f, found, deps));
        }
      }
      print(out);
    } else if (cmd_holonomy->parsed()) {
      auto f = read_field(field);
      auto s = make_holonomy_setup(f, parse_approx(x0), htol);
      ApproxComplex y = parse_approx(y0);
      std::vector<TracePoint> trace;
      ApproxComplex image = holonomy_map(s, y, csv.empty() ? nullptr : &trace);
      if (!csv.empty()) write_trace(csv, trace);
      json out{{"tool_version", rep::tool_version()}, {"input", input_echo(field, f)},
               {"x0", rep::approx(s.x0, 0.0)}, {"y0", rep::approx(y, 0.0)},
               {"image", rep::approx(image, std::max(htol * std::abs(y), 1e-300) * 1e2)},
               {"multiplier", rep::approx(holonomy_multiplier(s), htol * 1e2)}};
      if (n_max > 0) {
        try {
          auto order = finite_order_test(s, n_max);
          out["order"] = order ? json(*order) : json(nullptr);
        } catch (const IntegrationError& e) {
          out["order"] = nullptr;
          out["order_note"] = e.what();
        }
      }
      print(out);
    } else if (cmd_germ->parsed()) {
      if (series.empty() && !(germ_cmd == "brjuno" && theta)) throw UsageError("--series is required");
      auto g = series.empty() ? GermSeries::parse("z") : GermSeries::parse(series);
      json out{{"tool_version", rep::tool_version()}, {"series", series}, {"cmd", germ_cmd}};
      if (germ_cmd == "koenigs") {
        out["koenigs"] = rep::koenigs(koenigs_linearize(g, 80, radius), 1e-8);
      } else if (germ_cmd == "petals") {
        auto p = parabolic_analyze(g, probe);
        out["petals"] = rep::parabolic(p, 1e-12);
        if (!germ_csv.empty()) {
          auto probe = probe_orbit([&](ApproxComplex z) { return g(z); }, p.forward.start, p.forward.iterations, 0.0, true);
          write_orbit(germ_csv, probe.orbit);
        }
      } else if (germ_cmd == "cycles") {
        out["period"] = period;
        out["cycles"] = rep::cycles(small_cycle_search(g, period, r_in, r_out), 1e-12);
      } else {
        double t = theta ? *theta : std::arg(g.lambda()) / (2 * std::numbers::pi);
        if (t < 0) t += 1.0;
        out["rotation_number"] = rep::approx_real(t, 1e-15);
        out["arithmetic"] = rep::arithmetic(brjuno_cremer_diagnostic(t, depth), 1e-12);
      }
      print(out);
    } else if (cmd_riccati->parsed()) {
      auto f = read_field(field);
      auto r = detect_riccati(f);
      if (!r) throw DomainError("the field is not of Riccati type (P = p(x), Q quadratic in y)");
      std::optional<ApproxComplex> b;
      if (!base.empty()) b = parse_approx(base);
      MonodromyGroupReport g;
      if (loops == "auto") {
        g = global_monodromy_group(*r, b);
      } else {
        auto ls = read_waypoint_loops(loops);
        ApproxComplex start = ls.empty() ? ApproxComplex(0.0) : ls.front().front().at(0.0);
        g = monodromy_group_for_loops(*r, b.value_or(start), std::move(ls));
      }
      json out{{"tool_version", rep::tool_version()}, {"input", input_echo(field, f)}};
      out.update(rep::monodromy_group(*r, g, 1e-6));
      print(out);
    }
  } catch (const UsageError& e) {
    print(rep::error_object("usage", e.what()));
    return kUsage;
  } catch (const ParseError& e) {
    print(rep::error_object("parse", e.what()));
    return kUsage;
  } catch (const Error& e) {
    print(rep::error_object("analysis", e.what()));
    return kFailure;
  } catch (const nlohmann::json::exception& e) {
    print(rep::error_object("usage", e.what()));
    return kUsage;
  }
  return kOk;
}

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "folab/holodyn.hpp"
#include "support/random.hpp"

using namespace folab;
using C = ApproxComplex;

namespace {

constexpr double kPi = std::numbers::pi;
const C I(0.0, 1.0);

Poly2 P(const char* s) { return parse_poly(s); }
AffineFoliation1Form F(const char* p, const char* q) { return make_foliation(P(p), P(q)); }

HolonomySetup linear_setup(ExactComplex lam, ExactComplex mu) {
  return make_holonomy_setup(make_foliation(lam * P("x"), mu * P("y")));
}

// omega = y^2 dx - x dy, i.e. P = -x and Q = -y^2
HolonomySetup saddle_node() { return make_holonomy_setup(F("-x", "-y^2")); }

C saddle_node_oracle(C y) { return y / (1.0 - 2 * kPi * I * y); }

}  // namespace

TEST(Holonomy, LinearFieldsMultiplyByExpOfRatio) {
  const std::vector<std::pair<ExactComplex, ExactComplex>> cases{
      {make_exact(1), make_exact(2)}, {make_exact(1), make_exact(1, 1)}, {make_exact(2), make_exact(-3)}};
  for (const auto& [lam, mu] : cases) {
    auto s = linear_setup(lam, mu);
    C y0 = 1e-2;
    C expected = std::exp(2 * kPi * I * (mu / lam).to_approx()) * y0;
    EXPECT_LE(std::abs(holonomy_map(s, y0) - expected), 1e-6 * std::abs(y0));
    EXPECT_LE(std::abs(holonomy_multiplier(s) - expected / y0), 1e-8);
  }
}

TEST(Holonomy, SaddleNodeIsAHomography) {
  auto s = saddle_node();
  for (C y0 : {C(1e-2), C(0, 1e-2), C(-3e-3, 5e-3)})
    EXPECT_LE(std::abs(holonomy_map(s, y0) - saddle_node_oracle(y0)), 1e-6 * std::abs(y0));
  EXPECT_LE(std::abs(holonomy_multiplier(s) - 1.0), 1e-10);
}

TEST(Holonomy, AxisIsALeaf) {
  EXPECT_EQ(holonomy_map(saddle_node(), 0.0), C(0.0));
}

TEST(Holonomy, PoincareDulacMultiplierIsARootOfUnity) {
  for (int n : {2, 3, 4}) {
    Poly2 Pn = ExactComplex(n) * P("x") + P("y").pow(n);
    auto s = make_holonomy_setup(make_foliation(Pn, P("y")));
    EXPECT_LE(std::abs(holonomy_multiplier(s) - std::exp(2 * kPi * I / double(n))), 1e-9) << n;
  }
}

TEST(Holonomy, SetupAndIntegrationErrors) {
  EXPECT_THROW(make_holonomy_setup(F("x", "y + x")), DomainError);
  EXPECT_THROW(make_holonomy_setup(F("x", "y"), 0.0), DomainError);
  EXPECT_THROW(make_holonomy_setup(F("x - 1", "y"), 1.0), DomainError);
  // the leaf through -i/pi runs to infinity at theta = pi
  EXPECT_THROW(holonomy_map(saddle_node(), C(0, -1.0 / kPi)), IntegrationError);
  auto tight = saddle_node();
  tight.max_steps = 3;
  EXPECT_THROW(holonomy_map(tight, 1e-2), ConvergenceError);
}

TEST(Holonomy, TraceRecordsThePath) {
  std::vector<TracePoint> trace;
  holonomy_map(linear_setup(make_exact(1), make_exact(1, 0)), 1e-2, &trace);
  ASSERT_GE(trace.size(), 2u);
  EXPECT_EQ(trace.front().theta, 0.0);
  EXPECT_NEAR(trace.back().theta, 2 * kPi, 1e-12);
  for (const auto& p : trace) EXPECT_NEAR(std::abs(p.y - std::exp(I * p.theta) * 1e-2), 0.0, 1e-9);
}

TEST(FiniteOrder, Examples) {
  // 2x dy + 3y dx: P = 2x, Q = -3y, multiplier exp(-3 pi i) = -1
  auto s = make_holonomy_setup(F("2*x", "-3*y"));
  EXPECT_EQ(finite_order_test(s, 6, 1e-8), 2);
  EXPECT_EQ(finite_order_test(linear_setup(make_exact(3), make_exact(1)), 6, 1e-8), 3);
  EXPECT_EQ(finite_order_test(saddle_node(), 12, 1e-8), std::nullopt);
  EXPECT_EQ(finite_order_test([](C y) { return std::exp(2 * kPi * I / 5.0) * y; }, 10), 5);
}

TEST(HolonomyProperties, ArcsCompose) {
  auto s = make_holonomy_setup(F("x + 1/5*x^2", "(1/3 + 1/2i)*y + x*y^2"));
  for (C y0 : {C(1e-2), C(-4e-3, 7e-3)}) {
    C whole = holonomy_map(s, y0);
    C half = holonomy_arc(s, holonomy_arc(s, y0, 0, kPi), kPi, 2 * kPi);
    EXPECT_LE(std::abs(whole - half), 2 * s.tol * std::max(1.0, std::abs(whole)) * 10);
  }
}

TEST(HolonomyProperties, MultiplierMatchesFiniteDifference) {
  const std::vector<AffineFoliation1Form> corpus{F("x", "2*y"), F("2*x", "-3*y"), F("2*x + y^2", "y"),
                                                 F("x + 1/5*x^2", "(1/3 + 1/2i)*y + x*y^2")};
  const double y0 = 1e-3;
  for (const auto& f : corpus) {
    auto s = make_holonomy_setup(f);
    C fd = (holonomy_map(s, y0) - holonomy_map(s, -y0)) / (2 * y0);
    EXPECT_LE(std::abs(fd - holonomy_multiplier(s)), 1e-5) << f.field_string();
  }
  // the saddle-node's cubic coefficient (2 pi i)^2 puts the central difference 4 pi^2 y0^2 away
  auto s = saddle_node();
  C fd = (holonomy_map(s, y0) - holonomy_map(s, -y0)) / (2 * y0);
  EXPECT_LE(std::abs(fd - (holonomy_multiplier(s) + std::pow(2 * kPi * I * y0, 2))), 1e-8);
}

TEST(HolonomyProperties, ReverseLoopInverts) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int done = 0, attempts = 0;
  while (done < 200) {
    ASSERT_LT(++attempts, 2000);
    // |Im(mu / lambda)| <= 1/4 keeps the multiplier modulus within [e^{-pi/2}, e^{pi/2}], so the
    // backward pass does not amplify the forward error
    ExactComplex lam = testgen::random_nonzero_scalar(rng), ratio = testgen::random_nonzero_scalar(rng);
    if (abs(ratio.im()) > Rational(1, 4)) continue;
    ExactComplex mu = lam * ratio;
    Poly2 hp = testgen::random_poly(rng, 3, 3), hq = testgen::random_poly(rng, 2, 3);
    Poly2 Pf = lam * P("x") + ExactComplex::fraction(1, 10) * (hp - hp.truncated(1));
    Poly2 Qf = P("y") * (Poly2(mu) + ExactComplex::fraction(1, 10) * (hq - Poly2(hq.constant_term())));
    if (!coprime(Pf, Qf)) continue;
    HolonomySetup s;
    try {
      s = make_holonomy_setup(make_foliation(Pf, Qf));
    } catch (const DomainError&) {
      continue;
    }
    C y0 = 5e-3 * C(unit(rng), unit(rng));
    try {
      C image = holonomy_map(s, y0);
      C back = inverse_holonomy_map(s, image);
      ASSERT_LE(std::abs(back - y0), 10 * s.tol) << s.f.field_string() << " y0 = " << y0;
      ++done;
    } catch (const IntegrationError&) {
      continue;  // the leaf left the safety disc or met a zero of P
    }
  }
  RecordProperty("cases", done);
}

TEST(Germ, ParsingAndEvaluation) {
  auto g = GermSeries::parse("1/2*z + z^2");
  EXPECT_EQ(g.lambda(), C(0.5));
  EXPECT_EQ(g(C(0.1)), C(0.06));
  EXPECT_NEAR(std::abs(g.inverse(g(C(0.02, 0.01))) - C(0.02, 0.01)), 0.0, 1e-16);
  EXPECT_THROW(g(C(0.6)), DomainError);
  EXPECT_THROW(GermSeries::parse("z^2"), DomainError);
  EXPECT_THROW(GermSeries::parse("1 + z"), DomainError);
}

TEST(Koenigs, LinearGermIsItsOwnNormalForm) {
  auto k = koenigs_linearize(GermSeries::parse("1/3*z"));
  for (C z : {C(0.01), C(0.02, -0.03)}) EXPECT_NEAR(std::abs(k.phi(z) - z), 0.0, 1e-15);
  EXPECT_LT(k.residual, 1e-15);
}

TEST(Koenigs, QuadraticResidual) {
  auto f = GermSeries::parse("1/2*z + z^2");
  auto k = koenigs_linearize(f, 80, 0.05);
  EXPECT_LT(k.residual, 1e-8);
  EXPECT_EQ(k.series[1], C(1.0));
  const double h = 1e-6;
  EXPECT_NEAR(std::abs((k.phi(h) - k.phi(-h)) / (2 * h) - 1.0), 0.0, 1e-6);
  // the truncated series agrees with the iterated limit near 0
  C z(0.01, 0.005), s = 0.0;
  for (std::size_t j = k.series.size(); j-- > 1;) s = s * z + k.series[j];
  s *= z;
  EXPECT_LT(std::abs(s - k.phi(z)), 1e-12);
}

TEST(Koenigs, KnownConjugacy) {
  // f = h^{-1}(lambda h(z)) with h(z) = z / (1 - z) is lambda z / (1 - (1 - lambda) z)
  const C lam(0.5, 0.25);
  std::vector<C> coeffs{0.0};
  for (int k = 1; k <= 60; ++k) coeffs.push_back(lam * std::pow(1.0 - lam, k - 1));
  auto f = GermSeries::from_coefficients(coeffs, 0.2);
  auto k = koenigs_linearize(f, 100, 0.05);
  for (C z : {C(0.03), C(-0.02, 0.04), C(0.0, -0.05)}) EXPECT_LT(std::abs(k.phi(z) - z / (1.0 - z)), 1e-13);
}

TEST(Koenigs, RepellingGermUsesTheInverse) {
  auto f = GermSeries::parse("2*z + z^2");
  auto k = koenigs_linearize(f, 80, 0.05);
  EXPECT_LT(k.residual, 1e-8);
  EXPECT_THROW(koenigs_linearize(GermSeries::parse("z + z^2")), DomainError);
}

TEST(Parabolic, QuadraticHasOnePetal) {
  auto r = parabolic_analyze(GermSeries::parse("z + z^2"));
  EXPECT_EQ(r.k, 1);
  ASSERT_EQ(r.attracting.size(), 1u);
  EXPECT_NEAR(std::abs(r.attracting[0]), kPi, 1e-12);
  EXPECT_NEAR(r.repelling[0], 0.0, 1e-12);
  // z_n ~ -1 / (n + 10 + log n) from -0.1: decay is harmonic, not geometric
  EXPECT_EQ(r.forward.iterations, 10000);
  EXPECT_NEAR(r.forward.final_modulus, 1.0 / (10000 + 10 + std::log(10000.0)), 2e-7);
  EXPECT_FALSE(r.forward.reached);
  EXPECT_LT(r.backward.final_modulus, 1e-3);
  auto loose = parabolic_analyze(GermSeries::parse("z + z^2"), 0.1, 10000, 1e-3);
  EXPECT_TRUE(loose.forward.reached);
  EXPECT_TRUE(loose.backward.reached);
}

TEST(Parabolic, CubicHasTwoPetals) {
  auto r = parabolic_analyze(GermSeries::parse("z + z^3"));
  EXPECT_EQ(r.k, 2);
  ASSERT_EQ(r.attracting.size(), 2u);
  std::vector<double> a = r.attracting;
  std::sort(a.begin(), a.end());
  EXPECT_NEAR(a[0], -kPi / 2, 1e-12);
  EXPECT_NEAR(a[1], kPi / 2, 1e-12);
  EXPECT_THROW(parabolic_analyze(GermSeries::parse("z")), DomainError);
  EXPECT_THROW(parabolic_analyze(GermSeries::parse("1/2*z + z^2")), DomainError);
}

TEST(Arithmetic, GoldenMeanUsesFibonacciDenominators) {
  auto d = brjuno_cremer_diagnostic((std::sqrt(5.0) - 1) / 2, 30);
  std::vector<double> fib{1, 1};
  while (fib.size() < 33) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
  double oracle = 0.0;
  for (int n = 0; n <= 30; ++n) {
    EXPECT_EQ(d.denominators[n].get_d(), fib[n]);
    oracle += std::log(fib[n + 1]) / fib[n];
  }
  EXPECT_NEAR(d.brjuno_partial, oracle, 1e-12);
  EXPECT_LT(d.brjuno_partial, 5.0);
  EXPECT_NEAR(d.cremer(), 1.0 / (1.5 - std::sqrt(5.0) / 2), 1e-9);
}

TEST(Arithmetic, RationalAndPrecisionErrors) {
  EXPECT_THROW(brjuno_cremer_diagnostic(0.5, 10), DomainError);
  EXPECT_THROW(brjuno_cremer_diagnostic(Rational(3, 7), 10), DomainError);
  EXPECT_THROW(brjuno_cremer_diagnostic((std::sqrt(5.0) - 1) / 2, 60), DomainError);
}

TEST(Arithmetic, LiouvilleTruncationHasHugeDenominators) {
  Rational theta = 0;
  mpz_class fact = 1;
  for (int n = 1; n <= 6; ++n) {
    fact *= n;
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, fact.get_ui());
    theta += Rational(1) / Rational(p);
  }
  auto d = brjuno_cremer_diagnostic(theta, 20);
  // 10^{k!} appear among the convergent denominators
  bool found = false;
  mpz_class target;
  mpz_ui_pow_ui(target.get_mpz_t(), 10, 24);
  for (const auto& q : d.denominators) found = found || q == target;
  EXPECT_TRUE(found);
  // along the convergents the maximum of |{q theta}|^{-1/q} is attained at q = 1
  EXPECT_NEAR(d.cremer(), 1.0 / theta.get_d(), 1e-9);
}

TEST(SmallCycles, RotationIsDegenerate) {
  auto f = GermSeries::from_coefficients({0.0, std::exp(2 * kPi * I / 3.0)});
  EXPECT_TRUE(small_cycle_search(f, 3, 1e-3, 1e-1).degenerate);
  EXPECT_FALSE(small_cycle_search(f, 2, 1e-3, 1e-1).degenerate);
}

TEST(SmallCycles, DetunedResonanceHasAnIsolatedCycle) {
  const C rho = std::exp(2 * kPi * I * (1.0 / 3.0 + 1e-4));
  auto f = GermSeries::from_coefficients({0.0, rho, 0.0, 0.0, 1.0});
  auto r = small_cycle_search(f, 3, 1e-3, 1e-1);
  ASSERT_EQ(r.points.size(), 1u);
  C z = r.points[0], w = z;
  for (int i = 0; i < 3; ++i) w = f(w);
  EXPECT_LE(std::abs(w - z), 1e-12);
  EXPECT_GT(std::abs(f(z) - z), 1e-6);
}

TEST(SmallCycles, HyperbolicGermHasNone) {
  auto f = GermSeries::parse("1/2*z + z^2");
  for (int n = 1; n <= 10; ++n) EXPECT_TRUE(small_cycle_search(f, n, 1e-3, 1e-1).points.empty()) << n;
}

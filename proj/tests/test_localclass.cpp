#include <gtest/gtest.h>

#include <random>

#include "folab/localclass.hpp"
#include "support/random.hpp"

using namespace folab;

namespace {

Poly2 P(const char* s) { return parse_poly(s); }
ExactComplex q(long n, long d = 1) { return ExactComplex::fraction(n, d); }
AffineFoliation1Form F(const char* p, const char* qq) { return make_foliation(P(p), P(qq)); }

SingularPoint origin() {
  SingularPoint p;
  p.exact = std::make_pair(ExactComplex(0), ExactComplex(0));
  return p;
}

}  // namespace

TEST(LinearPart, Examples) {
  auto lp = linear_part(F("x", "(2/7 + i)*y"), origin());
  ASSERT_TRUE(lp.eigen_exact);
  EXPECT_EQ((*lp.eigen_exact)[1], q(1));
  EXPECT_EQ((*lp.eigen_exact)[0], ExactComplex(Rational(2, 7), Rational(1)));

  auto pd = linear_part(F("3*x + 5*y^3", "y"), origin());
  EXPECT_EQ((*pd.eigen_exact)[1], q(3));
  EXPECT_EQ((*pd.eigen_exact)[0], q(1));

  auto euler = linear_part(F("x^2", "x + y"), origin());
  EXPECT_EQ((*euler.eigen_exact)[0], q(1));
  EXPECT_EQ((*euler.eigen_exact)[1], q(0));
}

TEST(LinearPart, NonTriangularExactAndIrrational) {
  // J = [[1, 2], [2, 1]] has eigenvalues 3 and -1
  auto lp = linear_part(F("x + 2*y", "2*x + y"), origin());
  ASSERT_TRUE(lp.eigen_exact);
  auto e = *lp.eigen_exact;
  EXPECT_TRUE((e[0] == q(3) && e[1] == q(-1)) || (e[0] == q(-1) && e[1] == q(3)));
  // J = [[1, 1], [1, 0]]: golden-ratio eigenvalues, numeric with tiny error bound
  auto g = linear_part(F("x + y", "x"), origin());
  EXPECT_FALSE(g.eigen_exact);
  double phi = (1 + std::sqrt(5.0)) / 2;
  EXPECT_NEAR(std::abs(g.eigen[0] - phi) * std::abs(g.eigen[0] + 1 / phi), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(g.eigen[0] * g.eigen[1] + 1.0), 0.0, 1e-12);
  EXPECT_LT(g.eigen_error, 1e-12);
}

TEST(Classify, Examples) {
  auto siegel = classify(F("x", "-3/2*y"), origin());
  EXPECT_EQ(siegel.domain, Domain::Siegel);
  EXPECT_TRUE(siegel.irreducible);
  ASSERT_TRUE(siegel.rational_ratio);
  EXPECT_EQ(*siegel.rational_ratio, Rational(-3, 2));

  auto res = classify(F("x", "2*y"), origin());
  EXPECT_EQ(res.domain, Domain::Poincare);
  ASSERT_TRUE(res.resonance);
  EXPECT_EQ(*res.resonance, 2);
  EXPECT_FALSE(res.irreducible);

  auto half = classify(F("2*x", "y"), origin());
  EXPECT_EQ(half.resonance.value_or(0), 2);

  auto euler = classify(F("x^2", "x + y"), origin());
  EXPECT_EQ(euler.domain, Domain::SaddleNode);
  EXPECT_TRUE(euler.irreducible);

  EXPECT_EQ(classify(F("y", "x^2"), origin()).domain, Domain::Nilpotent);
  EXPECT_EQ(classify(F("x^2", "y^2"), origin()).domain, Domain::DegenerateLinearPart);
  EXPECT_FALSE(classify(F("x^2", "y^2"), origin()).irreducible);

  auto nonreal = classify(F("x", "i*y"), origin());
  EXPECT_EQ(nonreal.domain, Domain::Poincare);
  EXPECT_TRUE(nonreal.irreducible);
  EXPECT_FALSE(nonreal.resonance);
}

TEST(Classify, QuadraticSurdEigenvaluesDecidedExactly) {
  auto golden = classify(F("x + y", "x"), origin());
  EXPECT_TRUE(golden.exact_decision);
  EXPECT_EQ(golden.domain, Domain::Siegel);
  EXPECT_TRUE(golden.irreducible);
  EXPECT_NEAR(golden.ratio->real(), -((1 + std::sqrt(5.0)) / 2) * ((1 + std::sqrt(5.0)) / 2), 1e-12);

  auto pm = classify(F("y", "2*x"), origin());
  EXPECT_EQ(pm.domain, Domain::Siegel);
  EXPECT_EQ(*pm.rational_ratio, Rational(-1));

  // tr^2 = 9, det = 1, D = 5: ratio positive irrational, hence Poincare and irreducible
  auto pos = classify(F("2*x + y", "x + y"), origin());
  EXPECT_EQ(pos.domain, Domain::Poincare);
  EXPECT_TRUE(pos.irreducible);
}

TEST(Classify, NumericPathRaisesAmbiguous) {
  auto f = F("x^2 - 2", "x*y");
  auto pts = find_singularities(f);
  ASSERT_EQ(pts.size(), 2u);
  ASSERT_FALSE(pts[0].is_exact());
  try {
    classify(f, pts[0]);
    FAIL() << "expected ambiguity";
  } catch (const AmbiguousClassification& e) {
    EXPECT_EQ(e.nearest, Rational(1, 2));
  }
  auto g = F("x^2 - 2", "i*y");
  auto rep = classify(g, find_singularities(g)[0]);
  EXPECT_FALSE(rep.exact_decision);
  EXPECT_EQ(rep.domain, Domain::Poincare);
  EXPECT_TRUE(rep.irreducible);
}

TEST(LocalclassProperties, ClassificationInvariantUnderLinearChanges) {
  std::mt19937_64 rng(1234);
  int done = 0;
  while (done < 200) {
    Mat2<ExactComplex> M{{{testgen::random_scalar(rng, false), testgen::random_scalar(rng, false)},
                          {testgen::random_scalar(rng, false), testgen::random_scalar(rng, false)}}};
    if ((M[0][0] * M[1][1] - M[0][1] * M[1][0]).is_zero()) continue;
    // random linear part plus quadratic terms, singular at 0
    Poly2 a = testgen::random_poly(rng, 1, 2) + testgen::random_poly(rng, 2, 2).homogeneous_part(2);
    Poly2 b = testgen::random_poly(rng, 1, 2) + testgen::random_poly(rng, 2, 2).homogeneous_part(2);
    a = a - Poly2(a.constant_term());
    b = b - Poly2(b.constant_term());
    if (a.is_zero() || b.is_zero() || !coprime(a, b)) continue;
    auto f = make_foliation(a, b);
    auto g = affine_change(f, M, {ExactComplex(0), ExactComplex(0)});
    auto r1 = classify_at_origin(f), r2 = classify_at_origin(g);
    ++done;
    EXPECT_EQ(r1.domain, r2.domain);
    EXPECT_EQ(r1.irreducible, r2.irreducible);
    EXPECT_EQ(r1.resonance, r2.resonance);
    if (r1.ratio_exact && r2.ratio_exact) {
      EXPECT_TRUE(*r1.ratio_exact == *r2.ratio_exact || *r1.ratio_exact * *r2.ratio_exact == ExactComplex(1));
    }
    auto e1 = r1.linear.eigen, e2 = r2.linear.eigen;
    bool same = std::abs(e1[0] - e2[0]) + std::abs(e1[1] - e2[1]) < 1e-9 ||
                std::abs(e1[0] - e2[1]) + std::abs(e1[1] - e2[0]) < 1e-9;
    EXPECT_TRUE(same);
  }
  RecordProperty("cases", done);
}

TEST(NormalForm, LinearFieldIsAlreadyNormal) {
  auto c = formal_normal_form(F("x", "(1/3)*y"), 8);
  EXPECT_EQ(c.xi_x, P("x"));
  EXPECT_EQ(c.xi_y, P("y"));
  EXPECT_EQ(c.residual_order, kInfiniteOrder);
}

TEST(NormalForm, ResonantMonomialIsKept) {
  auto f = F("2*x + y^2", "y");
  auto c = formal_normal_form(f, 6);
  EXPECT_EQ(c.normal_P, P("2*x + y^2"));
  EXPECT_EQ(c.normal_Q, P("y"));
  EXPECT_EQ(c.xi_x, P("x"));
  EXPECT_EQ(c.xi_y, P("y"));
  ASSERT_EQ(c.resonant_terms.size(), 1u);
  EXPECT_EQ(c.resonant_terms[0].first, 0);
  EXPECT_EQ(c.resonant_terms[0].second, (Monomial{0, 2}));
  EXPECT_EQ(c.residual_order, 2);
}

TEST(NormalForm, LinearizableSaddle) {
  // U = x/(1+x), V = y/(1+x) linearizes (x + x^2, -y + x y); its inverse is
  // x = U/(1-U), y = V/(1-U), whose series is the unique non-resonant conjugacy.
  const int N = 9;
  auto f = F("x + x^2", "-y + x*y");
  auto c = formal_normal_form(f, N);
  EXPECT_EQ(c.normal_P, P("x"));
  EXPECT_EQ(c.normal_Q, P("-y"));
  Poly2 geom;
  for (int k = 0; k < N; ++k) geom += Poly2::monomial(ExactComplex(1), k, 0);
  EXPECT_EQ(c.xi_x, (P("x") * geom).truncated(N));
  EXPECT_EQ(c.xi_y, (P("y") * geom).truncated(N));
  auto [dp, dq] = normal_form_defect(f.P, f.Q, c);
  EXPECT_TRUE(dp.is_zero());
  EXPECT_TRUE(dq.is_zero());
}

TEST(NormalForm, ErrorsAndCap) {
  EXPECT_THROW(formal_normal_form(F("x", "y"), 21), DomainError);
  EXPECT_THROW(formal_normal_form(F("x^2", "x+y"), 4), DomainError);
  EXPECT_THROW(formal_normal_form(F("x + y", "y"), 4), DomainError);  // Jordan block
}

TEST(LocalclassProperties, NormalFormDefectVanishesIdentically) {
  std::mt19937_64 rng(555);
  int done = 0;
  while (done < 25) {
    // linear part T diag(l1, l2) T^-1 with exact data
    ExactComplex l1 = testgen::random_nonzero_scalar(rng), l2 = testgen::random_nonzero_scalar(rng);
    Mat2<ExactComplex> T{{{testgen::random_scalar(rng, false), testgen::random_scalar(rng, false)},
                          {testgen::random_scalar(rng, false), testgen::random_scalar(rng, false)}}};
    ExactComplex det = T[0][0] * T[1][1] - T[0][1] * T[1][0];
    if (det.is_zero() || l1 == l2) continue;
    Poly2 X = Poly2::x(), Y = Poly2::y();
    auto lin = make_foliation(l1 * X, l2 * Y);
    Poly2 hp = testgen::random_poly(rng, 3, 3), hq = testgen::random_poly(rng, 3, 3);
    hp = hp - hp.truncated(1);
    hq = hq - hq.truncated(1);
    auto f = affine_change(make_foliation(lin.P + hp, lin.Q + hq), T, {ExactComplex(0), ExactComplex(0)});
    const int N = 5;
    auto c = formal_normal_form(f, N);
    auto [dp, dq] = normal_form_defect(f.P, f.Q, c);
    ASSERT_TRUE(dp.is_zero()) << f.field_string();
    ASSERT_TRUE(dq.is_zero());
    // xi'(0) is invertible and the normal form keeps only resonant monomials
    for (auto [comp, m] : c.resonant_terms) {
      ExactComplex lam_comp = comp == 0 ? c.eigenvalues[0] : c.eigenvalues[1];
      EXPECT_TRUE((ExactComplex(m.i) * c.eigenvalues[0] + ExactComplex(m.j) * c.eigenvalues[1] - lam_comp).is_zero());
    }
    ++done;
  }
}

TEST(NormalForm, NumericModeWithIrrationalEigenvalues) {
  auto f = F("x + y + x^2", "x - y*x");
  auto c = formal_normal_form_numeric(f, 6);
  auto [dp, dq] = normal_form_defect(to_approx(f.P), to_approx(f.Q), c);
  double worst = 0;
  for (const auto& [m, v] : dp.terms()) worst = std::max(worst, std::abs(v));
  for (const auto& [m, v] : dq.terms()) worst = std::max(worst, std::abs(v));
  EXPECT_LT(worst, 1e-9);
}

TEST(CamachoSad, Examples) {
  EXPECT_EQ(camacho_sad_index(F("2*x", "5*y")), q(5, 2));
  EXPECT_EQ(camacho_sad_index(F("3*x + 7*y^3", "y")), q(1, 3));
  EXPECT_EQ(camacho_sad_index(F("x", "y^2")), q(0));
  EXPECT_EQ(camacho_sad_index(F("-x", "-y^2")), q(0));  // omega = y^2 dx - x dy
  EXPECT_THROW(camacho_sad_index(F("x", "x + y")), DomainError);
  EXPECT_EQ(camacho_sad_index(F("x^2 - 1", "y"), q(1)), q(1, 2));
  EXPECT_EQ(camacho_sad_index(F("x^2 - 1", "y"), q(-1)), q(-1, 2));
}

TEST(LocalclassProperties, IndexInvariantUnderAxisPreservingChanges) {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 30; ++trial) {
    ExactComplex lam = testgen::random_nonzero_scalar(rng), mu = testgen::random_nonzero_scalar(rng);
    Poly2 hp = testgen::random_poly(rng, 3, 3);
    hp = hp - hp.truncated(1);
    Poly2 hq = testgen::random_poly(rng, 2, 3);
    hq = hq - hq.truncated(0);
    auto f = make_foliation(lam * P("x") + hp, P("y") * (Poly2(mu) + hq));
    if (!f.removed_factor.is_constant()) continue;
    ExactComplex before = camacho_sad_index(f);
    EXPECT_EQ(before, mu / lam);
    Poly2 unit = Poly2(ExactComplex(1)) + [&] {
      Poly2 u = testgen::random_poly(rng, 3, 4);
      return u - Poly2(u.constant_term());
    }();
    auto g = pullback(f, P("x"), P("y") * unit);
    EXPECT_EQ(camacho_sad_index(g), before) << f.field_string() << " unit " << unit;
  }
}

TEST(IndexTheorem, LinearFieldAtInfinity) {
  auto rep = index_theorem_check(F("2*x", "7*y"), ProjectiveLine::infinity());
  EXPECT_TRUE(rep.pass);
  ASSERT_TRUE(rep.sum_exact);
  EXPECT_EQ(*rep.sum_exact, q(1));
  int nonzero = 0;
  for (const auto& e : rep.entries) nonzero += std::abs(e.index) > 0;
  EXPECT_GE(nonzero, 2);
}

TEST(IndexTheorem, AxisThroughOrigin) {
  auto rep = index_theorem_check(F("2*x", "7*y"), ProjectiveLine::affine(q(0), q(1), q(0)));
  ASSERT_TRUE(rep.sum_exact);
  EXPECT_EQ(*rep.sum_exact, q(1));
  ASSERT_EQ(rep.entries.size(), 2u);
  EXPECT_EQ(*rep.entries[0].index_exact, q(7, 2));
  EXPECT_EQ(*rep.entries[1].index_exact, q(-5, 2));
}

TEST(IndexTheorem, PerturbationsKeepingTheAxisInvariant) {
  std::mt19937_64 rng(2024);
  int done = 0;
  while (done < 20) {
    Poly2 a = testgen::random_dense_poly(rng, 2, true);
    Poly2 b = P("y") * testgen::random_dense_poly(rng, 1, true);
    if (!coprime(a, b) || a.degree() < 2) continue;
    auto f = make_foliation(a, b);
    auto rep = index_theorem_check(f, ProjectiveLine::affine(q(0), q(1), q(0)));
    EXPECT_TRUE(rep.pass) << f.field_string() << " sum " << rep.sum;
    ++done;
  }
}

TEST(IndexTheorem, SlantedLineAndLineAtInfinityOfQuadratics) {
  // the line x + y = 1 is invariant for X = (x + y - 1) A + ..., built by an affine change
  auto base = F("x^2 - 3*x + 1", "y*(2 + x - y)");
  Mat2<ExactComplex> M{{{q(1), q(-1)}, {q(0), q(1)}}};
  auto g = affine_change(base, M, {q(1), q(0)});  // {y=0} of base is {y=0} here too
  auto rep = index_theorem_check(g, ProjectiveLine::affine(q(0), q(1), q(0)));
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(std::abs(rep.sum - 1.0), 0.0, 1e-8);

  auto inf = index_theorem_check(F("x^2 + y", "x*y - 2*y^2 + 1"), ProjectiveLine::infinity());
  EXPECT_TRUE(inf.pass) << inf.sum;
  EXPECT_THROW(index_theorem_check(F("x", "y"), ProjectiveLine::infinity()), DomainError);
}

TEST(SphereTransversality, Examples) {
  auto t = sphere_transversality(F("x", "2*y"), 1.0, 400, 7);
  EXPECT_TRUE(t.transverse);
  EXPECT_GE(t.minimum, 1.0 / std::sqrt(5.0));
  EXPECT_NEAR(t.minimum, 2.0 * std::sqrt(2.0) / 3.0, 1e-6);  // attained at |y|^2 = 1/3

  auto s = sphere_transversality(F("x", "-y"), 1.0, 400, 7);
  EXPECT_LT(s.minimum, 1e-6);
  EXPECT_FALSE(s.transverse);

  auto r = sphere_transversality(F("x", "i*y"), 1.0, 400, 7);
  EXPECT_TRUE(r.transverse);
  EXPECT_NEAR(r.minimum, std::sqrt(0.5), 1e-6);
  EXPECT_THROW(sphere_transversality(F("x", "y"), 0.0, 10), DomainError);
}

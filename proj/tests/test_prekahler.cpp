#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "prekahler/domain.hpp"
#include "prekahler/parse.hpp"
#include "prekahler/prekahler.hpp"

using namespace pk;

namespace {

Potential homog(double a, std::uint64_t seed = 0) {
  Potential p = builtin_potential("homog", {{"a", a}});
  p.domain.seed = seed;
  return p;
}

double k_of(double a) { return (a + 1) * (a - 2) / (9 * a * (a - 1)); }

}  // namespace

TEST(Omega, HessianOfKahlerIsIdentity) {
  OmegaG og = omega_g_from_potential(builtin_potential("kahler").rho);
  NumMat2 H = eval_hessian(og.H, Point{});
  EXPECT_EQ(H[0][0], cplx(1.0));
  EXPECT_EQ(H[0][1], cplx(0.0));
  EXPECT_EQ(rank_at(H), 2);
  // omega = (i/2) sum dz ^ dzbar
  EXPECT_EQ(og.omega.coeff(DZ1, DZB1), Expr(cplx(0, 0.5)));
}

TEST(Omega, ComplexPotentialRejected) {
  Potential p = builtin_potential("kahler");
  Expr bad = p.rho + coord(Var::Z1);
  try {
    omega_g_from_potential(bad, &p.domain);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Omega, RankOfCorpus) {
  Point p;
  p.z1 = cplx(0.1, 0.2);
  p.z2 = cplx(-0.2, 0.1);
  EXPECT_EQ(rank_at(builtin_potential("kahler").rho, p), 2);
  EXPECT_EQ(rank_at(builtin_potential("product").rho, p), 1);
  EXPECT_EQ(rank_at(builtin_potential("flat").rho, p), 1);
  EXPECT_EQ(rank_at(homog(3).rho, p, {{"a", 3.0}}), 1);
  EXPECT_EQ(rank_at(builtin_potential("envelope").rho, p), 1);
}

// The flat model: T1 = T2 = 0 at every sample.
TEST(Invariants, FlatModelVanishes) {
  Potential p = builtin_potential("flat");
  InvariantReport r = analyze(p.rho, p.domain.sample(32));
  EXPECT_EQ(r.verdict, Verdict::flat2Nondeg);
  for (const auto& rec : r.points) {
    ASSERT_TRUE(rec.evaluated);
    EXPECT_LT(rec.bT1, 1e-12);
    EXPECT_LT(rec.bT2, 1e-12);
  }
}

// |T1| = |k| / rho and T3 = -i k / rho for the homogeneous family.
TEST(Invariants, HomogeneousFamilyClosedForm) {
  for (double a : {3.0, -2.0, 0.25, 1.5, -0.5}) {
    Potential p = homog(a, 5);
    auto pts = p.domain.sample(16);
    InvariantReport r = analyze(p.rho, pts, p.domain.params);
    EXPECT_EQ(r.verdict, Verdict::twistorT2zero) << a;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double rho = eval(p.rho, pts[i]).real();
      const auto& rec = r.points[i];
      EXPECT_NEAR(std::abs(rec.T1) * rho, std::abs(k_of(a)), 1e-12) << a;
      EXPECT_NEAR(std::abs(rec.T3 - cplx(0, -k_of(a) / rho)), 0.0, 1e-12) << a;
      EXPECT_LT(rec.bT2, 1e-20);
    }
  }
}

TEST(Invariants, FlatParameterValues) {
  for (double a : {-1.0, 2.0, 0.5}) {
    Potential p = homog(a);
    InvariantReport r = analyze(p.rho, p.domain.sample(10), p.domain.params);
    if (a == 0.5) {
      EXPECT_EQ(r.verdict, Verdict::twistorT2zero);
    } else {
      EXPECT_EQ(r.verdict, Verdict::flat2Nondeg) << a;
    }
  }
}

TEST(Invariants, EnvelopeHasNonzeroT2) {
  Potential p = builtin_potential("envelope");
  InvariantReport r = analyze(p.rho, p.domain.sample(16));
  EXPECT_EQ(r.verdict, Verdict::general2Nondeg);
  EXPECT_GT(r.max_bT2, 1e-4);
  EXPECT_LT(r.max_residual, 1e-9);
}

TEST(Invariants, ClosedFormsMatchExtraction) {
  for (const Potential& p : {builtin_potential("flat"), homog(3), homog(0.25), builtin_potential("envelope")}) {
    InvariantReport r = analyze(p.rho, p.domain.sample(12), p.domain.params);
    EXPECT_LT(r.max_closed_T1_diff, 1e-9) << p.name;
    EXPECT_LT(r.max_closed_T2_diff, 1e-9) << p.name;
  }
}

TEST(Invariants, DegenerateVerdicts) {
  Potential k = builtin_potential("kahler");
  EXPECT_EQ(classify(k.rho, k.domain, 8), Verdict::pseudoKahler);
  Potential pr = builtin_potential("product");
  EXPECT_EQ(classify(pr.rho, pr.domain, 8), Verdict::holDegenerate);
  // rank drops on re z2 = 0
  Point a, b;
  b.z2 = 0.4;
  EXPECT_EQ(analyze(parse_expr("abs2(z1) + re(z2)^4"), {a, b}).verdict, Verdict::nonConstantRank);
}

TEST(Invariants, RealT3AndBianchiForm) {
  for (const Potential& p : {homog(3), builtin_potential("envelope"), builtin_potential("flat")}) {
    AdaptedCoframe cf = adapted_coframe(p.rho);
    Extracted t = extract_structure(cf);
    Expr b = t3_from_bianchi(cf, t);
    Tape tape({t.T3, b}, p.domain.params);
    for (const Point& q : p.domain.sample(10)) {
      auto v = tape.eval(q);
      EXPECT_LT(std::abs(v[0].real()), 1e-10) << p.name;
      EXPECT_LT(std::abs(v[0] - v[1]), 1e-9) << p.name;
    }
  }
}

TEST(Invariants, StructureEquationsClose) {
  for (const Potential& p : {homog(-2), builtin_potential("envelope")}) {
    InvariantReport r = analyze(p.rho, p.domain.sample(10), p.domain.params);
    EXPECT_LT(r.max_residual, 1e-9) << p.name;
  }
}

class GaugeProperty : public ::testing::TestWithParam<int> {};

// |T1|, |T2|, |T3| do not see the U(1) rotation of the coframe.
TEST_P(GaugeProperty, RotationInvariance) {
  Rng rng(GetParam());
  const double phi = rng.uniform(-std::numbers::pi, std::numbers::pi);
  for (const Potential& p : {homog(3, GetParam()), builtin_potential("envelope")}) {
    auto pts = p.domain.sample(6);
    AnalyzeOptions o;
    o.residuals = false;
    InvariantReport a = analyze(p.rho, pts, p.domain.params, o);
    o.gauge_phi = phi;
    InvariantReport b = analyze(p.rho, pts, p.domain.params, o);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_NEAR(a.points[i].bT1, b.points[i].bT1, 1e-10);
      EXPECT_NEAR(a.points[i].bT2, b.points[i].bT2, 1e-10);
      EXPECT_NEAR(std::abs(a.points[i].T3), std::abs(b.points[i].T3), 1e-10);
    }
  }
}

// rho -> rho + Re h for holomorphic h leaves omega and the invariants alone.
TEST_P(GaugeProperty, PluriharmonicShift) {
  Rng rng(GetParam() + 100);
  const cplx c(rng.normal(), rng.normal());
  const Expr h = real_part(constant(c) * parse_expr("z1^2*z2 + exp(z2) + z1^3"));
  Potential p = builtin_potential("envelope");
  auto pts = p.domain.sample(6);
  AnalyzeOptions o;
  o.residuals = false;
  InvariantReport a = analyze(p.rho, pts, {}, o), b = analyze(p.rho + h, pts, {}, o);
  EXPECT_EQ(a.verdict, b.verdict);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_NEAR(a.points[i].bT1, b.points[i].bT1, 1e-9);
    EXPECT_NEAR(a.points[i].bT2, b.points[i].bT2, 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, GaugeProperty, ::testing::Range(1, 6));

TEST(Coframe, NormalizationHolds) {
  // omega = (i/2) theta1 ^ conj theta1
  Potential p = homog(3);
  AdaptedCoframe cf = adapted_coframe(p.rho);
  OmegaG og = omega_g_from_potential(p.rho);
  CoordForm diff = og.omega - wedge(cf.theta1, conj_form(cf.theta1)) * Expr(cplx(0, 0.5));
  for (const Point& q : p.domain.sample(5)) EXPECT_LT(eval_form(diff, q, p.domain.params).max_abs(), 1e-12);
}

TEST(Coframe, RankTwoRejected) {
  try {
    adapted_coframe(builtin_potential("kahler").rho);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Rank);
  }
}

TEST(Desingularize, RecordsChart) {
  Potential p = builtin_potential("flat");
  Point q;
  q.z1 = cplx(0.1, 0.0);
  q.z2 = cplx(0.2, 0.1);
  Desingularized d = desingularize(p.rho, q, 0.5);
  EXPECT_EQ(rank_at(d.rho, Point{}), 1);
  EXPECT_GT(d.chart.c_value, 0.0);
  EXPECT_FALSE(d.chart.describe().empty());
  EXPECT_THROW(desingularize(builtin_potential("kahler").rho, q, 0.5), Error);
}

#include <gtest/gtest.h>

#include "prekahler/domain.hpp"
#include "prekahler/freeman.hpp"
#include "prekahler/parse.hpp"
#include "prekahler/wirtinger.hpp"

using namespace pk;

namespace {

Potential homog(double a) { return builtin_potential("homog", {{"a", a}}); }

std::string order_at(const Potential& p, const Point& q) { return filtration(p.rho, q, p.domain.params).order_string(); }

}  // namespace

TEST(Filtration, Orders) {
  Point q;
  q.z1 = cplx(0.1, -0.2);
  q.z2 = cplx(0.2, 0.3);
  EXPECT_EQ(order_at(builtin_potential("kahler"), q), "1");
  EXPECT_EQ(order_at(builtin_potential("product"), q), "inf");
  EXPECT_EQ(order_at(builtin_potential("flat"), q), "2");
  for (double a : {3.0, -2.0, 0.25, 0.5, -1.0, 2.0}) EXPECT_EQ(order_at(homog(a), q), "2") << a;
  EXPECT_EQ(order_at(builtin_potential("envelope"), q), "2");
}

TEST(Filtration, KernelRanks) {
  FiltrationReport r = filtration(builtin_potential("flat").rho, Point{});
  EXPECT_EQ(r.rank_k0, 1);
  EXPECT_EQ(r.rank_k1, 0);
  FiltrationReport pr = filtration(builtin_potential("product").rho, Point{});
  EXPECT_EQ(pr.rank_k1, 1);
  EXPECT_FALSE(pr.order.has_value());
}

TEST(Filtration, ZeroFormIsInfinitelyDegenerate) {
  FiltrationReport r = filtration(parse_expr("re(z1^2 + z2)"), Point{});
  EXPECT_EQ(r.rank_k0, 2);
  EXPECT_FALSE(r.order.has_value());
}

TEST(Filtration, SwapWhenFirstDiagonalVanishes) {
  FiltrationReport r = filtration(swap_z(builtin_potential("flat").rho), Point{});
  EXPECT_TRUE(r.swapped);
  EXPECT_EQ(r.order_string(), "2");
}

TEST(Filtration, NonConstantRankThrows) {
  try {
    filtration(parse_expr("abs2(z1) + abs2(z2)^2"), Point{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Rank);
  }
}

// ad = rho_{1 1bar} C, so the two vanish together.
TEST(Filtration, AdOperatorIsScaledC) {
  for (const Potential& p : {builtin_potential("flat"), homog(3), builtin_potential("envelope")}) {
    Expr r11 = d_zbar(d_z(p.rho, 1), 1);
    Tape t({ad_operator_expr(p.rho), r11 * nondeg_scalar_C(p.rho)}, p.domain.params);
    for (const Point& q : p.domain.sample(20)) {
      auto v = t.eval(q);
      EXPECT_LT(std::abs(v[0] - v[1]), 1e-10 * std::max(1.0, std::abs(v[0]))) << p.name;
    }
  }
}

TEST(Filtration, KernelIsInvolutive) {
  for (const Potential& p : {builtin_potential("flat"), homog(3), builtin_potential("product")}) {
    Integrability in = kernel_integrability_check(p.rho, p.domain.sample(10), p.domain.params);
    EXPECT_LT(in.conj_residual, 1e-10) << p.name;
    EXPECT_LT(in.rescaled_residual, 1e-10) << p.name;
  }
}

TEST(Filtration, KernelFieldAnnihilatesOmega) {
  Potential p = homog(3);
  OmegaG og = omega_g_from_potential(p.rho);
  CoordForm c = contract(kernel_field(p.rho), og.omega);
  for (const Point& q : p.domain.sample(8)) EXPECT_LT(eval_form(c, q, p.domain.params).max_abs(), 1e-12);
  EXPECT_THROW(kernel_field(parse_expr("abs2(z2)")), Error);
}

TEST(Jets, AdaptedChartNormalization) {
  Potential p = homog(3);
  Point q;
  q.z1 = cplx(0.2, 0.1);
  AdaptedChart ch = adapt_chart(p.rho, q, p.domain.params);
  Jet j = jet(ch.rho, Point{}, 2, p.domain.params);
  EXPECT_NEAR(std::abs(j.at(0, 0, 0, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(j.at(1, 0, 0, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(j.at(0, 1, 0, 0)), 0.0, 1e-12);
  // kernel along d/dz2
  EXPECT_NEAR(std::abs(j.at(0, 1, 0, 1)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(j.at(0, 1, 1, 0)), 0.0, 1e-12);
  EXPECT_GT(std::abs(j.at(1, 0, 1, 0)), 1e-3);
}

TEST(Jets, LeadingTermsFlat) {
  LeadingTerms lt = jet_leading_terms_check(builtin_potential("flat").rho, Point{});
  EXPECT_TRUE(lt.pass);
  EXPECT_NEAR(std::abs(lt.r21), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(lt.r211 - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(lt.r11 - 1.0), 0.0, 1e-14);
}

TEST(Jets, SpanCondition) {
  EXPECT_TRUE(jet_span_condition(builtin_potential("flat").rho, Point{}, 2).pass);
  EXPECT_TRUE(jet_span_condition(homog(3).rho, Point{}, 2, {{"a", 3.0}}).pass);
  EXPECT_FALSE(jet_span_condition(builtin_potential("product").rho, Point{}, 2).pass);
  EXPECT_FALSE(jet_span_condition(builtin_potential("product").rho, Point{}, 5).pass);
  EXPECT_FALSE(jet_leading_terms_check(builtin_potential("product").rho, Point{}).pass);
  EXPECT_THROW(jet_span_condition(builtin_potential("flat").rho, Point{}, 0), Error);
}

// The verdict does not depend on the free complement in the adapted chart.
TEST(Jets, ComplementIndependence) {
  Potential p = homog(3);
  for (cplx c : {cplx(0.0), cplx(0.3, -0.2), cplx(-1.0, 0.5)}) {
    EXPECT_TRUE(jet_leading_terms_check(p.rho, Point{}, p.domain.params, 1e-8, c).pass);
    EXPECT_TRUE(jet_span_condition(p.rho, Point{}, 2, p.domain.params, 1e-8, c).pass);
  }
}

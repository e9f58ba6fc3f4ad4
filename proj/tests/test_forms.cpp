#include <gtest/gtest.h>

#include "prekahler/domain.hpp"
#include "prekahler/forms.hpp"
#include "prekahler/parse.hpp"

using namespace pk;

namespace {

// Random polynomial in all coordinates, degree <= 2.
Expr random_poly(Rng& rng) {
  const Expr gens[] = {coord(Var::Z1), coord(Var::Z2), coord(Var::Z1, true), coord(Var::Z2, true),
                       coord(Var::V), coord(Var::T)};
  Expr e(rng.normal());
  for (int k = 0; k < 4; ++k) {
    Expr m(cplx(rng.normal(), rng.normal()));
    for (int d = 0; d < 2; ++d) m = m * gens[static_cast<int>(rng.uniform() * 6) % 6];
    e = e + m;
  }
  return e;
}

CoordForm random_one_form(Rng& rng, int slots = kSlots) {
  std::array<Expr, kSlots> c;
  for (int s = 0; s < slots; ++s) c[s] = random_poly(rng);
  return CoordForm::one_form(c);
}

Point random_point(Rng& rng) {
  Point p;
  p.z1 = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  p.z2 = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  p.v = rng.uniform(-1, 1);
  p.t = rng.uniform(0.5, 2);
  return p;
}

double max_at(const CoordForm& a, const Point& p) { return eval_form(a, p).max_abs(); }

}  // namespace

class FormProperty : public ::testing::TestWithParam<int> {};

TEST_P(FormProperty, DSquaredVanishes) {
  Rng rng(GetParam());
  Expr f = random_poly(rng);
  CoordForm a = random_one_form(rng);
  const Point p = random_point(rng);
  EXPECT_LT(max_at(ext_d(ext_d(CoordForm::function(f))), p), 1e-12);
  EXPECT_LT(max_at(ext_d(ext_d(a)), p), 1e-12);
}

TEST_P(FormProperty, WedgeOfOneFormsIsAntisymmetric) {
  Rng rng(GetParam());
  CoordForm a = random_one_form(rng), b = random_one_form(rng);
  const Point p = random_point(rng);
  EXPECT_LT(max_at(wedge(a, b) + wedge(b, a), p), 1e-12);
  EXPECT_LT(max_at(wedge(a, a), p), 1e-12);
}

TEST_P(FormProperty, LeibnizRule) {
  Rng rng(GetParam());
  Expr f = random_poly(rng);
  CoordForm a = random_one_form(rng), b = random_one_form(rng);
  const Point p = random_point(rng);
  EXPECT_LT(max_at(ext_d(a * f) - (wedge(ext_d(CoordForm::function(f)), a) + ext_d(a) * f), p), 1e-10);
  EXPECT_LT(max_at(ext_d(wedge(a, b)) - (wedge(ext_d(a), b) - wedge(a, ext_d(b))), p), 1e-10);
}

TEST_P(FormProperty, ContractionOfWedge) {
  Rng rng(GetParam());
  CoordForm a = random_one_form(rng), b = random_one_form(rng);
  VecField X;
  for (auto& x : X) x = random_poly(rng);
  const Point p = random_point(rng);
  CoordForm lhs = contract(X, wedge(a, b));
  CoordForm rhs = b * on(a, X) - a * on(b, X);
  EXPECT_LT(max_at(lhs - rhs, p), 1e-10);
}

// d a (X, Y) = X a(Y) - Y a(X) - a([X, Y])
TEST_P(FormProperty, CartanFormulaForD) {
  Rng rng(GetParam());
  CoordForm a = random_one_form(rng);
  VecField X, Y;
  for (auto& x : X) x = random_poly(rng);
  for (auto& y : Y) y = random_poly(rng);
  const Point p = random_point(rng);
  Expr lhs = on(ext_d(a), X, Y);
  Expr rhs = pk::apply(X, on(a, Y)) - pk::apply(Y, on(a, X)) - on(a, bracket(X, Y));
  EXPECT_NEAR(std::abs(eval(lhs - rhs, p)), 0.0, 1e-9);
}

TEST_P(FormProperty, DecomposeReassembleRoundTrip) {
  Rng rng(GetParam());
  std::vector<CoordForm> frame;
  // a frame of the dz, dzbar directions only
  for (int s = 0; s < 4; ++s) frame.push_back(random_one_form(rng, 4));
  const Point p = random_point(rng);
  CoordForm a = wedge(frame[0], frame[2]) * Expr(2.0) + wedge(frame[1], frame[3]) * random_poly(rng);
  FrameDecomposition d = decompose(a, frame, p);
  EXPECT_NEAR(std::abs(d.coeff(0, 2) - 2.0), 0.0, 1e-8);
  NumForm back = reassemble(d, frame);
  NumForm want = eval_form(a, p);
  for (const auto& [mask, v] : want.terms) {
    auto it = back.terms.find(mask);
    EXPECT_NEAR(std::abs(v - (it == back.terms.end() ? 0.0 : it->second)), 0.0, 1e-8);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, FormProperty, ::testing::Range(1, 21));

TEST(Forms, ExteriorDerivativeOfFunction) {
  Expr f = parse_expr("z1^2*conj(z2) + v*t");
  CoordForm df = ext_d(CoordForm::function(f));
  EXPECT_EQ(df.coeff(DZ1), parse_expr("2*z1*conj(z2)"));
  EXPECT_EQ(df.coeff(DZB2), parse_expr("z1^2"));
  EXPECT_EQ(df.coeff(DV), coord(Var::T));
  EXPECT_EQ(df.coeff(DT), coord(Var::V));
}

TEST(Forms, ConjugationSwapsHolomorphicSlots) {
  CoordForm a = CoordForm::basis(DZ1) * Expr(cplx(0, 1));
  CoordForm c = conj_form(a);
  EXPECT_EQ(c.coeff(DZB1), Expr(cplx(0, -1)));
  EXPECT_TRUE(c.coeff(DZ1).is_zero());
}

TEST(Forms, DecomposeSingularFrameThrows) {
  std::vector<CoordForm> frame{CoordForm::basis(DZ1), CoordForm::basis(DZ1) * Expr(2.0)};
  try {
    decompose(CoordForm::basis(DZ1), frame, Point{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Singular);
  }
}

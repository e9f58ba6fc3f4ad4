#include <gtest/gtest.h>

#include "prekahler/domain.hpp"
#include "prekahler/parse.hpp"
#include "prekahler/sasaki.hpp"

using namespace pk;

namespace {

Potential homog(double a) { return builtin_potential("homog", {{"a", a}}); }

std::vector<Point> lifted(const Potential& p, int n, std::uint64_t seed = 0) {
  return hypersurface_samples(p.domain.sample(n), seed);
}

struct Algebra {
  std::vector<HoloField> holo;
  AlgebraTable table;
};

Algebra homogeneous_algebra(double a) {
  Potential p = homog(a);
  Expr hyper = p.rho - Expr(2.0);
  Algebra out;
  out.holo = homogeneous_symmetries(a);
  std::vector<VecField> fields;
  for (const auto& Z : out.holo) fields.push_back(restrict_to_hypersurface(Z, hyper));
  out.table = algebra_table(fields, lifted(p, 6), p.domain.params);
  return out;
}

}  // namespace

TEST(Contact, DifferentialIsLeviForm) {
  for (const Potential& p : {builtin_potential("flat"), homog(3), builtin_potential("kahler"), builtin_potential("envelope")}) {
    ContactCheck c = contact_check(p.rho, lifted(p, 10), p.domain.params);
    EXPECT_LT(c.ddbar_residual, 1e-12) << p.name;
    EXPECT_LT(c.omega_residual, 1e-12) << p.name;
  }
}

TEST(Presymplectic, ClosedAndOfTypeOneOne) {
  for (const Potential& p : {builtin_potential("flat"), homog(-2), builtin_potential("envelope")}) {
    auto pts = lifted(p, 10);
    EXPECT_LT(closedness_residual(presymplectify(p.rho), pts, p.domain.params), 1e-12) << p.name;
    EXPECT_LT(check_11_presymplectification(p.rho, pts, p.domain.params), 1e-12) << p.name;
  }
}

// rank of d(t theta) is 2 + rank of omega
TEST(Presymplectic, Rank) {
  Point q;
  q.z1 = cplx(0.1, 0.2);
  q.z2 = cplx(0.2, -0.1);
  q.t = 1.3;
  EXPECT_EQ(presymplectic_rank(builtin_potential("kahler").rho, q), 6);
  EXPECT_EQ(presymplectic_rank(builtin_potential("flat").rho, q), 4);
  EXPECT_EQ(presymplectic_rank(homog(3).rho, q, {{"a", 3.0}}), 4);
  EXPECT_EQ(presymplectic_rank(Expr(0.0), q), 2);
}

TEST(Symmetries, TangentToHomogeneousHypersurface) {
  for (double a : {3.0, -2.0, 0.25}) {
    Potential p = homog(a);
    Expr hyper = p.rho - Expr(2.0);
    for (const auto& Z : homogeneous_symmetries(a)) {
      Tangency t = tangency_check(Z, hyper, lifted(p, 10), p.domain.params);
      EXPECT_TRUE(t.tangent) << Z.name << " a=" << a << " residual " << t.residual;
    }
  }
}

TEST(Symmetries, NonTangentAndNonHolomorphicFields) {
  Potential k = builtin_potential("kahler");
  HoloField dw = parse_holo_field("dw", "1", "0", "0");
  EXPECT_FALSE(tangency_check(dw, k.rho, lifted(k, 5)).tangent);
  HoloField bad = parse_holo_field("bad", "0", "conj(z1)", "0");
  try {
    tangency_check(bad, k.rho, lifted(k, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
  EXPECT_THROW(homogeneous_symmetries(1.0), Error);
}

// Hand computation with b = a/(1-a): [X0,X4] = 2a X0, [X1,X3] = [X1,X4] = X1,
// [X2,X3] = -b X2, [X2,X4] = b X2, all others zero.
TEST(Symmetries, BracketTable) {
  for (double a : {3.0, 0.25}) {
    const double b = a / (1 - a);
    Algebra alg = homogeneous_algebra(a);
    const auto& t = alg.table;
    EXPECT_LT(t.residual, 1e-10);
    double want[5][5][5] = {};
    auto set = [&](int i, int j, int k, double c) {
      want[i][j][k] = c;
      want[j][i][k] = -c;
    };
    set(0, 4, 0, 2 * a);
    set(1, 3, 1, 1.0);
    set(1, 4, 1, 1.0);
    set(2, 3, 2, -b);
    set(2, 4, 2, b);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        for (int k = 0; k < 5; ++k) EXPECT_NEAR(t.at(i, j, k), want[i][j][k], 1e-10) << i << j << k << " a=" << a;
  }
}

TEST(Symmetries, StabilizerDimensions) {
  Algebra alg = homogeneous_algebra(3.0);
  EXPECT_EQ(stabilizer_dim(alg.table, {1, 0, 0, 0, 0}), 4);
  EXPECT_EQ(stabilizer_dim(alg.table, {0, 1, 0, 0, 0}), 4);
  EXPECT_EQ(stabilizer_dim(alg.table, {0, 0, 0, 1, 0}), 3);
  EXPECT_EQ(stabilizer_dim(alg.table, {1, 0, 0, 0.3, 0.7}), 2);
}

// X3, X4 span an abelian subalgebra acting on the abelian ideal <X0, X1, X2>
// with three distinct weights, so a generic element has a 2-dimensional centralizer.
TEST(Symmetries, GenericStabilizerIsTwoDimensional) {
  Algebra alg = homogeneous_algebra(3.0);
  StabilizerSample s = sample_stabilizers(alg.table, 0, 100);
  EXPECT_EQ(s.count, 100);
  EXPECT_EQ(s.histogram[2], 100);
}

TEST(Symmetries, RealFieldsOnChart) {
  auto holo = homogeneous_symmetries(3.0);
  Potential p = homog(3.0);
  VecField X0 = restrict_to_hypersurface(holo[0], p.rho - Expr(2.0));
  EXPECT_TRUE(X0[DZ1].is_zero());
  EXPECT_EQ(X0[DV], Expr(1.0));
  VecField X1 = restrict_to_hypersurface(holo[1], p.rho - Expr(2.0));
  EXPECT_EQ(X1[DZ1], Expr(cplx(0, 1)));
  EXPECT_TRUE(X1[DV].is_zero());
}

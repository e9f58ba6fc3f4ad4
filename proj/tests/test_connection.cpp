#include <gtest/gtest.h>

#include <cmath>

#include "prekahler/connection.hpp"
#include "prekahler/domain.hpp"
#include "prekahler/parse.hpp"
#include "prekahler/wirtinger.hpp"

using namespace pk;

namespace {

using G3 = std::array<std::array<std::array<Expr, 2>, 2>, 2>;

const Var X[2] = {Var::Z1, Var::Z2};
Expr dx(Expr e, int k) { return diff(e, X[k], false); }

// Coordinate computation for sigma = dx1 ^ dx2, independent of the frame code:
// R^i_j = R^i_{j12}, Ric_{jl} = R^k_{jkl}, K = eps^{ik} eps^{jl} Ric_{ij;kl}.
struct Oracle {
  std::array<std::array<Expr, 2>, 2> R, Ric;
  Expr K;
};

Oracle coordinate_oracle(const G3& g) {
  // Gamma(i, k, j) = gamma^i_{jk}, nabla_k d_j = Gamma^i_{kj} d_i
  auto G = [&](int i, int k, int j) { return g[i][j][k]; };
  auto riemann = [&](int i, int j, int k, int l) {
    Expr r = dx(G(i, l, j), k) - dx(G(i, k, j), l);
    for (int m = 0; m < 2; ++m) r = r + G(i, k, m) * G(m, l, j) - G(i, l, m) * G(m, k, j);
    return r;
  };
  Oracle o;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) o.R[i][j] = riemann(i, j, 0, 1);
  for (int j = 0; j < 2; ++j)
    for (int l = 0; l < 2; ++l) o.Ric[j][l] = riemann(0, j, 0, l) + riemann(1, j, 1, l);
  Expr D1[2][2][2], D2[2][2][2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        Expr e = dx(o.Ric[i][j], k);
        for (int m = 0; m < 2; ++m) e = e - G(m, k, i) * o.Ric[m][j] - G(m, k, j) * o.Ric[i][m];
        D1[i][j][k] = e;
      }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          Expr e = dx(D1[i][j][k], l);
          for (int m = 0; m < 2; ++m)
            e = e - G(m, l, i) * D1[m][j][k] - G(m, l, j) * D1[i][m][k] - G(m, l, k) * D1[i][j][m];
          D2[i][j][k][l] = e;
        }
  const double eps[2][2] = {{0, 1}, {-1, 0}};
  o.K = Expr(0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          if (eps[i][k] * eps[j][l] != 0) o.K = o.K + Expr(eps[i][k] * eps[j][l]) * D2[i][j][k][l];
  return o;
}

std::vector<Point> real_points(std::uint64_t seed, int n) {
  Rng rng(seed);
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.z1 = rng.uniform(-1, 1);
    p.z2 = rng.uniform(-1, 1);
  }
  return pts;
}

Potential homog(double a, std::uint64_t seed = 0) {
  Potential p = builtin_potential("homog", {{"a", a}});
  p.domain.seed = seed;
  return p;
}

}  // namespace

class RandomConnection : public ::testing::TestWithParam<int> {};

TEST_P(RandomConnection, MatchesCoordinateOracle) {
  ChristoffelInput ci = random_christoffel(GetParam(), 2);
  ConnectionData cd = connection_data(frame_from_christoffel(ci.gamma, ci.sigma));
  Oracle o = coordinate_oracle(ci.gamma);
  Tape t({cd.R11, cd.R12, cd.R21, cd.R22, o.R[0][0], o.R[0][1], o.R[1][0], o.R[1][1], cd.Ric[0][0], cd.Ric[0][1],
          cd.Ric[1][1], o.Ric[0][0], o.Ric[0][1], o.Ric[1][1], cd.K_cov, cd.K_coframe, o.K});
  for (const Point& p : real_points(GetParam() + 17, 10)) {
    auto v = t.eval(p);
    const double s = std::max(1.0, std::abs(v[16]));
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(std::abs(v[k] - v[4 + k]), 0.0, 1e-10);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(std::abs(v[8 + k] - v[11 + k]), 0.0, 1e-10);
    EXPECT_LT(std::abs(v[14] - v[16]) / s, 1e-10);
    EXPECT_LT(std::abs(v[15] - v[16]) / s, 1e-10);
  }
}

TEST_P(RandomConnection, SymplecticAndTorsionFree) {
  ChristoffelInput ci = random_christoffel(GetParam(), 3);
  auto pts = real_points(GetParam(), 8);
  ChristoffelCheck ck = check_christoffel(ci.gamma, ci.sigma, pts);
  EXPECT_LT(ck.asymmetry, 1e-12);
  EXPECT_LT(ck.volume_defect, 1e-12);
  ConnectionData cd = connection_data(frame_from_christoffel(ci.gamma, ci.sigma));
  FrameResiduals fr = frame_residuals(cd, pts);
  EXPECT_LT(fr.torsion, 1e-10);
  EXPECT_LT(fr.trace, 1e-10);
  EXPECT_LT(fr.curvature_shape, 1e-10);
}

// A constant unimodular change of frame leaves K, Ric.Ric and the value of R on
// a tangent vector unchanged.
TEST_P(RandomConnection, UnimodularFrameInvariance) {
  Rng rng(GetParam() * 31);
  std::array<std::array<double, 2>, 2> A{{{rng.normal(), rng.normal()}, {rng.normal(), 0.0}}};
  A[1][1] = (1.0 + A[0][1] * A[1][0]) / A[0][0];
  ChristoffelInput ci = random_christoffel(GetParam(), 2);
  ConnectionFrame fr = frame_from_christoffel(ci.gamma, ci.sigma);
  ConnectionData a = connection_data(fr), b = connection_data(transform_frame(fr, A));
  std::vector<Expr> roots{a.K_cov, b.K_cov, a.RicRic, b.RicRic};
  for (Expr e : a.Rq.c) roots.push_back(e);
  for (Expr e : b.Rq.c) roots.push_back(e);
  for (Expr e : a.Cc.c) roots.push_back(e);
  for (Expr e : b.Cc.c) roots.push_back(e);
  Tape t(roots);
  const double u1 = 0.3, u2 = -0.7;
  const double w1 = A[0][0] * u1 + A[0][1] * u2, w2 = A[1][0] * u1 + A[1][1] * u2;
  for (const Point& p : real_points(GetParam(), 6)) {
    auto v = t.eval(p);
    const double s = std::max(1.0, std::abs(v[0]));
    EXPECT_LT(std::abs(v[0] - v[1]) / s, 1e-9);
    EXPECT_LT(std::abs(v[2] - v[3]) / std::max(1.0, std::abs(v[2])), 1e-9);
    std::vector<cplx> ra(v.begin() + 4, v.begin() + 7), rb(v.begin() + 7, v.begin() + 10);
    std::vector<cplx> ca(v.begin() + 10, v.begin() + 14), cb(v.begin() + 14, v.begin() + 18);
    const cplx x = eval_binary(ra, u1, u2), y = eval_binary(rb, w1, w2);
    EXPECT_LT(std::abs(x - y) / std::max(1.0, std::abs(x)), 1e-9);
    const cplx cx = eval_binary(ca, u1, u2), cy = eval_binary(cb, w1, w2);
    EXPECT_LT(std::abs(cx - cy) / std::max(1.0, std::abs(cx)), 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomConnection, ::testing::Range(1, 9));

TEST(Connection, ZeroGammaIsFlat) {
  ChristoffelInput ci = parse_christoffel_json(
      R"J({"coords": ["x", "y"], "gamma": [[["0","0"],["0","0"]],[["0","0"],["0","0"]]], "sigma": "1"})J");
  ConnectionData cd = connection_data(frame_from_christoffel(ci.gamma, ci.sigma));
  EXPECT_TRUE(cd.R11.is_zero());
  EXPECT_TRUE(cd.R12.is_zero());
  EXPECT_TRUE(cd.R21.is_zero());
  EXPECT_TRUE(cd.K_cov.is_zero());
  for (Expr e : cd.Cc.c) EXPECT_TRUE(e.is_zero());
}

TEST(Connection, JsonErrors) {
  for (const char* bad : {"{", R"({"gamma": 3})", R"({"gamma": [[["x^","0"],["0","0"]],[["0","0"],["0","0"]]]})"}) {
    try {
      parse_christoffel_json(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Parse) << bad;
    }
  }
}

TEST(Connection, NonUnitVolumeForm) {
  // sigma = e^x dx ^ dy with gamma chosen so that sigma is parallel
  ChristoffelInput ci = parse_christoffel_json(
      R"J({"coords": ["x", "y"], "gamma": [[["1","0"],["0","y"]],[["y","0"],["0","0"]]], "sigma": "exp(x)"})J");
  auto pts = real_points(4, 6);
  ChristoffelCheck ck = check_christoffel(ci.gamma, ci.sigma, pts);
  EXPECT_LT(ck.volume_defect, 1e-12);
  ConnectionData cd = connection_data(frame_from_christoffel(ci.gamma, ci.sigma));
  FrameResiduals fr = frame_residuals(cd, pts);
  EXPECT_LT(fr.torsion, 1e-10);
  EXPECT_LT(fr.trace, 1e-10);
  Tape t({cd.K_cov, cd.K_coframe});
  for (const Point& p : pts) {
    auto v = t.eval(p);
    EXPECT_LT(std::abs(v[0] - v[1]), 1e-9 * std::max(1.0, std::abs(v[0])));
  }
}

TEST(Connection, DictionaryRoundTrip) {
  Potential p = homog(3, 2);
  auto pts = p.domain.sample(8);
  FromPrekahler fp = from_prekahler(p.rho, pts, p.domain.params);
  CurvatureFromT c = curvature_from_T(fp.t);
  TFromCurvature t = T_from_curvature(fp.data.R11, fp.data.R12, fp.data.R21);
  Tape tape({c.R11, c.R12, c.R21, fp.data.R11, fp.data.R12, fp.data.R21, t.T1, t.T3, fp.t.T1, fp.t.T3},
            p.domain.params);
  for (const Point& q : pts) {
    auto v = tape.eval(q);
    for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(v[k] - v[3 + k]), 1e-10);
    EXPECT_LT(std::abs(v[6] - v[8]), 1e-10);
    EXPECT_LT(std::abs(v[7] - v[9]), 1e-10);
  }
}

// R = 4 (a+1)(a-2) / (9 a (a-1) rho) (omega^2)^2 on the homogeneous family.
TEST(Connection, HomogeneousQuadric) {
  for (double a : {3.0, 0.25, 0.5, -2.0}) {
    Potential p = homog(a, 1);
    auto pts = p.domain.sample(6);
    FromPrekahler fp = from_prekahler(p.rho, pts, p.domain.params);
    const double k = 4 * (a + 1) * (a - 2) / (9 * a * (a - 1));
    Tape t({fp.data.Rq.c[0], fp.data.Rq.c[1], fp.data.Rq.c[2], p.rho}, p.domain.params);
    for (const Point& q : pts) {
      auto v = t.eval(q);
      EXPECT_NEAR((v[0] * v[3]).real(), k, 1e-12) << a;
      EXPECT_LT(std::abs(v[1]) + std::abs(v[2]), 1e-12);
    }
  }
}

TEST(Connection, SpecialAndCriticalAtHalf) {
  Potential p = homog(0.5, 3);
  auto pts = p.domain.sample(10);
  FromPrekahler fp = from_prekahler(p.rho, pts, p.domain.params);
  EXPECT_TRUE(special_check(fp.data, pts, p.domain.params).special);
  EXPECT_TRUE(critical_check(fp.data, pts, p.domain.params).critical);
  Potential q = homog(3, 3);
  FromPrekahler f3 = from_prekahler(q.rho, pts, q.domain.params);
  EXPECT_FALSE(special_check(f3.data, pts, q.domain.params).special);
}

TEST(Connection, QuarticRelation) {
  for (double a : {3.0, 0.25, -2.0}) {
    Potential p = homog(a, 4);
    auto pts = p.domain.sample(8);
    FromPrekahler fp = from_prekahler(p.rho, pts, p.domain.params);
    EXPECT_LT(q_relation_residual(fp.data, a, pts, p.domain.params), 1e-10) << a;
  }
}

TEST(Connection, RandomConnectionIsNotCritical) {
  ChristoffelInput ci = random_christoffel(5, 2);
  ConnectionData cd = connection_data(frame_from_christoffel(ci.gamma, ci.sigma));
  EXPECT_FALSE(critical_check(cd, real_points(5, 20)).critical);
}

TEST(Connection, NonzeroT2Rejected) {
  Potential p = builtin_potential("envelope");
  try {
    from_prekahler(p.rho, p.domain.sample(6));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(Connection, BinaryFormAlgebra) {
  BinaryForm a{1, {Expr(1.0), Expr(2.0)}}, b{1, {Expr(3.0), Expr(-1.0)}};
  BinaryForm c = product(a, b);
  ASSERT_EQ(c.degree, 2);
  std::vector<cplx> cv;
  for (Expr e : c.c) cv.push_back(e.const_value());
  for (double u : {0.3, -1.2})
    for (double w : {0.5, 2.0}) {
      const cplx av = eval_binary({1.0, 2.0}, u, w), bv = eval_binary({3.0, -1.0}, u, w);
      EXPECT_NEAR(std::abs(eval_binary(cv, u, w) - av * bv), 0.0, 1e-14);
    }
}

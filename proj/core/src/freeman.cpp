#include "prekahler/freeman.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "prekahler/parse.hpp"
#include "prekahler/wirtinger.hpp"

namespace pk {

VecField kernel_field(Expr rho) {
  Expr r11 = d_zbar(d_z(rho, 1), 1);
  if (r11.is_zero()) throw Error(ErrorKind::Rank, "rho_{1 1bar} vanishes identically; no kernel field in this chart");
  Expr f = d_zbar(d_z(rho, 2), 1) / r11;
  VecField Y{};
  Y[DZ1] = -f;
  Y[DZ2] = Expr(1.0);
  return Y;
}

Expr ad_operator_expr(Expr rho) {
  VecField Y = kernel_field(rho);
  VecField Xb{};
  Xb[DZB1] = Expr(1.0);
  VecField br = bracket(Y, Xb);
  // c1 d/dz1 + c2 d/dz2 == (c1 + c2 f) d/dz1 modulo Y
  return br[DZ1] - br[DZ2] * Y[DZ1];
}

cplx ad_operator(Expr rho, const Point& p, const std::map<std::string, double>& params) {
  return Tape({ad_operator_expr(rho)}, params).eval(p)[0];
}

namespace {

// Chart in which rho_{1 1bar}(p) != 0 when the rank is 1.
bool needs_swap(const NumMat2& H) {
  const double hn = std::max(std::abs(H[0][0]), std::abs(H[1][1]));
  return hn > 0 && std::abs(H[0][0]) < 1e-9 * hn;
}

}  // namespace

FiltrationReport filtration(Expr rho, const Point& p, const std::map<std::string, double>& params, double tol) {
  FiltrationReport rep;
  rep.point = p;
  OmegaG og = omega_g_from_potential(rho);
  Tape ht({og.H[0][0], og.H[0][1], og.H[1][0], og.H[1][1]}, params);
  auto hess = [&](const Point& q) {
    auto v = ht.eval(q);
    return NumMat2{{{v[0], v[1]}, {v[2], v[3]}}};
  };
  NumMat2 H = hess(p);
  const int r = rank_at(H);
  Rng rng(0x5eedULL);
  for (int k = 0; k < 8; ++k) {
    Point q = p;
    q.z1 += 1e-3 * cplx(rng.normal(), rng.normal());
    q.z2 += 1e-3 * cplx(rng.normal(), rng.normal());
    if (rank_at(hess(q)) != r) throw Error(ErrorKind::Rank, "rank of omega is not constant near " + to_string(p));
  }
  rep.rank_k0 = 2 - r;
  if (r == 2) {
    rep.rank_k1 = 0;
    rep.order = 1;
    return rep;
  }
  if (r == 0) {
    rep.rank_k1 = 2;
    return rep;
  }
  Expr work = rho;
  Point q = p;
  if (needs_swap(H)) {
    work = swap_z(rho);
    std::swap(q.z1, q.z2);
    rep.swapped = true;
  }
  rep.ad = ad_operator(work, q, params);
  if (std::abs(rep.ad) > tol) {
    rep.rank_k1 = 0;
    rep.order = 2;
  } else {
    rep.rank_k1 = 1;
  }
  return rep;
}

AdaptedChart adapt_chart(Expr rho, const Point& p, const std::map<std::string, double>& params, cplx complement) {
  AdaptedChart ch;
  ch.origin = p;
  auto j = jet(rho, p, 2, params);
  NumMat2 H{{{j.at(1, 0, 1, 0), j.at(1, 0, 0, 1)}, {j.at(0, 1, 1, 0), j.at(0, 1, 0, 1)}}};
  Eigen::Vector2cd v(0.0, 1.0), c(1.0, complement);
  if (rank_at(H) == 1) {
    // v^i rho_{i jbar} = 0 for both j
    Eigen::Matrix2cd A;
    A << H[0][0], H[1][0], H[0][1], H[1][1];
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(A, Eigen::ComputeFullV);
    v = svd.matrixV().col(1);
    v /= std::abs(v(1)) > std::abs(v(0)) ? v(1) : v(0);
    if (std::abs(c(0) * v(1) - c(1) * v(0)) < 1e-8) c = Eigen::Vector2cd(0.0, 1.0);
  }
  ch.L[0][0] = c(0);
  ch.L[1][0] = c(1);
  ch.L[0][1] = v(0);
  ch.L[1][1] = v(1);
  const Expr w1 = coord(Var::Z1), w2 = coord(Var::Z2);
  Expr x1 = constant(ch.L[0][0]) * w1 + constant(ch.L[0][1]) * w2;
  Expr x2 = constant(ch.L[1][0]) * w1 + constant(ch.L[1][1]) * w2;
  CoordMap m;
  m[0] = constant(p.z1) + x1;
  m[1] = constant(p.z2) + x2;
  const cplx r0 = j.at(0, 0, 0, 0);
  Expr lin = constant(j.at(1, 0, 0, 0)) * x1 + constant(j.at(0, 1, 0, 0)) * x2;
  ch.rho = substitute(rho, m) - constant(r0.real()) - lin - conj_expr(lin);
  return ch;
}

JetSpan jet_span_condition(Expr rho, const Point& p, int k, const std::map<std::string, double>& params, double tol,
                           cplx complement) {
  if (k < 1 || k > 5) throw Error(ErrorKind::Domain, "jet span order must be in [1, 5]");
  AdaptedChart ch = adapt_chart(rho, p, params, complement);
  auto j = jet(ch.rho, Point{}, k + 1, params);
  std::vector<Eigen::Vector2cd> cols;
  for (int b1 = 0; b1 <= k; ++b1)
    for (int b2 = 0; b1 + b2 <= k; ++b2) {
      if (b1 + b2 == 0) continue;
      cols.emplace_back(j.at(1, 0, b1, b2), j.at(0, 1, b1, b2));
    }
  Eigen::MatrixXcd M(2, cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) M.col(i) = cols[i];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& s = svd.singularValues();
  JetSpan out;
  out.smallest_sv = s(1);
  out.rank = (s(0) > tol) + (s(1) > tol * std::max(1.0, s(0)));
  out.pass = out.rank == 2;
  return out;
}

LeadingTerms jet_leading_terms_check(Expr rho, const Point& p, const std::map<std::string, double>& params, double tol,
                                     cplx complement) {
  AdaptedChart ch = adapt_chart(rho, p, params, complement);
  auto j = jet(ch.rho, Point{}, 3, params);
  LeadingTerms lt;
  lt.r21 = j.at(0, 1, 1, 0);
  lt.r211 = j.at(0, 1, 2, 0);
  lt.r11 = j.at(1, 0, 1, 0);
  lt.pass = std::abs(lt.r21) < tol && std::abs(lt.r211) > tol && std::abs(lt.r11) > tol;
  return lt;
}

Integrability kernel_integrability_check(Expr rho, const std::vector<Point>& pts,
                                         const std::map<std::string, double>& params) {
  OmegaG og = omega_g_from_potential(rho);
  VecField Y = kernel_field(rho);
  VecField Yb = conj_field(Y);
  Expr h = Expr(1.0) + coord(Var::Z1) * coord(Var::Z2, true);
  VecField hY;
  for (int s = 0; s < kSlots; ++s) hY[s] = h * Y[s];
  CoordForm a = contract(bracket(Y, Yb), og.omega);
  CoordForm b = contract(bracket(Y, hY), og.omega);
  FormTape ft({a, b}, params);
  Integrability out;
  for (const Point& p : pts) {
    auto nf = ft.eval(p);
    out.conj_residual = std::max(out.conj_residual, nf[0].max_abs());
    out.rescaled_residual = std::max(out.rescaled_residual, nf[1].max_abs());
  }
  return out;
}

}  // namespace pk

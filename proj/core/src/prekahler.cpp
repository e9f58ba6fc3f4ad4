#include "prekahler/prekahler.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "prekahler/parallel.hpp"
#include "prekahler/parse.hpp"
#include "prekahler/wirtinger.hpp"

namespace pk {

namespace {

const Expr kI = constant(cplx(0.0, 1.0));

Expr rho_ij(Expr rho, int i, int j) { return d_zbar(d_z(rho, i), j); }

}  // namespace

OmegaG omega_g_from_potential(Expr rho, const Domain* dom) {
  if (dom) {
    auto rc = check_real(rho, *dom, 64);
    if (!rc.pass) {
      std::ostringstream os;
      os << "potential is not real: |Im| = " << rc.max_imag << " at " << to_string(rc.witness);
      throw Error(ErrorKind::Domain, os.str());
    }
  }
  OmegaG g;
  const int hs[2] = {DZ1, DZ2}, as[2] = {DZB1, DZB2};
  g.omega = CoordForm(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      g.H[i][j] = rho_ij(rho, i + 1, j + 1);
      g.omega = g.omega + wedge(CoordForm::basis(hs[i]), CoordForm::basis(as[j])) * (0.5 * kI * g.H[i][j]);
    }
  return g;
}

NumMat2 eval_hessian(const Mat2& H, const Point& p, const std::map<std::string, double>& params) {
  auto v = Tape({H[0][0], H[0][1], H[1][0], H[1][1]}, params).eval(p);
  return {{{v[0], v[1]}, {v[2], v[3]}}};
}

int rank_at(const NumMat2& H) {
  Eigen::Matrix2cd m;
  m << H[0][0], H[0][1], H[1][0], H[1][1];
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
  const auto& s = svd.singularValues();
  const double cut = std::max(1e-9 * s(0), 1e-12);
  return (s(0) > cut) + (s(1) > cut);
}

int rank_at(Expr rho, const Point& p, const std::map<std::string, double>& params) {
  return rank_at(eval_hessian(omega_g_from_potential(rho).H, p, params));
}

Expr nondeg_scalar_C(Expr rho) {
  Expr r11 = rho_ij(rho, 1, 1);
  Expr r21 = rho_ij(rho, 2, 1);
  Expr r211 = d_zbar(r21, 1);
  Expr r111 = d_zbar(r11, 1);
  return (r211 * r11 - r111 * r21) * pow(r11, Expr(-3.0));
}

std::string ChartRecord::describe() const {
  std::ostringstream os;
  os << (swapped ? "swap(z1,z2), " : "") << "origin " << to_string(origin) << ", eps " << eps.real();
  if (eps.imag() != 0.0) os << (eps.imag() > 0 ? "+" : "") << eps.imag() << "i";
  return os.str();
}

Desingularized desingularize(Expr rho, const Point& p, cplx eps, const std::map<std::string, double>& params) {
  auto jp = jet(rho, p, 2, params);
  NumMat2 H{{{jp.at(1, 0, 1, 0), jp.at(1, 0, 0, 1)}, {jp.at(0, 1, 1, 0), jp.at(0, 1, 0, 1)}}};
  if (rank_at(H) != 1) throw Error(ErrorKind::Rank, "desingularize needs rank 1 at " + to_string(p));
  Desingularized out;
  out.chart.origin = p;
  const double hn = std::max(std::abs(H[0][0]), std::abs(H[1][1]));
  Point q = p;
  if (std::abs(H[0][0]) < 1e-9 * hn) {
    rho = swap_z(rho);
    std::swap(q.z1, q.z2);
    out.chart.swapped = true;
  }
  const Expr z1 = coord(Var::Z1), z2 = coord(Var::Z2);
  CoordMap m;
  m[0] = constant(q.z1) + z1 + constant(eps) * z1 * z2;
  m[1] = constant(q.z2) + z2;
  out.rho = substitute(rho, m);
  out.chart.eps = eps;
  auto j = jet(out.rho, Point{}, 3, params);
  const cplx s = j.at(1, 0, 0, 1) * j.at(1, 0, 2, 0) - j.at(1, 0, 1, 1) * j.at(1, 0, 1, 0);
  out.chart.singular_value = std::abs(s);
  const cplx r11 = j.at(1, 0, 1, 0);
  out.chart.c_value = std::abs((j.at(0, 1, 2, 0) * r11 - j.at(1, 0, 2, 0) * j.at(0, 1, 1, 0)) / (r11 * r11 * r11));
  if (std::abs(r11) < 1e-12) throw Error(ErrorKind::Singular, "rho'_{1 1bar}(0) vanishes after the chart change");
  const double scale = std::max(1e-300, std::abs(r11) * (std::abs(j.at(1, 0, 1, 1)) + std::abs(r11)));
  if (out.chart.singular_value < 1e-10 * scale)
    throw Error(ErrorKind::Singular, "eps lands on the excluded value; retry with another eps");
  return out;
}

std::vector<CoordForm> AdaptedCoframe::basis() const { return {theta1, theta2, conj_form(theta1), conj_form(theta2)}; }

namespace {

void fill_dual_frame(AdaptedCoframe& cf) {
  Expr t1 = cf.theta1.coeff(DZ1), t2 = cf.theta1.coeff(DZ2);
  Expr a1 = cf.theta2.coeff(DZ1), a2 = cf.theta2.coeff(DZ2);
  Expr D = t1 * a2 - t2 * a1;
  Expr inv = pow(D, Expr(-1.0));
  cf.e1 = VecField{};
  cf.e2 = VecField{};
  cf.e1[DZ1] = a2 * inv;
  cf.e1[DZ2] = -a1 * inv;
  cf.e2[DZ1] = -t2 * inv;
  cf.e2[DZ2] = t1 * inv;
}

}  // namespace

AdaptedCoframe adapted_coframe(Expr rho) {
  AdaptedCoframe cf;
  cf.rho = rho;
  cf.r11 = rho_ij(rho, 1, 1);
  if (cf.r11.is_zero()) throw Error(ErrorKind::Rank, "rho_{1 1bar} vanishes identically; swap coordinates first");
  Expr r21 = rho_ij(rho, 2, 1);
  cf.f = r21 / cf.r11;
  cf.C = nondeg_scalar_C(rho);
  if (cf.C.is_zero()) throw Error(ErrorKind::Rank, "C vanishes identically (holomorphically degenerate or rank 2)");
  Expr L = ln(cf.C);
  Expr sq = sqrt(cf.r11);
  cf.A1 = Expr(1.0 / 3.0) * d_zbar(L, 1);
  cf.A2 = cf.A1 * cf.f - d_zbar(cf.f, 1);
  Expr cA1 = conj_expr(cf.A1);
  Expr hi = Expr(0.5) * kI;
  cf.B1 = -kI * cA1 - hi * d_z(cf.r11, 1) / cf.r11;
  cf.B2 = -kI * cf.f * cA1 - hi * d_z(cf.r11, 2) / cf.r11;
  std::array<Expr, kSlots> t{}, a{}, b{};
  t[DZ1] = kI * sq;
  t[DZ2] = kI * r21 / sq;
  a[DZ1] = cf.A1;
  a[DZ2] = cf.A2;
  b[DZ1] = cf.B1;
  b[DZ2] = cf.B2;
  b[DZB1] = conj_expr(cf.B1);
  b[DZB2] = conj_expr(cf.B2);
  cf.theta1 = CoordForm::one_form(t);
  cf.theta2 = CoordForm::one_form(a);
  cf.psi = CoordForm::one_form(b);
  cf.branch_note = "principal sqrt(rho_{1 1bar}); conjugation applied formally";
  fill_dual_frame(cf);
  return cf;
}

AdaptedCoframe gauge_rotate(const AdaptedCoframe& cf, double phi) {
  AdaptedCoframe out = cf;
  out.theta1 = cf.theta1 * constant(std::polar(1.0, phi));
  out.theta2 = cf.theta2 * constant(std::polar(1.0, 2.0 * phi));
  out.gauge_phi = cf.gauge_phi + phi;
  fill_dual_frame(out);
  return out;
}

ClosedForms structure_functions(Expr rho) {
  Expr r11 = rho_ij(rho, 1, 1);
  Expr r21 = rho_ij(rho, 2, 1);
  Expr r111b = d_zbar(r11, 1);  // rho_{1 1bar 1bar}
  Expr r111 = d_z(r11, 1);      // rho_{1 1 1bar}
  Expr C = nondeg_scalar_C(rho);
  Expr L = ln(C);
  Expr Lb = d_zbar(L, 1);
  ClosedForms out;
  out.T1 = -d_zbar(Lb, 1) / (Expr(3.0) * r11) +
           Expr(2.0 / 9.0) / r11 * Lb * (Lb + Expr(1.5) * r111b / r11);
  Expr Lc = ln(conj_expr(C));
  out.T2 = kI * r21 / (Expr(3.0) * C * pow(r11, Expr(2.5))) * d_z(Lb, 1) -
           kI / (Expr(3.0) * C * pow(r11, Expr(1.5))) * d_z(Lb, 2) - kI / sqrt(r11) * d_z(L, 1) -
           Expr(2.0) * kI / (Expr(3.0) * sqrt(r11)) * d_z(Lc, 1) - Expr(2.0) * kI * r111 / pow(r11, Expr(1.5));
  return out;
}

Extracted extract_structure(const AdaptedCoframe& cf) {
  Extracted t;
  VecField e1b = conj_field(cf.e1);
  CoordForm dth2 = ext_d(cf.theta2);
  t.T1 = on(dth2, cf.e1, e1b);
  t.T2 = on(dth2, cf.e1, cf.e2) + Expr(2.0) * kI * on(cf.psi, cf.e1);
  t.T3 = on(ext_d(cf.psi), cf.e1, e1b);
  return t;
}

Residuals structure_residuals(const AdaptedCoframe& cf, const Extracted& t) {
  const CoordForm& th1 = cf.theta1;
  const CoordForm& th2 = cf.theta2;
  CoordForm th1b = conj_form(th1), th2b = conj_form(th2);
  Residuals r;
  r.r1 = ext_d(th1) + wedge(cf.psi, th1) * kI - wedge(th1b, th2);
  r.r2 = ext_d(th2) + wedge(cf.psi, th2) * (Expr(2.0) * kI) - wedge(th1, th1b) * t.T1 - wedge(th1, th2) * t.T2;
  r.r3 = ext_d(cf.psi) - (wedge(th2, th2b) * kI + wedge(th1, th2b) * (kI * conj_expr(t.T2)) -
                          wedge(th1b, th2) * (kI * t.T2) + wedge(th1, th1b) * t.T3);
  return r;
}

Expr t3_from_bianchi(const AdaptedCoframe& cf, const Extracted& t) {
  // dT1 = T1;1 th1 + T1;1b th1b + T1;2 th2 - 2i T1 psi, evaluated on e2
  // dT2 = ... + i T2 psi, evaluated on conj(e1)
  VecField e1b = conj_field(cf.e1);
  Expr T12 = pk::apply(cf.e2, t.T1) + Expr(2.0) * kI * t.T1 * on(cf.psi, cf.e2);
  Expr T21b = pk::apply(e1b, t.T2) - kI * t.T2 * on(cf.psi, e1b);
  return Expr(0.5) * kI * (T21b - T12);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pseudoKahler: return "pseudoKahler";
    case Verdict::flat2Nondeg: return "flat2Nondeg";
    case Verdict::twistorT2zero: return "twistorT2zero";
    case Verdict::general2Nondeg: return "general2Nondeg";
    case Verdict::holDegenerate: return "holDegenerate";
    case Verdict::nonConstantRank: return "nonConstantRank";
  }
  return "?";
}

namespace {

double max_frame_coeff(const NumForm& r, const std::vector<NumForm>& basis, const Point& p, double& cond) {
  FrameDecomposition d = decompose(r, basis, p);
  cond = std::max(cond, d.condition);
  double m = 0.0;
  for (const auto& [k, v] : d.coeffs) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

InvariantReport analyze(Expr rho, const std::vector<Point>& pts_in, const std::map<std::string, double>& params,
                        const AnalyzeOptions& opt) {
  InvariantReport rep;
  rep.potential = to_string(rho);
  const std::size_t n = pts_in.size();
  rep.points.resize(n);
  OmegaG og = omega_g_from_potential(rho);
  Tape htape({og.H[0][0], og.H[0][1], og.H[1][0], og.H[1][1]}, params);
  bool need_swap = false, any_rank1 = false;
  std::vector<int> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto v = htape.eval(pts_in[i]);
    NumMat2 H{{{v[0], v[1]}, {v[2], v[3]}}};
    ranks[i] = rank_at(H);
    rep.points[i].p = pts_in[i];
    rep.points[i].rank = ranks[i];
    if (ranks[i] == 1) {
      any_rank1 = true;
      if (std::abs(v[0]) < 1e-9 * std::max(std::abs(v[0]), std::abs(v[3]))) need_swap = true;
    }
  }
  bool constant_rank = true;
  for (int r : ranks) constant_rank = constant_rank && r == ranks.front();
  if (!constant_rank) {
    rep.verdict = Verdict::nonConstantRank;
    rep.notes.push_back("rank of omega differs across samples");
    return rep;
  }
  if (!any_rank1) {
    rep.verdict = n && ranks.front() == 2 ? Verdict::pseudoKahler : Verdict::holDegenerate;
    return rep;
  }
  Expr work = rho;
  std::vector<Point> pts = pts_in;
  if (need_swap) {
    work = swap_z(rho);
    for (auto& p : pts) std::swap(p.z1, p.z2);
    rep.swapped = true;
    rep.notes.push_back("rho_{1 1bar} vanishes at a sample; coordinates z1, z2 exchanged");
  }
  Expr C = nondeg_scalar_C(work);
  {
    Tape ct({C}, params);
    bool all_zero = true;
    std::vector<cplx> out;
    for (std::size_t i = 0; i < n; ++i) {
      double c = ct.try_eval(pts[i], out) ? std::abs(out[0]) : 0.0;
      rep.points[i].absC = c;
      all_zero = all_zero && c < opt.tol;
    }
    if (all_zero || C.is_zero()) {
      rep.verdict = Verdict::holDegenerate;
      rep.notes.push_back("C vanishes at every sample: holomorphically degenerate");
      return rep;
    }
  }
  AdaptedCoframe cf = adapted_coframe(work);
  if (opt.gauge_phi != 0.0) cf = gauge_rotate(cf, opt.gauge_phi);
  Extracted ex = extract_structure(cf);
  std::vector<Expr> roots{ex.T1, ex.T2, ex.T3};
  if (opt.closed_forms) {
    ClosedForms cl = structure_functions(work);
    roots.push_back(cl.T1);
    roots.push_back(cl.T2);
  }
  Tape tt(roots, params);
  FormTape ftape;
  if (opt.residuals) {
    Residuals rs = structure_residuals(cf, ex);
    std::vector<CoordForm> forms = cf.basis();
    forms.push_back(rs.r1);
    forms.push_back(rs.r2);
    forms.push_back(rs.r3);
    ftape = FormTape(forms, params);
  }
  parallel_for(n, [&](std::size_t i) {
    PointRecord& rec = rep.points[i];
    if (rec.absC < opt.tol) {
      rec.note = "C vanishes; point skipped";
      return;
    }
    std::vector<cplx> v;
    if (!tt.try_eval(pts[i], v)) {
      rec.note = "non-finite invariant; desingularize";
      return;
    }
    rec.evaluated = true;
    rec.T1 = v[0];
    rec.T2 = v[1];
    rec.T3 = v[2];
    rec.bT1 = std::norm(v[0]);
    rec.bT2 = std::norm(v[1]);
    if (opt.closed_forms) {
      rec.T1_closed = v[3];
      rec.T2_closed = v[4];
    }
    if (opt.residuals) {
      std::vector<NumForm> nf;
      if (!ftape.try_eval(pts[i], nf)) {
        rec.note = "non-finite residual";
        return;
      }
      std::vector<NumForm> basis(nf.begin(), nf.begin() + 4);
      try {
        rec.res1 = max_frame_coeff(nf[4], basis, pts[i], rec.condition);
        rec.res2 = max_frame_coeff(nf[5], basis, pts[i], rec.condition);
        rec.res3 = max_frame_coeff(nf[6], basis, pts[i], rec.condition);
      } catch (const Error& e) {
        rec.note = e.what();
      }
    }
  });
  std::size_t evaluated = 0;
  for (const auto& rec : rep.points) {
    if (!rec.evaluated) continue;
    ++evaluated;
    rep.max_bT1 = std::max(rep.max_bT1, rec.bT1);
    rep.max_bT2 = std::max(rep.max_bT2, rec.bT2);
    rep.max_reT3 = std::max(rep.max_reT3, std::abs(rec.T3.real()));
    rep.max_residual = std::max({rep.max_residual, rec.res1, rec.res2, rec.res3});
    if (opt.closed_forms) {
      // closed forms live on the ungauged section
      const double s = std::max(1.0, std::abs(rec.T1));
      rep.max_closed_T1_diff = std::max(rep.max_closed_T1_diff, std::abs(std::abs(rec.T1_closed) - std::abs(rec.T1)) / s);
      const double s2 = std::max(1.0, std::abs(rec.T2));
      rep.max_closed_T2_diff = std::max(rep.max_closed_T2_diff, std::abs(std::abs(rec.T2_closed) - std::abs(rec.T2)) / s2);
    }
  }
  if (evaluated == 0) {
    rep.verdict = Verdict::holDegenerate;
    rep.notes.push_back("no sample admits the adapted coframe");
    return rep;
  }
  if (evaluated < n) rep.notes.push_back(std::to_string(n - evaluated) + " samples skipped (C = 0 or singular)");
  if (rep.max_bT1 < opt.tol && rep.max_bT2 < opt.tol)
    rep.verdict = Verdict::flat2Nondeg;
  else if (rep.max_bT2 < opt.tol)
    rep.verdict = Verdict::twistorT2zero;
  else
    rep.verdict = Verdict::general2Nondeg;
  return rep;
}

Verdict classify(Expr rho, const Domain& dom, std::size_t n, double tol) {
  AnalyzeOptions opt;
  opt.tol = tol;
  opt.residuals = false;
  opt.closed_forms = false;
  return analyze(rho, dom.sample(n), dom.params, opt).verdict;
}

}  // namespace pk

#include "prekahler/connection.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "prekahler/parallel.hpp"
#include "prekahler/parse.hpp"
#include "prekahler/wirtinger.hpp"

namespace pk {

using Gamma3 = std::array<std::array<std::array<Expr, 2>, 2>, 2>;

namespace {

const Var kX[2] = {Var::Z1, Var::Z2};

Expr dx(Expr e, int k) { return diff(e, kX[k], false); }

CoordForm dxk(int k) { return CoordForm::basis(k == 0 ? DZ1 : DZ2); }

CoordForm re_form(const CoordForm& a) { return (a + conj_form(a)) * Expr(0.5); }
CoordForm im_form(const CoordForm& a) { return (a - conj_form(a)) * Expr(cplx(0.0, -0.5)); }

// Max |value| of each expression over the samples, in parallel.
std::vector<double> max_abs_over(const std::vector<Expr>& es, const std::vector<Point>& pts,
                                 const std::map<std::string, double>& params) {
  Tape tape(es, params);
  std::vector<std::vector<cplx>> vals(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { vals[i] = tape.eval(pts[i]); });
  std::vector<double> out(es.size(), 0.0);
  for (const auto& v : vals)
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = std::max(out[j], std::abs(v[j]));
  return out;
}

}  // namespace

ConnectionFrame frame_from_christoffel(const Gamma3& g, Expr f) {
  ConnectionFrame fr;
  fr.origin = "christoffel";
  fr.coframe[0] = f * dxk(0);
  fr.coframe[1] = dxk(1);
  fr.E[0] = VecField{};
  fr.E[1] = VecField{};
  fr.E[0][DZ1] = Expr(1.0) / f;
  fr.E[1][DZ2] = Expr(1.0);
  // E1 = f^{-1} d1, E2 = d2 and nabla_{d_k} d_i = gamma^m_{ik} d_m
  CoordForm c11 = CoordForm(1), c21 = CoordForm(1), c12 = CoordForm(1), c22 = CoordForm(1);
  for (int k = 0; k < 2; ++k) {
    c11 = c11 + (g[0][0][k] - dx(f, k) / f) * dxk(k);
    c21 = c21 + (g[1][0][k] / f) * dxk(k);
    c12 = c12 + (f * g[0][1][k]) * dxk(k);
    c22 = c22 + g[1][1][k] * dxk(k);
  }
  fr.conn[0][0] = c11;
  fr.conn[0][1] = c12;
  fr.conn[1][0] = c21;
  fr.conn[1][1] = c22;
  return fr;
}

ChristoffelCheck check_christoffel(const Gamma3& g, Expr f, const std::vector<Point>& pts,
                                   const std::map<std::string, double>& params) {
  std::vector<Expr> asym, vol;
  for (int i = 0; i < 2; ++i) asym.push_back(g[i][0][1] - g[i][1][0]);
  for (int k = 0; k < 2; ++k) vol.push_back(g[0][0][k] + g[1][1][k] - dx(f, k) / f);
  ChristoffelCheck out;
  for (double v : max_abs_over(asym, pts, params)) out.asymmetry = std::max(out.asymmetry, v);
  for (double v : max_abs_over(vol, pts, params)) out.volume_defect = std::max(out.volume_defect, v);
  return out;
}

ChristoffelInput parse_christoffel_json(const std::string& json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("connection file: ") + e.what());
  }
  ChristoffelInput in;
  auto as_text = [](const json& v, const std::string& where) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) {
      std::ostringstream os;
      os.precision(17);
      os << v.get<double>();
      return os.str();
    }
    throw Error(ErrorKind::Parse, "connection file: " + where + " must be a string or number");
  };
  if (doc.contains("coords")) {
    const auto& c = doc["coords"];
    if (!c.is_array() || c.size() != 2) throw Error(ErrorKind::Parse, "connection file: coords must list two names");
    in.coords = {c[0].get<std::string>(), c[1].get<std::string>()};
  }
  ParseOptions opts;
  opts.params.emplace();
  opts.aliases[in.coords[0]] = Var::Z1;
  opts.aliases[in.coords[1]] = Var::Z2;
  if (!doc.contains("gamma")) throw Error(ErrorKind::Parse, "connection file: missing gamma");
  const auto& g = doc["gamma"];
  auto bad_shape = [] { return Error(ErrorKind::Parse, "connection file: gamma must be a 2x2x2 array"); };
  if (!g.is_array() || g.size() != 2) throw bad_shape();
  for (int i = 0; i < 2; ++i) {
    if (!g[i].is_array() || g[i].size() != 2) throw bad_shape();
    for (int j = 0; j < 2; ++j) {
      if (!g[i][j].is_array() || g[i][j].size() != 2) throw bad_shape();
      for (int k = 0; k < 2; ++k) {
        const std::string where = "gamma[" + std::to_string(i) + "][" + std::to_string(j) + "][" + std::to_string(k) + "]";
        in.text[i][j][k] = as_text(g[i][j][k], where);
        in.gamma[i][j][k] = parse_expr(in.text[i][j][k], opts);
      }
    }
  }
  if (doc.contains("sigma")) {
    in.sigma_text = as_text(doc["sigma"], "sigma");
    in.sigma = parse_expr(in.sigma_text, opts);
  }
  return in;
}

ChristoffelInput random_christoffel(std::uint64_t seed, int degree) {
  Rng rng(seed);
  auto poly = [&] {
    std::ostringstream os;
    os.precision(3);
    bool first = true;
    for (int p = 0; p <= degree; ++p)
      for (int q = 0; p + q <= degree; ++q) {
        const double c = std::round(rng.uniform(-1.0, 1.0) * 100.0) / 100.0;
        if (!first) os << " + ";
        first = false;
        os << "(" << c << ")";
        if (p) os << "*x1^" << p;
        if (q) os << "*x2^" << q;
      }
    return os.str();
  };
  // S111, S112, S122, S222
  std::array<std::string, 4> S;
  for (auto& s : S) s = poly();
  auto s_at = [&](int i, int j, int k) { return S[i + j + k]; };
  ChristoffelInput in;
  ParseOptions opts;
  opts.params.emplace();
  opts.aliases["x1"] = Var::Z1;
  opts.aliases["x2"] = Var::Z2;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      in.text[0][j][k] = s_at(1, j, k);
      in.text[1][j][k] = "-(" + s_at(0, j, k) + ")";
    }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) in.gamma[i][j][k] = parse_expr(in.text[i][j][k], opts);
  return in;
}

ConnectionFrame transform_frame(const ConnectionFrame& fr, const std::array<std::array<double, 2>, 2>& A) {
  const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  if (std::abs(det - 1.0) > 1e-12) throw Error(ErrorKind::Domain, "coframe change must be unimodular");
  const double Ai[2][2] = {{A[1][1], -A[0][1]}, {-A[1][0], A[0][0]}};
  ConnectionFrame out;
  out.origin = fr.origin;
  for (int a = 0; a < 2; ++a) {
    out.coframe[a] = fr.coframe[0] * Expr(A[a][0]) + fr.coframe[1] * Expr(A[a][1]);
    for (int s = 0; s < kSlots; ++s) out.E[a][s] = fr.E[0][s] * Expr(Ai[0][a]) + fr.E[1][s] * Expr(Ai[1][a]);
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      CoordForm acc(1);
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          if (A[a][c] != 0.0 && Ai[d][b] != 0.0) acc = acc + fr.conn[c][d] * Expr(A[a][c] * Ai[d][b]);
      out.conn[a][b] = acc;
    }
  return out;
}

BinaryForm product(const BinaryForm& a, const BinaryForm& b) {
  BinaryForm out;
  out.degree = a.degree + b.degree;
  out.c.assign(out.degree + 1, Expr(0.0));
  for (int i = 0; i <= a.degree; ++i)
    for (int j = 0; j <= b.degree; ++j) out.c[i + j] += a.c[i] * b.c[j];
  return out;
}

BinaryForm operator-(const BinaryForm& a, const BinaryForm& b) {
  if (a.degree != b.degree) throw Error(ErrorKind::Domain, "binary forms of different degree");
  BinaryForm out = a;
  for (int i = 0; i <= a.degree; ++i) out.c[i] = a.c[i] - b.c[i];
  return out;
}

BinaryForm operator*(Expr s, const BinaryForm& a) {
  BinaryForm out = a;
  for (auto& c : out.c) c = s * c;
  return out;
}

cplx eval_binary(const std::vector<cplx>& c, cplx u1, cplx u2) {
  const int d = static_cast<int>(c.size()) - 1;
  cplx s = 0.0;
  for (int k = 0; k <= d; ++k) s += c[k] * std::pow(u1, k) * std::pow(u2, d - k);
  return s;
}

ConnectionData connection_data(const ConnectionFrame& fr) {
  ConnectionData cd;
  cd.frame = fr;
  const auto& E = fr.E;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) cd.Gamma[a][b][c] = on(fr.conn[a][b], E[c]);
  Expr R[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      CoordForm Phi = ext_d(fr.conn[a][b]);
      for (int k = 0; k < 2; ++k) Phi = Phi + wedge(fr.conn[a][k], fr.conn[k][b]);
      R[a][b] = on(Phi, E[0], E[1]);
    }
  cd.R11 = R[0][0];
  cd.R12 = R[0][1];
  cd.R21 = R[1][0];
  cd.R22 = R[1][1];
  const auto& G = cd.Gamma;
  auto Ek = [&](int k, Expr f) { return pk::apply(E[k], f); };

  cd.Ric[0][0] = -cd.R21;
  cd.Ric[1][1] = cd.R12;
  cd.Ric[0][1] = cd.R11;
  cd.Ric[1][0] = cd.R11;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        Expr v = Ek(k, cd.Ric[i][j]);
        for (int m = 0; m < 2; ++m) v -= G[m][i][k] * cd.Ric[m][j] + G[m][j][k] * cd.Ric[i][m];
        cd.Ric1[i][j][k] = v;
      }
  // second covariant derivative of a symmetric 3-tensor T_{ijk}
  auto nabla3 = [&](const Gamma3& T) {
    std::array<std::array<std::array<std::array<Expr, 2>, 2>, 2>, 2> out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            Expr v = Ek(l, T[i][j][k]);
            for (int m = 0; m < 2; ++m)
              v -= G[m][i][l] * T[m][j][k] + G[m][j][l] * T[i][m][k] + G[m][k][l] * T[i][j][m];
            out[i][j][k][l] = v;
          }
    return out;
  };
  cd.Ric2 = nabla3(cd.Ric1);

  for (int k = 0; k < 2; ++k) {
    cd.d1R12[k] = Ek(k, cd.R12) - Expr(2.0) * cd.R11 * G[0][1][k] + Expr(2.0) * cd.R12 * G[0][0][k];
    cd.d1R11[k] = Ek(k, cd.R11) - cd.R12 * G[1][0][k] + cd.R21 * G[0][1][k];
    cd.d1R21[k] = Ek(k, cd.R21) + Expr(2.0) * cd.R11 * G[1][0][k] - Expr(2.0) * cd.R21 * G[0][0][k];
  }
  Gamma3 T;
  for (int k = 0; k < 2; ++k) {
    T[0][0][k] = -cd.d1R21[k];
    T[1][1][k] = cd.d1R12[k];
    T[0][1][k] = T[1][0][k] = cd.d1R11[k];
  }
  auto T2 = nabla3(T);
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      cd.d2R12[k][l] = T2[1][1][k][l];
      cd.d2R11[k][l] = T2[0][1][k][l];
      cd.d2R21[k][l] = -T2[0][0][k][l];
    }

  const auto &a1 = cd.d1R12, &b1 = cd.d1R11, &c1 = cd.d1R21;
  const auto &a2 = cd.d2R12, &b2 = cd.d2R11, &c2 = cd.d2R21;
  const Expr two(2.0), four(4.0);
  cd.Rq = {2, {cd.R12, two * cd.R11, -cd.R21}};
  cd.Cc = {3, {a1[1], a1[0] + two * b1[1], two * b1[0] - c1[1], -c1[0]}};
  cd.Qq = {4,
           {a2[1][1], two * a2[1][0] + two * b2[1][1], four * b2[1][0] - c2[1][1] + a2[0][0],
            two * b2[0][0] - two * c2[1][0], -c2[0][0]}};

  const double eps[2][2] = {{0.0, 1.0}, {-1.0, 0.0}};
  Expr K(0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const double s = eps[i][k] * eps[j][l];
          if (s != 0.0) K += Expr(s) * cd.Ric2[i][j][k][l];
        }
  cd.K_cov = K;
  cd.K_coframe = a2[0][0] - two * b2[1][0] - c2[1][1];
  cd.RicRic = Expr(-2.0) * (cd.R11 * cd.R11 + cd.R12 * cd.R21);
  return cd;
}

FrameResiduals frame_residuals(const ConnectionData& cd, const std::vector<Point>& pts,
                               const std::map<std::string, double>& params) {
  const auto& fr = cd.frame;
  std::vector<CoordForm> forms;
  for (int i = 0; i < 2; ++i) {
    CoordForm t = ext_d(fr.coframe[i]);
    for (int j = 0; j < 2; ++j) t = t + wedge(fr.conn[i][j], fr.coframe[j]);
    forms.push_back(t);
  }
  forms.push_back(fr.conn[0][0] + fr.conn[1][1]);
  const CoordForm sigma = wedge(fr.coframe[0], fr.coframe[1]);
  const Expr R[2][2] = {{cd.R11, cd.R12}, {cd.R21, cd.R22}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      CoordForm Phi = ext_d(fr.conn[a][b]);
      for (int k = 0; k < 2; ++k) Phi = Phi + wedge(fr.conn[a][k], fr.conn[k][b]);
      forms.push_back(Phi - sigma * R[a][b]);
    }
  FormTape ft(forms, params);
  std::vector<std::vector<NumForm>> vals(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { vals[i] = ft.eval(pts[i]); });
  FrameResiduals out;
  for (const auto& v : vals) {
    out.torsion = std::max({out.torsion, v[0].max_abs(), v[1].max_abs()});
    out.trace = std::max(out.trace, v[2].max_abs());
    for (int j = 3; j < 7; ++j) out.curvature_shape = std::max(out.curvature_shape, v[j].max_abs());
  }
  return out;
}

ConnectionFrame frame_from_prekahler(const AdaptedCoframe& cf) {
  ConnectionFrame fr;
  fr.origin = "prekahler";
  fr.coframe[0] = re_form(cf.theta1);
  fr.coframe[1] = im_form(cf.theta1);
  const CoordForm re2 = re_form(cf.theta2), im2 = im_form(cf.theta2);
  fr.conn[0][0] = re2;
  fr.conn[1][1] = re2 * Expr(-1.0);
  fr.conn[0][1] = im2 - cf.psi;
  fr.conn[1][0] = im2 + cf.psi;
  const VecField e1b = conj_field(cf.e1);
  for (int s = 0; s < kSlots; ++s) {
    fr.E[0][s] = cf.e1[s] + e1b[s];
    fr.E[1][s] = I_unit() * (cf.e1[s] - e1b[s]);
  }
  return fr;
}

CurvatureFromT curvature_from_T(const Extracted& t) {
  const Expr two(2.0), i2(cplx(0.0, 2.0));
  return {two * imag_part(t.T1), -two * real_part(t.T1) + i2 * t.T3, -two * real_part(t.T1) - i2 * t.T3};
}

TFromCurvature T_from_curvature(Expr R11, Expr R12, Expr R21) {
  return {Expr(-0.25) * (R21 + R12 - Expr(cplx(0.0, 2.0)) * R11), Expr(cplx(0.0, 0.25)) * (R21 - R12)};
}

FromPrekahler from_prekahler(Expr rho, const std::vector<Point>& pts, const std::map<std::string, double>& params,
                             double tol) {
  FromPrekahler out;
  out.cf = adapted_coframe(rho);
  out.t = extract_structure(out.cf);
  out.max_bT2 = 0.0;
  for (double v : max_abs_over({abs2(out.t.T2)}, pts, params)) out.max_bT2 = std::max(out.max_bT2, v);
  if (out.max_bT2 > tol) {
    std::ostringstream os;
    os << "|T2|^2 reaches " << out.max_bT2 << " on the samples; no symplectic connection underlies this structure";
    throw Error(ErrorKind::Domain, os.str());
  }
  out.data = connection_data(frame_from_prekahler(out.cf));
  return out;
}

SampleStats sample_stats(Expr e, const std::vector<Point>& pts, const std::map<std::string, double>& params) {
  Tape tape({e}, params);
  std::vector<cplx> vals(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { vals[i] = tape.eval(pts[i])[0]; });
  SampleStats s;
  s.count = vals.size();
  if (vals.empty()) return s;
  for (cplx v : vals) {
    s.mean += v.real();
    s.max_abs = std::max(s.max_abs, std::abs(v));
    s.max_imag = std::max(s.max_imag, std::abs(v.imag()));
  }
  s.mean /= static_cast<double>(vals.size());
  for (cplx v : vals) s.variance += (v.real() - s.mean) * (v.real() - s.mean);
  s.variance /= static_cast<double>(vals.size());
  return s;
}

SpecialResult special_check(const ConnectionData& cd, const std::vector<Point>& pts,
                            const std::map<std::string, double>& params, double tol) {
  SpecialResult r;
  for (double v : max_abs_over(cd.Cc.c, pts, params)) r.max_C = std::max(r.max_C, v);
  r.special = r.max_C < tol;
  return r;
}

CriticalResult critical_check(const ConnectionData& cd, const std::vector<Point>& pts,
                              const std::map<std::string, double>& params, double tol) {
  SampleStats s = sample_stats(cd.K_cov + Expr(1.5) * cd.RicRic, pts, params);
  CriticalResult r;
  r.c = s.mean;
  r.variance = s.variance;
  r.critical = s.variance < tol;
  return r;
}

double q_relation_residual(const ConnectionData& cd, double a, const std::vector<Point>& pts,
                           const std::map<std::string, double>& params) {
  const double k = 6.0 * (2 * a - 1) * (2 * a - 1) / ((a + 1) * (a - 2));
  BinaryForm diff = cd.Qq - Expr(k) * product(cd.Rq, cd.Rq);
  double r = 0.0;
  for (double v : max_abs_over(diff.c, pts, params)) r = std::max(r, v);
  return r;
}

}  // namespace pk

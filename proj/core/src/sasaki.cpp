#include "prekahler/sasaki.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "prekahler/domain.hpp"
#include "prekahler/parallel.hpp"
#include "prekahler/parse.hpp"
#include "prekahler/prekahler.hpp"
#include "prekahler/wirtinger.hpp"

namespace pk {

namespace {

double max_over_forms(const std::vector<CoordForm>& forms, const std::vector<Point>& pts,
                      const std::map<std::string, double>& params) {
  FormTape ft(forms, params);
  std::vector<double> worst(pts.size(), 0.0);
  parallel_for(pts.size(), [&](std::size_t i) {
    for (const auto& nf : ft.eval(pts[i])) worst[i] = std::max(worst[i], nf.max_abs());
  });
  double m = 0.0;
  for (double w : worst) m = std::max(m, w);
  return m;
}

NumVec unit(int slot, cplx v = 1.0) {
  NumVec x{};
  x[slot] = v;
  return x;
}

NumVec lin(cplx a, const NumVec& x, cplx b, const NumVec& y) {
  NumVec r{};
  for (int s = 0; s < kSlots; ++s) r[s] = a * x[s] + b * y[s];
  return r;
}

Expr on_hypersurface(Expr e, Expr rho) {
  CoordMap m;
  m[static_cast<int>(Var::W)] = rho + I_unit() * coord(Var::V);
  return substitute(e, m);
}

}  // namespace

CoordForm contact_form(Expr rho) {
  std::array<Expr, kSlots> c{};
  const Expr i = I_unit();
  c[DZ1] = i * d_z(rho, 1);
  c[DZ2] = i * d_z(rho, 2);
  c[DZB1] = -i * d_zbar(rho, 1);
  c[DZB2] = -i * d_zbar(rho, 2);
  c[DV] = Expr(1.0);
  return CoordForm::one_form(c);
}

CoordForm ddbar_form(Expr rho) {
  CoordForm out(2);
  const int hol[2] = {DZ1, DZ2}, anti[2] = {DZB1, DZB2};
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      out = out + wedge(CoordForm::basis(hol[j]), CoordForm::basis(anti[k])) * d_zbar(d_z(rho, j + 1), k + 1);
  return out;
}

ContactCheck contact_check(Expr rho, const std::vector<Point>& pts, const std::map<std::string, double>& params) {
  CoordForm dth = ext_d(contact_form(rho));
  ContactCheck out;
  out.ddbar_residual = max_over_forms({dth + ddbar_form(rho) * Expr(cplx(0.0, 2.0))}, pts, params);
  out.omega_residual = max_over_forms({dth + omega_g_from_potential(rho).omega * Expr(4.0)}, pts, params);
  return out;
}

CoordForm presymplectify(Expr rho) { return ext_d(contact_form(rho) * coord(Var::T)); }

double closedness_residual(const CoordForm& a, const std::vector<Point>& pts,
                           const std::map<std::string, double>& params) {
  return max_over_forms({ext_d(a)}, pts, params);
}

int presymplectic_rank(Expr rho, const Point& p, const std::map<std::string, double>& params) {
  NumForm W = eval_form(presymplectify(rho), p, params);
  const cplx i(0.0, 1.0);
  std::vector<NumVec> b = {lin(1.0, unit(DZ1), 1.0, unit(DZB1)), lin(i, unit(DZ1), -i, unit(DZB1)),
                           lin(1.0, unit(DZ2), 1.0, unit(DZB2)), lin(i, unit(DZ2), -i, unit(DZB2)),
                           unit(DV), unit(DT)};
  Eigen::Matrix<double, 6, 6> M;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) M(r, c) = W.on({b[r], b[c]}).real();
  Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(M);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int k = 0; k < 6; ++k)
    if (s(k) > 1e-9 * std::max(s(0), 1e-300)) ++rank;
  return s(0) == 0.0 ? 0 : rank;
}

double check_11_presymplectification(Expr rho, const std::vector<Point>& pts,
                                     const std::map<std::string, double>& params) {
  FormTape ft({presymplectify(rho)}, params);
  Tape jt({d_z(rho, 1), d_z(rho, 2)}, params);
  std::vector<double> worst(pts.size(), 0.0);
  parallel_for(pts.size(), [&](std::size_t n) {
    const Point& p = pts[n];
    NumForm W = ft.eval(p)[0];
    auto rz = jt.eval(p);
    const cplx i(0.0, 1.0);
    std::vector<NumVec> b, Jb;
    const int hol[2] = {DZ1, DZ2}, anti[2] = {DZB1, DZB2};
    for (int j = 0; j < 2; ++j) {
      NumVec V = unit(hol[j]);
      V[DV] = -i * rz[j];
      NumVec Vb = unit(anti[j]);
      Vb[DV] = std::conj(V[DV]);
      NumVec re = lin(1.0, V, 1.0, Vb), im = lin(i, V, -i, Vb);
      b.push_back(re);
      b.push_back(im);
      Jb.push_back(im);
      Jb.push_back(lin(-1.0, re, 0.0, re));
    }
    b.push_back(unit(DV));
    b.push_back(unit(DT));
    Jb.push_back(unit(DT, -1.0));
    Jb.push_back(unit(DV));
    for (std::size_t r = 0; r < b.size(); ++r)
      for (std::size_t c = r + 1; c < b.size(); ++c)
        worst[n] = std::max(worst[n], std::abs(W.on({b[r], b[c]}) - W.on({Jb[r], Jb[c]})));
  });
  double m = 0.0;
  for (double w : worst) m = std::max(m, w);
  return m;
}

HoloField parse_holo_field(const std::string& name, const std::string& w, const std::string& z1,
                           const std::string& z2, const std::map<std::string, double>& params) {
  ParseOptions opts;
  opts.params.emplace();
  for (const auto& [k, v] : params) opts.params->insert(k);
  HoloField Z;
  Z.name = name;
  Z.w = bind(parse_expr(w, opts), params);
  Z.z1 = bind(parse_expr(z1, opts), params);
  Z.z2 = bind(parse_expr(z2, opts), params);
  return Z;
}

std::vector<HoloField> homogeneous_symmetries(double a) {
  if (a == 1.0) throw Error(ErrorKind::Domain, "symmetry fields need a != 1");
  const double b = a / (1.0 - a);
  const Expr i = I_unit(), z1 = coord(Var::Z1), z2 = coord(Var::Z2), w = coord(Var::W);
  const Expr one(1.0), zero(0.0);
  return {
      {"X0", i, zero, zero},
      {"X1", zero, i, zero},
      {"X2", zero, zero, i},
      {"X3", zero, z1 + one, Expr(-b) * (z2 + one)},
      {"X4", Expr(2.0 * a) * (w + Expr(2.0)), z1 + one, Expr(b) * (z2 + one)},
  };
}

Tangency tangency_check(const HoloField& Z, Expr rho, const std::vector<Point>& pts,
                        const std::map<std::string, double>& params, double tol) {
  for (Expr c : {Z.w, Z.z1, Z.z2})
    for (Var v : {Var::W, Var::Z1, Var::Z2})
      if (!diff(c, v, true).is_zero())
        throw Error(ErrorKind::Domain, "field " + Z.name + " is not holomorphic");
  // (Z + conj Z)(Re w - rho) = Re Zw - 2 Re(Z^j rho_j)
  Expr f = real_part(Z.w) - Expr(2.0) * real_part(Z.z1 * d_z(rho, 1) + Z.z2 * d_z(rho, 2));
  Tape tape({on_hypersurface(f, rho)}, params);
  std::vector<double> v(pts.size());
  parallel_for(pts.size(), [&](std::size_t n) { v[n] = std::abs(tape.eval(pts[n])[0]); });
  Tangency t;
  for (double x : v) t.residual = std::max(t.residual, x);
  t.tangent = t.residual < tol;
  return t;
}

VecField restrict_to_hypersurface(const HoloField& Z, Expr rho) {
  VecField X{};
  X[DZ1] = on_hypersurface(Z.z1, rho);
  X[DZ2] = on_hypersurface(Z.z2, rho);
  X[DZB1] = conj_expr(X[DZ1]);
  X[DZB2] = conj_expr(X[DZ2]);
  X[DV] = imag_part(on_hypersurface(Z.w, rho));
  return X;
}

AlgebraTable algebra_table(const std::vector<VecField>& fields, const std::vector<Point>& base,
                           const std::map<std::string, double>& params) {
  const std::size_t n = fields.size();
  auto components = [](const VecField& X) { return std::vector<Expr>{X[DZ1], X[DZ2], X[DV]}; };
  std::vector<Expr> roots;
  for (const auto& X : fields)
    for (Expr e : components(X)) roots.push_back(e);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (Expr e : components(bracket(fields[i], fields[j]))) roots.push_back(e);
  Tape tape(roots, params);
  const std::size_t rows = 5 * base.size();
  Eigen::MatrixXd A(rows, n), B(rows, n * n);
  for (std::size_t p = 0; p < base.size(); ++p) {
    auto v = tape.eval(base[p]);
    auto put = [&](Eigen::MatrixXd& M, std::size_t col, std::size_t off) {
      M(5 * p + 0, col) = v[off].real();
      M(5 * p + 1, col) = v[off].imag();
      M(5 * p + 2, col) = v[off + 1].real();
      M(5 * p + 3, col) = v[off + 1].imag();
      M(5 * p + 4, col) = v[off + 2].real();
    };
    for (std::size_t k = 0; k < n; ++k) put(A, k, 3 * k);
    for (std::size_t ij = 0; ij < n * n; ++ij) put(B, ij, 3 * n + 3 * ij);
  }
  Eigen::MatrixXd C = A.completeOrthogonalDecomposition().solve(B);
  AlgebraTable t;
  t.n = n;
  t.c.assign(n * n * n, 0.0);
  for (std::size_t ij = 0; ij < n * n; ++ij)
    for (std::size_t k = 0; k < n; ++k) t.c[ij * n + k] = C(k, ij);
  t.residual = (A * C - B).cwiseAbs().maxCoeff();
  return t;
}

int stabilizer_dim(const AlgebraTable& t, const std::vector<double>& x, double tol) {
  const std::size_t n = t.n;
  // column j: [X_j, X] = sum_i x_i c^k_{ji}
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) M(k, j) += x[i] * t.at(j, i, k);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  const double scale = std::max(s(0), 1.0);
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > tol * scale) ++rank;
  return static_cast<int>(n) - rank;
}

StabilizerSample sample_stabilizers(const AlgebraTable& t, std::uint64_t seed, int count) {
  Rng rng(seed);
  StabilizerSample out;
  out.count = count;
  for (int c = 0; c < count; ++c) {
    std::vector<double> x(t.n);
    for (auto& xi : x) xi = rng.normal();
    ++out.histogram[stabilizer_dim(t, x)];
  }
  return out;
}

std::vector<Point> hypersurface_samples(const std::vector<Point>& zs, std::uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Point> out = zs;
  for (auto& p : out) {
    p.v = rng.uniform(-1.0, 1.0);
    p.t = rng.uniform(0.5, 2.0);
  }
  return out;
}

}  // namespace pk

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "prekahler/forms.hpp"
#include "prekahler/prekahler.hpp"

namespace pk {

// Coframe (omega^1, omega^2), connection forms omega^a_b and the dual frame
// E_1, E_2 of a symplectic connection on a surface, all as expressions in
// some chart. The chart may be larger than the surface (the pre-Kahler side
// carries the connection pulled back to a 4-dimensional space); only
// evaluations on E_1, E_2 are used.
struct ConnectionFrame {
  std::array<CoordForm, 2> coframe;
  std::array<std::array<CoordForm, 2>, 2> conn;  // conn[a][b] = omega^a_b
  std::array<VecField, 2> E;
  std::string origin;
};

// Frame for Christoffel symbols gamma[i][j][k] = gamma^i_{jk} in real
// coordinates (x1, x2), with sigma = f dx1 ^ dx2. The coordinates are stored
// as z1, z2 and must be evaluated at real points.
ConnectionFrame frame_from_christoffel(const std::array<std::array<std::array<Expr, 2>, 2>, 2>& gamma,
                                       Expr f = Expr(1.0));

// max over samples of |gamma^i_{jk} - gamma^i_{kj}| and |gamma^1_{1k} + gamma^2_{2k} - d_k ln f|.
struct ChristoffelCheck {
  double asymmetry = 0.0;
  double volume_defect = 0.0;
};
ChristoffelCheck check_christoffel(const std::array<std::array<std::array<Expr, 2>, 2>, 2>& gamma, Expr f,
                                   const std::vector<Point>& pts, const std::map<std::string, double>& params = {});

// JSON document {"coords": [x, y], "gamma": [[[..]]], "sigma": "..."}.
struct ChristoffelInput {
  std::array<std::string, 2> coords{"x1", "x2"};
  std::array<std::array<std::array<Expr, 2>, 2>, 2> gamma;
  Expr sigma = Expr(1.0);
  std::array<std::array<std::array<std::string, 2>, 2>, 2> text;
  std::string sigma_text = "1";
};
ChristoffelInput parse_christoffel_json(const std::string& json_text);

// Seeded polynomial connection with sigma = dx1 ^ dx2: gamma^m_{jk} = eps^{mi} S_{ijk}
// for a totally symmetric S of the given degree.
ChristoffelInput random_christoffel(std::uint64_t seed, int degree = 2);

// Constant unimodular change: omega' = A omega, omega'^a_b = A omega A^{-1}, E' = E A^{-1}.
ConnectionFrame transform_frame(const ConnectionFrame& fr, const std::array<std::array<double, 2>, 2>& A);

// Binary form of degree d: c[k] multiplies (omega^1)^k (omega^2)^(d-k).
struct BinaryForm {
  int degree = 0;
  std::vector<Expr> c;
};
BinaryForm product(const BinaryForm& a, const BinaryForm& b);
BinaryForm operator-(const BinaryForm& a, const BinaryForm& b);
BinaryForm operator*(Expr s, const BinaryForm& a);
// Value on a tangent vector with coframe components (u1, u2).
cplx eval_binary(const std::vector<cplx>& c, cplx u1, cplx u2);

struct ConnectionData {
  ConnectionFrame frame;
  // Gamma[a][b][c] = omega^a_b(E_c)
  std::array<std::array<std::array<Expr, 2>, 2>, 2> Gamma;
  Expr R11, R12, R21, R22;  // R^1_1, R^1_2, R^2_1, R^2_2
  std::array<std::array<Expr, 2>, 2> Ric;
  std::array<std::array<std::array<Expr, 2>, 2>, 2> Ric1;                 // Ric_{ij;k}
  std::array<std::array<std::array<std::array<Expr, 2>, 2>, 2>, 2> Ric2;  // Ric_{ij;kl}, k first
  // coframe derivatives from the first Bianchi identities; index [k] / [k][l]
  std::array<Expr, 2> d1R12, d1R11, d1R21;
  std::array<std::array<Expr, 2>, 2> d2R12, d2R11, d2R21;
  BinaryForm Rq, Cc, Qq;
  Expr K_cov;      // eps^{ik} eps^{jl} Ric_{ij;kl}
  Expr K_coframe;  // R^1_{2;11} - 2 R^1_{1;21} - R^2_{1;22}
  Expr RicRic;     // Ric^{ij} Ric_{ij} = -2 ((R^1_1)^2 + R^1_2 R^2_1)
};

// Curvature, Ricci, derivatives and the binary forms, all symbolic.
ConnectionData connection_data(const ConnectionFrame& fr);

// max over samples of the torsion dω^i + ω^i_j ^ ω^j, the trace ω^1_1 + ω^2_2 and
// the part of dω^a_b + ω^a_k ^ ω^k_b not along ω^1 ^ ω^2, all evaluated on the frame.
struct FrameResiduals {
  double torsion = 0.0, trace = 0.0, curvature_shape = 0.0;
};
FrameResiduals frame_residuals(const ConnectionData& cd, const std::vector<Point>& pts,
                               const std::map<std::string, double>& params = {});

// Pre-Kahler side: omega^1 = Re theta^1, omega^2 = Im theta^1, omega^1_1 = Re theta^2,
// omega^1_2 = Im theta^2 - psi, omega^2_1 = Im theta^2 + psi; E1 = e1 + ebar1, E2 = i(e1 - ebar1).
ConnectionFrame frame_from_prekahler(const AdaptedCoframe& cf);

// Curvature read through the pre-Kahler invariants:
// R^1_1 = 2 Im T1, R^1_2 = -2 Re T1 + 2i T3, R^2_1 = -2 Re T1 - 2i T3.
// The T3 sign follows from d psi = (1/2) d(omega^2_1 - omega^1_2) and the
// structure equations with d psi = i theta^2 ^ conj theta^2 + T3 theta^1 ^ conj theta^1 + ...
struct CurvatureFromT {
  Expr R11, R12, R21;
};
CurvatureFromT curvature_from_T(const Extracted& t);
// Inverse: T1 = -(R^2_1 + R^1_2 - 2i R^1_1)/4, T3 = (i/4)(R^2_1 - R^1_2).
struct TFromCurvature {
  Expr T1, T3;
};
TFromCurvature T_from_curvature(Expr R11, Expr R12, Expr R21);

struct FromPrekahler {
  AdaptedCoframe cf;
  Extracted t;
  ConnectionData data;
  double max_bT2 = 0.0;
};
// Rejects (Error(Domain)) when |T2|^2 exceeds tol at any sample.
FromPrekahler from_prekahler(Expr rho, const std::vector<Point>& pts, const std::map<std::string, double>& params = {},
                             double tol = 1e-8);

// Sample statistics of an expression.
struct SampleStats {
  double mean = 0.0, variance = 0.0, max_abs = 0.0, max_imag = 0.0;
  std::size_t count = 0;
};
SampleStats sample_stats(Expr e, const std::vector<Point>& pts, const std::map<std::string, double>& params = {});

struct SpecialResult {
  bool special = false;
  double max_C = 0.0;
};
SpecialResult special_check(const ConnectionData& cd, const std::vector<Point>& pts,
                            const std::map<std::string, double>& params = {}, double tol = 1e-8);

struct CriticalResult {
  bool critical = false;
  double c = 0.0;         // mean of K + (3/2) Ric.Ric
  double variance = 0.0;  // its sample variance
};
CriticalResult critical_check(const ConnectionData& cd, const std::vector<Point>& pts,
                              const std::map<std::string, double>& params = {}, double tol = 1e-8);

// Largest coefficient of Q - k R^2 with k = 6(2a-1)^2/((a+1)(a-2)).
double q_relation_residual(const ConnectionData& cd, double a, const std::vector<Point>& pts,
                           const std::map<std::string, double>& params = {});

}  // namespace pk

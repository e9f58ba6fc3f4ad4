#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "prekahler/domain.hpp"
#include "prekahler/forms.hpp"

namespace pk {

using Mat2 = std::array<std::array<Expr, 2>, 2>;
using NumMat2 = std::array<std::array<cplx, 2>, 2>;

// omega = (i/2) rho_{i jbar} dz^i ^ dzbar^j and H[i][j] = rho_{i jbar}.
struct OmegaG {
  CoordForm omega;
  Mat2 H;
};
// Throws Error(Domain) if `dom` is given and rho is not real on it.
OmegaG omega_g_from_potential(Expr rho, const Domain* dom = nullptr);
NumMat2 eval_hessian(const Mat2& H, const Point& p, const std::map<std::string, double>& params = {});
// Rank by singular values, cut at 1e-9 * largest (absolute 1e-12 floor).
int rank_at(const NumMat2& H);
int rank_at(Expr rho, const Point& p, const std::map<std::string, double>& params = {});

// C = (rho_{2 1bar 1bar} rho_{1 1bar} - rho_{1 1bar 1bar} rho_{2 1bar}) / rho_{1 1bar}^3
Expr nondeg_scalar_C(Expr rho);

// Record of the chart change applied before the closed-form formulas.
struct ChartRecord {
  bool swapped = false;
  Point origin;     // translated to 0
  cplx eps = 0.0;   // z1 -> z1 + eps z1 z2
  double singular_value = 0.0;  // |rho'_{1 2bar} rho'_{1 1bar 1bar} - rho'_{1 1bar 2bar} rho'_{1 1bar}| at 0
  double c_value = 0.0;         // |C'(0)|
  std::string describe() const;
};
struct Desingularized {
  Expr rho;
  ChartRecord chart;
};
// Pull rho back along z -> p + (z1 + eps z1 z2, z2) (after swapping z1, z2
// when rho_{1 1bar}(p) vanishes). Throws Error(Rank) if rank H(p) != 1 and
// Error(Singular) when the chosen eps lands on the excluded value.
Desingularized desingularize(Expr rho, const Point& p, cplx eps, const std::map<std::string, double>& params = {});

struct AdaptedCoframe {
  Expr rho;
  CoordForm theta1, theta2, psi;
  Expr C, A1, A2, B1, B2;
  Expr r11, f;  // rho_{1 1bar}, rho_{2 1bar} / rho_{1 1bar}
  // dual (1,0) frame: theta^a(e_b) = delta
  VecField e1, e2;
  double gauge_phi = 0.0;
  bool swapped = false;
  std::string branch_note;

  std::vector<CoordForm> basis() const;  // theta1, theta2, conj theta1, conj theta2
};
// Throws Error(Rank) for rho_{1 1bar} identically zero / rank 2 at the probe point.
AdaptedCoframe adapted_coframe(Expr rho);
AdaptedCoframe gauge_rotate(const AdaptedCoframe& cf, double phi);

// Closed-form fifth-jet expressions for T1 and T2, exactly as printed.
struct ClosedForms {
  Expr T1, T2;
};
ClosedForms structure_functions(Expr rho);

// T1, T2, T3 read off from d theta^2 and d psi on the dual frame.
struct Extracted {
  Expr T1, T2, T3;
};
Extracted extract_structure(const AdaptedCoframe& cf);

// Residual 2-forms of the three structure equations.
struct Residuals {
  CoordForm r1, r2, r3;
};
Residuals structure_residuals(const AdaptedCoframe& cf, const Extracted& t);

// T3 from the Bianchi identity: (i/2)(T_{2;1bar} - T_{1;2}).
Expr t3_from_bianchi(const AdaptedCoframe& cf, const Extracted& t);

enum class Verdict { pseudoKahler, flat2Nondeg, twistorT2zero, general2Nondeg, holDegenerate, nonConstantRank };
const char* verdict_name(Verdict v);

struct PointRecord {
  Point p;
  int rank = 0;
  double absC = 0.0;
  bool evaluated = false;  // invariants computed (rank 1, C != 0)
  cplx T1, T2, T3;
  double bT1 = 0.0, bT2 = 0.0;
  cplx T1_closed, T2_closed;
  double res1 = 0.0, res2 = 0.0, res3 = 0.0;
  double condition = 0.0;
  std::string note;
};

struct InvariantReport {
  std::string potential;
  std::vector<PointRecord> points;
  Verdict verdict = Verdict::holDegenerate;
  double max_bT1 = 0.0, max_bT2 = 0.0, max_reT3 = 0.0, max_residual = 0.0;
  double max_closed_T1_diff = 0.0, max_closed_T2_diff = 0.0;
  bool swapped = false;
  std::vector<std::string> notes;
};

struct AnalyzeOptions {
  double tol = 1e-8;
  bool residuals = true;
  bool closed_forms = true;
  double gauge_phi = 0.0;
};

InvariantReport analyze(Expr rho, const std::vector<Point>& pts, const std::map<std::string, double>& params = {},
                        const AnalyzeOptions& opt = {});
Verdict classify(Expr rho, const Domain& dom, std::size_t n, double tol = 1e-8);

}  // namespace pk

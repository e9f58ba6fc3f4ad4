#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prekahler/forms.hpp"

namespace pk {

// Hypersurface Re w = rho(z) in C^3, charted by (v, z1, z2) with w = rho + i v.

// theta~ = dv + i (d rho - dbar rho) on the (v, z) chart.
CoordForm contact_form(Expr rho);
// sum rho_{j kbar} dz^j ^ dzbar^k
CoordForm ddbar_form(Expr rho);

// max |d theta~ + 2i ddbar rho| and max |d theta~ + 4 omega| over the samples.
struct ContactCheck {
  double ddbar_residual = 0.0;
  double omega_residual = 0.0;
};
ContactCheck contact_check(Expr rho, const std::vector<Point>& pts, const std::map<std::string, double>& params = {});

// d(t theta~) = dt ^ theta~ + t d theta~ on the (v, z, t) chart.
CoordForm presymplectify(Expr rho);
// max |d a| over the samples
double closedness_residual(const CoordForm& a, const std::vector<Point>& pts,
                           const std::map<std::string, double>& params = {});
// Real rank of d theta^ at p (0..6), cut at 1e-9 relative.
int presymplectic_rank(Expr rho, const Point& p, const std::map<std::string, double>& params = {});

// max |W(a, b) - W(J a, J b)| over basis pairs of the lifted frame
// (2 Re V_j, 2 Im V_j, d/dv, d/dt), V_j = d/dz_j - i rho_j d/dv, J d/dv = -d/dt.
double check_11_presymplectification(Expr rho, const std::vector<Point>& pts,
                                     const std::map<std::string, double>& params = {});

// Holomorphic field Z = Zw d/dw + Z1 d/dz1 + Z2 d/dz2 on C^3; the real field is Z + conj Z.
struct HoloField {
  std::string name;
  Expr w, z1, z2;
};
HoloField parse_holo_field(const std::string& name, const std::string& w, const std::string& z1,
                           const std::string& z2, const std::map<std::string, double>& params = {});

// X0 = d/dv, X1 = d/dy1, X2 = d/dy2, X3, X4 for the hypersurface Re w = rho_a - 2 (b = a/(1-a)):
// X3 = (z1+1) d/dz1 - b (z2+1) d/dz2, X4 = (z1+1) d/dz1 + b (z2+1) d/dz2 + 2a (w+2) d/dw.
std::vector<HoloField> homogeneous_symmetries(double a);

// |(Z + conj Z)(Re w - rho)| on the hypersurface.
struct Tangency {
  bool tangent = false;
  double residual = 0.0;
};
Tangency tangency_check(const HoloField& Z, Expr rho, const std::vector<Point>& pts,
                        const std::map<std::string, double>& params = {}, double tol = 1e-8);

// Z + conj Z pushed to the (v, z) chart of the hypersurface.
VecField restrict_to_hypersurface(const HoloField& Z, Expr rho);

inline VecField commutator(const VecField& A, const VecField& B) { return bracket(A, B); }

// Structure constants [X_i, X_j] = c^k_{ij} X_k, fitted by least squares at the base points.
struct AlgebraTable {
  std::size_t n = 0;
  std::vector<double> c;  // c[(i n + j) n + k]
  double residual = 0.0;  // worst fit residual
  double at(std::size_t i, std::size_t j, std::size_t k) const { return c[(i * n + j) * n + k]; }
};
AlgebraTable algebra_table(const std::vector<VecField>& fields, const std::vector<Point>& base,
                           const std::map<std::string, double>& params = {});

// dim { V in span : [V, X] = 0 } for X = sum x_i X_i.
int stabilizer_dim(const AlgebraTable& t, const std::vector<double>& x, double tol = 1e-8);

struct StabilizerSample {
  int count = 0;
  std::map<int, int> histogram;  // dimension -> number of draws
};
StabilizerSample sample_stabilizers(const AlgebraTable& t, std::uint64_t seed, int count = 100);

// Points on the hypersurface chart: z from the potential's domain, v uniform in [-1, 1].
std::vector<Point> hypersurface_samples(const std::vector<Point>& zs, std::uint64_t seed);

}  // namespace pk

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prekahler/forms.hpp"
#include "prekahler/prekahler.hpp"

namespace pk {

// Y = d/dz2 - (rho_{2 1bar} / rho_{1 1bar}) d/dz1, spanning the (1,0) kernel
// of omega where the rank is 1. Throws Error(Rank) if rho_{1 1bar} == 0.
VecField kernel_field(Expr rho);

// Single entry of ad_Y on T^{1,0}/K: [Y, d/dzbar1] projected along K and
// T^{0,1}. Equals d/dzbar1 (rho_{2 1bar}/rho_{1 1bar}) = rho_{1 1bar} C.
Expr ad_operator_expr(Expr rho);
cplx ad_operator(Expr rho, const Point& p, const std::map<std::string, double>& params = {});

struct FiltrationReport {
  Point point;
  int rank_km1 = 2, rank_k0 = 0, rank_k1 = 0;
  std::optional<int> order;  // nullopt: infinite (holomorphically degenerate)
  cplx ad = 0.0;
  bool swapped = false;
  std::string order_string() const { return order ? std::to_string(*order) : "inf"; }
};
// Rank is probed on a small neighbourhood of p; Error(Rank) if it changes.
FiltrationReport filtration(Expr rho, const Point& p, const std::map<std::string, double>& params = {},
                            double tol = 1e-8);

// Chart centred at p with rho(0) = 0, d rho(0) = 0 and the kernel at 0 along d/dz2.
struct AdaptedChart {
  Expr rho;
  Point origin;
  cplx L[2][2];  // z = origin + L z~
  bool swapped = false;
};
// `complement` is the second component of L e1 = (1, complement); any value
// keeping L invertible gives an equally valid chart.
AdaptedChart adapt_chart(Expr rho, const Point& p, const std::map<std::string, double>& params = {},
                         cplx complement = 0.0);

// Span of (rho_{1 beta}, rho_{2 beta}) over antiholomorphic multi-indices 1 <= |beta| <= k.
struct JetSpan {
  bool pass = false;
  int rank = 0;
  double smallest_sv = 0.0;
};
JetSpan jet_span_condition(Expr rho, const Point& p, int k, const std::map<std::string, double>& params = {},
                           double tol = 1e-8, cplx complement = 0.0);

struct LeadingTerms {
  bool pass = false;
  cplx r21, r211, r11;  // rho_{2 1bar}(0), rho_{2 1bar 1bar}(0), rho_{1 1bar}(0)
};
LeadingTerms jet_leading_terms_check(Expr rho, const Point& p, const std::map<std::string, double>& params = {},
                                     double tol = 1e-8, cplx complement = 0.0);

// Largest |omega([Y, Ybar], .)| and |omega([Y, h Y], .)| over the samples.
struct Integrability {
  double conj_residual = 0.0;
  double rescaled_residual = 0.0;
};
Integrability kernel_integrability_check(Expr rho, const std::vector<Point>& pts,
                                         const std::map<std::string, double>& params = {});

}  // namespace pk

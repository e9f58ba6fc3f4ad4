#pragma once

#include <array>
#include <map>
#include <vector>

#include "prekahler/eval.hpp"
#include "prekahler/expr.hpp"

namespace pk {

// Partial derivative treating Coord(v, conj) as an independent variable.
// For the real coordinates v and t the flag is ignored.
Expr diff(Expr e, Var v, bool conjugated);

inline Expr d_z(Expr e, int i) { return diff(e, i == 1 ? Var::Z1 : Var::Z2, false); }
inline Expr d_zbar(Expr e, int i) { return diff(e, i == 1 ? Var::Z1 : Var::Z2, true); }

// Central-difference Wirtinger derivative of an evaluable function, with
// d/dz = (d/dx - i d/dy)/2 and d/dzbar = (d/dx + i d/dy)/2.
inline constexpr double kFdStep = 1e-5;
cplx fd_wirtinger(const Tape& tape, std::size_t out, const Point& p, Var v, bool conjugated, double h = kFdStep);

// Mixed partial table: alpha counts d/dz1, d/dz2 and beta counts d/dzbar1, d/dzbar2.
struct Jet {
  Point base;
  int order = 0;
  std::map<std::array<int, 4>, cplx> table;

  cplx at(int a1, int a2, int b1, int b2) const;
  // Largest |entry(a,b) - conj(entry(b,a))|; zero for a real potential.
  double reality_defect() const;
};

Jet jet(Expr e, const Point& p, int order, const std::map<std::string, double>& params = {});

// rho_{i jbar} style shorthand: holomorphic indices then antiholomorphic ones,
// each in {1, 2}. derivative(rho, {2}, {1, 1}) is rho_{2 1bar 1bar}.
Expr derivative(Expr e, const std::vector<int>& holo, const std::vector<int>& anti);

}  // namespace pk

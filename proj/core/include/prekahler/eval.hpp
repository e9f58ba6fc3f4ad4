#pragma once

#include <map>
#include <string>
#include <vector>

#include "prekahler/expr.hpp"

namespace pk {

struct Point {
  cplx z1{}, z2{}, w{};
  double v = 0.0, t = 1.0;

  cplx get(Var var, bool conjugated) const {
    switch (var) {
      case Var::Z1: return conjugated ? std::conj(z1) : z1;
      case Var::Z2: return conjugated ? std::conj(z2) : z2;
      case Var::W: return conjugated ? std::conj(w) : w;
      case Var::V: return v;
      case Var::T: return t;
    }
    return 0.0;
  }
};

std::string to_string(const Point& p);

// Several expressions flattened into one instruction list so that shared
// subexpressions are evaluated once per point.
class Tape {
 public:
  Tape() = default;
  explicit Tape(const std::vector<Expr>& roots, const std::map<std::string, double>& params = {});

  std::size_t outputs() const { return roots_.size(); }
  std::size_t size() const { return code_.size(); }

  // Throws Error(Domain) when a result is not finite.
  void eval(const Point& p, std::vector<cplx>& out) const;
  std::vector<cplx> eval(const Point& p) const {
    std::vector<cplx> out;
    eval(p, out);
    return out;
  }
  // Non-throwing variant; returns false on a non-finite result.
  bool try_eval(const Point& p, std::vector<cplx>& out) const;

 private:
  struct Instr {
    Op op;
    Var var;
    bool conj;
    cplx value;
    std::uint32_t a = 0, b = 0;  // Pow/Exp/Ln operands, or range into args_ for Add/Mul
  };
  void run(const Point& p, std::vector<cplx>& regs) const;

  std::vector<Instr> code_;
  std::vector<std::uint32_t> args_;
  std::vector<std::uint32_t> roots_;
};

cplx eval(Expr e, const Point& p, const std::map<std::string, double>& params = {});

}  // namespace pk

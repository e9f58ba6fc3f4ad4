#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prekahler/eval.hpp"
#include "prekahler/expr.hpp"

namespace pk {

// Cobasis slots: dz1, dz2, dzbar1, dzbar2, dv, dt.
inline constexpr int kSlots = 6;
enum Slot : int { DZ1 = 0, DZ2 = 1, DZB1 = 2, DZB2 = 3, DV = 4, DT = 5 };

const char* slot_name(int s);
// Derivative along the coordinate dual to slot s.
Expr slot_diff(Expr e, int s);
// Slot of the conjugate differential (dz1 <-> dzbar1, dv and dt fixed).
int conj_slot(int s);

// A vector field / tangent vector as components along the coordinate slots.
using VecField = std::array<Expr, kSlots>;
using NumVec = std::array<cplx, kSlots>;

// Apply a vector field to a function: sum_s X^s d_s f.
Expr apply(const VecField& X, Expr f);
VecField bracket(const VecField& X, const VecField& Y);
VecField conj_field(const VecField& X);

// Differential form with Expr coefficients on strictly increasing slot
// multi-indices, stored by bitmask.
class CoordForm {
 public:
  CoordForm() = default;
  explicit CoordForm(int degree) : degree_(degree) {}

  static CoordForm one_form(const std::array<Expr, kSlots>& coeffs);
  static CoordForm basis(int slot);  // dx^slot
  static CoordForm function(Expr f);  // degree 0

  int degree() const { return degree_; }
  const std::map<std::uint8_t, Expr>& terms() const { return terms_; }
  Expr coeff(std::uint8_t mask) const;
  // Coefficient of dx^a ^ dx^b (with sign if a > b).
  Expr coeff(int a, int b) const;
  Expr coeff(int a) const;
  void set(std::uint8_t mask, Expr e);
  bool is_zero() const { return terms_.empty(); }

  CoordForm operator+(const CoordForm& o) const;
  CoordForm operator-(const CoordForm& o) const;
  CoordForm operator*(Expr f) const;
  friend CoordForm operator*(Expr f, const CoordForm& a) { return a * f; }

  std::vector<Expr> coefficients() const;
  std::string to_string() const;

 private:
  int degree_ = 0;
  std::map<std::uint8_t, Expr> terms_;
};

CoordForm wedge(const CoordForm& a, const CoordForm& b);
CoordForm ext_d(const CoordForm& a);
CoordForm conj_form(const CoordForm& a);
// Interior product with X in the first slot.
CoordForm contract(const VecField& X, const CoordForm& a);
// Value of a 1- or 2-form on vector fields, as an expression.
Expr on(const CoordForm& a, const VecField& X);
Expr on(const CoordForm& a, const VecField& X, const VecField& Y);

// Numeric form at a point.
struct NumForm {
  int degree = 0;
  std::map<std::uint8_t, cplx> terms;
  double max_abs() const;
  cplx on(const std::vector<NumVec>& vs) const;
};
NumForm eval_form(const CoordForm& a, const Point& p, const std::map<std::string, double>& params = {});

// Several forms compiled into one tape.
class FormTape {
 public:
  FormTape() = default;
  explicit FormTape(const std::vector<CoordForm>& forms, const std::map<std::string, double>& params = {});
  std::vector<NumForm> eval(const Point& p) const;
  bool try_eval(const Point& p, std::vector<NumForm>& out) const;

 private:
  Tape tape_;
  std::vector<int> degree_;
  std::vector<std::vector<std::uint8_t>> masks_;
};

struct FrameDecomposition {
  Point point;
  int degree = 0;
  // keyed by bitmask over coframe indices
  std::map<std::uint32_t, cplx> coeffs;
  double condition = 0.0;
  cplx coeff(int a, int b) const;
  cplx coeff(int a) const;
};

// Express `a` at p in wedge products of the coframe, which must be a basis of
// the cotangent directions it spans. Throws Error(Singular) when the coframe
// matrix is numerically singular (condition number above 1e8).
FrameDecomposition decompose(const CoordForm& a, const std::vector<CoordForm>& coframe, const Point& p,
                             const std::map<std::string, double>& params = {});
FrameDecomposition decompose(const NumForm& a, const std::vector<NumForm>& coframe, const Point& p);
// Numeric reassembly of a decomposition back into slot coordinates.
NumForm reassemble(const FrameDecomposition& d, const std::vector<CoordForm>& coframe,
                   const std::map<std::string, double>& params = {});
NumForm reassemble(const FrameDecomposition& d, const std::vector<NumForm>& coframe);

}  // namespace pk

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pk {

using cplx = std::complex<double>;

// Coordinates: z1, z2 and w are complex (with a conjugation flag), v and t are real.
enum class Var : std::uint8_t { Z1 = 0, Z2 = 1, W = 2, V = 3, T = 4 };
inline constexpr int kNumVars = 5;

inline bool is_real_var(Var v) { return v == Var::V || v == Var::T; }
const char* var_name(Var v);

enum class Op : std::uint8_t { Const, Param, Coord, Add, Mul, Pow, Exp, Ln };

struct Node {
  Op op;
  Var var = Var::Z1;
  bool conj = false;
  cplx value{};
  std::string name;
  std::vector<const Node*> kids;
  std::size_t hash = 0;
  std::uint32_t id = 0;
  std::uint32_t depth = 0;
  // Bit i set when the subtree mentions Var i (either conjugation).
  std::uint8_t vars = 0;
  bool has_param = false;
};

// Immutable, hash-consed expression handle. Two structurally equal
// normalized expressions share the same node, so `==` is structural equality.
class Expr {
 public:
  Expr();  // zero
  explicit Expr(const Node* n) : n_(n) {}
  Expr(double x);  // NOLINT(google-explicit-constructor)
  Expr(cplx x);    // NOLINT(google-explicit-constructor)
  Expr(int x) : Expr(static_cast<double>(x)) {}  // NOLINT

  const Node* node() const { return n_; }
  Op op() const { return n_->op; }
  std::size_t hash() const { return n_->hash; }
  std::uint32_t id() const { return n_->id; }
  std::size_t nkids() const { return n_->kids.size(); }
  Expr kid(std::size_t i) const { return Expr(n_->kids[i]); }

  bool is_const() const { return n_->op == Op::Const; }
  bool is_zero() const;
  bool is_one() const;
  cplx const_value() const { return n_->value; }
  // True when no coordinate appears (parameters allowed).
  bool is_coord_free() const { return n_->vars == 0; }
  bool depends_on(Var v) const { return (n_->vars >> static_cast<int>(v)) & 1u; }
  bool has_param() const { return n_->has_param; }

  friend bool operator==(Expr a, Expr b) { return a.n_ == b.n_; }
  friend bool operator!=(Expr a, Expr b) { return a.n_ != b.n_; }

 private:
  const Node* n_;
};

struct ExprHash {
  std::size_t operator()(Expr e) const { return e.hash(); }
};

// Smart constructors. All return normalized expressions.
Expr constant(cplx c);
Expr param(const std::string& name);
Expr coord(Var v, bool conjugated = false);
Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(Expr base, Expr exponent);
Expr exp(Expr a);
Expr ln(Expr a);
Expr sqrt(Expr a);
Expr conj_expr(Expr a);
Expr real_part(Expr a);  // (a + conj a)/2
Expr imag_part(Expr a);  // (a - conj a)/(2i)
Expr abs2(Expr a);       // a * conj a

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator-(Expr a);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr& operator+=(Expr& a, Expr b);
Expr& operator-=(Expr& a, Expr b);
Expr& operator*=(Expr& a, Expr b);

inline const Expr I_unit() { return constant(cplx(0.0, 1.0)); }

// Holomorphic images for z1, z2, w, v, t; conjugated coordinates are sent to
// conj_expr of the image. Unset entries leave the coordinate alone.
using CoordMap = std::array<std::optional<Expr>, kNumVars>;
Expr substitute(Expr e, const CoordMap& images);
// Replace parameters by real constants; unknown names are left symbolic.
Expr bind(Expr e, const std::map<std::string, double>& params);
// Exchange z1 and z2 (and their conjugates).
Expr swap_z(Expr e);

std::string to_string(Expr e);
std::size_t node_count(Expr e);
void collect_params(Expr e, std::vector<std::string>& out);

// Total order used for canonical child ordering.
bool expr_less(Expr a, Expr b);

}  // namespace pk

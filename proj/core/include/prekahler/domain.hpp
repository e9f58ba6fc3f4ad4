#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prekahler/eval.hpp"
#include "prekahler/expr.hpp"

namespace pk {

// Sampling region for one complex coordinate: a closed disk or a rectangle.
struct Region {
  enum class Shape { Disk, Rect } shape = Shape::Disk;
  double radius = 0.8;
  double re_lo = -0.5, re_hi = 0.5, im_lo = -0.5, im_hi = 0.5;

  static Region disk(double r) {
    Region g;
    g.shape = Shape::Disk;
    g.radius = r;
    return g;
  }
  static Region rect(double re_lo, double re_hi, double im_lo, double im_hi) {
    Region g;
    g.shape = Shape::Rect;
    g.re_lo = re_lo;
    g.re_hi = re_hi;
    g.im_lo = im_lo;
    g.im_hi = im_hi;
    return g;
  }
  bool contains(cplx z) const;
  std::string describe() const;
};

struct Domain {
  Region z1 = Region::disk(0.8), z2 = Region::disk(0.8);
  std::map<std::string, double> params;
  std::uint64_t seed = 0;

  std::vector<Point> sample(std::size_t n) const;
  bool contains(const Point& p) const { return z1.contains(p.z1) && z2.contains(p.z2); }
};

// Deterministic, platform-independent uniform stream (splitmix64).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}
  std::uint64_t next();
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::uint64_t s_;
};

struct Potential {
  std::string name;
  std::string text;  // DSL source
  Expr rho;          // parameters already bound
  Domain domain;
};

// kahler, product, flat, homog (needs parameter a), envelope.
Potential builtin_potential(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> builtin_names();

// Parse a user potential; free identifiers must be given in `params`.
Potential user_potential(const std::string& text, const std::map<std::string, double>& params = {});

struct RealityCheck {
  bool pass = true;
  double max_imag = 0.0;
  Point witness;
};
RealityCheck check_real(Expr e, const Domain& dom, std::size_t n, double tol = 1e-8);

}  // namespace pk

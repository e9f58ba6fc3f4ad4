#include "prekahler/domain.hpp"

#include <cmath>
#include <sstream>

#include "prekahler/parse.hpp"

namespace pk {

bool Region::contains(cplx z) const {
  if (shape == Shape::Disk) return std::abs(z) <= radius * (1 + 1e-12);
  return z.real() >= re_lo && z.real() <= re_hi && z.imag() >= im_lo && z.imag() <= im_hi;
}

std::string Region::describe() const {
  std::ostringstream os;
  if (shape == Shape::Disk)
    os << "|z| <= " << radius;
  else
    os << re_lo << " <= Re z <= " << re_hi << ", " << im_lo << " <= Im z <= " << im_hi;
  return os.str();
}

std::uint64_t Rng::next() {
  std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform(), u2 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

namespace {
cplx draw(const Region& g, Rng& rng) {
  if (g.shape == Region::Shape::Disk) {
    double r = g.radius * std::sqrt(rng.uniform());
    double a = rng.uniform(0.0, 6.283185307179586);
    return std::polar(r, a);
  }
  double x = rng.uniform(g.re_lo, g.re_hi);
  double y = rng.uniform(g.im_lo, g.im_hi);
  return {x, y};
}
}  // namespace

std::vector<Point> Domain::sample(std::size_t n) const {
  Rng rng(seed * 0x2545f4914f6cdd1dULL + 17);
  std::vector<Point> pts(n);
  for (auto& p : pts) {
    p.z1 = draw(z1, rng);
    p.z2 = draw(z2, rng);
  }
  return pts;
}

std::vector<std::string> builtin_names() { return {"kahler", "product", "flat", "homog", "envelope"}; }

Potential builtin_potential(const std::string& name, const std::map<std::string, double>& params) {
  Potential p;
  p.name = name;
  if (name == "kahler") {
    p.text = "abs2(z1) + abs2(z2)";
  } else if (name == "product") {
    p.text = "abs2(z1)";
  } else if (name == "flat") {
    p.text = "(abs2(z1) + re(z1^2*conj(z2)))/(1 - abs2(z2))";
  } else if (name == "homog") {
    auto it = params.find("a");
    if (it == params.end()) throw Error(ErrorKind::Parse, "builtin 'homog' needs parameter a");
    const double a = it->second;
    if (a == 0.0 || a == 1.0) throw Error(ErrorKind::Domain, "homog(a) is degenerate for a in {0, 1}");
    p.text = "2*(re(z1)+1)^a*(re(z2)+1)^(1-a)";
    // Re z > -1 keeps the real powers off their branch cut
    p.domain.z1 = Region::rect(-0.5, 0.5, -1.0, 1.0);
    p.domain.z2 = Region::rect(-0.5, 0.5, -1.0, 1.0);
  } else if (name == "envelope") {
    // critical value in l of l x + l^2 P + l^3 Q with x = re z1; rank 1 with T2 != 0
    p.text = "(-re(z1)/((re(z2)+2) + sqrt((re(z2)+2)^2 - 3*(0.3*im(z2)+0.2)*re(z1))))*re(z1) + (-re(z1)/((re(z2)+2) + sqrt((re(z2)+2)^2 - 3*(0.3*im(z2)+0.2)*re(z1))))^2*(re(z2)+2) + (-re(z1)/((re(z2)+2) + sqrt((re(z2)+2)^2 - 3*(0.3*im(z2)+0.2)*re(z1))))^3*(0.3*im(z2)+0.2)";
    p.domain.z1 = Region::rect(-0.5, 0.5, -1.0, 1.0);
    p.domain.z2 = Region::rect(-0.5, 0.5, -1.0, 1.0);
  } else {
    throw Error(ErrorKind::Parse, "unknown builtin potential '" + name + "'");
  }
  p.domain.params = params;
  p.rho = bind(parse_potential(p.text), params);
  return p;
}

Potential user_potential(const std::string& text, const std::map<std::string, double>& params) {
  ParseOptions opts;
  opts.params.emplace();
  for (const auto& [k, v] : params) opts.params->insert(k);
  Potential p;
  p.name = "user";
  p.text = text;
  p.rho = bind(parse_potential(text, opts), params);
  p.domain.params = params;
  return p;
}

RealityCheck check_real(Expr e, const Domain& dom, std::size_t n, double tol) {
  RealityCheck r;
  Tape tape({e}, dom.params);
  std::vector<cplx> out;
  for (const Point& p : dom.sample(n)) {
    tape.eval(p, out);
    double im = std::abs(out[0].imag());
    if (im > r.max_imag) {
      r.max_imag = im;
      r.witness = p;
    }
  }
  r.pass = r.max_imag < tol;
  return r;
}

}  // namespace pk

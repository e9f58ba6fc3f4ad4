#include "prekahler/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "prekahler/connection.hpp"
#include "prekahler/domain.hpp"
#include "prekahler/freeman.hpp"
#include "prekahler/parallel.hpp"
#include "prekahler/parse.hpp"
#include "prekahler/prekahler.hpp"
#include "prekahler/sasaki.hpp"
#include "prekahler/wirtinger.hpp"

namespace pk {

namespace {

constexpr double kAbs = 1e-8;
constexpr double kRel = 1e-6;

struct Outcome {
  bool pass = true;
  std::ostringstream log;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      log << "[fail] ";
    }
    log << what << "; ";
  }
};

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Potential homog(double a, std::uint64_t seed) {
  Potential p = builtin_potential("homog", {{"a", a}});
  p.domain.seed = seed;
  return p;
}

Potential named(const std::string& name, std::uint64_t seed) {
  Potential p = builtin_potential(name);
  p.domain.seed = seed;
  return p;
}

double rel_err(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

// k = (a+1)(a-2)/(9a(a-1)), so T1 rho_a = -k.
double homog_k(double a) { return (a + 1.0) * (a - 2.0) / (9.0 * a * (a - 1.0)); }

std::vector<double> values(Expr e, const std::vector<Point>& pts, const std::map<std::string, double>& params) {
  Tape t({e}, params);
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = t.eval(pts[i])[0].real();
  return out;
}

void flat_model(Outcome& o, std::uint64_t seed) {
  Potential p = named("flat", seed);
  InvariantReport r = analyze(p.rho, p.domain.sample(64), p.domain.params);
  std::size_t evaluated = 0;
  for (const auto& rec : r.points) evaluated += rec.evaluated;
  o.check(evaluated == 64, std::to_string(evaluated) + "/64 points evaluated");
  o.check(r.max_bT1 < kAbs, "max T1 = " + g(r.max_bT1));
  o.check(r.max_bT2 < kAbs, "max T2 = " + g(r.max_bT2));
  o.check(r.verdict == Verdict::flat2Nondeg, std::string("class ") + verdict_name(r.verdict));
}

void homog_family(Outcome& o, std::uint64_t seed) {
  for (double a : {3.0, -2.0, 0.25}) {
    Potential p = homog(a, seed);
    auto pts = p.domain.sample(20);
    InvariantReport r = analyze(p.rho, pts, p.domain.params);
    auto rho = values(p.rho, pts, p.domain.params);
    const double k = homog_k(a);
    double e1 = 0.0, e3 = 0.0;
    bool all = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& rec = r.points[i];
      all = all && rec.evaluated;
      e1 = std::max(e1, rel_err(rec.bT1, k * k / (rho[i] * rho[i])));
      e3 = std::max(e3, rel_err(std::abs(rec.T3), std::abs(k) / rho[i]));
    }
    const std::string tag = "a=" + g(a) + ": ";
    o.check(all, tag + "all points evaluated");
    o.check(e1 < kRel, tag + "T1 rel err " + g(e1));
    o.check(r.max_bT2 < kAbs, tag + "max T2 " + g(r.max_bT2));
    o.check(e3 < kRel, tag + "|T3| rel err " + g(e3));
  }
}

void flat_params(Outcome& o, std::uint64_t seed) {
  for (double a : {-1.0, 2.0}) {
    Potential p = homog(a, seed);
    InvariantReport r = analyze(p.rho, p.domain.sample(20), p.domain.params);
    o.check(r.verdict == Verdict::flat2Nondeg && r.max_bT1 < kAbs && r.max_bT2 < kAbs,
            "a=" + g(a) + ": " + verdict_name(r.verdict) + ", T1 " + g(r.max_bT1) + ", T2 " + g(r.max_bT2));
  }
}

void special_critical(Outcome& o, std::uint64_t seed) {
  Potential p = homog(0.5, seed);
  auto pts = p.domain.sample(20);
  FromPrekahler fp = from_prekahler(p.rho, pts, p.domain.params);
  SpecialResult s = special_check(fp.data, pts, p.domain.params);
  o.check(s.special && s.max_C < kAbs, "max C coefficient " + g(s.max_C));
  std::vector<Expr> roots = fp.data.Rq.c;
  roots.push_back(p.rho);
  Tape t(roots, p.domain.params);
  double e = 0.0, other = 0.0;
  for (const Point& q : pts) {
    auto v = t.eval(q);
    e = std::max(e, rel_err((v[0] * v[3]).real(), 4.0) + std::abs((v[0] * v[3]).imag()) / 4.0);
    other = std::max({other, std::abs(v[1]), std::abs(v[2])});
  }
  o.check(e < kRel, "R coefficient * rho vs 4 rel err " + g(e));
  o.check(other < kAbs, "other R coefficients " + g(other));
  CriticalResult c = critical_check(fp.data, pts, p.domain.params);
  o.check(c.critical && c.variance < kAbs, "critical c = " + g(c.c) + ", variance " + g(c.variance));
}

void quartic(Outcome& o, std::uint64_t seed) {
  for (double a : {3.0, 0.25}) {
    Potential p = homog(a, seed);
    auto pts = p.domain.sample(20);
    FromPrekahler fp = from_prekahler(p.rho, pts, p.domain.params);
    double r = q_relation_residual(fp.data, a, pts, p.domain.params);
    o.check(r < 1e-7, "a=" + g(a) + ": residual " + g(r));
  }
}

std::vector<Potential> rank1_corpus(std::uint64_t seed) {
  std::vector<Potential> out{named("flat", seed)};
  for (double a : {3.0, -2.0, 0.25, 0.5}) out.push_back(homog(a, seed));
  out.push_back(named("envelope", seed));
  return out;
}

std::string label(const Potential& p) {
  auto it = p.domain.params.find("a");
  return it == p.domain.params.end() ? p.name : p.name + "(" + g(it->second) + ")";
}

void structure(Outcome& o, std::uint64_t seed) {
  for (const Potential& p : rank1_corpus(seed)) {
    InvariantReport r = analyze(p.rho, p.domain.sample(20), p.domain.params);
    bool all = true;
    for (const auto& rec : r.points) all = all && rec.evaluated;
    o.check(all && r.max_residual < 1e-7 && r.max_reT3 < kAbs,
            label(p) + ": residual " + g(r.max_residual) + ", Re T3 " + g(r.max_reT3));
  }
}

double invariant_diff(const InvariantReport& a, const InvariantReport& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const auto &x = a.points[i], &y = b.points[i];
    if (x.evaluated != y.evaluated) return INFINITY;
    auto rel = [](double u, double v) { return std::abs(u - v) / std::max(1.0, std::abs(v)); };
    d = std::max({d, rel(x.bT1, y.bT1), rel(x.bT2, y.bT2), rel(std::abs(x.T3), std::abs(y.T3))});
  }
  return d;
}

void gauge(Outcome& o, std::uint64_t seed) {
  Rng rng(seed ^ 0x6a09e667f3bcc908ULL);
  const Expr shift = real_part(pow(coord(Var::Z1), Expr(2.0)) * coord(Var::Z2));
  AnalyzeOptions plain;
  plain.residuals = false;
  plain.closed_forms = false;
  for (const Potential& p : {homog(3.0, seed), named("envelope", seed), named("flat", seed)}) {
    auto pts = p.domain.sample(20);
    InvariantReport base = analyze(p.rho, pts, p.domain.params, plain);
    AnalyzeOptions rot = plain;
    rot.gauge_phi = rng.uniform(-std::numbers::pi, std::numbers::pi);
    InvariantReport r1 = analyze(p.rho, pts, p.domain.params, rot);
    InvariantReport r2 = analyze(p.rho + shift, pts, p.domain.params, plain);
    const double d1 = invariant_diff(r1, base), d2 = invariant_diff(r2, base);
    o.check(d1 < kAbs && r1.verdict == base.verdict, label(p) + ": gauge phi=" + g(rot.gauge_phi) + " diff " + g(d1));
    o.check(d2 < kAbs && r2.verdict == base.verdict, label(p) + ": rho + Re(z1^2 z2) diff " + g(d2));
  }
}

void freeman(Outcome& o, std::uint64_t seed) {
  struct Case {
    Potential p;
    std::string want;
  };
  std::vector<Case> cases{{named("kahler", seed), "1"}, {named("product", seed), "inf"}, {named("flat", seed), "2"}};
  for (double a : {3.0, -2.0, 0.25, 0.5, -1.0, 2.0}) cases.push_back({homog(a, seed), "2"});
  cases.push_back({named("envelope", seed), "2"});
  for (const auto& c : cases) {
    auto pts = c.p.domain.sample(8);
    std::vector<std::string> got(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { got[i] = filtration(c.p.rho, pts[i], c.p.domain.params).order_string(); });
    bool ok = true;
    for (const auto& s : got) ok = ok && s == c.want;
    o.check(ok, label(c.p) + " order " + got.front());
  }
  for (const Potential& p : {named("flat", seed), homog(3.0, seed), named("envelope", seed), named("product", seed)}) {
    auto pts = p.domain.sample(64);
    Tape t({ad_operator_expr(p.rho), nondeg_scalar_C(p.rho)}, p.domain.params);
    int agree = 0;
    for (const Point& q : pts) {
      auto v = t.eval(q);
      agree += (std::abs(v[0]) > kAbs) == (std::abs(v[1]) > kAbs);
    }
    o.check(agree == 64, label(p) + ": ad/C agree " + std::to_string(agree) + "/64");
  }
}

void jets(Outcome& o, std::uint64_t) {
  const Point origin{};
  for (const char* name : {"flat", "product"}) {
    Potential p = builtin_potential(name);
    const bool want = std::string(name) != "product";
    LeadingTerms lt = jet_leading_terms_check(p.rho, origin);
    JetSpan js = jet_span_condition(p.rho, origin, 2);
    o.check(lt.pass == want && js.pass == want, std::string(name) + ": leading " + (lt.pass ? "pass" : "fail") +
                                                    ", span(2) " + (js.pass ? "pass" : "fail"));
  }
  {
    Potential p = homog(3.0, 0);
    LeadingTerms lt = jet_leading_terms_check(p.rho, origin, p.domain.params);
    JetSpan js = jet_span_condition(p.rho, origin, 2, p.domain.params);
    o.check(lt.pass && js.pass, std::string("homog(3): leading ") + (lt.pass ? "pass" : "fail") + ", span(2) " +
                                    (js.pass ? "pass" : "fail"));
  }
  // finite differences of the symbolic lower derivative in zbar1
  Potential f = builtin_potential("flat");
  Expr r2 = d_z(f.rho, 2);
  Tape t({r2, d_zbar(r2, 1)});
  const cplx r21 = fd_wirtinger(t, 0, origin, Var::Z1, true);
  const cplx r211 = fd_wirtinger(t, 1, origin, Var::Z1, true);
  o.check(std::abs(r21) < kRel, "flat rho_{2 1bar}(0) = " + g(std::abs(r21)));
  o.check(std::abs(r211 - 1.0) < kRel, "flat rho_{2 1bar 1bar}(0) - 1 = " + g(std::abs(r211 - 1.0)));
}

// Derivatives of order 1..5, each checked against a central difference of its parent.
void calculus(Outcome& o, std::uint64_t seed) {
  struct Node {
    Expr e;
    int parent = -1;
    Var v = Var::Z1;
    bool conj = false;
  };
  const Var vars[2] = {Var::Z1, Var::Z2};
  for (const Potential& p : {named("flat", seed), homog(3.0, seed), homog(0.25, seed), named("envelope", seed)}) {
    std::vector<Node> nodes{{p.rho}};
    std::vector<std::array<int, 4>> idx{{0, 0, 0, 0}};
    std::map<std::array<int, 4>, int> seen{{{0, 0, 0, 0}, 0}};
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      const auto m = idx[n];
      if (m[0] + m[1] + m[2] + m[3] == 5) continue;
      for (int s = 0; s < 4; ++s) {
        auto m2 = m;
        ++m2[s];
        if (seen.count(m2)) continue;
        const Var v = vars[s % 2];
        const bool conj = s >= 2;
        seen[m2] = static_cast<int>(nodes.size());
        nodes.push_back({diff(nodes[n].e, v, conj), static_cast<int>(n), v, conj});
        idx.push_back(m2);
      }
    }
    std::vector<Expr> roots;
    for (const auto& nd : nodes) roots.push_back(nd.e);
    Tape t(roots, p.domain.params);
    auto pts = p.domain.sample(50);
    std::vector<double> worst(pts.size(), 0.0);
    parallel_for(pts.size(), [&](std::size_t i) {
      auto sym = t.eval(pts[i]);
      for (std::size_t n = 1; n < nodes.size(); ++n) {
        const cplx fd = fd_wirtinger(t, nodes[n].parent, pts[i], nodes[n].v, nodes[n].conj);
        const double err = std::abs(fd - sym[n]) / (kRel * std::abs(sym[n]) + 1e-9);
        worst[i] = std::max(worst[i], err);
      }
    });
    double w = 0.0;
    for (double x : worst) w = std::max(w, x);
    o.check(w <= 1.0, label(p) + ": " + std::to_string(nodes.size() - 1) + " derivatives, worst err/tol " + g(w));
  }
}

void sasaki(Outcome& o, std::uint64_t seed) {
  for (const Potential& p : {named("flat", seed), homog(3.0, seed), named("envelope", seed)}) {
    auto pts = hypersurface_samples(p.domain.sample(20), seed);
    ContactCheck cc = contact_check(p.rho, pts, p.domain.params);
    const double closed = closedness_residual(presymplectify(p.rho), pts, p.domain.params);
    const double t11 = check_11_presymplectification(p.rho, pts, p.domain.params);
    o.check(cc.ddbar_residual < 1e-9, label(p) + ": d theta + 2i ddbar rho " + g(cc.ddbar_residual));
    o.check(closed < 1e-9, label(p) + ": d of presymplectification " + g(closed));
    o.check(t11 < kAbs, label(p) + ": (1,1) defect " + g(t11));
  }
  const double a = 3.0;
  Potential p = homog(a, seed);
  const Expr hyper = p.rho - Expr(2.0);
  auto pts = hypersurface_samples(p.domain.sample(20), seed);
  std::vector<VecField> fields;
  double tang = 0.0;
  for (const HoloField& Z : homogeneous_symmetries(a)) {
    tang = std::max(tang, tangency_check(Z, hyper, pts, p.domain.params).residual);
    fields.push_back(restrict_to_hypersurface(Z, hyper));
  }
  o.check(tang < kAbs, "a=3: five fields tangent, residual " + g(tang));
  AlgebraTable tab = algebra_table(fields, std::vector<Point>(pts.begin(), pts.begin() + 6), p.domain.params);
  o.check(tab.residual < 1e-7, "bracket table closed, residual " + g(tab.residual));
  StabilizerSample st = sample_stabilizers(tab, seed);
  std::string hist;
  for (const auto& [d, n] : st.histogram) hist += (hist.empty() ? "" : ", ") + std::to_string(n) + "x dim " + std::to_string(d);
  const int dim1 = st.histogram.count(1) ? st.histogram.at(1) : 0;
  o.check(dim1 >= 95, "random stabilizers: " + hist + " (dim 1 required for >= 95/100)");
}

void connection(Outcome& o, std::uint64_t seed) {
  Potential p = homog(3.0, seed);
  auto pts = p.domain.sample(20);
  FromPrekahler fp = from_prekahler(p.rho, pts, p.domain.params);
  TFromCurvature back = T_from_curvature(fp.data.R11, fp.data.R12, fp.data.R21);
  Tape t({back.T1, back.T3, fp.t.T1, fp.t.T3}, p.domain.params);
  double d = 0.0;
  for (const Point& q : pts) {
    auto v = t.eval(q);
    d = std::max({d, std::abs(std::abs(v[0]) - std::abs(v[2])), std::abs(v[1] - v[3])});
  }
  o.check(d < kAbs, "homog(3): (|T1|, T3) round trip diff " + g(d));

  ChristoffelInput ci = random_christoffel(seed, 2);
  ConnectionData cd = connection_data(frame_from_christoffel(ci.gamma, ci.sigma));
  Tape kt({cd.K_cov, cd.K_coframe});
  Rng rng(seed ^ 0xbb67ae8584caa73bULL);
  double dk = 0.0, kmax = 0.0;
  for (int i = 0; i < 50; ++i) {
    Point q;
    q.z1 = rng.uniform(-1.0, 1.0);
    q.z2 = rng.uniform(-1.0, 1.0);
    auto v = kt.eval(q);
    dk = std::max(dk, std::abs(v[0] - v[1]) / std::max(1.0, std::abs(v[0])));
    kmax = std::max(kmax, std::abs(v[0]));
  }
  o.check(dk < kAbs, "random connection: K covariant vs coframe rel diff " + g(dk) + " (max |K| " + g(kmax) + ")");
}

struct Suite {
  int id;
  const char* name;
  const char* title;
  void (*run)(Outcome&, std::uint64_t);
};

const std::vector<Suite>& suites() {
  static const std::vector<Suite> s{
      {1, "flat", "flat model: T1 = T2 = 0, class flat2Nondeg", flat_model},
      {2, "homog", "homogeneous family T1, T2, |T3|", homog_family},
      {3, "flat-params", "a in {-1, 2} classify as flat", flat_params},
      {4, "special", "a = 1/2: C = 0, R = 4/rho, critical", special_critical},
      {5, "quartic", "Q - k R^2 = 0", quartic},
      {6, "structure", "structure equations close, Re T3 = 0", structure},
      {7, "gauge", "gauge and pluriharmonic invariance", gauge},
      {8, "freeman", "nondegeneracy orders, ad vs C", freeman},
      {9, "jets", "jet criteria at the adapted origin", jets},
      {10, "calculus", "symbolic derivatives vs central differences", calculus},
      {11, "sasaki", "pre-Sasakian bridge and symmetry algebra", sasaki},
      {12, "connection", "connection round trip and K formulations", connection},
  };
  return s;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n = [] {
    std::vector<std::string> v;
    for (const auto& s : suites()) v.push_back(s.name);
    return v;
  }();
  return n;
}

std::vector<CriterionResult> run_verify(const std::vector<std::string>& only, std::uint64_t seed) {
  for (const auto& name : only) {
    bool known = false;
    for (const auto& s : suites()) known = known || name == s.name;
    if (!known) throw Error(ErrorKind::Parse, "unknown suite '" + name + "'");
  }
  std::vector<CriterionResult> out;
  for (const auto& s : suites()) {
    if (!only.empty() && std::find(only.begin(), only.end(), s.name) == only.end()) continue;
    CriterionResult r;
    r.id = s.id;
    r.suite = s.name;
    r.title = s.title;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      s.run(o, seed);
    } catch (const std::exception& e) {
      o.pass = false;
      o.log << "[error] " << e.what() << "; ";
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.pass = o.pass;
    r.details = o.log.str();
    if (r.details.size() >= 2) r.details.resize(r.details.size() - 2);
    out.push_back(std::move(r));
  }
  return out;
}

std::string verify_json(const std::vector<CriterionResult>& results, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["tool"] = "prekahler";
  j["version"] = PREKAHLER_VERSION;
  j["seed"] = seed;
  int passed = 0;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    passed += r.pass;
    arr.push_back({{"id", r.id},
                   {"suite", r.suite},
                   {"title", r.title},
                   {"pass", r.pass},
                   {"details", r.details},
                   {"seconds", r.seconds}});
  }
  j["criteria"] = arr;
  j["passed"] = passed;
  j["total"] = results.size();
  return j.dump(2) + "\n";
}

std::string verify_lines(const std::vector<CriterionResult>& results) {
  std::ostringstream os;
  for (const auto& r : results) {
    char head[96];
    std::snprintf(head, sizeof head, "%s %2d %-11s %6.2fs  ", r.pass ? "PASS" : "FAIL", r.id, r.suite.c_str(), r.seconds);
    os << head << r.title << "\n      " << r.details << "\n";
  }
  return os.str();
}

}  // namespace pk

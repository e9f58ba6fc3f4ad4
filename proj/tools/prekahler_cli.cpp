#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "prekahler/connection.hpp"
#include "prekahler/domain.hpp"
#include "prekahler/freeman.hpp"
#include "prekahler/parse.hpp"
#include "prekahler/prekahler.hpp"
#include "prekahler/report.hpp"
#include "prekahler/sasaki.hpp"
#include "prekahler/verify.hpp"

using namespace pk;

namespace {

struct Options {
  std::string potential_file, builtin;
  std::vector<std::string> params, at;
  std::size_t samples = 64;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::string json_path, csv_path;
  bool quiet = false;
  // connection
  std::string gamma_file, from_potential;
  std::int64_t random_seed = -1;
  // verify
  std::vector<std::string> only;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, double> parse_params(const std::vector<std::string>& kv) {
  std::map<std::string, double> out;
  for (const auto& s : kv) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::Parse, "--param expects k=v, got '" + s + "'");
    try {
      std::size_t used = 0;
      out[s.substr(0, eq)] = std::stod(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1) throw std::invalid_argument(s);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Parse, "bad number in --param " + s);
    }
  }
  return out;
}

// a, bi, a+bi, a-bi
cplx parse_complex(const std::string& s) {
  static const std::regex num(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  static const std::regex full(R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?(?:([+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)i)?$)");
  std::smatch m;
  if (s.empty() || !std::regex_match(s, m, full)) throw Error(ErrorKind::Parse, "bad complex number '" + s + "'");
  double re = m[1].matched ? std::stod(m[1].str()) : 0.0, im = 0.0;
  if (m[2].matched || s.back() == 'i') {
    std::string t = m[2].str();
    if (t.empty() || t == "+") im = 1.0;
    else if (t == "-") im = -1.0;
    else im = std::stod(t);
  }
  return {re, im};
}

Point parse_point(const std::string& s) {
  Point p;
  std::stringstream ss(s);
  std::string part;
  bool seen1 = false, seen2 = false;
  while (std::getline(ss, part, ',')) {
    auto eq = part.find('=');
    const std::string key = part.substr(0, eq);
    if (eq == std::string::npos || (key != "z1" && key != "z2"))
      throw Error(ErrorKind::Parse, "--at expects z1=..,z2=.., got '" + s + "'");
    (key == "z1" ? p.z1 : p.z2) = parse_complex(part.substr(eq + 1));
    (key == "z1" ? seen1 : seen2) = true;
  }
  if (!seen1 || !seen2) throw Error(ErrorKind::Parse, "--at needs both z1 and z2");
  return p;
}

Potential load_potential(const Options& o) {
  auto params = parse_params(o.params);
  Potential p;
  if (!o.builtin.empty()) {
    p = builtin_potential(o.builtin, params);
  } else if (!o.potential_file.empty()) {
    p = user_potential(slurp(o.potential_file), params);
    p.name = o.potential_file;
  } else {
    throw Error(ErrorKind::Parse, "need --potential FILE or --builtin NAME");
  }
  p.domain.seed = o.seed;
  return p;
}

std::vector<Point> points_for(const Options& o, const Potential& p) {
  if (o.at.empty()) return p.domain.sample(o.samples);
  std::vector<Point> pts;
  for (const auto& s : o.at) pts.push_back(parse_point(s));
  return pts;
}

void emit(const Options& o, const ReportDocument& doc) {
  const std::string js = doc.to_json();
  if (o.json_path == "-") {
    std::cout << js;
  } else {
    if (!o.json_path.empty()) std::ofstream(o.json_path) << js;
    if (!o.quiet) std::cout << doc.summary();
  }
  if (!o.csv_path.empty()) std::ofstream(o.csv_path) << doc.csv();
}

int cmd_analyze(const Options& o) {
  Potential p = load_potential(o);
  auto pts = points_for(o, p);
  AnalyzeOptions opt;
  opt.tol = o.tol;
  InvariantReport rep = analyze(p.rho, pts, p.domain.params, opt);
  ReportDocument doc = make_document("analyze", p, o.seed, pts.size(), o.tol);
  add_analysis(doc, rep);
  emit(o, doc);
  return 0;
}

int cmd_freeman(const Options& o) {
  Potential p = load_potential(o);
  auto pts = points_for(o, p);
  std::vector<FiltrationReport> reps;
  for (const Point& q : pts) reps.push_back(filtration(p.rho, q, p.domain.params, o.tol));
  ReportDocument doc = make_document("freeman", p, o.seed, pts.size(), o.tol);
  add_filtration(doc, reps);
  emit(o, doc);
  return 0;
}

int cmd_connection(const Options& o) {
  const int sources = !o.gamma_file.empty() + !o.from_potential.empty() + (o.random_seed >= 0);
  if (sources != 1) throw Error(ErrorKind::Parse, "need exactly one of --gamma, --from-potential, --random");
  ReportDocument doc;
  ConnectionData cd;
  std::vector<Point> pts;
  std::map<std::string, double> params;
  if (!o.from_potential.empty()) {
    Options po = o;
    po.builtin = o.from_potential;
    Potential p = load_potential(po);
    pts = points_for(o, p);
    params = p.domain.params;
    FromPrekahler fp = from_prekahler(p.rho, pts, params, o.tol);
    cd = fp.data;
    doc = make_document("connection", p, o.seed, pts.size(), o.tol);
    doc.verdicts.emplace_back("max_bT2", fp.max_bT2);
  } else {
    ChristoffelInput ci = o.gamma_file.empty() ? random_christoffel(static_cast<std::uint64_t>(o.random_seed))
                                               : parse_christoffel_json(slurp(o.gamma_file));
    Potential p;
    p.name = o.gamma_file.empty() ? "random(" + std::to_string(o.random_seed) + ")" : o.gamma_file;
    std::ostringstream text;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          text << "gamma^" << i + 1 << "_" << j + 1 << k + 1 << " = " << to_string(ci.gamma[i][j][k]) << "; ";
    text << "sigma = " << to_string(ci.sigma);
    p.text = text.str();
    p.domain.z1 = Region::rect(-1, 1, 0, 0);
    p.domain.z2 = Region::rect(-1, 1, 0, 0);
    p.domain.seed = o.seed;
    if (o.at.empty()) {
      pts = p.domain.sample(o.samples);
    } else {
      pts = points_for(o, p);
    }
    ChristoffelCheck chk = check_christoffel(ci.gamma, ci.sigma, pts);
    cd = connection_data(frame_from_christoffel(ci.gamma, ci.sigma));
    doc = make_document("connection", p, o.seed, pts.size(), o.tol);
    doc.verdicts.emplace_back("gamma_asymmetry", chk.asymmetry);
    doc.verdicts.emplace_back("volume_defect", chk.volume_defect);
  }
  FrameResiduals fr = frame_residuals(cd, pts, params);
  SpecialResult sp = special_check(cd, pts, params, o.tol);
  CriticalResult cr = critical_check(cd, pts, params, o.tol);
  doc.verdicts.emplace_back("torsion_residual", fr.torsion);
  doc.verdicts.emplace_back("trace_residual", fr.trace);
  doc.verdicts.emplace_back("curvature_shape_residual", fr.curvature_shape);
  doc.verdicts.emplace_back("special", sp.special);
  doc.verdicts.emplace_back("max_C", sp.max_C);
  doc.verdicts.emplace_back("critical", cr.critical);
  doc.verdicts.emplace_back("critical_c", cr.c);
  doc.verdicts.emplace_back("critical_variance", cr.variance);
  std::vector<Expr> roots{cd.R11, cd.R12, cd.R21, cd.K_cov, cd.RicRic};
  for (Expr e : cd.Rq.c) roots.push_back(e);
  for (Expr e : cd.Cc.c) roots.push_back(e);
  Tape t(roots, params);
  double rmax = 0.0;
  for (const Point& q : pts) {
    auto v = t.eval(q);
    Fields f = point_fields(q);
    f.emplace_back("R11", v[0]);
    f.emplace_back("R12", v[1]);
    f.emplace_back("R21", v[2]);
    f.emplace_back("K", v[3]);
    f.emplace_back("RicRic", v[4]);
    for (int k = 0; k < 3; ++k) f.emplace_back("R_" + std::to_string(k), v[5 + k]);
    for (int k = 0; k < 4; ++k) f.emplace_back("C_" + std::to_string(k), v[8 + k]);
    for (int k = 0; k < 3; ++k) rmax = std::max(rmax, std::abs(v[k]));
    doc.points.push_back(std::move(f));
  }
  doc.verdicts.emplace_back("flat", rmax < o.tol);
  emit(o, doc);
  return 0;
}

int cmd_sasaki(const Options& o) {
  Potential p = load_potential(o);
  auto pts = hypersurface_samples(points_for(o, p), o.seed);
  ReportDocument doc = make_document("sasaki", p, o.seed, pts.size(), o.tol);
  ContactCheck cc = contact_check(p.rho, pts, p.domain.params);
  doc.verdicts.emplace_back("ddbar_residual", cc.ddbar_residual);
  doc.verdicts.emplace_back("omega_residual", cc.omega_residual);
  doc.verdicts.emplace_back("closedness_residual", closedness_residual(presymplectify(p.rho), pts, p.domain.params));
  doc.verdicts.emplace_back("type11_residual", check_11_presymplectification(p.rho, pts, p.domain.params));
  for (const Point& q : pts) {
    Fields f = point_fields(q);
    f.emplace_back("v", q.v);
    f.emplace_back("t", q.t);
    f.emplace_back("presymplectic_rank", std::int64_t{presymplectic_rank(p.rho, q, p.domain.params)});
    doc.points.push_back(std::move(f));
  }
  if (p.name == "homog") {
    const double a = p.domain.params.at("a");
    const Expr hyper = p.rho - Expr(2.0);
    std::vector<VecField> fields;
    for (const HoloField& Z : homogeneous_symmetries(a)) {
      Tangency tg = tangency_check(Z, hyper, pts, p.domain.params, o.tol);
      doc.verdicts.emplace_back(Z.name + "_tangency", tg.residual);
      fields.push_back(restrict_to_hypersurface(Z, hyper));
    }
    std::vector<Point> base(pts.begin(), pts.begin() + std::min<std::size_t>(6, pts.size()));
    AlgebraTable tab = algebra_table(fields, base, p.domain.params);
    doc.verdicts.emplace_back("bracket_table_residual", tab.residual);
    for (std::size_t i = 0; i < tab.n; ++i)
      for (std::size_t j = i + 1; j < tab.n; ++j)
        for (std::size_t k = 0; k < tab.n; ++k)
          if (std::abs(tab.at(i, j, k)) > 1e-9)
            doc.verdicts.emplace_back("c_X" + std::to_string(i) + "X" + std::to_string(j) + "^X" + std::to_string(k),
                                      tab.at(i, j, k));
    StabilizerSample st = sample_stabilizers(tab, o.seed);
    for (const auto& [d, n] : st.histogram)
      doc.verdicts.emplace_back("stabilizer_dim_" + std::to_string(d), std::int64_t{n});
    doc.notes.push_back("hypersurface Re w = rho_a - 2");
  }
  emit(o, doc);
  return 0;
}

int cmd_verify(const Options& o) {
  std::vector<std::string> only;
  for (const auto& s : o.only) {
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) only.push_back(part);
  }
  auto results = run_verify(only, o.seed);
  if (!o.json_path.empty()) std::ofstream(o.json_path) << verify_json(results, o.seed);
  std::cout << verify_lines(results);
  int passed = 0;
  for (const auto& r : results) passed += r.pass;
  std::cout << passed << "/" << results.size() << " criteria pass\n";
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

void add_input(CLI::App* sub, Options& o) {
  auto* f = sub->add_option("--potential", o.potential_file, "potential DSL file");
  auto* b = sub->add_option("--builtin", o.builtin, "kahler | product | flat | homog | envelope");
  f->excludes(b);
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--param", o.params, "parameter binding k=v")->allow_extra_args(false);
  sub->add_option("--at", o.at, "evaluation point z1=a+bi,z2=c+di")->allow_extra_args(false);
  sub->add_option("--samples", o.samples, "number of seeded samples")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "sampling seed");
  sub->add_option("--tol", o.tol, "absolute tolerance for vanishing tests")->check(CLI::PositiveNumber);
  sub->add_option("--json", o.json_path, "write the JSON report here ('-' for stdout)");
  sub->add_option("--csv", o.csv_path, "write per-point records as CSV");
  sub->add_flag("--quiet", o.quiet, "no human summary");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pre-Kahler structure toolkit"};
  app.set_version_flag("--version", PREKAHLER_VERSION);
  app.require_subcommand(1);
  Options o;
  auto* an = app.add_subcommand("analyze", "invariants and classification of a potential");
  add_input(an, o);
  add_common(an, o);
  auto* fr = app.add_subcommand("freeman", "Levi-kernel filtration and nondegeneracy order");
  add_input(fr, o);
  add_common(fr, o);
  auto* co = app.add_subcommand("connection", "symplectic connection invariants");
  co->add_option("--gamma", o.gamma_file, "Christoffel symbols as JSON");
  co->add_option("--from-potential", o.from_potential, "builtin potential with T2 = 0");
  co->add_option("--random", o.random_seed, "seeded random polynomial connection")->check(CLI::NonNegativeNumber);
  add_common(co, o);
  auto* sa = app.add_subcommand("sasaki", "pre-Sasakian lift, presymplectification and symmetries");
  add_input(sa, o);
  add_common(sa, o);
  auto* ve = app.add_subcommand("verify", "run the acceptance suites");
  ve->add_option("--only", o.only, "comma separated suite names")->allow_extra_args(false);
  ve->add_option("--seed", o.seed, "sampling seed");
  ve->add_option("--json", o.json_path, "write results as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*an) return cmd_analyze(o);
    if (*fr) return cmd_freeman(o);
    if (*co) return cmd_connection(o);
    if (*sa) return cmd_sasaki(o);
    if (*ve) return cmd_verify(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

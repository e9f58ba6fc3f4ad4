#include "prekahler/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace pk {

using ojson = nlohmann::ordered_json;

namespace {

ojson to_value(const Scalar& s) {
  return std::visit(
      [](const auto& v) -> ojson {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, cplx>)
          return ojson::array({v.real(), v.imag()});
        else
          return ojson(v);
      },
      s);
}

ojson to_object(const Fields& f) {
  ojson o = ojson::object();
  for (const auto& [k, v] : f) o[k] = to_value(v);
  return o;
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string short_text(const Scalar& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>)
          return v ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::int64_t>)
          return std::to_string(v);
        else if constexpr (std::is_same_v<T, double>)
          return short_number(v);
        else if constexpr (std::is_same_v<T, cplx>)
          return short_number(v.real()) + (v.imag() < 0 ? " - " : " + ") + short_number(std::abs(v.imag())) + "i";
        else
          return v;
      },
      s);
}

std::string full_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Fields point_fields(const Point& p) { return {{"z1", p.z1}, {"z2", p.z2}}; }

ReportDocument make_document(const std::string& command, const Potential& pot, std::uint64_t seed,
                             std::size_t samples, double tol) {
  ReportDocument doc;
  doc.command = command;
  doc.potential_name = pot.name;
  doc.potential_text = pot.text;
  doc.domain = "z1 in " + pot.domain.z1.describe() + ", z2 in " + pot.domain.z2.describe();
  doc.params = pot.domain.params;
  doc.seed = seed;
  doc.samples = samples;
  doc.tol = tol;
  return doc;
}

std::string ReportDocument::to_json(int indent) const {
  ojson j;
  j["tool"] = "prekahler";
  j["version"] = PREKAHLER_VERSION;
  j["command"] = command;
  ojson in;
  in["potential"] = potential_name;
  in["text"] = potential_text;
  in["domain"] = domain;
  ojson ps = ojson::object();
  for (const auto& [k, v] : params) ps[k] = v;  // std::map: sorted
  in["params"] = ps;
  in["seed"] = seed;
  in["samples"] = samples;
  j["input"] = in;
  j["tolerances"] = {{"absolute", tol}, {"relative", rel_tol}};
  j["verdicts"] = to_object(verdicts);
  ojson pts = ojson::array();
  for (const auto& f : points) pts.push_back(to_object(f));
  j["points"] = pts;
  j["notes"] = notes;
  return j.dump(indent) + "\n";
}

std::string ReportDocument::summary() const {
  std::ostringstream os;
  os << command << ": " << potential_name;
  if (!params.empty()) {
    os << " (";
    bool first = true;
    for (const auto& [k, v] : params) {
      os << (first ? "" : ", ") << k << " = " << short_number(v);
      first = false;
    }
    os << ")";
  }
  os << "\n  domain   " << domain << "\n  samples  " << samples << ", seed " << seed << ", tol "
     << short_number(tol) << "\n";
  std::size_t w = 0;
  for (const auto& [k, v] : verdicts) w = std::max(w, k.size());
  for (const auto& [k, v] : verdicts) os << "  " << k << std::string(w - k.size() + 2, ' ') << short_text(v) << "\n";
  for (const auto& n : notes) os << "  note: " << n << "\n";
  return os.str();
}

std::string ReportDocument::csv() const {
  std::ostringstream os;
  if (points.empty()) return "";
  bool first = true;
  for (const auto& [k, v] : points.front()) {
    if (std::holds_alternative<std::string>(v)) continue;
    os << (first ? "" : ",");
    if (std::holds_alternative<cplx>(v))
      os << k << "_re," << k << "_im";
    else
      os << k;
    first = false;
  }
  os << "\n";
  for (const auto& f : points) {
    first = true;
    for (const auto& [k, v] : f) {
      if (std::holds_alternative<std::string>(v)) continue;
      os << (first ? "" : ",");
      first = false;
      if (auto c = std::get_if<cplx>(&v))
        os << full_number(c->real()) << "," << full_number(c->imag());
      else if (auto d = std::get_if<double>(&v))
        os << full_number(*d);
      else if (auto b = std::get_if<bool>(&v))
        os << (*b ? 1 : 0);
      else
        os << std::get<std::int64_t>(v);
    }
    os << "\n";
  }
  return os.str();
}

void add_analysis(ReportDocument& doc, const InvariantReport& rep) {
  for (const auto& r : rep.points) {
    Fields f = point_fields(r.p);
    f.emplace_back("rank", std::int64_t{r.rank});
    f.emplace_back("absC", r.absC);
    f.emplace_back("evaluated", r.evaluated);
    f.emplace_back("T1", r.T1);
    f.emplace_back("T2", r.T2);
    f.emplace_back("T3", r.T3);
    f.emplace_back("bT1", r.bT1);
    f.emplace_back("bT2", r.bT2);
    f.emplace_back("res1", r.res1);
    f.emplace_back("res2", r.res2);
    f.emplace_back("res3", r.res3);
    if (!r.note.empty()) f.emplace_back("note", r.note);
    doc.points.push_back(std::move(f));
  }
  doc.verdicts = {{"classification", std::string(verdict_name(rep.verdict))},
                  {"max_bT1", rep.max_bT1},
                  {"max_bT2", rep.max_bT2},
                  {"max_abs_re_T3", rep.max_reT3},
                  {"max_structure_residual", rep.max_residual},
                  {"max_closed_T1_rel_diff", rep.max_closed_T1_diff},
                  {"max_closed_T2_rel_diff", rep.max_closed_T2_diff},
                  {"swapped", rep.swapped}};
  for (const auto& n : rep.notes) doc.notes.push_back(n);
}

void add_filtration(ReportDocument& doc, const std::vector<FiltrationReport>& reps) {
  std::map<std::string, std::int64_t> orders;
  for (const auto& r : reps) {
    Fields f = point_fields(r.point);
    f.emplace_back("rank_K_minus1", std::int64_t{r.rank_km1});
    f.emplace_back("rank_K0", std::int64_t{r.rank_k0});
    f.emplace_back("rank_K1", std::int64_t{r.rank_k1});
    f.emplace_back("order", r.order_string());
    f.emplace_back("ad", r.ad);
    f.emplace_back("swapped", r.swapped);
    doc.points.push_back(std::move(f));
    ++orders[r.order_string()];
  }
  doc.verdicts.clear();
  if (orders.size() == 1) doc.verdicts.emplace_back("order", orders.begin()->first);
  else doc.verdicts.emplace_back("order", std::string("mixed"));
  for (const auto& [o, n] : orders) doc.verdicts.emplace_back("points_order_" + o, n);
}

}  // namespace pk

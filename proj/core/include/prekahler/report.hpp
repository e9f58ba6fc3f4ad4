#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "prekahler/domain.hpp"
#include "prekahler/freeman.hpp"
#include "prekahler/prekahler.hpp"

namespace pk {

// Complex values serialize as [re, im].
using Scalar = std::variant<bool, std::int64_t, double, cplx, std::string>;
using Fields = std::vector<std::pair<std::string, Scalar>>;

struct ReportDocument {
  std::string command;
  std::string potential_name, potential_text, domain;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double tol = 1e-8;      // absolute, "== 0" verdicts
  double rel_tol = 1e-6;  // value comparisons
  std::vector<Fields> points;
  Fields verdicts;
  std::vector<std::string> notes;

  // Key order is fixed, so equal inputs give byte-identical output.
  std::string to_json(int indent = 2) const;
  std::string summary() const;
  // One row per point record, complex columns split into _re/_im.
  std::string csv() const;
};

ReportDocument make_document(const std::string& command, const Potential& pot, std::uint64_t seed,
                             std::size_t samples, double tol);

void add_analysis(ReportDocument& doc, const InvariantReport& rep);
void add_filtration(ReportDocument& doc, const std::vector<FiltrationReport>& reps);

Fields point_fields(const Point& p);

}  // namespace pk

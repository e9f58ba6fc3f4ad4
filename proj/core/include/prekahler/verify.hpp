#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pk {

struct CriterionResult {
  int id = 0;
  std::string suite;
  std::string title;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

// flat, homog, flat-params, special, quartic, structure, gauge, freeman, jets,
// calculus, sasaki, connection; in criterion order.
const std::vector<std::string>& suite_names();

// Runs the named suites (all when `only` is empty). Unknown names throw Error(Parse).
std::vector<CriterionResult> run_verify(const std::vector<std::string>& only = {}, std::uint64_t seed = 0);

std::string verify_json(const std::vector<CriterionResult>& results, std::uint64_t seed);
// "PASS  1 flat  ..." one line per criterion
std::string verify_lines(const std::vector<CriterionResult>& results);

}  // namespace pk

#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "prekahler/expr.hpp"

namespace pk {

// Error categories double as process exit codes in the command-line tool.
enum class ErrorKind { Parse = 2, Domain = 3, Singular = 4, Rank = 5 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& msg);
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_, col_;
};

struct ParseOptions {
  // When set, only these names are accepted as parameters.
  std::optional<std::set<std::string>> params;
  // Extra spellings for coordinates, e.g. {"x1", Var::Z1} for real-chart input.
  std::map<std::string, Var> aliases;
};

Expr parse_expr(const std::string& text, const ParseOptions& opts = {});
inline Expr parse_potential(const std::string& text, const ParseOptions& opts = {}) { return parse_expr(text, opts); }

}  // namespace pk

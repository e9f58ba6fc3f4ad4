#include "prekahler/parse.hpp"

#include <cctype>
#include <cstdlib>
#include <vector>

namespace pk {

ParseError::ParseError(int line, int col, const std::string& msg)
    : Error(ErrorKind::Parse, std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line_(line), col_(col) {}

namespace {

enum class Tok { Num, Ident, Op, End };

struct Token {
  Tok kind;
  std::string text;
  double num = 0;
  int line = 1, col = 1;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == '#') {  // comment to end of line
      while (i < s.size() && s[i] != '\n') adv(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      t.kind = Tok::Num;
      t.text = s.substr(i, j - i);
      char* end = nullptr;
      t.num = std::strtod(t.text.c_str(), &end);
      if (end != t.text.c_str() + t.text.size()) throw ParseError(line, col, "malformed number '" + t.text + "'");
      adv(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = s.substr(i, j - i);
      adv(j - i);
    } else if (std::string("+-*/^(),").find(c) != std::string::npos) {
      t.kind = Tok::Op;
      t.text = std::string(1, c);
      adv(1);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(t);
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const ParseOptions& opts) : toks_(std::move(toks)), opts_(opts) {}

  Expr run() {
    Expr e = expr();
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool at_op(const char* s) const { return peek().kind == Tok::Op && peek().text == s; }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(t.line, t.col, msg); }
  void expect(const char* s) {
    if (!at_op(s)) fail(peek(), std::string("expected '") + s + "'");
    next();
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    while (at_op("+") || at_op("-")) {
      bool minus = next().text == "-";
      Expr t = term();
      terms.push_back(minus ? -t : t);
    }
    return add(terms);
  }

  Expr term() {
    // leading sign is accepted as a convenience
    if (at_op("-")) {
      next();
      return -term();
    }
    if (at_op("+")) {
      next();
      return term();
    }
    Expr acc = factor();
    while (at_op("*") || at_op("/")) {
      bool div = next().text == "/";
      Expr f = factor();
      acc = div ? acc / f : acc * f;
    }
    return acc;
  }

  Expr factor() {
    Expr base = atom();
    if (!at_op("^")) return base;
    const Token& caret = next();
    Expr ex;
    if (at_op("-") || at_op("+")) {
      bool minus = next().text == "-";
      if (peek().kind != Tok::Num) fail(peek(), "expected number after sign in exponent");
      double v = next().num;
      ex = Expr(minus ? -v : v);
    } else if (peek().kind == Tok::Num) {
      ex = Expr(next().num);
    } else if (peek().kind == Tok::Ident) {
      const Token& t = peek();
      ex = atom();
      if (!ex.is_coord_free()) fail(t, "non-constant exponent in '^'");
    } else if (at_op("(")) {
      const Token& t = peek();
      ex = atom();
      if (!ex.is_coord_free()) fail(t, "non-constant exponent in '^'");
    } else {
      fail(caret, "expected exponent after '^'");
    }
    if (ex.is_const() && ex.const_value().imag() != 0.0) fail(caret, "exponent must be real");
    return pow(base, ex);
  }

  Expr atom() {
    const Token& t = next();
    if (t.kind == Tok::Num) return Expr(t.num);
    if (t.kind == Tok::Op && t.text == "(") {
      Expr e = expr();
      expect(")");
      return e;
    }
    if (t.kind != Tok::Ident) fail(t, t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
    static const char* funcs[] = {"conj", "re", "im", "abs2", "exp", "ln", "sqrt"};
    for (const char* f : funcs) {
      if (t.text == f) return call(t);
    }
    if (t.text == "i") return Expr(cplx(0.0, 1.0));
    if (t.text == "z1") return coord(Var::Z1);
    if (t.text == "z2") return coord(Var::Z2);
    if (t.text == "w") return coord(Var::W);
    if (t.text == "v") return coord(Var::V);
    if (t.text == "t") return coord(Var::T);
    auto al = opts_.aliases.find(t.text);
    if (al != opts_.aliases.end()) return coord(al->second);
    if (opts_.params && !opts_.params->count(t.text)) fail(t, "unknown identifier '" + t.text + "'");
    if (at_op("(")) fail(t, "unknown function '" + t.text + "'");
    return param(t.text);
  }

  Expr call(const Token& f) {
    expect("(");
    std::vector<Expr> args{expr()};
    while (at_op(",")) {
      next();
      args.push_back(expr());
    }
    expect(")");
    if (args.size() != 1) fail(f, "'" + f.text + "' takes one argument");
    Expr a = args[0];
    const std::string& n = f.text;
    if (n == "conj") return conj_expr(a);
    if (n == "re") return real_part(a);
    if (n == "im") return imag_part(a);
    if (n == "abs2") return abs2(a);
    if (n == "exp") return exp(a);
    if (n == "ln") return ln(a);
    return sqrt(a);
  }

  std::vector<Token> toks_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text, const ParseOptions& opts) {
  return Parser(lex(text), opts).run();
}

}  // namespace pk

#include "prekahler/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "prekahler/numeric.hpp"

namespace pk {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_double(double d) {
  if (d == 0.0) d = 0.0;  // fold -0
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  return std::hash<std::uint64_t>{}(bits);
}

struct NodeKeyHash {
  std::size_t operator()(const Node* n) const { return n->hash; }
};

struct NodeKeyEq {
  bool operator()(const Node* a, const Node* b) const {
    if (a->hash != b->hash || a->op != b->op) return false;
    switch (a->op) {
      case Op::Const: return a->value == b->value;
      case Op::Param: return a->name == b->name;
      case Op::Coord: return a->var == b->var && a->conj == b->conj;
      default: return a->kids == b->kids;
    }
  }
};

class Arena {
 public:
  static Arena& get() {
    static Arena a;
    return a;
  }

  const Node* intern(Node&& proto) {
    proto.hash = compute_hash(proto);
    std::lock_guard<std::mutex> lock(mu_);
    auto it = table_.find(&proto);
    if (it != table_.end()) return *it;
    proto.id = static_cast<std::uint32_t>(storage_.size());
    std::uint32_t depth = 0;
    std::uint8_t vars = 0;
    bool has_param = proto.op == Op::Param;
    for (const Node* k : proto.kids) {
      depth = std::max(depth, k->depth + 1);
      vars |= k->vars;
      has_param = has_param || k->has_param;
    }
    if (proto.op == Op::Coord) vars = static_cast<std::uint8_t>(1u << static_cast<int>(proto.var));
    proto.depth = depth;
    proto.vars = vars;
    proto.has_param = has_param;
    storage_.push_back(std::move(proto));
    const Node* n = &storage_.back();
    table_.insert(n);
    return n;
  }

 private:
  static std::size_t compute_hash(const Node& n) {
    std::size_t h = static_cast<std::size_t>(n.op) * 1315423911u;
    switch (n.op) {
      case Op::Const:
        h = mix(h, hash_double(n.value.real()));
        h = mix(h, hash_double(n.value.imag()));
        break;
      case Op::Param: h = mix(h, std::hash<std::string>{}(n.name)); break;
      case Op::Coord:
        h = mix(h, static_cast<std::size_t>(n.var) * 7 + (n.conj ? 3 : 0));
        break;
      default:
        for (const Node* k : n.kids) h = mix(h, k->hash);
    }
    return h;
  }

  std::mutex mu_;
  std::deque<Node> storage_;
  std::unordered_set<const Node*, NodeKeyHash, NodeKeyEq> table_;
};

const Node* make_leaf_const(cplx c) {
  Node n;
  n.op = Op::Const;
  if (c.real() == 0.0) c.real(0.0);
  if (c.imag() == 0.0) c.imag(0.0);
  n.value = c;
  return Arena::get().intern(std::move(n));
}

const Node* make_node(Op op, std::vector<const Node*> kids) {
  Node n;
  n.op = op;
  n.kids = std::move(kids);
  return Arena::get().intern(std::move(n));
}

bool is_integer_const(Expr e, double* out = nullptr) {
  if (!e.is_const()) return false;
  cplx v = e.const_value();
  if (v.imag() != 0.0) return false;
  double r = v.real();
  if (std::nearbyint(r) != r || std::abs(r) > 64) return false;
  if (out) *out = r;
  return true;
}

template <class F>
class Memo {
 public:
  Expr get(const Node* n, F&& f) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = map_.find(n);
      if (it != map_.end()) return Expr(it->second);
    }
    Expr r = f();
    std::lock_guard<std::mutex> lock(mu_);
    map_.emplace(n, r.node());
    return r;
  }

 private:
  std::mutex mu_;
  std::unordered_map<const Node*, const Node*> map_;
};

// Split a term into numeric coefficient and remaining product.
std::pair<cplx, Expr> split_coef(Expr t) {
  if (t.op() == Op::Mul && t.kid(0).is_const()) {
    const Node* n = t.node();
    if (n->kids.size() == 2) return {t.kid(0).const_value(), t.kid(1)};
    std::vector<const Node*> rest(n->kids.begin() + 1, n->kids.end());
    return {t.kid(0).const_value(), Expr(make_node(Op::Mul, std::move(rest)))};
  }
  return {1.0, t};
}

Expr scale_term(cplx c, Expr rest) {
  if (c == cplx(1.0)) return rest;
  std::vector<const Node*> kids{make_leaf_const(c)};
  if (rest.op() == Op::Mul)
    kids.insert(kids.end(), rest.node()->kids.begin(), rest.node()->kids.end());
  else
    kids.push_back(rest.node());
  return Expr(make_node(Op::Mul, std::move(kids)));
}

void sort_canonical(std::vector<const Node*>& v) {
  std::sort(v.begin(), v.end(), [](const Node* a, const Node* b) { return expr_less(Expr(a), Expr(b)); });
}

}  // namespace

const char* var_name(Var v) {
  switch (v) {
    case Var::Z1: return "z1";
    case Var::Z2: return "z2";
    case Var::W: return "w";
    case Var::V: return "v";
    case Var::T: return "t";
  }
  return "?";
}

Expr::Expr() : n_(make_leaf_const(0.0)) {}
Expr::Expr(double x) : n_(make_leaf_const(x)) {}
Expr::Expr(cplx x) : n_(make_leaf_const(x)) {}

bool Expr::is_zero() const { return is_const() && n_->value == cplx(0.0); }
bool Expr::is_one() const { return is_const() && n_->value == cplx(1.0); }

bool expr_less(Expr a, Expr b) {
  if (a == b) return false;
  // constants first, then by structural hash
  if (a.is_const() != b.is_const()) return a.is_const();
  if (a.hash() != b.hash()) return a.hash() < b.hash();
  if (a.op() != b.op()) return a.op() < b.op();
  return a.id() < b.id();
}

Expr constant(cplx c) { return Expr(c); }

Expr param(const std::string& name) {
  Node n;
  n.op = Op::Param;
  n.name = name;
  return Expr(Arena::get().intern(std::move(n)));
}

Expr coord(Var v, bool conjugated) {
  Node n;
  n.op = Op::Coord;
  n.var = v;
  n.conj = is_real_var(v) ? false : conjugated;
  return Expr(Arena::get().intern(std::move(n)));
}

Expr add(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  for (Expr t : terms) {
    if (t.op() == Op::Add)
      for (const Node* k : t.node()->kids) flat.emplace_back(k);
    else
      flat.push_back(t);
  }
  cplx c0 = 0.0;
  double c0mag = 0.0;
  std::vector<std::pair<Expr, std::pair<cplx, double>>> acc;
  std::unordered_map<const Node*, std::size_t> where;
  for (Expr t : flat) {
    if (t.is_const()) {
      c0 += t.const_value();
      c0mag += std::abs(t.const_value());
      continue;
    }
    auto [c, rest] = split_coef(t);
    auto it = where.find(rest.node());
    if (it == where.end()) {
      where.emplace(rest.node(), acc.size());
      acc.push_back({rest, {c, std::abs(c)}});
    } else {
      acc[it->second].second.first += c;
      acc[it->second].second.second += std::abs(c);
    }
  }
  std::vector<const Node*> kids;
  for (auto& [rest, cm] : acc) {
    if (std::abs(cm.first) <= 1e-14 * cm.second) continue;
    kids.push_back(scale_term(cm.first, rest).node());
  }
  if (std::abs(c0) > 1e-14 * c0mag) kids.push_back(make_leaf_const(c0));
  if (kids.empty()) return Expr(0.0);
  if (kids.size() == 1) return Expr(kids[0]);
  sort_canonical(kids);
  return Expr(make_node(Op::Add, std::move(kids)));
}

Expr mul(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  flat.reserve(factors.size());
  for (Expr f : factors) {
    if (f.op() == Op::Mul)
      for (const Node* k : f.node()->kids) flat.emplace_back(k);
    else
      flat.push_back(f);
  }
  cplx c = 1.0;
  std::vector<std::pair<Expr, std::vector<Expr>>> acc;
  std::unordered_map<const Node*, std::size_t> where;
  for (Expr f : flat) {
    if (f.is_const()) {
      c *= f.const_value();
      continue;
    }
    Expr base = f, ex = Expr(1.0);
    if (f.op() == Op::Pow) {
      base = f.kid(0);
      ex = f.kid(1);
    }
    auto it = where.find(base.node());
    if (it == where.end()) {
      where.emplace(base.node(), acc.size());
      acc.push_back({base, {ex}});
    } else {
      acc[it->second].second.push_back(ex);
    }
  }
  if (c == cplx(0.0)) return Expr(0.0);
  std::vector<const Node*> kids;
  for (auto& [base, exps] : acc) {
    Expr e = exps.size() == 1 ? exps[0] : add(exps);
    if (e.is_zero()) continue;
    Expr p = pow(base, e);
    if (p.is_const()) {
      c *= p.const_value();
    } else if (p.op() == Op::Mul) {
      for (const Node* k : p.node()->kids) {
        if (Expr(k).is_const())
          c *= k->value;
        else
          kids.push_back(k);
      }
    } else {
      kids.push_back(p.node());
    }
  }
  if (c == cplx(0.0)) return Expr(0.0);
  if (kids.empty()) return Expr(c);
  if (kids.size() == 1 && c == cplx(1.0)) return Expr(kids[0]);
  sort_canonical(kids);
  if (c != cplx(1.0)) kids.insert(kids.begin(), make_leaf_const(c));
  return Expr(make_node(Op::Mul, std::move(kids)));
}

Expr pow(Expr base, Expr e) {
  if (e.is_zero()) return Expr(1.0);
  if (e.is_one()) return base;
  if (base.is_const() && e.is_const()) return Expr(branch_pow(base.const_value(), e.const_value()));
  if (base.is_one()) return Expr(1.0);
  if (base.is_zero() && e.is_const() && e.const_value().real() > 0) return Expr(0.0);
  double n = 0;
  if (is_integer_const(e, &n)) {
    if (base.op() == Op::Pow) return pow(base.kid(0), mul({base.kid(1), e}));
    if (base.op() == Op::Mul) {
      std::vector<Expr> fs;
      for (const Node* k : base.node()->kids) fs.push_back(pow(Expr(k), e));
      return mul(fs);
    }
    if (base.op() == Op::Exp) return exp(mul({e, base.kid(0)}));
  }
  return Expr(make_node(Op::Pow, {base.node(), e.node()}));
}

Expr exp(Expr a) {
  if (a.is_zero()) return Expr(1.0);
  if (a.is_const()) return Expr(std::exp(a.const_value()));
  if (a.op() == Op::Ln) return a.kid(0);
  return Expr(make_node(Op::Exp, {a.node()}));
}

Expr ln(Expr a) {
  if (a.is_one()) return Expr(0.0);
  if (a.is_const()) return Expr(branch_log(a.const_value()));
  if (a.op() == Op::Exp) return a.kid(0);
  return Expr(make_node(Op::Ln, {a.node()}));
}

Expr sqrt(Expr a) { return pow(a, Expr(0.5)); }

namespace {
Expr rebuild(const Node* n, const std::vector<Expr>& kids) {
  switch (n->op) {
    case Op::Add: return add(kids);
    case Op::Mul: return mul(kids);
    case Op::Pow: return pow(kids[0], kids[1]);
    case Op::Exp: return exp(kids[0]);
    case Op::Ln: return ln(kids[0]);
    default: return Expr(n);
  }
}

template <class LeafFn>
Expr map_leaves(Expr e, std::unordered_map<const Node*, Expr>& memo, LeafFn& leaf) {
  auto it = memo.find(e.node());
  if (it != memo.end()) return it->second;
  Expr r;
  if (e.nkids() == 0) {
    r = leaf(e);
  } else {
    std::vector<Expr> kids;
    kids.reserve(e.nkids());
    bool same = true;
    for (std::size_t i = 0; i < e.nkids(); ++i) {
      kids.push_back(map_leaves(e.kid(i), memo, leaf));
      same = same && kids.back() == e.kid(i);
    }
    r = same ? e : rebuild(e.node(), kids);
  }
  memo.emplace(e.node(), r);
  return r;
}
}  // namespace

Expr conj_expr(Expr a) {
  static Memo<std::function<Expr()>> memo;
  if (a.is_const()) return Expr(std::conj(a.const_value()));
  if (a.op() == Op::Param) return a;
  if (a.op() == Op::Coord) return coord(a.node()->var, !a.node()->conj);
  return memo.get(a.node(), [&]() -> Expr {
    std::vector<Expr> kids;
    for (std::size_t i = 0; i < a.nkids(); ++i) kids.push_back(conj_expr(a.kid(i)));
    return rebuild(a.node(), kids);
  });
}

Expr real_part(Expr a) { return mul({Expr(0.5), add({a, conj_expr(a)})}); }
Expr imag_part(Expr a) { return mul({Expr(cplx(0.0, -0.5)), add({a, mul({Expr(-1.0), conj_expr(a)})})}); }
Expr abs2(Expr a) { return mul({a, conj_expr(a)}); }

Expr operator+(Expr a, Expr b) { return add({a, b}); }
Expr operator-(Expr a, Expr b) { return add({a, mul({Expr(-1.0), b})}); }
Expr operator-(Expr a) { return mul({Expr(-1.0), a}); }
Expr operator*(Expr a, Expr b) { return mul({a, b}); }
Expr operator/(Expr a, Expr b) { return mul({a, pow(b, Expr(-1.0))}); }
Expr& operator+=(Expr& a, Expr b) { return a = a + b; }
Expr& operator-=(Expr& a, Expr b) { return a = a - b; }
Expr& operator*=(Expr& a, Expr b) { return a = a * b; }

Expr substitute(Expr e, const CoordMap& images) {
  std::unordered_map<const Node*, Expr> memo;
  auto leaf = [&](Expr x) -> Expr {
    if (x.op() != Op::Coord) return x;
    const auto& img = images[static_cast<int>(x.node()->var)];
    if (!img) return x;
    return x.node()->conj ? conj_expr(*img) : *img;
  };
  return map_leaves(e, memo, leaf);
}

Expr bind(Expr e, const std::map<std::string, double>& params) {
  if (!e.has_param()) return e;
  std::unordered_map<const Node*, Expr> memo;
  auto leaf = [&](Expr x) -> Expr {
    if (x.op() != Op::Param) return x;
    auto it = params.find(x.node()->name);
    return it == params.end() ? x : Expr(it->second);
  };
  return map_leaves(e, memo, leaf);
}

Expr swap_z(Expr e) {
  CoordMap m;
  m[0] = coord(Var::Z2);
  m[1] = coord(Var::Z1);
  return substitute(e, m);
}

namespace {

std::string fmt_double(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

std::string fmt_const(cplx c) {
  if (c.imag() == 0.0) {
    std::string s = fmt_double(c.real());
    return c.real() < 0 ? "(" + s + ")" : s;
  }
  if (c.real() == 0.0) return "(" + fmt_double(c.imag()) + "*i)";
  return "(" + fmt_double(c.real()) + (c.imag() < 0 ? " - " : " + ") + fmt_double(std::abs(c.imag())) + "*i)";
}

std::string print(Expr e);

std::string print_factor(Expr e) {
  std::string s = print(e);
  if (e.op() == Op::Add || e.op() == Op::Mul) return "(" + s + ")";
  return s;
}

std::string print(Expr e) {
  const Node* n = e.node();
  switch (n->op) {
    case Op::Const: return fmt_const(n->value);
    case Op::Param: return n->name;
    case Op::Coord: {
      std::string s = var_name(n->var);
      return n->conj ? "conj(" + s + ")" : s;
    }
    case Op::Add: {
      std::string s;
      for (std::size_t i = 0; i < n->kids.size(); ++i) {
        if (i) s += " + ";
        s += print(Expr(n->kids[i]));
      }
      return s;
    }
    case Op::Mul: {
      std::string s;
      for (std::size_t i = 0; i < n->kids.size(); ++i) {
        if (i) s += "*";
        s += print_factor(Expr(n->kids[i]));
      }
      return s;
    }
    case Op::Pow: {
      Expr b(n->kids[0]), x(n->kids[1]);
      std::string bs = b.op() == Op::Coord || b.op() == Op::Param || b.op() == Op::Exp || b.op() == Op::Ln
                           ? print(b)
                           : "(" + print(b) + ")";
      if (x.is_const() && x.const_value().imag() == 0.0) return bs + "^" + fmt_double(x.const_value().real());
      return bs + "^(" + print(x) + ")";
    }
    case Op::Exp: return "exp(" + print(Expr(n->kids[0])) + ")";
    case Op::Ln: return "ln(" + print(Expr(n->kids[0])) + ")";
  }
  return "?";
}

void count(const Node* n, std::unordered_set<const Node*>& seen) {
  if (!seen.insert(n).second) return;
  for (const Node* k : n->kids) count(k, seen);
}

}  // namespace

std::string to_string(Expr e) { return print(e); }

std::size_t node_count(Expr e) {
  std::unordered_set<const Node*> seen;
  count(e.node(), seen);
  return seen.size();
}

void collect_params(Expr e, std::vector<std::string>& out) {
  if (!e.has_param()) return;
  std::unordered_set<const Node*> seen;
  std::vector<const Node*> stack{e.node()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second || !n->has_param) continue;
    if (n->op == Op::Param && std::find(out.begin(), out.end(), n->name) == out.end()) out.push_back(n->name);
    for (const Node* k : n->kids) stack.push_back(k);
  }
  std::sort(out.begin(), out.end());
}

}  // namespace pk

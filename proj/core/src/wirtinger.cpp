#include "prekahler/wirtinger.hpp"

#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace pk {

namespace {

struct DiffKey {
  const Node* n;
  int dir;
  bool operator==(const DiffKey& o) const { return n == o.n && dir == o.dir; }
};
struct DiffKeyHash {
  std::size_t operator()(const DiffKey& k) const { return k.n->hash * 31 + static_cast<std::size_t>(k.dir); }
};

class DiffCache {
 public:
  static DiffCache& get() {
    static DiffCache c;
    return c;
  }
  bool find(const DiffKey& k, Expr& out) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(k);
    if (it == map_.end()) return false;
    out = Expr(it->second);
    return true;
  }
  void put(const DiffKey& k, Expr e) {
    std::lock_guard<std::mutex> lock(mu_);
    map_.emplace(k, e.node());
  }

 private:
  std::mutex mu_;
  std::unordered_map<DiffKey, const Node*, DiffKeyHash> map_;
};

Expr diff_impl(Expr e, Var v, bool cj) {
  if (!e.depends_on(v)) return Expr(0.0);
  const Node* n = e.node();
  if (n->op == Op::Coord) return (n->var == v && (is_real_var(v) || n->conj == cj)) ? Expr(1.0) : Expr(0.0);
  const int dir = static_cast<int>(v) * 2 + (cj ? 1 : 0);
  DiffKey key{n, dir};
  Expr out;
  if (DiffCache::get().find(key, out)) return out;
  switch (n->op) {
    case Op::Add: {
      std::vector<Expr> terms;
      for (const Node* k : n->kids) terms.push_back(diff_impl(Expr(k), v, cj));
      out = add(terms);
      break;
    }
    case Op::Mul: {
      // d(prod b_i^e_i) = prod * sum e_i * db_i / b_i
      std::vector<Expr> terms;
      for (const Node* k : n->kids) {
        Expr f(k);
        Expr base = f, ex = Expr(1.0);
        if (f.op() == Op::Pow) {
          base = f.kid(0);
          ex = f.kid(1);
        }
        Expr db = diff_impl(base, v, cj);
        if (db.is_zero()) continue;
        terms.push_back(mul({e, ex, db, pow(base, Expr(-1.0))}));
      }
      out = add(terms);
      break;
    }
    case Op::Pow: {
      Expr base = e.kid(0), ex = e.kid(1);
      out = mul({ex, pow(base, add({ex, Expr(-1.0)})), diff_impl(base, v, cj)});
      break;
    }
    case Op::Exp: out = mul({e, diff_impl(e.kid(0), v, cj)}); break;
    case Op::Ln: out = mul({diff_impl(e.kid(0), v, cj), pow(e.kid(0), Expr(-1.0))}); break;
    default: out = Expr(0.0);
  }
  DiffCache::get().put(key, out);
  return out;
}

Point shifted(Point p, Var v, cplx delta) {
  switch (v) {
    case Var::Z1: p.z1 += delta; break;
    case Var::Z2: p.z2 += delta; break;
    case Var::W: p.w += delta; break;
    case Var::V: p.v += delta.real(); break;
    case Var::T: p.t += delta.real(); break;
  }
  return p;
}

}  // namespace

Expr diff(Expr e, Var v, bool conjugated) { return diff_impl(e, v, is_real_var(v) ? false : conjugated); }

cplx fd_wirtinger(const Tape& tape, std::size_t out, const Point& p, Var v, bool conjugated, double h) {
  auto f = [&](cplx d) { return tape.eval(shifted(p, v, d))[out]; };
  const cplx fx = (f(h) - f(-h)) / (2 * h);
  if (is_real_var(v)) return fx;
  const cplx fy = (f(cplx(0, h)) - f(cplx(0, -h))) / (2 * h);
  const cplx i(0.0, 1.0);
  return conjugated ? 0.5 * (fx + i * fy) : 0.5 * (fx - i * fy);
}

Expr derivative(Expr e, const std::vector<int>& holo, const std::vector<int>& anti) {
  for (int k : holo) e = d_z(e, k);
  for (int k : anti) e = d_zbar(e, k);
  return e;
}

cplx Jet::at(int a1, int a2, int b1, int b2) const {
  auto it = table.find({a1, a2, b1, b2});
  if (it == table.end()) throw std::out_of_range("jet entry beyond computed order");
  return it->second;
}

double Jet::reality_defect() const {
  double worst = 0.0;
  for (const auto& [k, v] : table) {
    auto it = table.find({k[2], k[3], k[0], k[1]});
    worst = std::max(worst, std::abs(v - std::conj(it->second)));
  }
  return worst;
}

Jet jet(Expr e, const Point& p, int order, const std::map<std::string, double>& params) {
  if (order < 0 || order > 6) throw std::invalid_argument("jet order must be in [0, 6]");
  Jet j;
  j.base = p;
  j.order = order;
  std::vector<std::array<int, 4>> keys;
  std::vector<Expr> exprs;
  // build by total order so that each entry reuses its parent's derivative
  std::map<std::array<int, 4>, Expr> sym{{{0, 0, 0, 0}, e}};
  for (int total = 1; total <= order; ++total) {
    for (auto [k, x] : std::map<std::array<int, 4>, Expr>(sym)) {
      if (k[0] + k[1] + k[2] + k[3] != total - 1) continue;
      for (int slot = 0; slot < 4; ++slot) {
        auto k2 = k;
        ++k2[slot];
        if (sym.count(k2)) continue;
        Var v = slot % 2 == 0 ? Var::Z1 : Var::Z2;
        sym.emplace(k2, diff(x, v, slot >= 2));
      }
    }
  }
  for (auto& [k, x] : sym) {
    keys.push_back(k);
    exprs.push_back(x);
  }
  auto vals = Tape(exprs, params).eval(p);
  for (std::size_t i = 0; i < keys.size(); ++i) j.table.emplace(keys[i], vals[i]);
  return j;
}

}  // namespace pk

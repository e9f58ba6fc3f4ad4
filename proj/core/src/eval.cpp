#include "prekahler/eval.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "prekahler/numeric.hpp"
#include "prekahler/parse.hpp"

namespace pk {

std::string to_string(const Point& p) {
  std::ostringstream os;
  os.precision(10);
  os << "z1=" << p.z1.real() << (p.z1.imag() < 0 ? "-" : "+") << std::abs(p.z1.imag()) << "i, z2=" << p.z2.real()
     << (p.z2.imag() < 0 ? "-" : "+") << std::abs(p.z2.imag()) << "i";
  return os.str();
}

Tape::Tape(const std::vector<Expr>& roots, const std::map<std::string, double>& params) {
  std::unordered_map<const Node*, std::uint32_t> slot;
  // iterative post-order so very deep expressions do not exhaust the stack
  for (Expr root : roots) {
    std::vector<std::pair<const Node*, std::size_t>> stack{{root.node(), 0}};
    while (!stack.empty()) {
      auto& [n, k] = stack.back();
      if (slot.count(n)) {
        stack.pop_back();
        continue;
      }
      if (k < n->kids.size()) {
        const Node* c = n->kids[k++];
        if (!slot.count(c)) stack.push_back({c, 0});
        continue;
      }
      Instr in{n->op, n->var, n->conj, n->value};
      switch (n->op) {
        case Op::Param: {
          auto it = params.find(n->name);
          if (it == params.end()) throw Error(ErrorKind::Domain, "unbound parameter '" + n->name + "'");
          in.op = Op::Const;
          in.value = it->second;
          break;
        }
        case Op::Add:
        case Op::Mul:
          in.a = static_cast<std::uint32_t>(args_.size());
          for (const Node* c : n->kids) args_.push_back(slot.at(c));
          in.b = static_cast<std::uint32_t>(args_.size());
          break;
        case Op::Pow:
          in.a = slot.at(n->kids[0]);
          in.b = slot.at(n->kids[1]);
          break;
        case Op::Exp:
        case Op::Ln: in.a = slot.at(n->kids[0]); break;
        default: break;
      }
      slot.emplace(n, static_cast<std::uint32_t>(code_.size()));
      code_.push_back(in);
      stack.pop_back();
    }
    roots_.push_back(slot.at(root.node()));
  }
}

void Tape::run(const Point& p, std::vector<cplx>& r) const {
  r.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    switch (in.op) {
      case Op::Const: r[i] = in.value; break;
      case Op::Coord: r[i] = p.get(in.var, in.conj); break;
      case Op::Add: {
        cplx s = 0.0;
        for (std::uint32_t k = in.a; k < in.b; ++k) s += r[args_[k]];
        r[i] = s;
        break;
      }
      case Op::Mul: {
        cplx s = 1.0;
        for (std::uint32_t k = in.a; k < in.b; ++k) s *= r[args_[k]];
        r[i] = s;
        break;
      }
      case Op::Pow: r[i] = branch_pow(r[in.a], r[in.b]); break;
      case Op::Exp: r[i] = std::exp(r[in.a]); break;
      case Op::Ln: r[i] = branch_log(r[in.a]); break;
      case Op::Param: break;
    }
  }
}

bool Tape::try_eval(const Point& p, std::vector<cplx>& out) const {
  thread_local std::vector<cplx> regs;
  run(p, regs);
  out.resize(roots_.size());
  bool ok = true;
  for (std::size_t i = 0; i < roots_.size(); ++i) {
    out[i] = regs[roots_[i]];
    ok = ok && std::isfinite(out[i].real()) && std::isfinite(out[i].imag());
  }
  return ok;
}

void Tape::eval(const Point& p, std::vector<cplx>& out) const {
  if (!try_eval(p, out)) throw Error(ErrorKind::Domain, "non-finite value at " + to_string(p));
}

cplx eval(Expr e, const Point& p, const std::map<std::string, double>& params) {
  return Tape({e}, params).eval(p)[0];
}

}  // namespace pk

#include "prekahler/forms.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

#include "prekahler/parse.hpp"
#include "prekahler/wirtinger.hpp"

namespace pk {

namespace {

std::vector<int> slots_of(std::uint32_t mask) {
  std::vector<int> out;
  for (int s = 0; s < 32; ++s)
    if (mask >> s & 1u) out.push_back(s);
  return out;
}

int wedge_sign(std::uint32_t a, std::uint32_t b) {
  int inversions = 0;
  for (int i : slots_of(a))
    for (int j : slots_of(b))
      if (i > j) ++inversions;
  return inversions % 2 ? -1 : 1;
}

template <class T>
T det_small(const std::vector<std::vector<T>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return T(1.0);
  if (n == 1) return m[0][0];
  if (n == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  T acc(0.0);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<T>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<T> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(row);
    }
    T term = m[0][c] * det_small(minor);
    acc = c % 2 ? acc - term : acc + term;
  }
  return acc;
}

}  // namespace

const char* slot_name(int s) {
  static const char* names[] = {"dz1", "dz2", "dzbar1", "dzbar2", "dv", "dt"};
  return names[s];
}

Expr slot_diff(Expr e, int s) {
  switch (s) {
    case DZ1: return diff(e, Var::Z1, false);
    case DZ2: return diff(e, Var::Z2, false);
    case DZB1: return diff(e, Var::Z1, true);
    case DZB2: return diff(e, Var::Z2, true);
    case DV: return diff(e, Var::V, false);
    case DT: return diff(e, Var::T, false);
  }
  throw std::out_of_range("slot");
}

int conj_slot(int s) {
  switch (s) {
    case DZ1: return DZB1;
    case DZ2: return DZB2;
    case DZB1: return DZ1;
    case DZB2: return DZ2;
    default: return s;
  }
}

Expr apply(const VecField& X, Expr f) {
  std::vector<Expr> terms;
  for (int s = 0; s < kSlots; ++s)
    if (!X[s].is_zero()) terms.push_back(X[s] * slot_diff(f, s));
  return add(terms);
}

VecField bracket(const VecField& X, const VecField& Y) {
  VecField out;
  for (int s = 0; s < kSlots; ++s) out[s] = pk::apply(X, Y[s]) - pk::apply(Y, X[s]);
  return out;
}

VecField conj_field(const VecField& X) {
  VecField out;
  for (int s = 0; s < kSlots; ++s) out[conj_slot(s)] = conj_expr(X[s]);
  return out;
}

CoordForm CoordForm::one_form(const std::array<Expr, kSlots>& c) {
  CoordForm f(1);
  for (int s = 0; s < kSlots; ++s) f.set(static_cast<std::uint8_t>(1u << s), c[s]);
  return f;
}

CoordForm CoordForm::basis(int slot) {
  CoordForm f(1);
  f.set(static_cast<std::uint8_t>(1u << slot), Expr(1.0));
  return f;
}

CoordForm CoordForm::function(Expr e) {
  CoordForm f(0);
  f.set(0, e);
  return f;
}

Expr CoordForm::coeff(std::uint8_t mask) const {
  auto it = terms_.find(mask);
  return it == terms_.end() ? Expr(0.0) : it->second;
}

Expr CoordForm::coeff(int a) const { return coeff(static_cast<std::uint8_t>(1u << a)); }

Expr CoordForm::coeff(int a, int b) const {
  if (a == b) return Expr(0.0);
  Expr c = coeff(static_cast<std::uint8_t>((1u << a) | (1u << b)));
  return a < b ? c : -c;
}

void CoordForm::set(std::uint8_t mask, Expr e) {
  if (std::popcount(static_cast<unsigned>(mask)) != degree_) throw std::logic_error("form degree mismatch");
  if (e.is_zero())
    terms_.erase(mask);
  else
    terms_[mask] = e;
}

CoordForm CoordForm::operator+(const CoordForm& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  if (o.degree_ != degree_) throw std::logic_error("adding forms of different degree");
  CoordForm r = *this;
  for (const auto& [m, e] : o.terms_) r.set(m, r.coeff(m) + e);
  return r;
}

CoordForm CoordForm::operator-(const CoordForm& o) const { return *this + o * Expr(-1.0); }

CoordForm CoordForm::operator*(Expr f) const {
  CoordForm r(degree_);
  for (const auto& [m, e] : terms_) r.set(m, e * f);
  return r;
}

std::vector<Expr> CoordForm::coefficients() const {
  std::vector<Expr> out;
  for (const auto& [m, e] : terms_) out.push_back(e);
  return out;
}

std::string CoordForm::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, e] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << pk::to_string(e) << ")";
    for (int s : slots_of(m)) os << (s == slots_of(m).front() ? " " : "^") << slot_name(s);
  }
  return os.str();
}

CoordForm wedge(const CoordForm& a, const CoordForm& b) {
  const int deg = a.degree() + b.degree();
  if (deg > kSlots) throw std::invalid_argument("wedge degree overflow");
  CoordForm r(deg);
  std::map<std::uint8_t, std::vector<Expr>> acc;
  for (const auto& [ma, ea] : a.terms())
    for (const auto& [mb, eb] : b.terms()) {
      if (ma & mb) continue;
      Expr t = ea * eb;
      acc[static_cast<std::uint8_t>(ma | mb)].push_back(wedge_sign(ma, mb) < 0 ? -t : t);
    }
  for (auto& [m, ts] : acc) r.set(m, add(ts));
  return r;
}

CoordForm ext_d(const CoordForm& a) {
  CoordForm r(a.degree() + 1);
  std::map<std::uint8_t, std::vector<Expr>> acc;
  for (const auto& [m, e] : a.terms())
    for (int s = 0; s < kSlots; ++s) {
      if (m >> s & 1u) continue;
      Expr de = slot_diff(e, s);
      if (de.is_zero()) continue;
      acc[static_cast<std::uint8_t>(m | (1u << s))].push_back(wedge_sign(1u << s, m) < 0 ? -de : de);
    }
  for (auto& [m, ts] : acc) r.set(m, add(ts));
  return r;
}

CoordForm conj_form(const CoordForm& a) {
  CoordForm r(a.degree());
  for (const auto& [m, e] : a.terms()) {
    std::vector<int> cs;
    for (int s : slots_of(m)) cs.push_back(conj_slot(s));
    // sign of sorting the conjugated slot sequence
    int inv = 0;
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = i + 1; j < cs.size(); ++j)
        if (cs[i] > cs[j]) ++inv;
    std::uint8_t cm = 0;
    for (int s : cs) cm |= static_cast<std::uint8_t>(1u << s);
    Expr c = conj_expr(e);
    r.set(cm, inv % 2 ? -c : c);
  }
  return r;
}

CoordForm contract(const VecField& X, const CoordForm& a) {
  if (a.degree() == 0) throw std::invalid_argument("contracting a function");
  CoordForm r(a.degree() - 1);
  std::map<std::uint8_t, std::vector<Expr>> acc;
  for (const auto& [m, e] : a.terms()) {
    auto ss = slots_of(m);
    for (std::size_t k = 0; k < ss.size(); ++k) {
      if (X[ss[k]].is_zero()) continue;
      Expr t = e * X[ss[k]];
      acc[static_cast<std::uint8_t>(m & ~(1u << ss[k]))].push_back(k % 2 ? -t : t);
    }
  }
  for (auto& [m, ts] : acc) r.set(m, add(ts));
  return r;
}

Expr on(const CoordForm& a, const VecField& X) {
  if (a.degree() != 1) throw std::invalid_argument("expected a 1-form");
  return contract(X, a).coeff(static_cast<std::uint8_t>(0));
}

Expr on(const CoordForm& a, const VecField& X, const VecField& Y) {
  if (a.degree() != 2) throw std::invalid_argument("expected a 2-form");
  return on(contract(X, a), Y);
}

double NumForm::max_abs() const {
  double m = 0.0;
  for (const auto& [k, v] : terms) m = std::max(m, std::abs(v));
  return m;
}

cplx NumForm::on(const std::vector<NumVec>& vs) const {
  if (static_cast<int>(vs.size()) != degree) throw std::invalid_argument("wrong number of vectors");
  cplx acc = 0.0;
  for (const auto& [m, c] : terms) {
    auto ss = slots_of(m);
    std::vector<std::vector<cplx>> mat(ss.size(), std::vector<cplx>(ss.size()));
    for (std::size_t r = 0; r < ss.size(); ++r)
      for (std::size_t k = 0; k < vs.size(); ++k) mat[r][k] = vs[k][ss[r]];
    acc += c * det_small(mat);
  }
  return acc;
}

NumForm eval_form(const CoordForm& a, const Point& p, const std::map<std::string, double>& params) {
  NumForm nf;
  nf.degree = a.degree();
  if (a.is_zero()) return nf;
  Tape tape(a.coefficients(), params);
  auto vals = tape.eval(p);
  std::size_t i = 0;
  for (const auto& [m, e] : a.terms()) nf.terms[m] = vals[i++];
  return nf;
}

cplx FrameDecomposition::coeff(int a, int b) const {
  if (a == b) return 0.0;
  auto it = coeffs.find((1u << a) | (1u << b));
  cplx c = it == coeffs.end() ? cplx(0.0) : it->second;
  return a < b ? c : -c;
}

cplx FrameDecomposition::coeff(int a) const {
  auto it = coeffs.find(1u << a);
  return it == coeffs.end() ? cplx(0.0) : it->second;
}

FormTape::FormTape(const std::vector<CoordForm>& forms, const std::map<std::string, double>& params) {
  std::vector<Expr> roots;
  for (const auto& f : forms) {
    degree_.push_back(f.degree());
    masks_.emplace_back();
    for (const auto& [m, e] : f.terms()) {
      masks_.back().push_back(m);
      roots.push_back(e);
    }
  }
  tape_ = Tape(roots, params);
}

bool FormTape::try_eval(const Point& p, std::vector<NumForm>& out) const {
  std::vector<cplx> vals;
  if (!tape_.try_eval(p, vals)) return false;
  out.assign(degree_.size(), NumForm{});
  std::size_t k = 0;
  for (std::size_t i = 0; i < degree_.size(); ++i) {
    out[i].degree = degree_[i];
    for (std::uint8_t m : masks_[i]) out[i].terms[m] = vals[k++];
  }
  return true;
}

std::vector<NumForm> FormTape::eval(const Point& p) const {
  std::vector<NumForm> out;
  if (!try_eval(p, out)) throw Error(ErrorKind::Domain, "non-finite form coefficient at " + to_string(p));
  return out;
}

namespace {

struct FrameSolve {
  std::vector<int> active;
  Eigen::MatrixXcd M;  // rows: coframe forms, cols: active slots
  double cond = 0;
};

FrameSolve coframe_matrix(const std::vector<NumForm>& coframe, const Point& p) {
  FrameSolve fs;
  std::uint32_t used = 0;
  for (const auto& f : coframe) {
    if (f.degree != 1) throw std::invalid_argument("coframe entries must be 1-forms");
    for (const auto& [m, e] : f.terms) used |= m;
  }
  fs.active = slots_of(used);
  const int k = static_cast<int>(coframe.size());
  if (static_cast<int>(fs.active.size()) != k)
    throw Error(ErrorKind::Singular, "coframe of " + std::to_string(k) + " forms spans " +
                                         std::to_string(fs.active.size()) + " coordinate directions");
  fs.M.resize(k, k);
  for (int a = 0; a < k; ++a)
    for (int c = 0; c < k; ++c) {
      auto it = coframe[a].terms.find(static_cast<std::uint8_t>(1u << fs.active[c]));
      fs.M(a, c) = it == coframe[a].terms.end() ? cplx(0.0) : it->second;
    }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(fs.M);
  const auto& sv = svd.singularValues();
  fs.cond = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(fs.cond < 1e8))
    throw Error(ErrorKind::Singular, "coframe is singular at " + to_string(p) + " (condition " + std::to_string(fs.cond) + ")");
  return fs;
}

void subsets(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

FrameDecomposition decompose(const NumForm& a, const std::vector<NumForm>& coframe, const Point& p) {
  FrameDecomposition d;
  d.point = p;
  d.degree = a.degree;
  FrameSolve fs = coframe_matrix(coframe, p);
  d.condition = fs.cond;
  const int k = static_cast<int>(coframe.size());
  Eigen::MatrixXcd N = fs.M.inverse();  // column j: dual vector e_j in active slots
  std::vector<NumVec> frame(k);
  for (int j = 0; j < k; ++j) {
    frame[j].fill(0.0);
    for (int c = 0; c < k; ++c) frame[j][fs.active[c]] = N(c, j);
  }
  std::vector<std::vector<int>> idx;
  std::vector<int> cur;
  subsets(k, a.degree, 0, cur, idx);
  for (const auto& I : idx) {
    std::vector<NumVec> vs;
    std::uint32_t mask = 0;
    for (int j : I) {
      vs.push_back(frame[j]);
      mask |= 1u << j;
    }
    cplx c = a.on(vs);
    if (c != cplx(0.0)) d.coeffs[mask] = c;
  }
  return d;
}

FrameDecomposition decompose(const CoordForm& a, const std::vector<CoordForm>& coframe, const Point& p,
                             const std::map<std::string, double>& params) {
  std::vector<CoordForm> all = coframe;
  all.push_back(a);
  auto nf = FormTape(all, params).eval(p);
  NumForm na = nf.back();
  nf.pop_back();
  return decompose(na, nf, p);
}

NumForm reassemble(const FrameDecomposition& d, const std::vector<NumForm>& cf) {
  NumForm out;
  out.degree = d.degree;
  for (const auto& [mask, c] : d.coeffs) {
    // numeric wedge of the selected coframe 1-forms
    std::map<std::uint8_t, cplx> acc{{0, c}};
    for (int j : slots_of(mask)) {
      std::map<std::uint8_t, cplx> next;
      for (const auto& [m, v] : acc)
        for (const auto& [s, w] : cf[j].terms) {
          if (m & s) continue;
          next[static_cast<std::uint8_t>(m | s)] += static_cast<double>(wedge_sign(m, s)) * v * w;
        }
      acc = next;
    }
    for (const auto& [m, v] : acc) out.terms[m] += v;
  }
  return out;
}

NumForm reassemble(const FrameDecomposition& d, const std::vector<CoordForm>& coframe,
                   const std::map<std::string, double>& params) {
  return reassemble(d, FormTape(coframe, params).eval(d.point));
}

}  // namespace pk

#include "fockpres/mpoly.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace fockpres {

double arith_eps() { return 1e-14; }

MPoly::MPoly(int nvars) : nvars_(nvars) {
  if (nvars < 0) throw std::invalid_argument("MPoly: negative variable count");
}

MPoly MPoly::constant(int nvars, cxd c) {
  MPoly p(nvars);
  if (c != 0.0) p.terms_.emplace(MultiIndex(nvars, 0), c);
  return p;
}

MPoly MPoly::monomial(int nvars, MultiIndex alpha, cxd c) {
  MPoly p(nvars);
  if (static_cast<int>(alpha.size()) != nvars)
    throw std::invalid_argument("MPoly::monomial: index length mismatch");
  for (int e : alpha)
    if (e < 0) throw std::invalid_argument("MPoly::monomial: negative exponent");
  if (c != 0.0) p.terms_.emplace(std::move(alpha), c);
  return p;
}

MPoly MPoly::variable(int nvars, int index) {
  if (index < 0 || index >= nvars)
    throw std::invalid_argument("MPoly::variable: index out of range");
  MultiIndex a(nvars, 0);
  a[index] = 1;
  return monomial(nvars, std::move(a), 1.0);
}

int MPoly::total_degree() const {
  int d = 0;
  for (const auto& [a, c] : terms_) d = std::max(d, fockpres::total_degree(a));
  return d;
}

void MPoly::set_max_degree(std::optional<int> d) {
  max_degree_ = d;
  if (d) {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = respects_truncation(it->first) ? std::next(it) : terms_.erase(it);
  }
}

void MPoly::set_split(std::optional<BlockSplit> s) {
  if (s && s->z_count + s->w_count != nvars_)
    throw std::invalid_argument("MPoly::set_split: block sizes do not sum to nvars");
  split_ = s;
}

bool MPoly::respects_truncation(const MultiIndex& alpha) const {
  if (!max_degree_) return true;
  if (split_) {
    int dz = 0, dw = 0;
    for (int i = 0; i < split_->z_count; ++i) dz += alpha[i];
    for (int i = split_->z_count; i < nvars_; ++i) dw += alpha[i];
    return dz <= *max_degree_ && dw <= *max_degree_;
  }
  return fockpres::total_degree(alpha) <= *max_degree_;
}

cxd MPoly::coeff(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? cxd{} : it->second;
}

void MPoly::add_term(const MultiIndex& alpha, cxd c) {
  if (static_cast<int>(alpha.size()) != nvars_)
    throw std::invalid_argument("MPoly::add_term: index length mismatch");
  if (c == 0.0) return;
  if (!respects_truncation(alpha)) return;
  auto [it, inserted] = terms_.emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

void MPoly::prune(double eps) {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = (std::abs(it->second) <= eps) ? terms_.erase(it) : std::next(it);
}

double MPoly::coeff_norm1() const {
  double s = 0.0;
  for (const auto& [a, c] : terms_) s += std::abs(c);
  return s;
}

double MPoly::coeff_norm_inf() const {
  double s = 0.0;
  for (const auto& [a, c] : terms_) s = std::max(s, std::abs(c));
  return s;
}

MPoly MPoly::truncated(int max_deg, std::optional<BlockSplit> split) const {
  MPoly out(nvars_);
  out.split_ = split ? split : split_;
  out.max_degree_ = max_deg;
  for (const auto& [a, c] : terms_)
    if (out.respects_truncation(a)) out.terms_.emplace(a, c);
  return out;
}

namespace {

// min of optional degrees, absent = unbounded
std::optional<int> combine_bounds(std::optional<int> a, std::optional<int> b) {
  if (a && b) return std::min(*a, *b);
  return a ? a : b;
}

std::optional<BlockSplit> combine_splits(const MPoly& a, const MPoly& b) {
  if (a.split() && b.split() && !(*a.split() == *b.split()))
    throw std::invalid_argument("poly arithmetic: incompatible block splits");
  return a.split() ? a.split() : b.split();
}

void check_same_vars(const MPoly& a, const MPoly& b, const char* who) {
  if (a.nvars() != b.nvars())
    throw std::invalid_argument(std::string(who) + ": variable counts differ");
}

}  // namespace

namespace {

// Removes cancellation debris: entries whose value is below arith_eps() times
// the gross magnitude `mass(k)` that was accumulated onto that index. The
// threshold is relative to per-index mass, never absolute - legitimate tiny
// coefficients (single contributions) always have |c| ~ mass and survive.
template <typename MassFn>
void drop_debris(MPoly& out, MassFn mass) {
  std::vector<std::pair<MultiIndex, cxd>> drop;
  for (const auto& [k, c] : out.terms())
    if (std::abs(c) <= arith_eps() * mass(k)) drop.emplace_back(k, c);
  for (const auto& [k, c] : drop) out.add_term(k, -c);
}

}  // namespace

MPoly add(const MPoly& a, const MPoly& b) {
  check_same_vars(a, b, "add");
  MPoly out(a.nvars());
  out.set_split(combine_splits(a, b));
  out.set_max_degree(combine_bounds(a.max_degree(), b.max_degree()));
  for (const auto& [k, c] : a.terms()) out.add_term(k, c);
  for (const auto& [k, c] : b.terms()) out.add_term(k, c);
  drop_debris(out, [&](const MultiIndex& k) {
    return std::abs(a.coeff(k)) + std::abs(b.coeff(k));
  });
  return out;
}

MPoly sub(const MPoly& a, const MPoly& b) { return add(a, scale(b, -1.0)); }

MPoly mul(const MPoly& a, const MPoly& b) {
  check_same_vars(a, b, "mul");
  MPoly out(a.nvars());
  out.set_split(combine_splits(a, b));
  out.set_max_degree(combine_bounds(a.max_degree(), b.max_degree()));
  std::map<MultiIndex, double, GradedLex> mass;
  MultiIndex k(a.nvars());
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      for (int i = 0; i < a.nvars(); ++i) k[i] = ka[i] + kb[i];
      out.add_term(k, ca * cb);
      mass[k] += std::abs(ca) * std::abs(cb);
    }
  }
  drop_debris(out, [&](const MultiIndex& kk) {
    auto it = mass.find(kk);
    return it == mass.end() ? 0.0 : it->second;
  });
  return out;
}

MPoly scale(const MPoly& a, cxd c) {
  // No cancellation can occur, so nothing is pruned beyond exact zeros.
  MPoly out(a.nvars());
  out.set_split(a.split());
  out.set_max_degree(a.max_degree());
  if (c == 0.0) return out;
  for (const auto& [k, ca] : a.terms()) out.add_term(k, ca * c);
  return out;
}

static cxd ipow(cxd z, int e) {
  cxd r = 1.0;
  while (e > 0) {
    if (e & 1) r *= z;
    z *= z;
    e >>= 1;
  }
  return r;
}

cxd poly_eval(const MPoly& p, std::span<const cxd> point) {
  if (static_cast<int>(point.size()) != p.nvars())
    throw std::invalid_argument("poly_eval: point dimension mismatch");
  cxd s = 0.0;
  for (const auto& [a, c] : p.terms()) {
    cxd t = c;
    for (int i = 0; i < p.nvars(); ++i)
      if (a[i] != 0) t *= ipow(point[i], a[i]);
    s += t;
  }
  return s;
}

cxd poly_eval(const MPoly& p, const std::vector<cxd>& point) {
  return poly_eval(p, std::span<const cxd>(point));
}

double poly_eval_scale(const MPoly& p, std::span<const cxd> point) {
  if (static_cast<int>(point.size()) != p.nvars())
    throw std::invalid_argument("poly_eval_scale: point dimension mismatch");
  double s = 0.0;
  for (const auto& [a, c] : p.terms()) {
    double t = std::abs(c);
    for (int i = 0; i < p.nvars(); ++i)
      if (a[i] != 0) t *= std::pow(std::abs(point[i]), a[i]);
    s += t;
  }
  return s;
}

MPoly derivative(const MPoly& p, int var, int order) {
  if (var < 0 || var >= p.nvars())
    throw std::invalid_argument("derivative: variable out of range");
  if (order < 0) throw std::invalid_argument("derivative: negative order");
  MPoly out(p.nvars());
  out.set_split(p.split());
  for (const auto& [a, c] : p.terms()) {
    if (a[var] < order) continue;
    MultiIndex k = a;
    k[var] -= order;
    out.add_term(k, c * falling(a[var], order));
  }
  return out;
}

MPoly rotate_vars(const MPoly& p, RotateMode mode, const std::vector<int>& vars) {
  std::vector<char> sel(p.nvars(), vars.empty() ? 1 : 0);
  for (int v : vars) {
    if (v < 0 || v >= p.nvars())
      throw std::invalid_argument("rotate_vars: variable out of range");
    sel[v] = 1;
  }
  MPoly out(p.nvars());
  out.set_split(p.split());
  out.set_max_degree(p.max_degree());
  for (const auto& [a, c] : p.terms()) {
    int k = 0;
    for (int i = 0; i < p.nvars(); ++i)
      if (sel[i]) k += a[i];
    // multiply by i^k (ToRight) or (-i)^k (ToUpper); exact component swaps
    int q = k % 4;
    if (mode == RotateMode::ToUpper) q = (4 - q) % 4;
    cxd v = c;
    switch (q) {
      case 0: break;
      case 1: v = cxd(-v.imag(), v.real()); break;   // * i
      case 2: v = -v; break;
      case 3: v = cxd(v.imag(), -v.real()); break;   // * -i
    }
    out.add_term(a, v);
  }
  return out;
}

MPoly conj_coeffs(const MPoly& p) {
  MPoly out(p.nvars());
  out.set_split(p.split());
  out.set_max_degree(p.max_degree());
  for (const auto& [a, c] : p.terms()) out.add_term(a, std::conj(c));
  return out;
}

MPoly negate_w_block(const MPoly& p, const BlockSplit& split) {
  if (split.z_count + split.w_count != p.nvars())
    throw std::invalid_argument("negate_w_block: split does not match nvars");
  MPoly out(p.nvars());
  out.set_split(p.split());
  out.set_max_degree(p.max_degree());
  for (const auto& [a, c] : p.terms()) {
    int dw = 0;
    for (int i = split.z_count; i < p.nvars(); ++i) dw += a[i];
    out.add_term(a, (dw % 2 == 0) ? c : -c);
  }
  return out;
}

std::string to_string(const MPoly& p) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [a, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real();
    if (c.imag() != 0) os << (c.imag() > 0 ? "+" : "") << c.imag() << "i";
    os << ")";
    for (int i = 0; i < p.nvars(); ++i) {
      if (a[i] == 0) continue;
      os << "*z" << i;
      if (a[i] > 1) os << "^" << a[i];
    }
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace fockpres

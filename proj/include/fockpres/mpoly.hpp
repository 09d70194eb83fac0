#pragma once

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "fockpres/multi_index.hpp"

namespace fockpres {

using cxd = std::complex<double>;

// Partition of the variable list of a polynomial into a leading z-block and a
// trailing w-block. Operator symbols live in C[z_1..z_m, w_1..w_n].
struct BlockSplit {
  int z_count = 0;
  int w_count = 0;
  bool operator==(const BlockSplit&) const = default;
};

// Sparse multivariate polynomial over complex doubles.
//
// Terms are kept in graded-lex order, which makes iteration (and therefore
// evaluation order, serialization and comparisons) deterministic. A polynomial
// may carry a truncation context: max_degree bounds the total degree of every
// term, per block if a BlockSplit is attached, over all variables otherwise.
class MPoly {
 public:
  using TermMap = std::map<MultiIndex, cxd, GradedLex>;

  MPoly() : nvars_(0) {}
  explicit MPoly(int nvars);

  static MPoly constant(int nvars, cxd c);
  static MPoly monomial(int nvars, MultiIndex alpha, cxd c);
  static MPoly variable(int nvars, int index);  // the polynomial z_index

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;  // 0 for the zero polynomial

  std::optional<int> max_degree() const { return max_degree_; }
  const std::optional<BlockSplit>& split() const { return split_; }
  void set_max_degree(std::optional<int> d);
  void set_split(std::optional<BlockSplit> s);

  cxd coeff(const MultiIndex& alpha) const;
  // Accumulates c onto the coefficient of alpha; drops the entry if the
  // result is exactly zero. Respects the truncation context if present.
  void add_term(const MultiIndex& alpha, cxd c);

  // Removes terms with |coeff| <= eps. eps = 0 removes exact zeros only.
  void prune(double eps);

  double coeff_norm1() const;   // sum of |coeff|
  double coeff_norm_inf() const;

  // Copy restricted to (per-block) total degree <= max_deg; the result carries
  // the truncation context.
  MPoly truncated(int max_deg, std::optional<BlockSplit> split = std::nullopt) const;

  bool operator==(const MPoly& o) const {
    return nvars_ == o.nvars_ && terms_ == o.terms_;
  }

 private:
  int nvars_;
  TermMap terms_;
  std::optional<int> max_degree_;
  std::optional<BlockSplit> split_;

  bool respects_truncation(const MultiIndex& alpha) const;
};

// Ring arithmetic. Results inherit the tighter truncation context of the two
// inputs (max_degree = min, treating absent as unbounded); mul re-truncates.
// add/sub/mul drop cancellation debris: coefficients whose magnitude is below
// arith_eps() times the gross magnitude accumulated onto that index. The
// threshold is relative per index, never absolute, so legitimately tiny
// coefficients (e.g. 1/64! from series truncations) are preserved.
MPoly add(const MPoly& a, const MPoly& b);
MPoly sub(const MPoly& a, const MPoly& b);
MPoly mul(const MPoly& a, const MPoly& b);
MPoly scale(const MPoly& a, cxd c);

double arith_eps();  // 1e-14 (relative debris threshold)

inline MPoly operator+(const MPoly& a, const MPoly& b) { return add(a, b); }
inline MPoly operator-(const MPoly& a, const MPoly& b) { return sub(a, b); }
inline MPoly operator*(const MPoly& a, const MPoly& b) { return mul(a, b); }
inline MPoly operator*(const MPoly& a, cxd c) { return scale(a, c); }
inline MPoly operator*(cxd c, const MPoly& a) { return scale(a, c); }

// Evaluation at a point, terms summed in graded-lex order (deterministic).
cxd poly_eval(const MPoly& p, std::span<const cxd> point);
cxd poly_eval(const MPoly& p, const std::vector<cxd>& point);

// Evaluation of sum |coeff| * prod |z_j|^alpha_j: the natural magnitude scale
// of an evaluation at `point`, used for residual thresholds.
double poly_eval_scale(const MPoly& p, std::span<const cxd> point);

// d^order/dz_var^order, exact falling-factorial coefficients.
MPoly derivative(const MPoly& p, int var, int order = 1);

enum class RotateMode {
  ToUpper,  // z_j -> -i z_j : right-half-plane nonvanishing -> upper
  ToRight,  // z_j ->  i z_j : inverse of ToUpper
};

// Variable rotation on a subset of variables (empty subset = all variables).
// Coefficients are multiplied by exact powers of i, so the two modes compose
// to the identity on coefficients exactly.
MPoly rotate_vars(const MPoly& p, RotateMode mode, const std::vector<int>& vars = {});

MPoly conj_coeffs(const MPoly& p);

// Negate the variables of the w-block: p(z, w) -> p(z, -w). Exact sign flips.
MPoly negate_w_block(const MPoly& p, const BlockSplit& split);

std::string to_string(const MPoly& p);  // human-readable, for diagnostics

}  // namespace fockpres

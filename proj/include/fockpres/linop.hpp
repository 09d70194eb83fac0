#pragma once

#include <map>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "fockpres/mpoly.hpp"
#include "fockpres/stability.hpp"

namespace fockpres {

// Finitely presented linear operator C[z_1..z_n] -> C[z_1..z_m].
//
//   Table        - explicit images of monomials; monomials outside the table
//                  map to zero (finite support).
//   Diagonal     - z^alpha -> lambda_alpha z^alpha; missing entries are zero.
//   Diff         - g(d/dz_1, ..., d/dz_n)
//   Mult         - multiplication by g(z)
//   Compose      - outer after inner
//   TensorExtend - base acting on the first base.n_in variables, the extra
//                  trailing variables are spectators.
class LinOp {
 public:
  struct Table {
    int n_in = 0;
    int m_out = 0;
    std::map<MultiIndex, MPoly, GradedLex> entries;
  };
  struct Diagonal {
    int n = 0;
    std::map<MultiIndex, cxd, GradedLex> lambda;
  };
  struct Diff {
    MPoly g;
  };
  struct Mult {
    MPoly g;
  };
  struct Compose {
    std::shared_ptr<const LinOp> outer, inner;
  };
  struct TensorExtend {
    std::shared_ptr<const LinOp> base;
    int extra_vars = 0;
  };
  using Payload = std::variant<Table, Diagonal, Diff, Mult, Compose, TensorExtend>;

  explicit LinOp(Payload p);

  int n_in() const { return n_in_; }
  int m_out() const { return m_out_; }
  const Payload& payload() const { return payload_; }

  static LinOp table(Table t);
  static LinOp diagonal(Diagonal d);
  static LinOp diff(MPoly g);
  static LinOp mult(MPoly g);
  static LinOp compose(LinOp outer, LinOp inner);
  static LinOp tensor_extend(LinOp base, int extra_vars);
  // Identity on n variables represented as Diagonal with lambda = 1 up to
  // total degree max_deg.
  static LinOp identity(int n, int max_deg);

 private:
  Payload payload_;
  int n_in_, m_out_;
};

// T applied to a polynomial. Intermediate results of Compose are exact; only
// the final result is truncated to total degree <= max_deg (no truncation if
// absent).
MPoly apply_op(const LinOp& T, const MPoly& f, std::optional<int> max_deg);

// Symbol of T at truncation degree D: the polynomial
//   G(z, w) = sum_{|alpha| <= D} T(z^alpha) w^alpha / alpha!
// with the z-block also truncated at degree D. Block layout: z first (m_out
// variables), then w (n_in variables).
struct OpSymbol {
  MPoly poly;        // carries the BlockSplit
  BlockSplit split;
  int degree = 0;
};

OpSymbol symbol(const LinOp& T, int D);
// Same, with independent z / w bounds; z unbounded if z_deg is absent
// (possible because every T(z^alpha) is a polynomial).
OpSymbol symbol_ex(const LinOp& T, std::optional<int> z_deg, int w_deg);

enum class LambdaBlock { W, Z };

// Coefficient-box polarization: multiplies the coefficient of w^alpha (or
// z^gamma, for LambdaBlock::Z) by (beta)_alpha = alpha! prod C(beta_i,
// alpha_i). Terms with alpha_i > beta_i are killed. beta's length must match
// the chosen block.
MPoly lambda_beta(const MPoly& f, const MultiIndex& beta,
                  LambdaBlock block = LambdaBlock::W);

// The polarized operator: Lambda_beta composed after T, i.e. the image
// coefficients are rescaled in the output variables. beta length = m_out.
// Returned as a Table over input degrees <= max_deg.
LinOp t_beta(const LinOp& T, const MultiIndex& beta, int max_deg);

// Rank of the coefficient matrix [z^gamma] T(z^alpha) over |alpha|, |gamma|
// <= D (SVD, singular values > tol * largest).
int op_rank(const LinOp& T, int D, double tol = 1e-9);

// Adjoint with respect to the unweighted pairing: block swap plus coefficient
// conjugation, G#(z, w) = conj(G(conj w, conj z)).
OpSymbol formal_adjoint_symbol(const OpSymbol& G);

// Symbol of the adjoint of T : F_alpha -> F_beta with respect to the weighted
// inner products: coefficient at z^delta w^gamma of the result is
// conj(G_gamma,delta) * alpha^delta / beta^gamma. alpha has length n_in(T),
// beta has length m_out(T). Reduces to formal_adjoint_symbol at alpha = beta
// = (1,...,1).
OpSymbol dual_symbol(const OpSymbol& G, const std::vector<double>& alpha,
                     const std::vector<double>& beta);

// Symbol of S after T computed on symbol level: the tensor extension of S
// (spectating T's w-block) applied to G_T. Must agree with
// symbol(Compose{S,T}, D).
OpSymbol compose_symbol(const LinOp& S, const LinOp& T, int D);

// Rebuild a Table operator from a symbol: T(z^alpha) = alpha! * (coefficient
// of w^alpha in G as a polynomial in z).
LinOp symbol_to_table(const OpSymbol& G);

enum class PreserverField { Complex, Real };

// Stability-preservation report at truncation degree D.
//
//   Degenerate   - coefficient rank <= 1 (complex) or <= 2 (real); carries
//                  the factored image polynomials and their own stability
//                  verdicts. For rank 2 the factor pair (Q, R) comes from the
//                  SVD and Q + iR is checked probabilistically; the pair is
//                  one representative of a non-unique factorization.
//   SymbolStable - verdict of the polarized-symbol stability test, with the
//                  w-sign under which it was run (Minus = G(z,-w)). A
//                  CertifiedNo here is a symbol-level refutation for which no
//                  input counterexample was found.
//   NotPreserver - explicit stable input mapped to an unstable output.
struct PreserverReport {
  enum class Kind { Degenerate, SymbolStable, NotPreserver };
  enum class Sign { Plus, Minus };
  Kind kind = Kind::SymbolStable;
  int rank = -1;
  std::vector<MPoly> factors;
  std::vector<Verdict> factor_verdicts;
  Sign sign = Sign::Minus;
  Verdict symbol_verdict;
  MPoly witness_input, witness_output;
  Verdict witness_verdict;
  long trials_used = 0;
  std::uint64_t seed = 0;
  std::string notes;

  bool refuted() const {
    return kind == Kind::NotPreserver ||
           (kind == Kind::SymbolStable && symbol_verdict.certified_no());
  }
};

// Classifies T as a stability preserver at truncation degree D. The symbol
// test runs is_stable_multi on each coefficient-box polarization Lambda_beta
// of G(z,-w) (and of G(z,w) as an alternative for the real field), beta
// ranging over the box {1..D}^n_in; `trials` is the total trial budget,
// split across polarizations. On symbol failure a counterexample search
// applies T to a deterministic battery plus random stable products with roots
// in the closed lower half-plane and checks each output.
PreserverReport classify_preserver(const LinOp& T, PreserverField field, int D,
                                   long trials, std::uint64_t seed);

// Aggregated polarized-symbol stability check; exposed for composition tests.
Verdict symbol_polarization_check(const OpSymbol& G, bool negate_w, int D,
                                  long trials, std::uint64_t seed,
                                  double tol = kDefaultTol);

}  // namespace fockpres

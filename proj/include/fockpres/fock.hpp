#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fockpres/linop.hpp"
#include "fockpres/mpoly.hpp"

namespace fockpres {

// Coordinate weights of a weighted Hilbert space of entire functions with
// ||z^alpha||^2 = alpha! / beta^alpha. All entries must be > 0.
using Weight = std::vector<double>;

void validate_weight(const Weight& beta, int nvars, const char* who);
bool weight_leq(const Weight& a, const Weight& b);       // a_j <= b_j all j
bool weight_strictly_less(const Weight& a, const Weight& b);  // a_j < b_j all j

// prod_j beta_j^{alpha_j} by repeated multiplication; the canonical
// denominator of every norm formula below, shared so that independently
// computed norms agree bit-for-bit.
double weight_pow(const Weight& beta, const MultiIndex& alpha);

// ||f||^2 = sum alpha!/beta^alpha |a_alpha|^2 over the terms of f.
double fock_norm_sq(const MPoly& f, const Weight& beta);

// <f, g> = sum alpha!/beta^alpha a_alpha conj(b_alpha); conjugate-linear in g.
cxd fock_inner(const MPoly& f, const MPoly& g, const Weight& beta);

// f evaluated through the pairing with the reproducing kernel
// exp(sum beta_j z_j conj(w_j)) truncated at deg f. The weight factors cancel
// algebraically against the kernel coefficients, and the implementation
// performs that cancellation, so this equals poly_eval(f, w) exactly.
cxd reproducing_eval(const MPoly& f, const std::vector<cxd>& w, const Weight& beta);

// Monomial pairing against the Gaussian measure with E|w_j|^2 = 1/alpha_j:
// int w^gamma conj(w)^delta = [gamma == delta] * gamma! / alpha^gamma.
cxd gaussian_pair(const MultiIndex& gamma, const MultiIndex& delta, const Weight& alpha);

struct ExactMonomial {};
struct MonteCarlo {
  long samples = 100000;
  std::uint64_t seed = 42;
};
using GaussQuad = std::variant<ExactMonomial, MonteCarlo>;

struct IntegralRepResult {
  MPoly value;
  std::string mode;  // "exact-monomial" | "monte-carlo"
  long samples = 0;
  double max_stderr = 0.0;  // Monte Carlo only
  std::map<MultiIndex, double, GradedLex> coeff_stderr;
  std::string warning;
};

// T(f) through the Gaussian integral representation
//   T(f)(z) = int f(w) G_T(z, alpha .* conj w) dGauss_alpha(w).
// ExactMonomial integrates term-by-term with gaussian_pair (must reproduce
// apply_op); MonteCarlo averages over samples of the Gaussian and reports a
// per-coefficient standard error.
IntegralRepResult apply_integral_rep(const LinOp& T, const MPoly& f,
                                     const Weight& alpha, const GaussQuad& quad,
                                     int D);

struct GBoundReport {
  double lhs = 0.0;  // ||T f||_beta
  double rhs = 0.0;  // ||G_T(z, alpha .* w)||_{beta (+) alpha} * ||f||_alpha
  bool holds = false;
  int truncation_degree = 0;
  std::string note;  // flags e.g. a non-convergent kernel at beta_j alpha_j <= 1
};

// Checks ||T f||_beta <= ||G(z, alpha .* w)||_{beta+alpha-block} ||f||_alpha
// with the symbol truncated high enough to cover deg f and deg T(f); at that
// truncation the inequality is exact mathematics (Cauchy-Schwarz on the
// pairing), so `holds` failing beyond roundoff indicates a bug, not noise.
GBoundReport verify_g_bound(const LinOp& T, const MPoly& f, const Weight& alpha,
                            const Weight& beta, int D);

// c * exp(z^T A z) with A real symmetric. The quadratic form uses no 1/2:
// scalar A = (a) means exp(a z^2).
struct GaussianForm {
  Eigen::MatrixXd matrix;
  double scale = 1.0;
};

// M_alpha(g) = sup_z exp(-sum alpha_j |z_j|^2 / 2) |g(z)|.
//
// Polynomial g: the supremum of the radial majorant sum |c_kappa| r^kappa
// (tight when the term phases can align, an upper bound otherwise), via a
// radial grid plus golden-section refinement.
//
// GaussianForm (A entrywise >= 0): finite iff x^T A x <= x^T diag(alpha/2) x,
// i.e. || D^{-1/2} A D^{-1/2} || <= 1 with D = diag(alpha/2); then the sup is
// |scale| (attained toward z = 0). +infinity otherwise.
double m_alpha(const MPoly& g, const Weight& alpha);
double m_alpha(const GaussianForm& g, const Weight& alpha);

// Membership of exp(c z^2 / 2) in the 1-variable space with weight gamma:
// true iff gamma > c (the norm series sum C(2k,k) (c/(2 gamma))^{2k} has ratio
// (c/gamma)^2 and diverges like sum k^{-1/2} on the boundary).
bool gaussian_fock_membership(double c, double gamma);

struct EjMembership {
  bool member = false;
  std::optional<Weight> alpha;  // witness weight with spectral norm <= 1
  double boundary_norm = 0.0;   // || D^{-1/2} A D^{-1/2} || at alpha -> beta/2
  std::string note;
};

// Membership of exp(z^T A z), A symmetric entrywise >= 0, in the space with
// weight beta: holds iff some alpha strictly inside (0, beta/2) satisfies
// || diag(alpha)^{-1/2} A diag(alpha)^{-1/2} || <= 1. The norm is entrywise
// monotone in alpha, so the corner alpha -> beta/2 decides; the returned
// witness comes from a log-grid search plus refinement toward the corner.
EjMembership ej_membership(const Eigen::MatrixXd& A, const Weight& beta);

}  // namespace fockpres

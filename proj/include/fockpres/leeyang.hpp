#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fockpres/fock.hpp"
#include "fockpres/mpoly.hpp"
#include "fockpres/stability.hpp"

namespace fockpres {

// One-dimensional site measures.
struct TwoAtom {
  double a = 1.0, b = -1.0;  // (delta_a + delta_b) / 2
};
struct Interval {
  double a = -1.0, b = 1.0;  // Lebesgue on [a, b], a < b
};
struct GaussianMeasure {
  double b = 1.0;  // density exp(-b x^2 / 2), b > 0
};
using Measure1D = std::variant<TwoAtom, Interval, GaussianMeasure>;

// Closed-form Laplace transform of a Measure1D: a product of atoms
//   Const(c), ExpLin(c) = e^{cz}, Cosh(c) = cosh(cz),
//   SinhOverZ(c) = sinh(cz)/z, ExpQuad(c) = e^{c z^2},
// plus its series truncation. The truncation's coefficients are the series
// expansion of the closed form.
struct TransformAtom {
  enum class Kind { Const, ExpLin, Cosh, SinhOverZ, ExpQuad };
  Kind kind;
  double c;
};

struct Transform {
  std::vector<TransformAtom> atoms;
  MPoly truncation;  // univariate, degree <= requested D
};

cxd transform_eval(const Transform& t, cxd z);
cxd transform_eval(const std::vector<TransformAtom>& atoms, cxd z);

// transform(TwoAtom{a,b})  = e^{(a+b)z/2} cosh((a-b)z/2)
// transform(Interval{a,b}) = (2/z) e^{(a+b)z/2} sinh((b-a)z/2)   (= int_a^b e^{zx} dx)
// transform(Gaussian{b})   = sqrt(2 pi / b) e^{z^2/(2b)}
Transform transform(const Measure1D& mu, int D);

struct SpinModel {
  Eigen::MatrixXd J;              // symmetric, entrywise >= 0
  std::vector<Measure1D> sites;   // length n == J.rows(), n <= 20
};

void validate_spin_model(const SpinModel& m, bool require_two_atom_pm1);

// Exact 2^n enumeration of the two-atom +-1 model:
//   2^{-n} sum_sigma exp(sigma^T J sigma) prod_j u_j^{sigma_j + 1}
// returned as a polynomial in u (negative powers cleared by prod u_j; all
// coefficients positive). Configurations are accumulated in a fixed order, in
// parallel blocks when FOCK_PRESERVE_THREADS allows, combined deterministically.
MPoly ising_partition(const SpinModel& model);

struct FugacityZeros {
  DensePoly poly;                       // the restricted cleared polynomial in u
  std::vector<cxd> zeros;
  double max_circle_deviation = 0.0;    // max | |u| - 1 |
};

// Restriction w_j = d_j w along a positive integer direction (empty = all
// ones): substitutes u_j = U^{d_j} into the cleared partition polynomial and
// returns its roots in U = e^{g w} (g = gcd of the direction, divided out).
FugacityZeros fugacity_zeros(const SpinModel& model, std::vector<int> direction = {});

// The pair interaction applied as a differential operator: exp(sum A_ij d_i d_j)
// truncated to the degree headroom of mu0_hat, applied to mu0_hat (the
// transform of the product measure without interaction), truncated at D.
// mu0_hat must be given at degree >= D; the extra degrees fund the operator
// truncation.
MPoly ej_convolve(const Eigen::MatrixXd& A, const MPoly& mu0_hat, int D);

struct GlsHypothesisError : std::invalid_argument {
  std::string hypothesis;  // "alpha_plus_gamma_leq_beta" | "m_alpha_finite" | ...
  GlsHypothesisError(std::string hyp, const std::string& msg)
      : std::invalid_argument(msg), hypothesis(std::move(hyp)) {}
};

struct GlsResult {
  MPoly psi_hat;
  Verdict ly_verdict;
  double m_alpha_value = 0.0;
  double product_factor = 0.0;    // prod (1 + alpha_j / gamma_j)
  double op_norm_sq_bound = 0.0;  // product_factor * m_alpha^2
};

// The composed functional psi(f) = phi(f g) for a functional phi given by its
// transform truncation phi_hat (so phi(z^delta) = delta! [w^delta] phi_hat):
//   psi_hat(w) = phi(g(z) e^{z.w}),
// computed at truncation D. Hypotheses checked by name: alpha + gamma <= beta
// coordinate-wise and M_alpha(g) < infinity. Reports the multiplication-
// operator norm bound prod(1 + alpha_j/gamma_j) * M_alpha(g)^2 and the
// right-half-plane verdict of psi_hat.
GlsResult gls_compose(const MPoly& phi_hat,
                      const std::variant<MPoly, GaussianForm>& g,
                      const Weight& alpha, const Weight& gamma,
                      const Weight& beta, int D, long trials,
                      std::uint64_t seed, double max_radius = kInfRadius);

// Thread cap honored by parallel loops: min(hardware, FOCK_PRESERVE_THREADS).
int preserve_thread_cap();

}  // namespace fockpres

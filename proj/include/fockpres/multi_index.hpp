#pragma once

#include <cstdint>
#include <vector>

namespace fockpres {

// Exponent vector of a monomial. All entries are >= 0; the length is the
// number of variables of the polynomial the index belongs to.
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& a);

// Graded lexicographic order: compare total degree first, then lex.
// Used as the canonical term order everywhere (map iteration, JSON output).
struct GradedLex {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

bool leq_all(const MultiIndex& a, const MultiIndex& b);  // a_i <= b_i for all i

// Generalized falling product (beta)_alpha = alpha! * prod_i C(beta_i, alpha_i).
// Zero as soon as some alpha_i > beta_i. beta and alpha must have equal length.
double pbinom(const MultiIndex& beta, const MultiIndex& alpha);

double factorial(int n);                  // n! as double, n >= 0
double multi_factorial(const MultiIndex& a);  // prod alpha_i!
double binomial(int n, int k);            // C(n,k), 0 when k < 0 or k > n

// (n)_k falling factorial n*(n-1)*...*(n-k+1) for integer arguments, exact in
// double as long as the product stays below 2^53-ish; used for derivative
// coefficients and factorial ratios that must not round-trip a division.
double falling(int n, int k);

// All multi-indices in `nvars` variables with total degree <= max_deg,
// in graded lexicographic order.
std::vector<MultiIndex> indices_up_to(int nvars, int max_deg);

}  // namespace fockpres

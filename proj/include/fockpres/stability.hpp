#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fockpres/mpoly.hpp"
#include "fockpres/roots.hpp"

namespace fockpres {

enum class Region {
  UpperHalfPlane,   // stability: no zero with all Im z_j > 0
  RightHalfPlane,   // no zero with all Re z_j > 0
  RealAxis,         // univariate only: all roots within tol of the real axis
};

// Outcome of a stability check.
//   CertifiedNo  - carries a re-checkable witness: strictly inside the open
//                  region (margin > tol) and |p(witness)| below the residual
//                  threshold at that point's evaluation scale.
//   ProbablyYes  - survived `trials` randomized line restrictions at `seed`.
//   CertifiedYes - univariate (root-based) or structurally exact cases only.
struct Verdict {
  enum class Outcome { CertifiedNo, ProbablyYes, CertifiedYes };
  Outcome outcome = Outcome::ProbablyYes;
  std::vector<cxd> witness;  // CertifiedNo
  cxd value{};               // p(witness)
  long trials = 0;           // ProbablyYes
  std::uint64_t seed = 0;    // ProbablyYes
  std::string method;        // CertifiedYes (and informational otherwise)
  std::string notes;         // e.g. roots ignored outside the validated radius

  bool certified_no() const { return outcome == Outcome::CertifiedNo; }
  bool certified_yes() const { return outcome == Outcome::CertifiedYes; }
  bool non_refuted() const { return outcome != Outcome::CertifiedNo; }
};

inline constexpr double kDefaultTol = 1e-9;
inline constexpr double kInfRadius = std::numeric_limits<double>::infinity();

// Residual threshold used to accept a witness w: 1e-8 * (1 + evaluation scale
// of p at w). The scale term keeps the test meaningful for witnesses far from
// the unit polydisc.
double residual_threshold(const MPoly& p, const std::vector<cxd>& w);

// Univariate membership check against `region`, root-based, hence certified.
// RealAxis requires (numerically) real coefficients and rejects others with an
// explanatory error. Roots with |root| > max_radius are ignored and noted:
// callers handing in truncations of entire functions pass the radius on which
// the truncation is trusted.
Verdict is_stable_uni(const MPoly& p, Region region, double tol = kDefaultTol,
                      double max_radius = kInfRadius);

// Multivariate stability via random line restrictions: P is stable iff
// t -> P(a + t v) is stable for every real a and positive v, so each trial
// draws a (heavy-tailed) and v (log-uniform over [1e-3, 1e3]) and certifies
// the restriction by roots. A verified restriction root in the open region
// maps back to the witness z = a + t* v. Trials use substreams of `seed`, so
// the verdict is deterministic; the first failing trial index wins.
// Univariate input delegates to is_stable_uni (certified).
Verdict is_stable_multi(const MPoly& p, Region region, long trials,
                        std::uint64_t seed, double tol = kDefaultTol,
                        double max_radius = kInfRadius);

// f restricted to the coefficient box of (1+z_1)^k...(1+z_n)^k: multiplies
// the coefficient of z^gamma by (k)_gamma / k^gamma (coordinate-wise k). The
// scalings converge to 1 from below as k grows; for the truncated exponential
// the result is exactly (1 + z/k)^k.
MPoly lp_approximant(const MPoly& f, int k);

// Nonvanishing on the open right-half-plane polyproduct: rotates to the upper
// half-plane setting and runs is_stable_multi. Witnesses are rotated back.
Verdict ly_check(const MPoly& f, long trials, std::uint64_t seed,
                 double tol = kDefaultTol, double max_radius = kInfRadius);

}  // namespace fockpres

#pragma once

#include <complex>
#include <vector>

#include "fockpres/mpoly.hpp"

namespace fockpres {

// A group of computed eigenvalue approximations believed to form one root of
// multiplicity `multiplicity`. For a validated cluster the center has been
// refined (Newton on the (m-1)-st derivative, which has a simple root at an
// m-fold root) and the low-order derivatives have been checked to vanish at
// the evaluation-noise scale.
//
// Why clusters: a root of multiplicity m is resolved by eigenvalue methods
// only up to ~eps^(1/m), e.g. ~0.57 relative for m = 64. Individual
// approximations are then useless, but the cluster mean is accurate (the sum
// of all eigenvalues is a trace, exact up to roundoff) and derivative-based
// refinement restores full accuracy.
struct RootCluster {
  std::complex<double> center;
  int multiplicity = 1;
  double radius = 0.0;         // max distance of a member from the center
  double dist_estimate = 0.0;  // multiplicity-aware distance-to-root estimate
  bool validated = false;
  // Honest bound on |center - true root| for a validated cluster: the
  // evaluation-noise floor of the Newton target divided by its derivative at
  // the center (a center cannot be located more precisely than the noise in
  // the polynomial it was refined on). Infinity when not validated.
  double center_uncertainty = 0.0;
  std::vector<std::complex<double>> members;
};

// Dense univariate polynomial, coefficients ascending by degree.
using DensePoly = std::vector<std::complex<double>>;

// All deg(p) roots (with multiplicity, as separate entries) of a univariate
// polynomial: balanced companion-matrix eigenvalues after Fujiwara rescaling,
// plus a couple of guarded Newton steps per root. Throws std::invalid_argument
// on the zero polynomial; a nonzero constant has no roots.
std::vector<std::complex<double>> univariate_roots(const MPoly& p);
std::vector<std::complex<double>> dense_roots(const DensePoly& coeffs);

// Root clusters of a univariate polynomial; see RootCluster.
std::vector<RootCluster> clustered_roots(const MPoly& p);
std::vector<RootCluster> dense_clustered_roots(const DensePoly& coeffs);

// Value and magnitude scale sum |c_k| |z|^k of a dense polynomial at z.
// |value| <= ~eps * scale means "zero at working precision at this point".
struct EvalWithScale {
  std::complex<double> value;
  double scale;
};
EvalWithScale dense_eval(const DensePoly& coeffs, std::complex<double> z);

DensePoly dense_derivative(const DensePoly& coeffs);
DensePoly to_dense(const MPoly& p);  // p must be univariate

// min over m of (m! |p(z)| / |p^(m)(z)|)^(1/m): a multiplicity-aware estimate
// of the distance from z to the nearest root. Used to reject witness
// candidates whose region margin is smaller than their own uncertainty.
double root_distance_estimate(const DensePoly& coeffs, std::complex<double> z);

// Radius of a disk around z guaranteed to contain at least one root:
// deg * |p(z)| / |p'(z)| (from p'/p = sum 1/(z - r_j)), inflated by the
// evaluation-noise bounds of both values. Infinity when p'(z) is buried in
// its own noise. A refutation witness must have its region margin exceed
// this radius, otherwise the nearest actual root may sit outside the region.
double certified_root_radius(const DensePoly& coeffs, std::complex<double> z);

// As above, but for a polynomial whose coefficients are themselves uncertain:
// the true coefficients satisfy |c_true_k - c_k| <= coeff_eps * gross_k.
// Needed when the polynomial was constructed by floating-point arithmetic
// with heavy cancellation (gross_k = the absolute-value mass that produced
// coefficient k): the computed polynomial's exact roots can then sit a
// sqrt(cancellation)-sized distance from the true object's roots, which no
// evaluation-noise argument at fixed coefficients can see.
double certified_root_radius_perturbed(const DensePoly& coeffs,
                                       const DensePoly& gross, double coeff_eps,
                                       std::complex<double> z);

}  // namespace fockpres

#include "fockpres/roots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <set>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fockpres {

using cxd = std::complex<double>;

DensePoly to_dense(const MPoly& p) {
  if (p.nvars() != 1)
    throw std::invalid_argument("to_dense: polynomial is not univariate");
  DensePoly c(static_cast<std::size_t>(p.total_degree()) + 1, cxd{});
  for (const auto& [a, v] : p.terms()) c[static_cast<std::size_t>(a[0])] = v;
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  return c;
}

EvalWithScale dense_eval(const DensePoly& coeffs, cxd z) {
  // Horner for the value; the scale accumulates |c_k| |z|^k directly.
  cxd v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * z + *it;
  double az = std::abs(z), s = 0.0, zp = 1.0;
  for (const cxd& c : coeffs) {
    s += std::abs(c) * zp;
    zp *= az;
  }
  return {v, s};
}

DensePoly dense_derivative(const DensePoly& coeffs) {
  if (coeffs.size() <= 1) return {cxd{}};
  DensePoly d(coeffs.size() - 1);
  for (std::size_t k = 1; k < coeffs.size(); ++k)
    d[k - 1] = coeffs[k] * static_cast<double>(k);
  return d;
}

namespace {

// Roundoff-noise level of dense_eval at a point with the given scale: below
// this, a computed value is indistinguishable from zero and must not be
// trusted (e.g. a Horner evaluation that happens to cancel to exactly 0.0
// inside the noise blob of a multiple root says nothing about root location).
double eval_noise(std::size_t ncoeffs, double scale) {
  return (32.0 + 2.0 * static_cast<double>(ncoeffs)) *
         std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
}

// Strips trailing (near-)zero leading coefficients relative to the largest
// coefficient, so that e.g. a cancelled top coefficient of size 1e-17 does not
// create a spurious huge root. Exact zeros are always stripped.
DensePoly normalized(DensePoly c) {
  double top = 0.0;
  for (const cxd& v : c) top = std::max(top, std::abs(v));
  if (top == 0.0) throw std::invalid_argument("roots: zero polynomial");
  while (c.size() > 1 && std::abs(c.back()) <= 1e-300) c.pop_back();
  return c;
}

// One guarded Newton step: accepted only if it does not increase |p|.
cxd newton_polish(const DensePoly& p, const DensePoly& dp, cxd z, int steps) {
  auto [v, sc] = dense_eval(p, z);
  double av = std::abs(v);
  for (int s = 0; s < steps; ++s) {
    cxd d = dense_eval(dp, z).value;
    if (d == 0.0) break;
    cxd z2 = z - v / d;
    auto [v2, sc2] = dense_eval(p, z2);
    if (std::abs(v2) >= av) break;
    z = z2;
    v = v2;
    av = std::abs(v2);
  }
  return z;
}

}  // namespace

std::vector<cxd> dense_roots(const DensePoly& coeffs_in) {
  DensePoly c = normalized(coeffs_in);
  const int n = static_cast<int>(c.size()) - 1;  // degree
  if (n == 0) return {};
  if (n == 1) return {-c[0] / c[1]};

  // Monic coefficients a_k = c_k / c_n, k = 0..n-1.
  std::vector<cxd> a(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) a[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k)] / c[static_cast<std::size_t>(n)];

  // Fujiwara-style rescaling in log2 space: choose s with
  // log2 s = max_k (log2 |a_{n-k}|) / k so the scaled monic polynomial has
  // coefficients of modulus <= 1 (roots of modulus <= 2). Working in log2
  // space avoids overflow for extreme coefficient ranges.
  double log2s = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= n; ++k) {
    double m = std::abs(a[static_cast<std::size_t>(n - k)]);
    if (m > 0.0) log2s = std::max(log2s, std::log2(m) / k);
  }
  if (!std::isfinite(log2s)) log2s = 0.0;

  // Companion matrix of the scaled monic polynomial q(y) = p(s*y) / (c_n s^n):
  // coefficient of y^k is a_k * s^(k-n)  => b_k = a_k * 2^(-(n-k) log2 s).
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double l2 = std::log2(std::max(std::abs(a[static_cast<std::size_t>(k)]),
                                   std::numeric_limits<double>::min())) -
                (n - k) * log2s;
    cxd b = a[static_cast<std::size_t>(k)] == 0.0
                ? cxd{}
                : a[static_cast<std::size_t>(k)] /
                      std::abs(a[static_cast<std::size_t>(k)]) * std::exp2(l2);
    C(k, n - 1) = -b;
  }
  for (int k = 1; k < n; ++k) C(k, k - 1) = 1.0;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("roots: eigenvalue iteration failed to converge");

  const double s = std::exp2(log2s);
  DensePoly dp = dense_derivative(c);
  std::vector<cxd> roots;
  roots.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    cxd z = es.eigenvalues()(i) * s;
    roots.push_back(newton_polish(c, dp, z, 3));
  }
  std::sort(roots.begin(), roots.end(), [](cxd x, cxd y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return roots;
}

std::vector<cxd> univariate_roots(const MPoly& p) { return dense_roots(to_dense(p)); }

double root_distance_estimate(const DensePoly& coeffs, cxd z) {
  DensePoly c = normalized(coeffs);
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 0) return std::numeric_limits<double>::infinity();
  auto [pv, pscale] = dense_eval(c, z);
  // Floor |p(z)| at its own roundoff noise: a value below the noise level
  // (including an exact 0.0) only bounds the distance as if it WERE the
  // noise level, never tighter.
  double pz = std::max(std::abs(pv), eval_noise(c.size(), pscale));
  double best = std::numeric_limits<double>::infinity();
  DensePoly d = c;
  double mfact = 1.0;
  for (int m = 1; m <= n; ++m) {
    d = dense_derivative(d);
    mfact *= m;
    auto [dv, dscale] = dense_eval(d, z);
    double dm = std::abs(dv);
    // A derivative buried in its own noise gives no usable bound.
    if (dm > 4.0 * eval_noise(d.size(), dscale))
      best = std::min(best, std::pow(mfact * pz / dm, 1.0 / m));
  }
  return best;
}

double certified_root_radius(const DensePoly& coeffs, cxd z) {
  return certified_root_radius_perturbed(coeffs, {}, 0.0, z);
}

double certified_root_radius_perturbed(const DensePoly& coeffs,
                                       const DensePoly& gross, double coeff_eps,
                                       cxd z) {
  DensePoly c = normalized(coeffs);
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 0) return std::numeric_limits<double>::infinity();
  auto [pv, pscale] = dense_eval(c, z);
  DensePoly d = dense_derivative(c);
  auto [dv, dscale] = dense_eval(d, z);
  double num = std::abs(pv) + eval_noise(c.size(), pscale);
  double den = std::abs(dv) - 4.0 * eval_noise(d.size(), dscale);
  if (coeff_eps > 0.0 && !gross.empty()) {
    // |p_true(z) - p(z)| <= coeff_eps * sum_k gross_k |z|^k, and likewise for
    // the derivative with weights k. gross may be longer than coeffs (the
    // caller may have stripped small leading terms); extra entries only make
    // the bound more conservative.
    double az = std::abs(z), zp = 1.0, gp = 0.0, gdp = 0.0;
    for (std::size_t k = 0; k < gross.size(); ++k) {
      double g = std::abs(gross[k]);
      gp += g * zp;
      if (k + 1 < gross.size())
        gdp += std::abs(gross[k + 1]) * (static_cast<double>(k) + 1.0) * zp;
      zp *= az;
    }
    num += coeff_eps * gp;
    den -= coeff_eps * gdp;
  }
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return n * num / den;
}

namespace {

// Single-linkage clustering of points at threshold tau (relative to scale).
std::vector<std::vector<int>> link_clusters(const std::vector<cxd>& pts,
                                            const std::vector<char>& free_pt,
                                            double tau) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    if (!free_pt[static_cast<std::size_t>(i)] || comp[static_cast<std::size_t>(i)] >= 0) continue;
    // BFS over the "distance <= tau" graph restricted to free points.
    std::vector<int> stack{i}, members;
    comp[static_cast<std::size_t>(i)] = static_cast<int>(groups.size());
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      members.push_back(u);
      for (int v = 0; v < n; ++v) {
        if (!free_pt[static_cast<std::size_t>(v)] || comp[static_cast<std::size_t>(v)] >= 0) continue;
        if (std::abs(pts[static_cast<std::size_t>(u)] - pts[static_cast<std::size_t>(v)]) <= tau) {
          comp[static_cast<std::size_t>(v)] = comp[static_cast<std::size_t>(i)];
          stack.push_back(v);
        }
      }
    }
    groups.push_back(std::move(members));
  }
  return groups;
}

// Validation that `center` approximates a root of multiplicity m:
//  - Newton on p^(m-1) (simple root there) converges; the converged point
//    replaces the center;
//  - the refined position is trustworthy: p^(m) carries real signal at the
//    center (is not itself buried in roundoff noise), and the implied
//    positional uncertainty delta = noise(p^(m-1)) / |p^(m)| separates the
//    cluster from every computed root outside it. The separation test is the
//    eigenvalue-resolution condition in disguise: without it, a point
//    anywhere inside the eps^(1/m) noise blob of an m-fold root can
//    "converge" off a fluke exact-zero evaluation and masquerade as a
//    precisely-located simple root;
//  - p, p', .., p^(m-1) vanish at the evaluation-noise scale at the center,
//    so the claimed multiplicity cannot silently absorb a resolvable pair of
//    distinct roots (whose p-value between them sits far above noise).
// Returns (validated, refined center, distance estimate, center uncertainty).
struct Validation {
  bool ok = false;
  cxd center;
  double dist_estimate = 0.0;
  double center_uncertainty = std::numeric_limits<double>::infinity();
};

Validation validate_cluster(const std::vector<DensePoly>& derivs, cxd center, int m,
                            const std::vector<cxd>& all_pts,
                            const std::vector<int>& cluster_indices) {
  Validation out;
  out.center = center;
  const DensePoly& p = derivs[0];
  const int n = static_cast<int>(p.size()) - 1;
  if (m > n) return out;

  // Newton refinement on q = p^(m-1). Converged means the step has dropped
  // below the positional noise floor of the iteration itself: either the
  // fixed 1e-12 relative threshold or the uncertainty noise(q)/|q'| implied
  // by evaluation roundoff, whichever is larger. An ill-conditioned root
  // whose noise blob exceeds 1e-12*|z| never beats the fixed threshold - it
  // just bounces inside the blob - so without the noise term the loop burns
  // its entire budget and reports failure for a perfectly converged point.
  // Quadratic convergence reaches the blob in ~10 steps from an eigenvalue
  // start; when q itself has a multiple root the iteration is linear, but
  // those clusters are rejected by the derivative-signal gate below, so a
  // small budget loses nothing.
  const DensePoly& q = derivs[static_cast<std::size_t>(m - 1)];
  const DensePoly& dq = derivs[static_cast<std::size_t>(m)];
  cxd z = center;
  bool converged = false;
  for (int it = 0; it < 64; ++it) {
    auto [qv, qscale] = dense_eval(q, z);
    cxd dv = dense_eval(dq, z).value;
    if (dv == 0.0) break;
    cxd step = qv / dv;
    z -= step;
    double floor = std::max(1e-12 * std::max(1.0, std::abs(z)),
                            2.0 * eval_noise(q.size(), qscale) / std::abs(dv));
    if (std::abs(step) <= floor) {
      converged = true;
      break;
    }
  }
  if (!converged) return out;

  auto [qv, qscale] = dense_eval(q, z);
  auto [dv, dscale] = dense_eval(dq, z);
  (void)qv;
  (void)qscale;
  if (std::abs(dv) <= 4.0 * eval_noise(dq.size(), dscale)) return out;

  // Certified positional uncertainty: a disk around z guaranteed to contain a
  // root of q. The first-order estimate noise(q)/|q'| is not used here - at
  // the edge of the noise blob of a multiple root, q' still carries signal
  // while the nearest actual root sits a whole blob radius away, so the
  // first-order number understates the error badly. The certified radius
  // inflates to the blob scale in exactly that situation.
  double rq = certified_root_radius(q, z);
  if (!std::isfinite(rq)) return out;

  // Separation: the certified disk must resolve this cluster from every
  // computed root outside it, otherwise the disk's root may be somebody
  // else's and the multiplicity claim is unsupported.
  std::vector<char> inside(all_pts.size(), 0);
  for (int i : cluster_indices) inside[static_cast<std::size_t>(i)] = 1;
  for (std::size_t i = 0; i < all_pts.size(); ++i)
    if (!inside[i] && rq > 0.25 * std::abs(z - all_pts[i])) return out;
  out.center = z;

  // All derivatives of order < m must vanish at the noise scale at z.
  for (int j = 0; j < m; ++j) {
    auto [v, scale] = dense_eval(derivs[static_cast<std::size_t>(j)], z);
    if (std::abs(v) > 256.0 * eval_noise(derivs[static_cast<std::size_t>(j)].size(), scale))
      return out;
  }
  out.ok = true;
  out.dist_estimate = root_distance_estimate(p, z);
  out.center_uncertainty = std::max(rq, 1e-12 * std::max(1.0, std::abs(z)));
  return out;
}

}  // namespace

std::vector<RootCluster> dense_clustered_roots(const DensePoly& coeffs) {
  DensePoly c = normalized(coeffs);
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<RootCluster> out;
  if (n == 0) return out;

  std::vector<cxd> pts = dense_roots(c);

  // Precompute all derivatives once.
  std::vector<DensePoly> derivs;
  derivs.push_back(c);
  for (int j = 0; j < n; ++j) derivs.push_back(dense_derivative(derivs.back()));

  double scale = 0.0;
  for (cxd z : pts) scale = std::max(scale, std::abs(z));
  scale = std::max(scale, 1.0);

  // Ladder of linkage thresholds from tight to loose. At each level, any
  // cluster whose mean validates at its size is frozen (removed from the free
  // pool); looser levels only see what remains. Tight levels catch simple and
  // mildly multiple roots with accurate means; loose levels are needed for
  // high multiplicity, where eigenvalue scatter is O(eps^(1/m)).
  static const double kTaus[] = {1e-13, 1e-10, 1e-8, 1e-6, 1e-4,
                                 1e-3,  1e-2,  0.05, 0.1,  0.2,
                                 0.4,   0.8};
  std::vector<char> free_pt(pts.size(), 1);
  // Consecutive ladder levels often produce the same grouping; a membership
  // list that already failed validation fails again (the mean and test are
  // functions of membership only), so skip exact repeats.
  std::set<std::vector<int>> failed;
  for (double tau_rel : kTaus) {
    double tau = tau_rel * scale;
    auto groups = link_clusters(pts, free_pt, tau);
    for (auto& g : groups) {
      std::sort(g.begin(), g.end());
      if (failed.count(g)) continue;
      cxd mean = 0.0;
      for (int i : g) mean += pts[static_cast<std::size_t>(i)];
      mean /= static_cast<double>(g.size());
      Validation v = validate_cluster(derivs, mean, static_cast<int>(g.size()), pts, g);
      if (!v.ok) {
        failed.insert(g);
        continue;
      }
      RootCluster rc;
      rc.center = v.center;
      rc.multiplicity = static_cast<int>(g.size());
      rc.validated = true;
      rc.dist_estimate = v.dist_estimate;
      rc.center_uncertainty = v.center_uncertainty;
      for (int i : g) {
        rc.members.push_back(pts[static_cast<std::size_t>(i)]);
        rc.radius = std::max(rc.radius, std::abs(pts[static_cast<std::size_t>(i)] - v.center));
        free_pt[static_cast<std::size_t>(i)] = 0;
      }
      out.push_back(std::move(rc));
    }
  }

  // Absorption pass. A high-multiplicity root scatters its eigenvalues over a
  // huge ring and the eigensolver may throw a few of them far outside every
  // linkage threshold; the ladder then freezes an undercounted cluster and
  // the strays stay free forever (frozen members leave the linkage pool).
  // Undercounted claims m'' < true m leave p^(m''-1) with a multiple root, so
  // only the full count validates: try each validated cluster together with
  // all remaining free points at the combined multiplicity (then with single
  // free points), re-running the same validation. The gates are evaluated at
  // the refined center, so which eigenvalue points are bookkept as members
  // does not weaken the claim.
  {
    std::vector<int> free_idx;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (free_pt[i]) free_idx.push_back(static_cast<int>(i));
    if (!free_idx.empty() && !out.empty()) {
      std::vector<std::size_t> order(out.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out[a].multiplicity > out[b].multiplicity;
      });
      auto try_absorb = [&](RootCluster& rc, const std::vector<int>& extra) {
        // membership list for the separation test: this cluster's points plus
        // the candidates; points of other clusters stay outside.
        std::vector<int> g;
        for (cxd m : rc.members)
          for (std::size_t i = 0; i < pts.size(); ++i)
            if (pts[i] == m) { g.push_back(static_cast<int>(i)); break; }
        for (int i : extra) g.push_back(i);
        int m2 = rc.multiplicity + static_cast<int>(extra.size());
        Validation v = validate_cluster(derivs, rc.center, m2, pts, g);
        if (!v.ok) return false;
        rc.center = v.center;
        rc.multiplicity = m2;
        rc.validated = true;
        rc.dist_estimate = v.dist_estimate;
        rc.center_uncertainty = v.center_uncertainty;
        for (int i : extra) {
          rc.members.push_back(pts[static_cast<std::size_t>(i)]);
          free_pt[static_cast<std::size_t>(i)] = 0;
        }
        for (cxd m : rc.members)
          rc.radius = std::max(rc.radius, std::abs(m - rc.center));
        return true;
      };
      bool absorbed = false;
      for (std::size_t oi : order)
        if (try_absorb(out[oi], free_idx)) { absorbed = true; break; }
      if (!absorbed) {
        for (int f : free_idx) {
          if (!free_pt[static_cast<std::size_t>(f)]) continue;
          for (std::size_t oi : order)
            if (try_absorb(out[oi], {f})) break;
        }
      }
    }
  }

  // Anything still free: emit as unvalidated singleton clusters with an
  // honest multiplicity-aware uncertainty estimate.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!free_pt[i]) continue;
    RootCluster rc;
    rc.center = pts[i];
    rc.multiplicity = 1;
    rc.validated = false;
    rc.dist_estimate = root_distance_estimate(c, pts[i]);
    rc.center_uncertainty = std::numeric_limits<double>::infinity();
    rc.members.push_back(pts[i]);
    out.push_back(std::move(rc));
  }

  std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) {
    if (a.center.real() != b.center.real()) return a.center.real() < b.center.real();
    return a.center.imag() < b.center.imag();
  });
  return out;
}

std::vector<RootCluster> clustered_roots(const MPoly& p) {
  return dense_clustered_roots(to_dense(p));
}

}  // namespace fockpres

#include "fockpres/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fockpres/rng.hpp"

namespace fockpres {

double residual_threshold(const MPoly& p, const std::vector<cxd>& w) {
  return 1e-8 * (1.0 + poly_eval_scale(p, std::span<const cxd>(w)));
}

namespace {

// Signed distance of a point into the open "forbidden" region.
double bad_margin(cxd c, Region region) {
  switch (region) {
    case Region::UpperHalfPlane: return c.imag();
    case Region::RightHalfPlane: return c.real();
    case Region::RealAxis: return std::abs(c.imag());
  }
  return 0.0;
}

// Positional accuracy of a validated cluster center: the noise-floor bound
// computed during validation, never tighter than 1e-11 relative.
double validated_uncertainty(const RootCluster& rc) {
  return std::max(1e-11 * std::max(1.0, std::abs(rc.center)),
                  rc.center_uncertainty);
}

// Conservative distance bound from an unvalidated point to the nearest true
// root: the multiplicity-aware estimate can undershoot by a factor up to the
// degree (the |p/p'| term divides out the local multiplicity).
double unvalidated_uncertainty(const RootCluster& rc, int degree) {
  return std::max(degree * rc.dist_estimate,
                  1e-11 * std::max(1.0, std::abs(rc.center)));
}

}  // namespace

Verdict is_stable_uni(const MPoly& p, Region region, double tol, double max_radius) {
  if (p.nvars() != 1)
    throw std::invalid_argument("is_stable_uni: polynomial is not univariate");
  if (p.is_zero())
    throw std::invalid_argument("is_stable_uni: polynomial is identically zero");

  if (region == Region::RealAxis) {
    double cscale = p.coeff_norm_inf();
    for (const auto& [a, c] : p.terms())
      if (std::abs(c.imag()) > 1e-10 * cscale)
        throw std::invalid_argument(
            "is_stable_uni: real-rootedness requires real coefficients; "
            "imaginary parts exceed 1e-10 of the dominant coefficient");
  }

  Verdict v;
  v.method = "univariate-roots";
  if (p.total_degree() == 0) {
    v.outcome = Verdict::Outcome::CertifiedYes;
    v.method = "nonzero constant";
    return v;
  }

  DensePoly pd = to_dense(p);
  auto clusters = dense_clustered_roots(pd);
  const int deg = p.total_degree();
  int ignored = 0;
  bool all_certified_out = true;
  const RootCluster* refuter = nullptr;
  double refuter_margin = 0.0;

  for (const auto& rc : clusters) {
    if (std::abs(rc.center) > max_radius) {
      ++ignored;
      continue;
    }
    double s = bad_margin(rc.center, region);
    double unc = rc.validated ? validated_uncertainty(rc)
                              : unvalidated_uncertainty(rc, deg);
    if (s + unc > tol) all_certified_out = false;
    // Witnesses come from validated clusters only: an eigenvalue scattered
    // around a multiple root can sit deep in the region with a tiny residual,
    // so residual + margin alone cannot certify a refutation. The margin must
    // also clear the certified nearest-root disk, which guards against a
    // center whose nearest actual root sits outside the region.
    if (rc.validated && s > std::max(tol, 2.0 * unc) && s > refuter_margin &&
        s > 2.0 * certified_root_radius(pd, rc.center)) {
      std::vector<cxd> w{rc.center};
      if (std::abs(poly_eval(p, w)) <= residual_threshold(p, w)) {
        refuter = &rc;
        refuter_margin = s;
      }
    }
  }

  std::ostringstream notes;
  if (ignored > 0)
    notes << ignored << " root(s) outside validated radius " << max_radius
          << " ignored";

  if (refuter) {
    v.outcome = Verdict::Outcome::CertifiedNo;
    v.witness = {refuter->center};
    v.value = poly_eval(p, v.witness);
    v.notes = notes.str();
    return v;
  }
  if (all_certified_out) {
    v.outcome = Verdict::Outcome::CertifiedYes;
    v.notes = notes.str();
    return v;
  }
  v.outcome = Verdict::Outcome::ProbablyYes;
  v.method = "univariate-roots, margin within root uncertainty";
  if (notes.tellp() > 0) notes << "; ";
  notes << "root(s) too close to the region boundary to certify at tol=" << tol;
  v.notes = notes.str();
  return v;
}

namespace {

// Dense coefficients (in t) of p(a + t v) for real a, positive real v,
// together with the gross absolute-value mass behind each coefficient.
// The mass bounds both the construction roundoff and the cancellation level:
// coefficient k of the exact substitution differs from r[k] by at most
// O(eps) * gross[k], and when gross[k] >> |r[k]| the computed coefficient has
// lost that many digits to cancellation.
struct LineRestriction {
  DensePoly r;
  DensePoly gross;
};

LineRestriction substitute_line(const MPoly& p, const std::vector<double>& a,
                                const std::vector<double>& v) {
  const int n = p.nvars();
  const int deg = p.total_degree();
  // Per-coordinate powers (a_i + v_i t)^e, e up to the max exponent used.
  std::vector<int> max_e(static_cast<std::size_t>(n), 0);
  for (const auto& [al, c] : p.terms())
    for (int i = 0; i < n; ++i)
      max_e[static_cast<std::size_t>(i)] = std::max(max_e[static_cast<std::size_t>(i)], al[i]);
  std::vector<std::vector<DensePoly>> pw(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& tab = pw[static_cast<std::size_t>(i)];
    tab.resize(static_cast<std::size_t>(max_e[static_cast<std::size_t>(i)]) + 1);
    tab[0] = {cxd(1.0, 0.0)};
    for (int e = 1; e <= max_e[static_cast<std::size_t>(i)]; ++e) {
      // binomial expansion: coeff of t^j is C(e,j) a^{e-j} v^j
      DensePoly q(static_cast<std::size_t>(e) + 1);
      for (int j = 0; j <= e; ++j)
        q[static_cast<std::size_t>(j)] =
            binomial(e, j) * std::pow(a[static_cast<std::size_t>(i)], e - j) *
            std::pow(v[static_cast<std::size_t>(i)], j);
      tab[static_cast<std::size_t>(e)] = std::move(q);
    }
  }
  LineRestriction out;
  out.r.assign(static_cast<std::size_t>(deg) + 1, cxd{});
  out.gross.assign(static_cast<std::size_t>(deg) + 1, cxd{});
  DensePoly acc, tmp, gacc, gtmp;
  for (const auto& [al, c] : p.terms()) {
    acc = {c};
    gacc = {cxd(std::abs(c), 0.0)};
    for (int i = 0; i < n; ++i) {
      if (al[i] == 0) continue;
      const DensePoly& f = pw[static_cast<std::size_t>(i)][static_cast<std::size_t>(al[i])];
      tmp.assign(acc.size() + f.size() - 1, cxd{});
      gtmp.assign(acc.size() + f.size() - 1, cxd{});
      for (std::size_t x = 0; x < acc.size(); ++x)
        for (std::size_t y = 0; y < f.size(); ++y) {
          tmp[x + y] += acc[x] * f[y];
          gtmp[x + y] += gacc[x] * std::abs(f[y]);
        }
      acc.swap(tmp);
      gacc.swap(gtmp);
    }
    for (std::size_t j = 0; j < acc.size(); ++j) {
      out.r[j] += acc[j];
      out.gross[j] += gacc[j];
    }
  }
  return out;
}

}  // namespace

Verdict is_stable_multi(const MPoly& p, Region region, long trials,
                        std::uint64_t seed, double tol, double max_radius) {
  if (p.is_zero())
    throw std::invalid_argument("is_stable_multi: polynomial is identically zero");
  if (p.nvars() == 1) return is_stable_uni(p, region, tol, max_radius);
  if (region == Region::RealAxis)
    throw std::invalid_argument("is_stable_multi: real-rootedness is univariate-only");
  if (trials < 1) throw std::invalid_argument("is_stable_multi: trials must be >= 1");

  // Right-half-plane products reduce to the upper half-plane by z -> -i z;
  // a witness z* for the rotated polynomial maps back as w* = -i z*.
  const bool rotated = (region == Region::RightHalfPlane);
  MPoly q = rotated ? rotate_vars(p, RotateMode::ToUpper) : p;

  Verdict v;
  v.seed = seed;
  v.method = "line-restriction";
  const int n = q.nvars();

  if (q.total_degree() == 0) {
    v.outcome = Verdict::Outcome::CertifiedYes;
    v.method = "nonzero constant";
    return v;
  }

  auto try_witness = [&](cxd tstar, double unc_t, const std::vector<double>& a,
                         const std::vector<double>& vdir, long trial) -> bool {
    if (tstar.imag() <= 0.0) return false;
    std::vector<cxd> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      w[static_cast<std::size_t>(i)] =
          cxd(a[static_cast<std::size_t>(i)], 0.0) + tstar * vdir[static_cast<std::size_t>(i)];
      double margin = w[static_cast<std::size_t>(i)].imag();
      double unc_i = unc_t * vdir[static_cast<std::size_t>(i)];
      if (margin <= std::max(tol, 2.0 * unc_i)) return false;
      if (std::abs(w[static_cast<std::size_t>(i)]) > max_radius) return false;
    }
    if (std::abs(poly_eval(q, w)) > residual_threshold(q, w)) return false;
    // Map back to the original region's coordinates.
    if (rotated)
      for (auto& z : w) z = cxd(z.imag(), -z.real());  // w = -i z
    if (std::abs(poly_eval(p, w)) > residual_threshold(p, w)) return false;
    v.outcome = Verdict::Outcome::CertifiedNo;
    v.witness = std::move(w);
    v.value = poly_eval(p, v.witness);
    std::ostringstream notes;
    notes << "refuted at trial " << trial;
    v.notes = notes.str();
    v.trials = trial + 1;
    return true;
  };

  for (long trial = 0; trial < trials; ++trial) {
    Substream rng(seed, static_cast<std::uint64_t>(trial));
    std::vector<double> a(static_cast<std::size_t>(n)), dir(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = rng.cauchy();
    for (int i = 0; i < n; ++i) dir[static_cast<std::size_t>(i)] = rng.log_uniform(1e-3, 1e3);

    LineRestriction lr = substitute_line(q, a, dir);
    DensePoly& r = lr.r;
    double rsize = 0.0;
    for (const cxd& c : r) rsize = std::max(rsize, std::abs(c));
    if (rsize == 0.0) {
      // The whole line lies in the zero set; any positive-imaginary t works.
      if (try_witness(cxd(0.0, 1.0), 0.0, a, dir, trial)) return v;
      continue;
    }

    // Construction roundoff of the substituted coefficients, relative to the
    // gross mass that produced them (heavy cancellation makes the computed
    // restriction's exact roots stray from the true restriction's roots).
    const double coeff_eps = 8.0 * (q.total_degree() + 2.0) * (n + 2.0) *
                             std::numeric_limits<double>::epsilon();

    // Trim trailing coefficients, but only those indistinguishable from zero
    // at construction noise: such a deletion stays inside the coefficient
    // intervals the witness radius accounts for (the gross entry is kept).
    // A genuinely tiny leading coefficient must NOT be dropped - it carries
    // the polynomial's largest roots, and deleting it relocates them freely.
    while (r.size() > 1 &&
           std::abs(r.back()) <=
               coeff_eps * std::abs(lr.gross[r.size() - 1]))
      r.pop_back();
    if (r.size() <= 1) continue;  // restriction is (numerically) constant

    for (const auto& rc : dense_clustered_roots(r)) {
      if (!rc.validated) continue;  // see is_stable_uni: no scatter witnesses
      double unc_t = std::max(
          validated_uncertainty(rc),
          certified_root_radius_perturbed(r, lr.gross, coeff_eps, rc.center));
      if (try_witness(rc.center, unc_t, a, dir, trial)) return v;
    }
  }

  v.outcome = Verdict::Outcome::ProbablyYes;
  v.trials = trials;
  return v;
}

MPoly lp_approximant(const MPoly& f, int k) {
  if (k < 1) throw std::invalid_argument("lp_approximant: k must be >= 1");
  MPoly out(f.nvars());
  out.set_split(f.split());
  out.set_max_degree(f.max_degree());
  for (const auto& [g, c] : f.terms()) {
    // multiplier (k)_gamma / k^gamma = prod_i prod_{j<gamma_i} (1 - j/k):
    // every factor is in [0,1], vanishing exactly when some gamma_i > k.
    double m = 1.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      for (int j = 0; j < g[i]; ++j) m *= 1.0 - static_cast<double>(j) / k;
    if (m != 0.0) out.add_term(g, c * m);
  }
  return out;
}

Verdict ly_check(const MPoly& f, long trials, std::uint64_t seed, double tol,
                 double max_radius) {
  return is_stable_multi(f, Region::RightHalfPlane, trials, seed, tol, max_radius);
}

}  // namespace fockpres

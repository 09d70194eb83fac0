#include "fockpres/leeyang.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fockpres/linop.hpp"
#include "fockpres/roots.hpp"

namespace fockpres {

int preserve_thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  int cap = hw == 0 ? 1 : static_cast<int>(hw);
  if (const char* env = std::getenv("FOCK_PRESERVE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) cap = std::min<long>(cap, v);
  }
  return std::max(1, cap);
}

cxd transform_eval(const std::vector<TransformAtom>& atoms, cxd z) {
  cxd out = 1.0;
  for (const auto& a : atoms) {
    switch (a.kind) {
      case TransformAtom::Kind::Const:
        out *= a.c;
        break;
      case TransformAtom::Kind::ExpLin:
        out *= std::exp(a.c * z);
        break;
      case TransformAtom::Kind::Cosh:
        out *= std::cosh(a.c * z);
        break;
      case TransformAtom::Kind::SinhOverZ: {
        cxd cz = a.c * z;
        if (std::abs(cz) < 1e-4) {
          // sinh(cz)/z = c (1 + (cz)^2/6 + (cz)^4/120 + ...)
          cxd s = cz * cz;
          out *= a.c * (1.0 + s / 6.0 * (1.0 + s / 20.0));
        } else {
          out *= std::sinh(cz) / z;
        }
        break;
      }
      case TransformAtom::Kind::ExpQuad:
        out *= std::exp(a.c * z * z);
        break;
    }
  }
  return out;
}

cxd transform_eval(const Transform& t, cxd z) { return transform_eval(t.atoms, z); }

namespace {

// Series truncation of a single atom at total degree <= D, univariate.
MPoly atom_series(const TransformAtom& a, int D) {
  MPoly s(1);
  s.set_max_degree(D);
  switch (a.kind) {
    case TransformAtom::Kind::Const:
      s.add_term({0}, a.c);
      break;
    case TransformAtom::Kind::ExpLin: {
      double t = 1.0;
      for (int k = 0; k <= D; ++k) {
        s.add_term({k}, t);
        t *= a.c / (k + 1);
      }
      break;
    }
    case TransformAtom::Kind::Cosh: {
      double t = 1.0;
      for (int k = 0; 2 * k <= D; ++k) {
        s.add_term({2 * k}, t);
        t *= a.c * a.c / ((2 * k + 1) * (2 * k + 2));
      }
      break;
    }
    case TransformAtom::Kind::SinhOverZ: {
      double t = a.c;
      for (int k = 0; 2 * k <= D; ++k) {
        s.add_term({2 * k}, t);
        t *= a.c * a.c / ((2 * k + 2) * (2 * k + 3));
      }
      break;
    }
    case TransformAtom::Kind::ExpQuad: {
      double t = 1.0;
      for (int k = 0; 2 * k <= D; ++k) {
        s.add_term({2 * k}, t);
        t *= a.c / (k + 1);
      }
      break;
    }
  }
  return s;
}

MPoly product_series(const std::vector<TransformAtom>& atoms, int D) {
  MPoly acc = MPoly::constant(1, 1.0);
  acc.set_max_degree(D);
  for (const auto& a : atoms) acc = acc * atom_series(a, D);
  return acc;
}

}  // namespace

Transform transform(const Measure1D& mu, int D) {
  if (D < 0) throw std::invalid_argument("transform: negative truncation degree");
  Transform t;
  if (const auto* ta = std::get_if<TwoAtom>(&mu)) {
    // int e^{zx} (delta_a + delta_b)/2 = e^{(a+b)z/2} cosh((a-b)z/2)
    t.atoms = {{TransformAtom::Kind::ExpLin, 0.5 * (ta->a + ta->b)},
               {TransformAtom::Kind::Cosh, 0.5 * (ta->a - ta->b)}};
  } else if (const auto* iv = std::get_if<Interval>(&mu)) {
    if (!(iv->a < iv->b))
      throw std::invalid_argument("transform: interval needs a < b");
    // int_a^b e^{zx} dx = (2/z) e^{(a+b)z/2} sinh((b-a)z/2)
    t.atoms = {{TransformAtom::Kind::Const, 2.0},
               {TransformAtom::Kind::ExpLin, 0.5 * (iv->a + iv->b)},
               {TransformAtom::Kind::SinhOverZ, 0.5 * (iv->b - iv->a)}};
  } else {
    const auto& g = std::get<GaussianMeasure>(mu);
    if (!(g.b > 0.0))
      throw std::invalid_argument("transform: gaussian needs b > 0");
    // int e^{zx} e^{-b x^2/2} dx = sqrt(2 pi / b) e^{z^2/(2b)}
    t.atoms = {{TransformAtom::Kind::Const, std::sqrt(2.0 * M_PI / g.b)},
               {TransformAtom::Kind::ExpQuad, 0.5 / g.b}};
  }
  t.truncation = product_series(t.atoms, D);
  return t;
}

void validate_spin_model(const SpinModel& m, bool require_two_atom_pm1) {
  int n = static_cast<int>(m.sites.size());
  if (n < 1) throw std::invalid_argument("spin model: needs at least one site");
  if (n > 20)
    throw std::invalid_argument("spin model: exact enumeration capped at 20 sites");
  if (m.J.rows() != n || m.J.cols() != n)
    throw std::invalid_argument("spin model: coupling matrix size does not match site count");
  double scale = std::max(1.0, m.J.cwiseAbs().maxCoeff());
  if ((m.J - m.J.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("spin model: coupling matrix must be symmetric");
  if (m.J.minCoeff() < 0.0)
    throw std::invalid_argument("spin model: coupling entries must be >= 0");
  if (require_two_atom_pm1) {
    for (const auto& s : m.sites) {
      const auto* ta = std::get_if<TwoAtom>(&s);
      if (!ta || ta->a != 1.0 || ta->b != -1.0)
        throw std::invalid_argument(
            "spin model: exact enumeration requires two-atom sites at a = 1, b = -1");
    }
  }
}

MPoly ising_partition(const SpinModel& model) {
  validate_spin_model(model, /*require_two_atom_pm1=*/true);
  const int n = static_cast<int>(model.sites.size());
  const std::uint64_t total = 1ull << n;

  // Each spin configuration owns a distinct exponent vector (sigma_j + 1 is 0
  // or 2), so entries can be computed independently in any partition without
  // affecting a single bit of the result.
  std::vector<double> value(total);
  auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
    Eigen::VectorXd sigma(n);
    for (std::uint64_t s = lo; s < hi; ++s) {
      for (int j = 0; j < n; ++j) sigma(j) = (s >> j) & 1 ? 1.0 : -1.0;
      double e = sigma.dot(model.J * sigma);
      value[s] = std::ldexp(std::exp(e), -n);
    }
  };

  int threads = std::min<int>(preserve_thread_cap(), 8);
  if (n >= 14 && threads > 1) {
    std::vector<std::thread> pool;
    std::uint64_t chunk = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::uint64_t lo = t * chunk, hi = std::min<std::uint64_t>(total, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  } else {
    run_range(0, total);
  }

  MPoly out(n);
  MultiIndex e(n);
  for (std::uint64_t s = 0; s < total; ++s) {
    for (int j = 0; j < n; ++j) e[j] = (s >> j) & 1 ? 2 : 0;
    out.add_term(e, value[s]);
  }
  return out;
}

FugacityZeros fugacity_zeros(const SpinModel& model, std::vector<int> direction) {
  MPoly part = ising_partition(model);
  const int n = part.nvars();
  if (direction.empty()) direction.assign(n, 1);
  if (static_cast<int>(direction.size()) != n)
    throw std::invalid_argument("fugacity_zeros: direction length does not match site count");
  int g = 0;
  for (int d : direction) {
    if (d < 1)
      throw std::invalid_argument("fugacity_zeros: direction entries must be positive integers");
    g = std::gcd(g, d);
  }

  // w_j = d_j w restricts u_j = U^{d_j / g} with U = e^{g w}; a term u^e
  // lands on U^{sum_j (d_j/g) e_j}. Coefficients are positive, so collisions
  // only add mass and the cleared polynomial keeps a nonzero constant term.
  int top = 0;
  for (const auto& [e, c] : part.terms()) {
    int k = 0;
    for (int j = 0; j < n; ++j) k += direction[j] / g * e[j];
    top = std::max(top, k);
  }
  FugacityZeros out;
  out.poly.assign(top + 1, 0.0);
  for (const auto& [e, c] : part.terms()) {
    int k = 0;
    for (int j = 0; j < n; ++j) k += direction[j] / g * e[j];
    out.poly[k] += c;
  }

  out.zeros = dense_roots(out.poly);
  for (cxd u : out.zeros)
    out.max_circle_deviation =
        std::max(out.max_circle_deviation, std::abs(std::abs(u) - 1.0));
  return out;
}

MPoly ej_convolve(const Eigen::MatrixXd& A, const MPoly& mu0_hat, int D) {
  const int n = mu0_hat.nvars();
  if (A.rows() != n || A.cols() != n)
    throw std::invalid_argument("ej_convolve: matrix size does not match variable count");
  double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("ej_convolve: matrix must be symmetric");

  int headroom = mu0_hat.total_degree();
  if (auto md = mu0_hat.max_degree()) headroom = std::max(headroom, *md);
  if (D > headroom)
    throw std::invalid_argument(
        "ej_convolve: requested degree exceeds the truncation degree of mu0_hat");

  // Quadratic form sum_{i,j} A_ij x_i x_j (the full double sum, so an
  // off-diagonal pair contributes 2 A_ij).
  MPoly q(n);
  q.set_max_degree(headroom);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double c = i == j ? A(i, i) : A(i, j) + A(j, i);
      if (c != 0.0) {
        MultiIndex e(n, 0);
        e[i] += 1;
        e[j] += 1;
        q.add_term(e, c);
      }
    }

  // exp(q) truncated at the headroom: differentiation of degree > headroom
  // annihilates every term of mu0_hat anyway.
  MPoly eq = MPoly::constant(n, 1.0);
  eq.set_max_degree(headroom);
  MPoly term = eq;
  for (int k = 1; 2 * k <= headroom; ++k) {
    term = term * q * cxd(1.0 / k);
    if (term.is_zero()) break;
    eq = eq + term;
  }
  return apply_op(LinOp::diff(eq), mu0_hat, D);
}

GlsResult gls_compose(const MPoly& phi_hat,
                      const std::variant<MPoly, GaussianForm>& g,
                      const Weight& alpha, const Weight& gamma,
                      const Weight& beta, int D, long trials,
                      std::uint64_t seed, double max_radius) {
  const int n = phi_hat.nvars();
  validate_weight(alpha, n, "gls_compose");
  validate_weight(gamma, n, "gls_compose");
  validate_weight(beta, n, "gls_compose");
  if (D < 0) throw std::invalid_argument("gls_compose: negative truncation degree");

  for (int j = 0; j < n; ++j)
    if (alpha[j] + gamma[j] > beta[j]) {
      std::ostringstream os;
      os << "gls_compose: hypothesis alpha + gamma <= beta fails at coordinate "
         << j << " (" << alpha[j] << " + " << gamma[j] << " > " << beta[j] << ")";
      throw GlsHypothesisError("alpha_plus_gamma_leq_beta", os.str());
    }

  GlsResult out;
  int phi_deg = phi_hat.total_degree();
  if (auto md = phi_hat.max_degree()) phi_deg = std::max(phi_deg, *md);

  // The multiplier as a polynomial: either as given, or the Gaussian form
  // expanded to the degree the functional can see (phi vanishes on monomials
  // past its truncation, so deeper terms of g cannot contribute).
  MPoly gp(n);
  if (const auto* p = std::get_if<MPoly>(&g)) {
    if (p->nvars() != n)
      throw std::invalid_argument("gls_compose: multiplier variable count mismatch");
    out.m_alpha_value = m_alpha(*p, alpha);
    gp = *p;
  } else {
    const auto& gf = std::get<GaussianForm>(g);
    out.m_alpha_value = m_alpha(gf, alpha);  // validates the matrix shape
    MPoly q(n);
    q.set_max_degree(phi_deg);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double c = i == j ? gf.matrix(i, i) : gf.matrix(i, j) + gf.matrix(j, i);
        if (c != 0.0) {
          MultiIndex e(n, 0);
          e[i] += 1;
          e[j] += 1;
          q.add_term(e, c);
        }
      }
    gp = MPoly::constant(n, 1.0);
    gp.set_max_degree(phi_deg);
    MPoly term = gp;
    for (int k = 1; 2 * k <= phi_deg; ++k) {
      term = term * q * cxd(1.0 / k);
      if (term.is_zero()) break;
      gp = gp + term;
    }
    gp = gp * cxd(gf.scale);
  }
  if (!std::isfinite(out.m_alpha_value))
    throw GlsHypothesisError("m_alpha_finite",
                             "gls_compose: M_alpha(g) is infinite for the given weight");

  out.product_factor = 1.0;
  for (int j = 0; j < n; ++j) out.product_factor *= 1.0 + alpha[j] / gamma[j];
  out.op_norm_sq_bound = out.product_factor * out.m_alpha_value * out.m_alpha_value;

  // psi_hat(w) = phi(g(z) e^{z.w}): coefficient of w^mu is
  //   sum_kappa g_kappa phi_hat_{mu+kappa} prod_j falling(mu_j+kappa_j, kappa_j)
  // (division-free: (mu+kappa)!/mu! is the falling product).
  MPoly psi(n);
  psi.set_max_degree(D);
  for (const MultiIndex& mu : indices_up_to(n, D)) {
    cxd c = 0.0;
    for (const auto& [kappa, gk] : gp.terms()) {
      MultiIndex idx(n);
      for (int j = 0; j < n; ++j) idx[j] = mu[j] + kappa[j];
      cxd ph = phi_hat.coeff(idx);
      if (ph == cxd{}) continue;
      double fall = 1.0;
      for (int j = 0; j < n; ++j) fall *= falling(idx[j], kappa[j]);
      c += gk * ph * fall;
    }
    if (c != cxd{}) psi.add_term(mu, c);
  }
  out.psi_hat = psi;
  out.ly_verdict = ly_check(psi, trials, seed, kDefaultTol, max_radius);
  return out;
}

}  // namespace fockpres

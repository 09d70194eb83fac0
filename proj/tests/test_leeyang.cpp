#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <vector>

#include "fockpres/leeyang.hpp"
#include "fockpres/mpoly.hpp"
#include "oracles.hpp"

using namespace fockpres;
using testutil::coeff_mismatch;
using testutil::rel_err;

namespace {

SpinModel pm_model(const Eigen::MatrixXd& J) {
  SpinModel m;
  m.J = J;
  m.sites.assign(static_cast<std::size_t>(J.rows()), TwoAtom{1.0, -1.0});
  return m;
}

Eigen::MatrixXd offdiag2(double j) {
  Eigen::MatrixXd m(2, 2);
  m << 0.0, j, j, 0.0;
  return m;
}

}  // namespace

TEST_CASE("laplace transforms of the site measures") {
  testutil::Rng rng(5);

  // symmetric two-atom: cosh series
  Transform c = transform(TwoAtom{1.0, -1.0}, 4);
  MPoly want(1);
  want.add_term({0}, 1.0);
  want.add_term({2}, 0.5);
  want.add_term({4}, 1.0 / 24.0);
  CHECK(coeff_mismatch(c.truncation, want, 1e-16) <= 1e-14);
  for (int it = 0; it < 100; ++it) {
    cxd w = rng.complex_in_box(2.0);
    cxd ref = 0.5 * (std::exp(w) + std::exp(-w));
    CHECK(std::abs(transform_eval(c, w) - ref) <= 1e-12 * (1 + std::abs(ref)));
  }

  // general two-atom
  Transform g = transform(TwoAtom{0.7, -2.1}, 8);
  for (int it = 0; it < 100; ++it) {
    cxd w = rng.complex_in_box(1.5);
    cxd ref = 0.5 * (std::exp(0.7 * w) + std::exp(-2.1 * w));
    CHECK(std::abs(transform_eval(g, w) - ref) <= 1e-12 * (1 + std::abs(ref)));
  }

  // interval: integral of e^{wx}
  Transform s = transform(Interval{-1.0, 1.0}, 8);
  CHECK(std::abs(transform_eval(s, cxd(0, 0)) - cxd(2, 0)) <= 1e-12);
  for (int k = 0; k <= 4; ++k)
    CHECK(rel_err(s.truncation.coeff({2 * k}),
                  cxd(2.0 / testutil::dfactorial(2 * k + 1), 0)) <= 1e-13);
  for (int it = 0; it < 100; ++it) {
    cxd w = rng.complex_in_box(2.0);
    if (std::abs(w) < 1e-3) continue;
    cxd ref = (std::exp(w) - std::exp(-w)) / w;
    CHECK(std::abs(transform_eval(s, w) - ref) <= 1e-12 * (1 + std::abs(ref)));
  }
  Transform s2 = transform(Interval{0.25, 2.0}, 8);
  for (int it = 0; it < 100; ++it) {
    cxd w = rng.complex_in_box(1.5);
    if (std::abs(w) < 1e-3) continue;
    cxd ref = (std::exp(2.0 * w) - std::exp(0.25 * w)) / w;
    CHECK(std::abs(transform_eval(s2, w) - ref) <= 1e-12 * (1 + std::abs(ref)));
  }

  // gaussian
  for (double b : {1.0, 3.0}) {
    Transform q = transform(GaussianMeasure{b}, 10);
    double pref = std::sqrt(2.0 * M_PI / b);
    for (int it = 0; it < 100; ++it) {
      cxd w = rng.complex_in_box(1.5);
      cxd ref = pref * std::exp(w * w / (2.0 * b));
      CHECK(std::abs(transform_eval(q, w) - ref) <= 1e-12 * (1 + std::abs(ref)));
    }
    for (int k = 0; k <= 5; ++k)
      CHECK(rel_err(q.truncation.coeff({2 * k}),
                    cxd(pref * std::pow(1.0 / (2.0 * b), k) /
                            testutil::dfactorial(k),
                        0)) <= 1e-13);
    CHECK(q.truncation.coeff({1}) == cxd(0, 0));
  }
}

TEST_CASE("spin model validation") {
  Eigen::MatrixXd asym(2, 2);
  asym << 0.0, 1.0, 0.5, 0.0;
  CHECK_THROWS_AS(validate_spin_model(pm_model(asym), true), std::invalid_argument);

  CHECK_THROWS_AS(validate_spin_model(pm_model(offdiag2(-0.5)), true),
                  std::invalid_argument);

  SpinModel short_sites = pm_model(offdiag2(1.0));
  short_sites.sites.pop_back();
  CHECK_THROWS_AS(validate_spin_model(short_sites, true), std::invalid_argument);

  SpinModel skew = pm_model(offdiag2(1.0));
  skew.sites[0] = TwoAtom{0.5, -1.0};
  CHECK_THROWS_AS(validate_spin_model(skew, true), std::invalid_argument);
  CHECK_NOTHROW(validate_spin_model(skew, false));

  SpinModel big = pm_model(Eigen::MatrixXd::Zero(21, 21));
  CHECK_THROWS_AS(validate_spin_model(big, true), std::invalid_argument);

  SpinModel interval_site = pm_model(offdiag2(1.0));
  interval_site.sites[1] = Interval{-1.0, 1.0};
  CHECK_THROWS_AS(ising_partition(interval_site), std::invalid_argument);
}

TEST_CASE("cleared partition polynomial by exact enumeration") {
  MPoly p1 = ising_partition(pm_model(Eigen::MatrixXd::Zero(1, 1)));
  CHECK(p1.coeff({0}) == cxd(0.5, 0));
  CHECK(p1.coeff({2}) == cxd(0.5, 0));
  CHECK(p1.terms().size() == 2);

  MPoly p2 = ising_partition(pm_model(offdiag2(0.8)));
  double hi = std::exp(1.6) / 4.0, lo = std::exp(-1.6) / 4.0;
  CHECK(rel_err(p2.coeff({0, 0}), cxd(hi, 0)) <= 1e-14);
  CHECK(rel_err(p2.coeff({2, 2}), cxd(hi, 0)) <= 1e-14);
  CHECK(rel_err(p2.coeff({2, 0}), cxd(lo, 0)) <= 1e-14);
  CHECK(rel_err(p2.coeff({0, 2}), cxd(lo, 0)) <= 1e-14);

  // no interaction: the polynomial factors into independent sites
  MPoly free2 = ising_partition(pm_model(Eigen::MatrixXd::Zero(2, 2)));
  MPoly site(1);
  site.add_term({0}, 0.5);
  site.add_term({2}, 0.5);
  MPoly prod = MPoly::constant(2, 1.0);
  {
    MPoly a(2), b(2);
    a.add_term({0, 0}, 0.5);
    a.add_term({2, 0}, 0.5);
    b.add_term({0, 0}, 0.5);
    b.add_term({0, 2}, 0.5);
    prod = a * b;
  }
  CHECK(coeff_mismatch(free2, prod, 1e-16) <= 1e-14);

  // self-couplings contribute a constant energy shift
  MPoly diag = ising_partition(pm_model(0.5 * Eigen::MatrixXd::Identity(2, 2)));
  CHECK(rel_err(diag.coeff({0, 0}), cxd(std::exp(1.0) / 4.0, 0)) <= 1e-14);

  // n = 3 against an independent bit-mask enumeration
  testutil::Rng rng(17);
  Eigen::MatrixXd J(3, 3);
  J.setZero();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) J(i, j) = J(j, i) = rng.uniform(0.0, 1.5);
  MPoly p3 = ising_partition(pm_model(J));
  std::vector<std::vector<double>> Jv(3, std::vector<double>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) Jv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = J(i, j);
  auto brute = testutil::brute_spin_poly(Jv);
  CHECK(p3.terms().size() == brute.size());
  for (const auto& [e, v] : brute)
    CHECK(rel_err(p3.coeff(e), cxd(v, 0)) <= 1e-13);
  for (const auto& [e, cval] : p3.terms()) {
    CHECK(cval.real() > 0.0);
    CHECK(std::abs(cval.imag()) <= 1e-15 * cval.real());
  }
}

TEST_CASE("fugacity zeros sit on the unit circle") {
  FugacityZeros z1 = fugacity_zeros(pm_model(Eigen::MatrixXd::Zero(1, 1)));
  REQUIRE(z1.zeros.size() == 2);
  for (cxd u : z1.zeros) CHECK(std::abs(u * u + cxd(1, 0)) <= 1e-12);
  CHECK(z1.max_circle_deviation <= 1e-12);

  const double j = 1.0;
  FugacityZeros z2 = fugacity_zeros(pm_model(offdiag2(j)));
  REQUIRE(z2.zeros.size() == 4);
  CHECK(z2.max_circle_deviation <= 1e-8);
  cxd o1(-std::exp(-4.0 * j), std::sqrt(1.0 - std::exp(-8.0 * j)));
  cxd o2 = std::conj(o1);
  for (cxd u : z2.zeros) {
    double d = std::min(std::abs(u * u - o1), std::abs(u * u - o2));
    CHECK(d <= 1e-8);
  }

  // directions are gcd-normalized
  FugacityZeros za = fugacity_zeros(pm_model(offdiag2(j)), {1, 1});
  FugacityZeros zb = fugacity_zeros(pm_model(offdiag2(j)), {2, 2});
  REQUIRE(za.poly.size() == zb.poly.size());
  for (std::size_t i = 0; i < za.poly.size(); ++i)
    CHECK(std::abs(za.poly[i] - zb.poly[i]) <=
          1e-14 * (1 + std::abs(za.poly[i])));

  // anisotropic direction raises the degree, zeros stay on the circle
  FugacityZeros zc = fugacity_zeros(pm_model(offdiag2(j)), {1, 2});
  CHECK(zc.poly.size() == 7);
  CHECK(zc.zeros.size() == 6);
  CHECK(zc.max_circle_deviation <= 1e-8);
}

TEST_CASE("pair interaction as a differential operator: no coupling") {
  MPoly mu0 = transform(TwoAtom{1.0, -1.0}, 12).truncation;
  MPoly got = ej_convolve(Eigen::MatrixXd::Zero(1, 1), mu0, 8);
  MPoly want = transform(TwoAtom{1.0, -1.0}, 8).truncation;
  CHECK(coeff_mismatch(got, want, 1e-16) <= 1e-14);
}

TEST_CASE("pair interaction reproduces the interacting transform") {
  // two +-1 sites, coupling 0.3: compare against the 2^n enumeration
  //   [w^kappa] mu_hat = 2^{-n} sum_sigma e^{sigma.A.sigma} sigma^kappa / kappa!
  const double a = 0.3;
  const int P = 16, D = 6;
  MPoly mu0(2);
  for (int i = 0; i <= P; i += 2)
    for (int j = 0; j <= P; j += 2)
      mu0.add_term({i, j}, 1.0 / (testutil::dfactorial(i) * testutil::dfactorial(j)));
  MPoly got = ej_convolve(offdiag2(a), mu0, D);

  for (int k1 = 0; k1 <= D; ++k1)
    for (int k2 = 0; k2 + k1 <= D; ++k2) {
      double s = 0.0;
      for (int s1 : {-1, 1})
        for (int s2 : {-1, 1})
          s += std::exp(2.0 * a * s1 * s2) * std::pow(s1, k1) * std::pow(s2, k2);
      s /= 4.0 * testutil::dfactorial(k1) * testutil::dfactorial(k2);
      cxd c = got.coeff({k1, k2});
      if ((k1 + k2) % 2 == 1)
        // odd total degree vanishes by the sigma -> -sigma symmetry; the
        // enumeration above only reaches ~1e-17 cancellation residue
        CHECK(std::abs(c) <= 1e-12);
      else
        CHECK(rel_err(c, cxd(s, 0)) <= 1e-9);
    }
}

TEST_CASE("pair interaction on a gaussian site matches the closed form") {
  // exp(a d^2) e^{c w^2} = exp(c w^2 / (1-4ac)) / sqrt(1-4ac), a=1/2, c=1/6
  MPoly mu0 = transform(GaussianMeasure{3.0}, 60).truncation;
  Eigen::MatrixXd A(1, 1);
  A(0, 0) = 0.5;
  MPoly got = ej_convolve(A, mu0, 10);
  double pref = std::sqrt(2.0 * M_PI / 3.0) * std::sqrt(1.5);
  for (int k = 0; k <= 5; ++k)
    CHECK(rel_err(got.coeff({2 * k}),
                  cxd(pref * std::pow(0.25, k) / testutil::dfactorial(k), 0)) <=
          1e-7);
  CHECK(got.coeff({1}) == cxd(0, 0));
  CHECK(got.coeff({3}) == cxd(0, 0));
}

TEST_CASE("composing a functional with a polynomial multiplier") {
  // multiplier 1: psi == phi, and the norm bound is the weight-ratio product
  MPoly phi = transform(TwoAtom{1.0, -1.0}, 10).truncation;
  GlsResult r = gls_compose(phi, MPoly::constant(1, 1.0), {0.5}, {1.0}, {1.5},
                            10, 200, 42, 1.5);
  CHECK(coeff_mismatch(r.psi_hat, phi, 1e-16) <= 1e-13);
  CHECK(r.product_factor == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(r.m_alpha_value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.op_norm_sq_bound == doctest::Approx(1.5).epsilon(1e-9));
  CHECK_FALSE(r.ly_verdict.certified_no());

  // multiplier 1+z on the +-1 two-atom functional evaluates at +1 only:
  // psi_hat = e^w
  MPoly phi12 = transform(TwoAtom{1.0, -1.0}, 12).truncation;
  MPoly g(1);
  g.add_term({0}, 1.0);
  g.add_term({1}, 1.0);
  GlsResult r2 = gls_compose(phi12, g, {1.0}, {1.0}, {2.0}, 10, 200, 42, 2.0);
  for (int k = 0; k <= 10; ++k)
    CHECK(rel_err(r2.psi_hat.coeff({k}),
                  cxd(1.0 / testutil::dfactorial(k), 0)) <= 1e-9);
  CHECK_FALSE(r2.ly_verdict.certified_no());
}

TEST_CASE("composition hypotheses are checked by name") {
  MPoly phi = transform(TwoAtom{1.0, -1.0}, 10).truncation;
  try {
    gls_compose(phi, MPoly::constant(1, 1.0), {2.0}, {1.0}, {2.5}, 8, 100, 42);
    FAIL("expected hypothesis failure");
  } catch (const GlsHypothesisError& e) {
    CHECK(e.hypothesis == "alpha_plus_gamma_leq_beta");
  }

  Eigen::MatrixXd A(1, 1);
  A(0, 0) = 0.9;
  try {
    gls_compose(phi, GaussianForm{A, 1.0}, {1.0}, {0.5}, {2.0}, 8, 100, 42);
    FAIL("expected hypothesis failure");
  } catch (const GlsHypothesisError& e) {
    CHECK(e.hypothesis == "m_alpha_finite");
  }
}

TEST_CASE("composing with a gaussian multiplier matches the integral") {
  // phi = integration against e^{-x^2}, g = e^{x^2/4}:
  // psi_hat(w) = int e^{-3x^2/4 + xw} dx = sqrt(4 pi / 3) e^{w^2/3}
  MPoly phi = transform(GaussianMeasure{2.0}, 44).truncation;
  Eigen::MatrixXd A(1, 1);
  A(0, 0) = 0.25;
  GlsResult r = gls_compose(phi, GaussianForm{A, 1.0}, {0.5}, {1.0}, {1.5}, 10,
                            200, 42, 1.5);
  double pref = std::sqrt(4.0 * M_PI / 3.0);
  for (int m = 0; m <= 4; ++m)
    CHECK(rel_err(r.psi_hat.coeff({2 * m}),
                  cxd(pref * std::pow(1.0 / 3.0, m) / testutil::dfactorial(m),
                      0)) <= 1e-7);
  CHECK_FALSE(r.ly_verdict.certified_no());
  CHECK(r.m_alpha_value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("thread cap responds to the environment") {
  CHECK(preserve_thread_cap() >= 1);

  Eigen::MatrixXd J(4, 4);
  J.setZero();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) J(i, j) = J(j, i) = 0.25 * (i + j + 1);
  MPoly base = ising_partition(pm_model(J));

  ::setenv("FOCK_PRESERVE_THREADS", "1", 1);
  MPoly capped = ising_partition(pm_model(J));
  ::unsetenv("FOCK_PRESERVE_THREADS");

  CHECK(capped == base);
}

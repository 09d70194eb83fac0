#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

#include "fockpres/mpoly.hpp"
#include "fockpres/multi_index.hpp"
#include "fockpres/roots.hpp"
#include "oracles.hpp"

using namespace fockpres;
using testutil::rel_err;

TEST_CASE("pbinom matches the falling-product formula") {
  CHECK(pbinom({3}, {2}) == 6.0);       // 2! * C(3,2)
  CHECK(pbinom({5, 7}, {0, 0}) == 1.0); // empty product
  CHECK(pbinom({2, 2}, {1, 2}) == 4.0); // 1!*2! * C(2,1)*C(2,2)
  CHECK(pbinom({2}, {3}) == 0.0);       // alpha exceeds beta
  CHECK(pbinom({4, 1}, {0, 2}) == 0.0);
  // pbinom(beta, 0) = 1 for any beta.
  CHECK(pbinom({9, 3, 1}, {0, 0, 0}) == 1.0);
  CHECK_THROWS_AS(pbinom({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("pbinom ratio to k^alpha is <= 1 and nondecreasing in k") {
  MultiIndex alpha = {2, 1};
  double prev = 0.0;
  for (int k = 2; k <= 64; ++k) {
    double ratio = pbinom({k, k}, alpha) / (double(k) * k * k);
    CHECK(ratio <= 1.0 + 1e-15);
    CHECK(ratio >= prev - 1e-15);
    prev = ratio;
  }
  CHECK(prev > 0.95);  // approaches 1 from below
}

TEST_CASE("combinatorial helpers") {
  CHECK(factorial(0) == 1.0);
  CHECK(factorial(5) == 120.0);
  CHECK(multi_factorial({3, 2}) == 12.0);
  CHECK(binomial(7, 3) == 35.0);
  CHECK(binomial(3, 5) == 0.0);
  CHECK(binomial(5, -1) == 0.0);
  CHECK(falling(7, 3) == 210.0);
  CHECK(falling(3, 0) == 1.0);
  CHECK(total_degree({1, 4, 0}) == 5);
  CHECK(leq_all({1, 2}, {1, 3}));
  CHECK_FALSE(leq_all({2, 2}, {1, 3}));
}

TEST_CASE("indices_up_to enumerates graded-lex, complete and sorted") {
  auto idx = indices_up_to(2, 2);
  CHECK(idx.size() == 6);  // C(2+2, 2)
  CHECK(idx.front() == MultiIndex{0, 0});
  GradedLex less;
  for (size_t i = 1; i < idx.size(); ++i) {
    CHECK(less(idx[i - 1], idx[i]));
    CHECK(total_degree(idx[i]) <= 2);
  }
  auto uni = indices_up_to(1, 4);
  CHECK(uni.size() == 5);
  for (int k = 0; k <= 4; ++k) CHECK(uni[static_cast<size_t>(k)] == MultiIndex{k});
}

TEST_CASE("builders, coefficient access, zero handling") {
  MPoly z = MPoly::variable(1, 0);
  CHECK(z.coeff({1}) == cxd(1.0, 0.0));
  CHECK(z.total_degree() == 1);

  MPoly c = MPoly::constant(2, cxd(0, 2));
  CHECK(c.coeff({0, 0}) == cxd(0, 2));

  MPoly m = MPoly::monomial(2, {1, 3}, 2.5);
  CHECK(m.coeff({1, 3}) == cxd(2.5, 0));
  CHECK(m.coeff({3, 1}) == cxd(0, 0));

  // add_term accumulates and drops exact zeros.
  MPoly p(1);
  p.add_term({2}, 1.0);
  p.add_term({2}, -1.0);
  CHECK(p.is_zero());
  CHECK(p.total_degree() == 0);
}

TEST_CASE("ring arithmetic identities") {
  MPoly one = MPoly::constant(1, 1.0);
  MPoly z = MPoly::variable(1, 0);
  MPoly lhs = (one + z) * (one - z);
  MPoly want(1);
  want.add_term({0}, 1.0);
  want.add_term({2}, -1.0);
  CHECK(lhs == want);

  MPoly z1 = MPoly::variable(2, 0), z2 = MPoly::variable(2, 1);
  MPoly diff2 = (z1 + z2) * (z1 - z2);
  MPoly want2(2);
  want2.add_term({2, 0}, 1.0);
  want2.add_term({0, 2}, -1.0);
  CHECK(diff2 == want2);

  CHECK((MPoly::variable(1, 0) * cxd(0, 2)).coeff({1}) == cxd(0, 2));

  // Exact cancellation leaves the zero polynomial.
  CHECK(((one + z) - (one + z)).is_zero());

  CHECK_THROWS_AS(add(MPoly::variable(1, 0), MPoly::variable(2, 0)),
                  std::invalid_argument);
}

TEST_CASE("product evaluation consistency on random inputs") {
  testutil::Rng rng(1234);
  for (int it = 0; it < 30; ++it) {
    MPoly a = testutil::random_poly(rng, 2, 6, 8);
    MPoly b = testutil::random_poly(rng, 2, 6, 8);
    MPoly ab = a * b;
    std::vector<cxd> pt = {rng.complex_in_box(2.0), rng.complex_in_box(2.0)};
    cxd lhs = poly_eval(ab, pt);
    cxd rhs = poly_eval(a, pt) * poly_eval(b, pt);
    double scale = 1.0 + poly_eval_scale(ab, pt);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
    // library evaluation agrees with the independent term-by-term oracle
    CHECK(std::abs(poly_eval(a, pt) - testutil::naive_eval(a, pt)) <=
          1e-10 * (1.0 + poly_eval_scale(a, pt)));
  }
}

TEST_CASE("evaluation hits exact zeros of simple polynomials") {
  MPoly p(1);
  p.add_term({0}, 1.0);
  p.add_term({2}, 1.0);
  CHECK(std::abs(poly_eval(p, {cxd(0, 1)})) <= 1e-15);

  MPoly q(2);
  q.add_term({1, 1}, 1.0);
  q.add_term({0, 0}, 1.0);
  CHECK(std::abs(poly_eval(q, {cxd(0, 1), cxd(0, 1)})) <= 1e-15);

  MPoly cube = MPoly::constant(1, 1.0) + MPoly::variable(1, 0);
  cube = cube * cube * cube;
  CHECK(poly_eval(cube, {cxd(1, 0)}) == cxd(8, 0));
}

TEST_CASE("truncation bounds the result degree and survives multiplication") {
  MPoly p = MPoly::constant(1, 1.0) + MPoly::variable(1, 0);
  MPoly p4 = p * p * p * p;
  MPoly t = p4.truncated(2);
  CHECK(t.total_degree() == 2);
  CHECK(t.coeff({0}) == cxd(1, 0));
  CHECK(t.coeff({1}) == cxd(4, 0));
  CHECK(t.coeff({2}) == cxd(6, 0));
  CHECK(t.max_degree() == 2);

  // A truncated factor caps the product's degree.
  MPoly prod = t * p4;
  CHECK(prod.total_degree() <= 2);
}

TEST_CASE("per-block truncation respects the split") {
  // p(z, w) with independent degree caps per block
  MPoly p(2);
  p.add_term({3, 0}, 1.0);
  p.add_term({1, 2}, 1.0);
  p.add_term({0, 3}, 1.0);
  MPoly t = p.truncated(2, BlockSplit{1, 1});
  CHECK(t.coeff({3, 0}) == cxd(0, 0));  // z-degree 3 > 2 dropped
  CHECK(t.coeff({1, 2}) == cxd(1, 0));  // z-deg 1, w-deg 2 both fine
  CHECK(t.coeff({0, 3}) == cxd(0, 0));  // w-degree 3 > 2 dropped
}

TEST_CASE("derivatives use exact falling factorials") {
  MPoly z3 = MPoly::monomial(1, {3}, 1.0);
  MPoly d1 = derivative(z3, 0);
  CHECK(d1.coeff({2}) == cxd(3, 0));
  MPoly d2 = derivative(z3, 0, 2);
  CHECK(d2.coeff({1}) == cxd(6, 0));
  CHECK(derivative(MPoly::constant(1, 5.0), 0).is_zero());

  MPoly m = MPoly::monomial(2, {2, 3}, 1.0);
  MPoly dv = derivative(m, 1);
  CHECK(dv.coeff({2, 2}) == cxd(3, 0));
}

TEST_CASE("variable rotations and their exact inverse") {
  MPoly z = MPoly::variable(1, 0);
  CHECK(rotate_vars(z, RotateMode::ToUpper).coeff({1}) == cxd(0, -1));

  MPoly p(1);
  p.add_term({0}, 1.0);
  p.add_term({2}, 1.0);
  MPoly r = rotate_vars(p, RotateMode::ToUpper);
  CHECK(r.coeff({2}) == cxd(-1, 0));  // (-iz)^2 = -z^2

  MPoly z1z2 = MPoly::monomial(2, {1, 1}, 1.0);
  CHECK(rotate_vars(z1z2, RotateMode::ToUpper).coeff({1, 1}) == cxd(-1, 0));

  // Rotating a subset touches only that block.
  MPoly sub = rotate_vars(z1z2, RotateMode::ToUpper, {1});
  CHECK(sub.coeff({1, 1}) == cxd(0, -1));

  // ToUpper then ToRight is the identity on coefficients, exactly.
  testutil::Rng rng(77);
  for (int it = 0; it < 5; ++it) {
    MPoly q = testutil::random_poly(rng, 2, 5, 10);
    CHECK(rotate_vars(rotate_vars(q, RotateMode::ToUpper), RotateMode::ToRight) == q);
  }
}

TEST_CASE("coefficient conjugation") {
  MPoly p = MPoly::monomial(1, {1}, cxd(1, 1));
  CHECK(conj_coeffs(p).coeff({1}) == cxd(1, -1));
  CHECK(conj_coeffs(conj_coeffs(p)) == p);
  MPoly r = MPoly::monomial(2, {1, 1}, 2.0);
  CHECK(conj_coeffs(r) == r);
  CHECK(conj_coeffs(MPoly::monomial(2, {1, 1}, cxd(0, 1))).coeff({1, 1}) == cxd(0, -1));
}

TEST_CASE("w-block negation flips only w-odd terms") {
  BlockSplit split{1, 1};
  MPoly p(2);
  p.add_term({1, 1}, 1.0);  // z w
  p.add_term({1, 0}, 1.0);  // z
  p.add_term({0, 2}, 1.0);  // w^2
  MPoly n = negate_w_block(p, split);
  CHECK(n.coeff({1, 1}) == cxd(-1, 0));
  CHECK(n.coeff({1, 0}) == cxd(1, 0));
  CHECK(n.coeff({0, 2}) == cxd(1, 0));
  CHECK(negate_w_block(n, split) == p);
}

TEST_CASE("norms, pruning, printing") {
  MPoly p(1);
  p.add_term({0}, cxd(3, 4));  // |.| = 5
  p.add_term({1}, 2.0);
  CHECK(p.coeff_norm1() == doctest::Approx(7.0));
  CHECK(p.coeff_norm_inf() == doctest::Approx(5.0));

  MPoly q(1);
  q.add_term({0}, 1.0);
  q.add_term({1}, 1e-20);
  q.prune(1e-14);
  CHECK(q.coeff({1}) == cxd(0, 0));
  CHECK(q.coeff({0}) == cxd(1, 0));

  CHECK(!to_string(p).empty());
}

TEST_CASE("evaluation scale reflects coefficient and point magnitudes") {
  MPoly p(1);
  p.add_term({0}, 1.0);
  p.add_term({1}, 1.0);
  std::vector<cxd> pt = {cxd(2, 0)};
  CHECK(poly_eval_scale(p, pt) == doctest::Approx(3.0));
}

TEST_CASE("roots of simple quadratics and cubes") {
  MPoly p(1);
  p.add_term({0}, 1.0);
  p.add_term({2}, 1.0);
  auto r = univariate_roots(p);
  REQUIRE(r.size() == 2);
  std::sort(r.begin(), r.end(), [](cxd a, cxd b) { return a.imag() < b.imag(); });
  CHECK(std::abs(r[0] - cxd(0, -1)) <= 1e-12);
  CHECK(std::abs(r[1] - cxd(0, 1)) <= 1e-12);

  MPoly q(1);  // z^2 - 2z - 1, roots 1 +- sqrt(2)
  q.add_term({2}, 1.0);
  q.add_term({1}, -2.0);
  q.add_term({0}, -1.0);
  auto rq = univariate_roots(q);
  REQUIRE(rq.size() == 2);
  std::sort(rq.begin(), rq.end(), [](cxd a, cxd b) { return a.real() < b.real(); });
  CHECK(std::abs(rq[0] - cxd(1.0 - std::sqrt(2.0), 0)) <= 1e-12);
  CHECK(std::abs(rq[1] - cxd(1.0 + std::sqrt(2.0), 0)) <= 1e-12);

  MPoly cube = MPoly::constant(1, 1.0) + MPoly::variable(1, 0);
  cube = cube * cube * cube;
  auto rc = univariate_roots(cube);
  REQUIRE(rc.size() == 3);
  for (cxd z : rc) CHECK(std::abs(z - cxd(-1, 0)) <= 1e-4);  // eps^(1/3) scatter
}

TEST_CASE("root finder rejects degenerate inputs") {
  CHECK_THROWS_AS(univariate_roots(MPoly(1)), std::invalid_argument);
  CHECK(univariate_roots(MPoly::constant(1, 3.0)).empty());
}

TEST_CASE("clustered roots recover multiplicity and honest uncertainty") {
  MPoly cube = MPoly::constant(1, 1.0) + MPoly::variable(1, 0);
  cube = cube * cube * cube;
  auto cl = clustered_roots(cube);
  REQUIRE(cl.size() == 1);
  CHECK(cl[0].multiplicity == 3);
  CHECK(cl[0].validated);
  CHECK(std::abs(cl[0].center - cxd(-1, 0)) <= 1e-10);
  CHECK(cl[0].center_uncertainty >= std::abs(cl[0].center - cxd(-1, 0)));
  CHECK(cl[0].center_uncertainty <= 1e-8);

  // Well-separated simple roots: three validated singletons.
  MPoly p(1);  // (z-1)(z-2)(z-3) = z^3 - 6z^2 + 11z - 6
  p.add_term({3}, 1.0);
  p.add_term({2}, -6.0);
  p.add_term({1}, 11.0);
  p.add_term({0}, -6.0);
  auto sep = clustered_roots(p);
  REQUIRE(sep.size() == 3);
  std::sort(sep.begin(), sep.end(),
            [](const RootCluster& a, const RootCluster& b) {
              return a.center.real() < b.center.real();
            });
  for (int i = 0; i < 3; ++i) {
    CHECK(sep[static_cast<size_t>(i)].multiplicity == 1);
    CHECK(sep[static_cast<size_t>(i)].validated);
    double err = std::abs(sep[static_cast<size_t>(i)].center - cxd(i + 1.0, 0));
    CHECK(err <= 1e-10);
    CHECK(sep[static_cast<size_t>(i)].center_uncertainty >= err);
    CHECK(sep[static_cast<size_t>(i)].center_uncertainty <= 1e-9);
  }
}

TEST_CASE("certified root radius disks contain a true root") {
  // p = (z-1)(z-2): roots known exactly, query from random points
  DensePoly p = {cxd(2, 0), cxd(-3, 0), cxd(1, 0)};
  testutil::Rng rng(5);
  for (int it = 0; it < 20; ++it) {
    cxd z = {rng.uniform(0.0, 3.0), rng.uniform(-1.0, 1.0)};
    double r = certified_root_radius(p, z);
    double dist = std::min(std::abs(z - cxd(1, 0)), std::abs(z - cxd(2, 0)));
    if (std::isfinite(r)) CHECK(dist <= r * (1 + 1e-12));
  }
}

TEST_CASE("dense helpers agree with sparse representation") {
  MPoly p(1);  // 3z^2 + 1
  p.add_term({2}, 3.0);
  p.add_term({0}, 1.0);
  DensePoly d = to_dense(p);
  REQUIRE(d.size() == 3);
  CHECK(d[0] == cxd(1, 0));
  CHECK(d[1] == cxd(0, 0));
  CHECK(d[2] == cxd(3, 0));

  DensePoly dd = dense_derivative(d);
  REQUIRE(dd.size() == 2);
  CHECK(dd[1] == cxd(6, 0));

  auto r = dense_roots({cxd(-1, 0), cxd(0, 0), cxd(1, 0)});  // z^2 - 1
  REQUIRE(r.size() == 2);
  std::sort(r.begin(), r.end(), [](cxd a, cxd b) { return a.real() < b.real(); });
  CHECK(std::abs(r[0] - cxd(-1, 0)) <= 1e-12);
  CHECK(std::abs(r[1] - cxd(1, 0)) <= 1e-12);

  testutil::Rng rng(9);
  for (int it = 0; it < 10; ++it) {
    MPoly q = testutil::random_poly(rng, 1, 6, 5);
    cxd z = rng.complex_in_box(1.5);
    auto [val, scale] = dense_eval(to_dense(q), z);
    CHECK(std::abs(val - poly_eval(q, {z})) <= 1e-12 * (1.0 + scale));
  }
}

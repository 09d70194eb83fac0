#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>

#include "fockpres/json_io.hpp"
#include "oracles.hpp"

using namespace fockpres;
using testutil::coeff_mismatch;

TEST_CASE("polynomial serialization round-trips") {
  MPoly p(2);
  p.add_term({0, 0}, cxd(1.5, -2.0));
  p.add_term({2, 1}, cxd(0, 3.0));
  p.set_max_degree(5);

  json j = to_json(p);
  CHECK(j["nvars"] == 2);
  CHECK(j["max_degree"] == 5);
  MPoly q = mpoly_from_json(j);
  CHECK(q == p);
  CHECK(q.max_degree().has_value());
  CHECK(*q.max_degree() == 5);

  MPoly r(1);
  r.add_term({3}, 1.0);
  json jr = to_json(r);
  CHECK(jr["max_degree"].is_null());
  CHECK(mpoly_from_json(jr) == r);
}

TEST_CASE("polynomial input is forgiving about order, strict about shape") {
  json j = {{"nvars", 1},
            {"max_degree", nullptr},
            {"terms",
             {{{"alpha", {2}}, {"re", 1.0}, {"im", 0.0}},
              {{"alpha", {0}}, {"re", 3.0}, {"im", 0.0}},
              {{"alpha", {2}}, {"re", 2.0}, {"im", 0.0}}}}};
  MPoly p = mpoly_from_json(j);
  CHECK(p.coeff({2}) == cxd(3.0, 0));  // duplicates accumulate
  CHECK(p.coeff({0}) == cxd(3.0, 0));

  json bad_len = {{"nvars", 2},
                  {"max_degree", nullptr},
                  {"terms", {{{"alpha", {1}}, {"re", 1.0}, {"im", 0.0}}}}};
  CHECK_THROWS_AS(mpoly_from_json(bad_len), std::invalid_argument);

  json bad_exp = {{"nvars", 1},
                  {"max_degree", nullptr},
                  {"terms", {{{"alpha", {-1}}, {"re", 1.0}, {"im", 0.0}}}}};
  CHECK_THROWS_AS(mpoly_from_json(bad_exp), std::invalid_argument);
}

TEST_CASE("operator serialization round-trips every kind") {
  std::vector<LinOp> ops;

  LinOp::Table t;
  t.n_in = 2;
  t.m_out = 2;
  {
    MPoly img(2);
    img.add_term({1, 1}, cxd(2.0, 1.0));
    t.entries[{1, 0}] = img;
    t.entries[{0, 2}] = MPoly::constant(2, 3.0);
  }
  ops.push_back(LinOp::table(std::move(t)));

  LinOp::Diagonal d;
  d.n = 1;
  d.lambda[{0}] = cxd(1.0, 0.0);
  d.lambda[{1}] = cxd(0.0, 2.0);
  ops.push_back(LinOp::diagonal(std::move(d)));

  MPoly g(1);
  g.add_term({0}, 1.0);
  g.add_term({2}, -0.5);
  ops.push_back(LinOp::diff(g));
  ops.push_back(LinOp::mult(g));
  ops.push_back(LinOp::compose(LinOp::mult(g), LinOp::diff(g)));
  ops.push_back(LinOp::tensor_extend(LinOp::diff(g), 2));

  for (const LinOp& op : ops) {
    json j = to_json(op);
    LinOp back = linop_from_json(j);
    CHECK(to_json(back) == j);

    // behavioral equality on a test input
    int n = op.n_in();
    MPoly f = MPoly::constant(n, 1.0);
    for (int v = 0; v < n; ++v) f = f * (MPoly::variable(n, v) + MPoly::constant(n, 1.0));
    f = f * f;
    MPoly a = apply_op(op, f, 6);
    MPoly b = apply_op(back, f, 6);
    CHECK(coeff_mismatch(a, b, 1e-16) <= 1e-14);
  }
}

TEST_CASE("verdict serialization round-trips every outcome") {
  for (auto outcome : {Verdict::Outcome::CertifiedNo, Verdict::Outcome::ProbablyYes,
                       Verdict::Outcome::CertifiedYes}) {
    Verdict v;
    v.outcome = outcome;
    v.witness = {cxd(0.5, -1.0), cxd(2.0, 0.25)};
    v.value = cxd(1e-3, 2e-3);
    v.trials = 77;
    v.seed = 42;
    v.method = "test";
    v.notes = "note";
    Verdict w = verdict_from_json(to_json(v));
    CHECK(to_json(w) == to_json(v));
    CHECK(w.outcome == v.outcome);
    CHECK(w.witness == v.witness);
    CHECK(w.trials == v.trials);
  }
}

TEST_CASE("spin model and measure serialization") {
  SpinModel m;
  m.J = Eigen::MatrixXd(3, 3);
  m.J << 0.0, 1.0, 0.5, 1.0, 0.0, 0.25, 0.5, 0.25, 0.0;
  m.sites = {TwoAtom{1.0, -1.0}, Interval{-0.5, 2.0}, GaussianMeasure{3.0}};

  json j = to_json(m);
  SpinModel back = spin_model_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.J.rows() == 3);
  CHECK((back.J - m.J).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.sites.size() == 3);
  CHECK(std::holds_alternative<TwoAtom>(back.sites[0]));
  CHECK(std::holds_alternative<Interval>(back.sites[1]));
  CHECK(std::holds_alternative<GaussianMeasure>(back.sites[2]));
  CHECK(std::get<Interval>(back.sites[1]).b == 2.0);

  Measure1D mu = measure_from_json(to_json(Measure1D{GaussianMeasure{1.5}}));
  CHECK(std::get<GaussianMeasure>(mu).b == 1.5);
}

TEST_CASE("gaussian form serialization") {
  GaussianForm g;
  g.matrix = Eigen::MatrixXd(2, 2);
  g.matrix << 0.1, 0.2, 0.2, 0.4;
  g.scale = -1.5;
  GaussianForm back = gaussian_form_from_json(to_json(g));
  CHECK((back.matrix - g.matrix).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.scale == g.scale);
}

TEST_CASE("symbol serialization keeps the block structure") {
  OpSymbol s = symbol(LinOp::diff(MPoly::variable(1, 0)), 3);
  json j = to_json(s);
  CHECK(j["degree"] == 3);
  CHECK(j["z_count"] == 1);
  CHECK(j["w_count"] == 1);
  OpSymbol back = symbol_from_json(j);
  CHECK(back.poly == s.poly);
  CHECK(back.split.z_count == s.split.z_count);
  CHECK(back.split.w_count == s.split.w_count);
  CHECK(back.degree == s.degree);
}

TEST_CASE("classification reports serialize with stable fields") {
  PreserverReport r = classify_preserver(LinOp::diff(MPoly::variable(1, 0)),
                                         PreserverField::Real, 4, 100, 42);
  json j = to_json(r);
  CHECK(j.contains("kind"));
  CHECK(j.contains("refuted"));
  CHECK(j.contains("rank"));
  CHECK(j.contains("sign"));
  CHECK(j.contains("symbol_verdict"));
  CHECK(j.contains("trials_used"));
  CHECK(j.contains("seed"));
  CHECK(j["refuted"] == false);
}

TEST_CASE("parse errors carry the origin and position") {
  CHECK_THROWS_AS(parse_json_text("{\"a\": [1, }", "input.json"),
                  std::invalid_argument);
  try {
    parse_json_text("{\n  \"a\": [1, }", "input.json");
    FAIL("expected parse error");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("input.json:") != std::string::npos);
    CHECK(msg.find("2:") != std::string::npos);  // line 2
  }
  json ok = parse_json_text("{\"a\": 1}", "input.json");
  CHECK(ok["a"] == 1);
}

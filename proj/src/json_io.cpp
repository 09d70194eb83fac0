#include "fockpres/json_io.hpp"

#include <sstream>
#include <stdexcept>
#include <string>

namespace fockpres {

namespace {

[[noreturn]] void bad(const std::string& who, const std::string& what) {
  throw std::invalid_argument(who + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& who) {
  if (!j.is_object() || !j.contains(key)) bad(who, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int as_int(const json& j, const std::string& who) {
  if (!j.is_number_integer()) bad(who, "expected an integer");
  return j.get<int>();
}

double as_num(const json& j, const std::string& who) {
  if (!j.is_number()) bad(who, "expected a number");
  return j.get<double>();
}

std::string as_str(const json& j, const std::string& who) {
  if (!j.is_string()) bad(who, "expected a string");
  return j.get<std::string>();
}

json jcomplex(cxd c) { return json{{"re", c.real()}, {"im", c.imag()}}; }

cxd complex_from(const json& j, const std::string& who) {
  return {as_num(need(j, "re", who), who), as_num(need(j, "im", who), who)};
}

MultiIndex alpha_from(const json& j, int nvars, const std::string& who) {
  if (!j.is_array()) bad(who, "\"alpha\" must be an array");
  MultiIndex a;
  for (const auto& e : j) {
    int v = as_int(e, who);
    if (v < 0) bad(who, "exponents must be >= 0");
    a.push_back(v);
  }
  if (nvars >= 0 && static_cast<int>(a.size()) != nvars)
    bad(who, "exponent vector length does not match nvars");
  return a;
}

}  // namespace

json to_json(const MPoly& p) {
  json j;
  j["nvars"] = p.nvars();
  if (p.max_degree())
    j["max_degree"] = *p.max_degree();
  else
    j["max_degree"] = nullptr;
  json terms = json::array();
  for (const auto& [a, c] : p.terms()) {
    json t;
    t["alpha"] = a;
    t["re"] = c.real();
    t["im"] = c.imag();
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

MPoly mpoly_from_json(const json& j) {
  const std::string who = "MPoly JSON";
  int nvars = as_int(need(j, "nvars", who), who);
  if (nvars < 0) bad(who, "nvars must be >= 0");
  MPoly p(nvars);
  const json& terms = need(j, "terms", who);
  if (!terms.is_array()) bad(who, "\"terms\" must be an array");
  for (const auto& t : terms)
    p.add_term(alpha_from(need(t, "alpha", who), nvars, who), complex_from(t, who));
  // The degree bound is authoritative: terms beyond it are dropped.
  if (j.contains("max_degree") && !j.at("max_degree").is_null())
    p.set_max_degree(as_int(j.at("max_degree"), who));
  return p;
}

json to_json(const OpSymbol& s) {
  json j = to_json(s.poly);
  j["degree"] = s.degree;
  j["z_count"] = s.split.z_count;
  j["w_count"] = s.split.w_count;
  return j;
}

OpSymbol symbol_from_json(const json& j) {
  const std::string who = "symbol JSON";
  OpSymbol s;
  // Parse the terms without the degree bound, attach the block split, and
  // only then apply the bound: the symbol's max_degree caps each block
  // separately, so applying it before the split is attached would drop
  // legitimate terms whose total degree exceeds it.
  json unbounded = j;
  unbounded.erase("max_degree");
  s.poly = mpoly_from_json(unbounded);
  s.split.z_count = as_int(need(j, "z_count", who), who);
  s.split.w_count = as_int(need(j, "w_count", who), who);
  if (s.split.z_count < 0 || s.split.w_count < 0 ||
      s.split.z_count + s.split.w_count != s.poly.nvars())
    bad(who, "block sizes must be >= 0 and sum to nvars");
  s.poly.set_split(s.split);
  if (j.contains("max_degree") && !j.at("max_degree").is_null())
    s.poly.set_max_degree(as_int(j.at("max_degree"), who));
  s.degree = j.contains("degree") ? as_int(j.at("degree"), who)
                                  : s.poly.max_degree().value_or(s.poly.total_degree());
  return s;
}

namespace {

const char* outcome_name(Verdict::Outcome o) {
  switch (o) {
    case Verdict::Outcome::CertifiedNo: return "certified_no";
    case Verdict::Outcome::ProbablyYes: return "probably_yes";
    case Verdict::Outcome::CertifiedYes: return "certified_yes";
  }
  return "probably_yes";
}

Verdict::Outcome outcome_from(const std::string& s, const std::string& who) {
  if (s == "certified_no") return Verdict::Outcome::CertifiedNo;
  if (s == "probably_yes") return Verdict::Outcome::ProbablyYes;
  if (s == "certified_yes") return Verdict::Outcome::CertifiedYes;
  bad(who, "unknown outcome \"" + s + "\"");
}

}  // namespace

json to_json(const Verdict& v) {
  json j;
  j["outcome"] = outcome_name(v.outcome);
  json w = json::array();
  for (cxd c : v.witness) w.push_back(jcomplex(c));
  j["witness"] = std::move(w);
  j["value"] = jcomplex(v.value);
  j["trials"] = v.trials;
  j["seed"] = v.seed;
  j["method"] = v.method;
  j["notes"] = v.notes;
  return j;
}

Verdict verdict_from_json(const json& j) {
  const std::string who = "verdict JSON";
  Verdict v;
  v.outcome = outcome_from(as_str(need(j, "outcome", who), who), who);
  if (j.contains("witness"))
    for (const auto& e : j.at("witness")) v.witness.push_back(complex_from(e, who));
  if (j.contains("value")) v.value = complex_from(j.at("value"), who);
  if (j.contains("trials")) v.trials = j.at("trials").get<long>();
  if (j.contains("seed")) v.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("method")) v.method = as_str(j.at("method"), who);
  if (j.contains("notes")) v.notes = as_str(j.at("notes"), who);
  return v;
}

json to_json(const LinOp& op) {
  json j;
  if (const auto* t = std::get_if<LinOp::Table>(&op.payload())) {
    j["kind"] = "table";
    j["n_in"] = t->n_in;
    j["m_out"] = t->m_out;
    json entries = json::array();
    for (const auto& [a, img] : t->entries) {
      json e;
      e["alpha"] = a;
      e["image"] = to_json(img);
      entries.push_back(std::move(e));
    }
    j["entries"] = std::move(entries);
  } else if (const auto* d = std::get_if<LinOp::Diagonal>(&op.payload())) {
    j["kind"] = "diagonal";
    j["n"] = d->n;
    json lam = json::array();
    for (const auto& [a, c] : d->lambda) {
      json e;
      e["alpha"] = a;
      e["re"] = c.real();
      e["im"] = c.imag();
      lam.push_back(std::move(e));
    }
    j["lambda"] = std::move(lam);
  } else if (const auto* f = std::get_if<LinOp::Diff>(&op.payload())) {
    j["kind"] = "diff";
    j["g"] = to_json(f->g);
  } else if (const auto* m = std::get_if<LinOp::Mult>(&op.payload())) {
    j["kind"] = "mult";
    j["g"] = to_json(m->g);
  } else if (const auto* c = std::get_if<LinOp::Compose>(&op.payload())) {
    j["kind"] = "compose";
    j["outer"] = to_json(*c->outer);
    j["inner"] = to_json(*c->inner);
  } else {
    const auto& te = std::get<LinOp::TensorExtend>(op.payload());
    j["kind"] = "tensor_extend";
    j["base"] = to_json(*te.base);
    j["extra_vars"] = te.extra_vars;
  }
  return j;
}

LinOp linop_from_json(const json& j) {
  const std::string who = "operator JSON";
  std::string kind = as_str(need(j, "kind", who), who);
  if (kind == "table") {
    LinOp::Table t;
    t.n_in = as_int(need(j, "n_in", who), who);
    t.m_out = as_int(need(j, "m_out", who), who);
    const json& entries = need(j, "entries", who);
    if (!entries.is_array()) bad(who, "\"entries\" must be an array");
    for (const auto& e : entries) {
      MultiIndex a = alpha_from(need(e, "alpha", who), t.n_in, who);
      t.entries[a] = mpoly_from_json(need(e, "image", who));
    }
    return LinOp::table(std::move(t));
  }
  if (kind == "diagonal") {
    LinOp::Diagonal d;
    d.n = as_int(need(j, "n", who), who);
    const json& lam = need(j, "lambda", who);
    if (!lam.is_array()) bad(who, "\"lambda\" must be an array");
    for (const auto& e : lam)
      d.lambda[alpha_from(need(e, "alpha", who), d.n, who)] = complex_from(e, who);
    return LinOp::diagonal(std::move(d));
  }
  if (kind == "diff") return LinOp::diff(mpoly_from_json(need(j, "g", who)));
  if (kind == "mult") return LinOp::mult(mpoly_from_json(need(j, "g", who)));
  if (kind == "compose")
    return LinOp::compose(linop_from_json(need(j, "outer", who)),
                          linop_from_json(need(j, "inner", who)));
  if (kind == "tensor_extend")
    return LinOp::tensor_extend(linop_from_json(need(j, "base", who)),
                                as_int(need(j, "extra_vars", who), who));
  bad(who, "unknown kind \"" + kind + "\"");
}

json to_json(const Measure1D& mu) {
  json j;
  if (const auto* ta = std::get_if<TwoAtom>(&mu)) {
    j["kind"] = "two_atom";
    j["a"] = ta->a;
    j["b"] = ta->b;
  } else if (const auto* iv = std::get_if<Interval>(&mu)) {
    j["kind"] = "interval";
    j["a"] = iv->a;
    j["b"] = iv->b;
  } else {
    j["kind"] = "gaussian";
    j["b"] = std::get<GaussianMeasure>(mu).b;
  }
  return j;
}

Measure1D measure_from_json(const json& j) {
  const std::string who = "measure JSON";
  std::string kind = as_str(need(j, "kind", who), who);
  if (kind == "two_atom")
    return TwoAtom{as_num(need(j, "a", who), who), as_num(need(j, "b", who), who)};
  if (kind == "interval")
    return Interval{as_num(need(j, "a", who), who), as_num(need(j, "b", who), who)};
  if (kind == "gaussian") return GaussianMeasure{as_num(need(j, "b", who), who)};
  bad(who, "unknown kind \"" + kind + "\"");
}

json to_json(const SpinModel& m) {
  json j;
  json rows = json::array();
  for (int i = 0; i < m.J.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.J.cols(); ++k) row.push_back(m.J(i, k));
    rows.push_back(std::move(row));
  }
  j["J"] = std::move(rows);
  json sites = json::array();
  for (const auto& s : m.sites) sites.push_back(to_json(s));
  j["sites"] = std::move(sites);
  return j;
}

SpinModel spin_model_from_json(const json& j) {
  const std::string who = "spin model JSON";
  SpinModel m;
  const json& J = need(j, "J", who);
  if (!J.is_array()) bad(who, "\"J\" must be an array of rows");
  int n = static_cast<int>(J.size());
  m.J.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = J.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      bad(who, "\"J\" must be square");
    for (int k = 0; k < n; ++k) m.J(i, k) = as_num(row.at(k), who);
  }
  const json& sites = need(j, "sites", who);
  if (!sites.is_array()) bad(who, "\"sites\" must be an array");
  for (const auto& s : sites) m.sites.push_back(measure_from_json(s));
  return m;
}

json to_json(const GaussianForm& g) {
  json j;
  json rows = json::array();
  for (int i = 0; i < g.matrix.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < g.matrix.cols(); ++k) row.push_back(g.matrix(i, k));
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  j["scale"] = g.scale;
  return j;
}

GaussianForm gaussian_form_from_json(const json& j) {
  const std::string who = "gaussian form JSON";
  GaussianForm g;
  const json& M = need(j, "matrix", who);
  if (!M.is_array()) bad(who, "\"matrix\" must be an array of rows");
  int n = static_cast<int>(M.size());
  g.matrix.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = M.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      bad(who, "\"matrix\" must be square");
    for (int k = 0; k < n; ++k) g.matrix(i, k) = as_num(row.at(k), who);
  }
  if (j.contains("scale")) g.scale = as_num(j.at("scale"), who);
  return g;
}

json to_json(const PreserverReport& r) {
  json j;
  switch (r.kind) {
    case PreserverReport::Kind::Degenerate: j["kind"] = "degenerate"; break;
    case PreserverReport::Kind::SymbolStable: j["kind"] = "symbol_stable"; break;
    case PreserverReport::Kind::NotPreserver: j["kind"] = "not_preserver"; break;
  }
  j["refuted"] = r.refuted();
  j["rank"] = r.rank;
  json factors = json::array();
  for (const auto& f : r.factors) factors.push_back(to_json(f));
  j["factors"] = std::move(factors);
  json fv = json::array();
  for (const auto& v : r.factor_verdicts) fv.push_back(to_json(v));
  j["factor_verdicts"] = std::move(fv);
  j["sign"] = r.sign == PreserverReport::Sign::Minus ? "minus" : "plus";
  j["symbol_verdict"] = to_json(r.symbol_verdict);
  j["witness_input"] = to_json(r.witness_input);
  j["witness_output"] = to_json(r.witness_output);
  j["witness_verdict"] = to_json(r.witness_verdict);
  j["trials_used"] = r.trials_used;
  j["seed"] = r.seed;
  j["notes"] = r.notes;
  return j;
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is the 1-based offset of the failure; convert to line:column.
    size_t stop = e.byte > 0 ? std::min(text.size(), static_cast<size_t>(e.byte - 1))
                             : 0;
    size_t line = 1, col = 1;
    for (size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << origin << ":" << line << ":" << col << ": " << e.what();
    throw std::invalid_argument(os.str());
  }
}

}  // namespace fockpres

// Batch front end: JSON in, JSON/CSV report out.
//
// Exit codes: 0 computed, 1 property refuted (a certified-no verdict or an
// explicit non-preserver witness), 2 input error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "fockpres/fock.hpp"
#include "fockpres/json_io.hpp"
#include "fockpres/leeyang.hpp"
#include "fockpres/linop.hpp"
#include "fockpres/mpoly.hpp"
#include "fockpres/stability.hpp"
#include "fockpres/version.hpp"

namespace {

using fockpres::cxd;
using fockpres::json;

struct RunConfig {
  std::string command;
  std::string input;
  std::string out;
  std::string format = "json";
  int degree = 8;
  long trials = 400;
  std::uint64_t seed = 42;
  double tol = 1e-9;
};

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("input", cfg.input, "input JSON file")->required();
  sub->add_option("--degree", cfg.degree, "truncation degree")->check(CLI::NonNegativeNumber);
  sub->add_option("--trials", cfg.trials, "randomized trial budget")->check(CLI::PositiveNumber);
  sub->add_option("--seed", cfg.seed, "RNG seed");
  sub->add_option("--tol", cfg.tol, "region margin tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--format", cfg.format, "report format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--out", cfg.out, "report file (default: stdout)");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_input(const RunConfig& cfg) {
  return fockpres::parse_json_text(read_file(cfg.input), cfg.input);
}

// Unwraps {"key": ...} or falls through to the whole document.
const json& sub_or_self(const json& j, const char* key) {
  if (j.is_object() && j.contains(key)) return j.at(key);
  return j;
}

fockpres::Weight weight_from(const json& j, const std::string& who) {
  if (!j.is_array()) throw std::invalid_argument(who + ": expected an array of numbers");
  fockpres::Weight w;
  for (const auto& e : j) {
    if (!e.is_number()) throw std::invalid_argument(who + ": expected an array of numbers");
    w.push_back(e.get<double>());
  }
  return w;
}

json report_envelope(const RunConfig& cfg, json result) {
  json j;
  j["command"] = cfg.command;
  j["version"] = fockpres::kVersion;
  j["seed"] = cfg.seed;
  json conf;
  conf["input"] = cfg.input;
  conf["degree"] = cfg.degree;
  conf["trials"] = cfg.trials;
  conf["seed"] = cfg.seed;
  conf["tol"] = cfg.tol;
  conf["format"] = cfg.format;
  conf["out"] = cfg.out;
  j["config"] = std::move(conf);
  j["result"] = std::move(result);
  return j;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write report file: " + cfg.out);
  out << text;
}

void emit_json(const RunConfig& cfg, json result) {
  emit(cfg, report_envelope(cfg, std::move(result)).dump(2) + "\n");
}

fockpres::Region region_from(const json& j) {
  if (!j.is_object() || !j.contains("region")) return fockpres::Region::UpperHalfPlane;
  std::string r = j.at("region").get<std::string>();
  if (r == "upper_half_plane") return fockpres::Region::UpperHalfPlane;
  if (r == "right_half_plane") return fockpres::Region::RightHalfPlane;
  if (r == "real_axis") return fockpres::Region::RealAxis;
  throw std::invalid_argument("unknown region \"" + r + "\"");
}

int cmd_check_stable(const RunConfig& cfg) {
  json in = load_input(cfg);
  fockpres::MPoly p = fockpres::mpoly_from_json(sub_or_self(in, "poly"));
  fockpres::Verdict v =
      fockpres::is_stable_multi(p, region_from(in), cfg.trials, cfg.seed, cfg.tol);
  json result;
  result["verdict"] = fockpres::to_json(v);
  emit_json(cfg, std::move(result));
  return v.certified_no() ? 1 : 0;
}

int cmd_symbol(const RunConfig& cfg) {
  json in = load_input(cfg);
  fockpres::LinOp T = fockpres::linop_from_json(sub_or_self(in, "op"));
  json result;
  result["symbol"] = fockpres::to_json(fockpres::symbol(T, cfg.degree));
  emit_json(cfg, std::move(result));
  return 0;
}

int cmd_classify(const RunConfig& cfg, const std::string& field) {
  json in = load_input(cfg);
  fockpres::LinOp T = fockpres::linop_from_json(sub_or_self(in, "op"));
  auto f = field == "real" ? fockpres::PreserverField::Real
                           : fockpres::PreserverField::Complex;
  fockpres::PreserverReport rep =
      fockpres::classify_preserver(T, f, cfg.degree, cfg.trials, cfg.seed);
  json result;
  result["field"] = field;
  result["report"] = fockpres::to_json(rep);
  emit_json(cfg, std::move(result));
  return rep.refuted() ? 1 : 0;
}

int cmd_fock_norm(const RunConfig& cfg) {
  json in = load_input(cfg);
  fockpres::MPoly p = fockpres::mpoly_from_json(sub_or_self(in, "poly"));
  if (!in.is_object() || !in.contains("beta"))
    throw std::invalid_argument("fock-norm input needs a \"beta\" weight array");
  fockpres::Weight beta = weight_from(in.at("beta"), "beta");
  json result;
  result["beta"] = in.at("beta");
  result["value"] = fockpres::fock_norm_sq(p, beta);
  emit_json(cfg, std::move(result));
  return 0;
}

int cmd_apply(const RunConfig& cfg) {
  json in = load_input(cfg);
  fockpres::LinOp T = fockpres::linop_from_json(in.at("op"));
  fockpres::MPoly f = fockpres::mpoly_from_json(in.at("f"));
  fockpres::Weight alpha(T.n_in(), 1.0);
  if (in.contains("alpha")) alpha = weight_from(in.at("alpha"), "alpha");

  fockpres::MPoly direct = fockpres::apply_op(T, f, cfg.degree);
  fockpres::IntegralRepResult ex = fockpres::apply_integral_rep(
      T, f, alpha, fockpres::ExactMonomial{}, cfg.degree);

  double max_diff = 0.0;
  for (const auto& [k, c] : direct.terms())
    max_diff = std::max(max_diff, std::abs(c - ex.value.coeff(k)));
  for (const auto& [k, c] : ex.value.terms())
    max_diff = std::max(max_diff, std::abs(c - direct.coeff(k)));
  bool agrees = max_diff <= 1e-12 * std::max(1.0, direct.coeff_norm_inf());

  json result;
  result["apply"] = fockpres::to_json(direct);
  result["integral_exact"] = fockpres::to_json(ex.value);
  result["max_abs_diff"] = max_diff;
  result["agrees"] = agrees;

  long samples = 0;
  if (in.contains("mc_samples")) samples = in.at("mc_samples").get<long>();
  if (samples > 0) {
    fockpres::IntegralRepResult mc = fockpres::apply_integral_rep(
        T, f, alpha, fockpres::MonteCarlo{samples, cfg.seed}, cfg.degree);
    long within = 0, total = 0;
    for (const auto& [k, se] : mc.coeff_stderr) {
      double diff = std::abs(mc.value.coeff(k) - direct.coeff(k));
      ++total;
      if (diff <= 4.0 * se || diff == 0.0) ++within;
    }
    json mj;
    mj["samples"] = mc.samples;
    mj["max_stderr"] = mc.max_stderr;
    mj["within_4se"] = within;
    mj["coefficients"] = total;
    if (!mc.warning.empty()) mj["warning"] = mc.warning;
    result["monte_carlo"] = std::move(mj);
  }
  emit_json(cfg, std::move(result));
  return 0;
}

int cmd_adjoint(const RunConfig& cfg) {
  json in = load_input(cfg);
  fockpres::LinOp T = fockpres::linop_from_json(in.at("op"));
  fockpres::Weight alpha = weight_from(in.at("alpha"), "alpha");
  fockpres::Weight beta = weight_from(in.at("beta"), "beta");
  fockpres::validate_weight(alpha, T.n_in(), "adjoint");
  fockpres::validate_weight(beta, T.m_out(), "adjoint");

  fockpres::OpSymbol G = fockpres::symbol(T, cfg.degree);
  fockpres::OpSymbol Gd = fockpres::dual_symbol(G, alpha, beta);
  fockpres::LinOp Tstar = fockpres::symbol_to_table(Gd);

  auto in_idx = fockpres::indices_up_to(T.n_in(), cfg.degree);
  auto out_idx = fockpres::indices_up_to(T.m_out(), cfg.degree);
  double max_residual = 0.0;
  json table = json::array();
  const int table_deg = std::min(cfg.degree, 3);
  for (const auto& delta : in_idx) {
    fockpres::MPoly zd = fockpres::MPoly::monomial(T.n_in(), delta, 1.0);
    fockpres::MPoly Tzd = fockpres::apply_op(T, zd, std::nullopt);
    for (const auto& gamma : out_idx) {
      fockpres::MPoly zg = fockpres::MPoly::monomial(T.m_out(), gamma, 1.0);
      fockpres::MPoly Tszg = fockpres::apply_op(Tstar, zg, std::nullopt);
      cxd lhs = fockpres::fock_inner(Tzd, zg, beta);
      cxd rhs = fockpres::fock_inner(zd, Tszg, alpha);
      double res = std::abs(lhs - rhs);
      max_residual = std::max(max_residual, res);
      if (fockpres::total_degree(delta) <= table_deg &&
          fockpres::total_degree(gamma) <= table_deg) {
        json row;
        row["delta"] = delta;
        row["gamma"] = gamma;
        row["lhs"] = json{{"re", lhs.real()}, {"im", lhs.imag()}};
        row["rhs"] = json{{"re", rhs.real()}, {"im", rhs.imag()}};
        row["residual"] = res;
        table.push_back(std::move(row));
      }
    }
  }
  json result;
  result["dual_symbol"] = fockpres::to_json(Gd);
  result["max_residual"] = max_residual;
  result["table"] = std::move(table);
  emit_json(cfg, std::move(result));
  return 0;
}

int cmd_ly_zeros(const RunConfig& cfg) {
  json in = load_input(cfg);
  fockpres::SpinModel model = fockpres::spin_model_from_json(in);
  std::vector<int> direction;
  if (in.is_object() && in.contains("direction"))
    for (const auto& e : in.at("direction")) direction.push_back(e.get<int>());
  fockpres::FugacityZeros fz = fockpres::fugacity_zeros(model, direction);

  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "re(u),im(u),abs_u_minus_1\n";
    char buf[128];
    for (cxd u : fz.zeros) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", u.real(), u.imag(),
                    std::abs(u) - 1.0);
      os << buf;
    }
    emit(cfg, os.str());
    return 0;
  }
  json zeros = json::array();
  for (cxd u : fz.zeros) {
    json z;
    z["re"] = u.real();
    z["im"] = u.imag();
    z["circle_deviation"] = std::abs(std::abs(u) - 1.0);
    zeros.push_back(std::move(z));
  }
  json result;
  result["zeros"] = std::move(zeros);
  result["max_circle_deviation"] = fz.max_circle_deviation;
  result["cleared_degree"] = static_cast<int>(fz.poly.size()) - 1;
  emit_json(cfg, std::move(result));
  return 0;
}

int cmd_transform(const RunConfig& cfg) {
  json in = load_input(cfg);
  fockpres::Measure1D mu = fockpres::measure_from_json(sub_or_self(in, "measure"));
  fockpres::Transform t = fockpres::transform(mu, cfg.degree);
  json atoms = json::array();
  for (const auto& a : t.atoms) {
    const char* kind = "";
    switch (a.kind) {
      case fockpres::TransformAtom::Kind::Const: kind = "const"; break;
      case fockpres::TransformAtom::Kind::ExpLin: kind = "exp_lin"; break;
      case fockpres::TransformAtom::Kind::Cosh: kind = "cosh"; break;
      case fockpres::TransformAtom::Kind::SinhOverZ: kind = "sinh_over_z"; break;
      case fockpres::TransformAtom::Kind::ExpQuad: kind = "exp_quad"; break;
    }
    atoms.push_back(json{{"kind", kind}, {"c", a.c}});
  }
  json result;
  result["atoms"] = std::move(atoms);
  result["truncation"] = fockpres::to_json(t.truncation);
  emit_json(cfg, std::move(result));
  return 0;
}

int cmd_gls(const RunConfig& cfg) {
  json in = load_input(cfg);
  fockpres::MPoly phi_hat = fockpres::mpoly_from_json(in.at("phi_hat"));
  fockpres::Weight alpha = weight_from(in.at("alpha"), "alpha");
  fockpres::Weight gamma = weight_from(in.at("gamma"), "gamma");
  fockpres::Weight beta = weight_from(in.at("beta"), "beta");
  std::variant<fockpres::MPoly, fockpres::GaussianForm> g;
  const json& gj = in.at("g");
  if (gj.is_object() && gj.contains("matrix"))
    g = fockpres::gaussian_form_from_json(gj);
  else
    g = fockpres::mpoly_from_json(gj);

  fockpres::GlsResult r = fockpres::gls_compose(phi_hat, g, alpha, gamma, beta,
                                                cfg.degree, cfg.trials, cfg.seed);
  json result;
  result["psi_hat"] = fockpres::to_json(r.psi_hat);
  result["ly_verdict"] = fockpres::to_json(r.ly_verdict);
  result["m_alpha"] = r.m_alpha_value;
  result["product_factor"] = r.product_factor;
  result["op_norm_sq_bound"] = r.op_norm_sq_bound;
  emit_json(cfg, std::move(result));
  return r.ly_verdict.certified_no() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zero-preserver toolkit: stability certification, operator "
               "symbols, weighted-space norms, spin-model zeros"};
  app.set_version_flag("--version", fockpres::kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string field = "complex";

  CLI::App* c_check = app.add_subcommand("check-stable", "certify a stability region");
  CLI::App* c_symbol = app.add_subcommand("symbol", "operator symbol at a truncation degree");
  CLI::App* c_classify = app.add_subcommand("classify", "stability-preserver classification");
  CLI::App* c_norm = app.add_subcommand("fock-norm", "weighted-space squared norm");
  CLI::App* c_apply = app.add_subcommand("apply", "apply an operator, directly and through the integral representation");
  CLI::App* c_adjoint = app.add_subcommand("adjoint", "weighted adjoint symbol and duality residuals");
  CLI::App* c_lyzeros = app.add_subcommand("ly-zeros", "fugacity zeros of a spin model");
  CLI::App* c_transform = app.add_subcommand("transform", "closed-form measure transform with truncation");
  CLI::App* c_gls = app.add_subcommand("gls", "composed functional psi(f) = phi(f g)");
  for (CLI::App* sub : {c_check, c_symbol, c_classify, c_norm, c_apply, c_adjoint,
                        c_lyzeros, c_transform, c_gls})
    add_common(sub, cfg);
  c_classify->add_option("--field", field, "coefficient field: complex|real")
      ->check(CLI::IsMember({"complex", "real"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (cfg.format == "csv" && !c_lyzeros->parsed())
      throw std::invalid_argument("csv format is only defined for ly-zeros reports");
    if (c_check->parsed()) { cfg.command = "check-stable"; return cmd_check_stable(cfg); }
    if (c_symbol->parsed()) { cfg.command = "symbol"; return cmd_symbol(cfg); }
    if (c_classify->parsed()) { cfg.command = "classify"; return cmd_classify(cfg, field); }
    if (c_norm->parsed()) { cfg.command = "fock-norm"; return cmd_fock_norm(cfg); }
    if (c_apply->parsed()) { cfg.command = "apply"; return cmd_apply(cfg); }
    if (c_adjoint->parsed()) { cfg.command = "adjoint"; return cmd_adjoint(cfg); }
    if (c_lyzeros->parsed()) { cfg.command = "ly-zeros"; return cmd_ly_zeros(cfg); }
    if (c_transform->parsed()) { cfg.command = "transform"; return cmd_transform(cfg); }
    if (c_gls->parsed()) { cfg.command = "gls"; return cmd_gls(cfg); }
  } catch (const fockpres::GlsHypothesisError& e) {
    std::cerr << "input error: hypothesis " << e.hypothesis << " violated: "
              << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

// invol2 command-line front end: run scenario files, re-check certificates,
// run the bundled verification suite, and evaluate small form queries.
//
// Exit codes: 0 success / all expectations met, 1 verification failure,
// 2 parse error, 3 degree-budget overflow.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "invol2/invol2.hpp"
#include "invol2/verify.hpp"

namespace {

int env_default_budget() {
  if (const char* e = std::getenv("INVOL2_DEGREE_BUDGET")) {
    int v = std::atoi(e);
    if (v >= 1) return v;
  }
  return 64;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invol2::ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

invol2::Json parse_json_file(const std::string& path) {
  invol2::Json j = invol2::Json::parse(slurp(path), nullptr, false);
  if (j.is_discarded()) throw invol2::ParseError("invalid JSON in " + path);
  return j;
}

void write_output(const invol2::Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << j.dump(2) << "\n";
  }
}

// "quat:alpha:beta[:tau|gamma]" or "m2t"
invol2::ScenarioFactor parse_factor_token(const std::string& tok) {
  invol2::ScenarioFactor f;
  if (tok == "m2t") {
    f.kind = invol2::FactorSpec::Kind::m2t;
    return f;
  }
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t p = tok.find(':', start);
    parts.push_back(tok.substr(start, p == std::string::npos ? p : p - start));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  if (parts.size() < 3 || parts[0] != "quat")
    throw invol2::ParseError("factor must be m2t or quat:alpha:beta[:tau|gamma]: " + tok);
  f.kind = invol2::FactorSpec::Kind::quaternion;
  f.alpha = parts[1];
  f.beta = parts[2];
  if (parts.size() >= 4) {
    if (parts[3] == "gamma")
      f.canonical_gamma = true;
    else if (parts[3] != "tau")
      throw invol2::ParseError("involution must be tau or gamma");
  }
  return f;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t p = s.find(',', start);
    out.push_back(s.substr(start, p == std::string::npos ? p : p - start));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return out;
}

invol2::DecomposedAlgebra build_from_flags(const std::string& vars_csv,
                                           const std::vector<std::string>& factor_tokens,
                                           int budget) {
  auto ctx = invol2::FieldCtx::rational(split_csv(vars_csv), budget);
  std::vector<invol2::FactorSpec> specs;
  for (const auto& tok : factor_tokens) {
    invol2::ScenarioFactor f = parse_factor_token(tok);
    invol2::FactorSpec fs;
    fs.kind = f.kind;
    fs.canonical_gamma = f.canonical_gamma;
    if (f.kind == invol2::FactorSpec::Kind::quaternion) {
      fs.alpha = invol2::parse_ratfunc(ctx, f.alpha);
      fs.beta = invol2::parse_ratfunc(ctx, f.beta);
    }
    specs.push_back(std::move(fs));
  }
  return invol2::build_decomposed(ctx, specs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact computer algebra for totally decomposable algebras with involution in characteristic 2"};
  app.require_subcommand(1);
  int budget = env_default_budget();
  app.add_option("--degree-budget", budget, "total-degree budget for rational functions");

  // run
  auto* run = app.add_subcommand("run", "run a scenario file and emit a certificate");
  std::string scenario_path, out_path, recheck_path;
  std::uint64_t seed_flag = 0;
  bool have_seed = false;
  run->add_option("file", scenario_path, "scenario JSON file")->required();
  auto* seed_opt = run->add_option("--seed", seed_flag, "seed override");
  run->add_option("--out", out_path, "write the certificate to this file");
  run->add_option("--recheck", recheck_path, "re-verify the witnesses of an existing certificate");

  // verify-paper
  auto* vp = app.add_subcommand("verify-paper", "run the bundled verification suite");
  int scale = 3;
  bool as_json = false;
  std::uint64_t vseed = 1;
  vp->add_option("--scale", scale, "largest instance size parameter (4 adds degree-16 replays)");
  vp->add_flag("--json", as_json, "machine-readable summary");
  vp->add_option("--seed", vseed, "seed for the randomized criteria");

  // pfister
  auto* pf = app.add_subcommand("pfister", "Pfister invariant of a factor list");
  std::vector<std::string> pf_factors;
  std::string pf_vars = "a,b,c,d";
  pf->add_option("factors", pf_factors, "factors: quat:alpha:beta[:tau|gamma] or m2t")->required();
  pf->add_option("--vars", pf_vars, "comma-separated field variables");

  // i-invariant
  auto* ii = app.add_subcommand("i-invariant", "i-invariant of a bilinear Pfister form");
  std::vector<std::string> ii_gens;
  std::string ii_vars = "a,b,c,d";
  ii->add_option("gens", ii_gens, "generators of <<g1,...,gn>>")->required();
  ii->add_option("--vars", ii_vars, "comma-separated field variables");

  // represents
  auto* rep = app.add_subcommand("represents", "does the involution represent alpha?");
  std::string rep_alpha;
  std::vector<std::string> rep_factors;
  std::string rep_vars = "a,b,c,d";
  rep->add_option("alpha", rep_alpha, "field element")->required();
  rep->add_option("--factors", rep_factors, "factors as for pfister")->required();
  rep->add_option("--vars", rep_vars, "comma-separated field variables");

  CLI11_PARSE(app, argc, argv);
  have_seed = seed_opt->count() > 0;

  try {
    if (*run) {
      invol2::Scenario sc = invol2::parse_scenario(parse_json_file(scenario_path));
      invol2::RunOptions opt;
      opt.default_budget = budget;
      if (have_seed) opt.seed_override = seed_flag;
      if (!recheck_path.empty()) {
        invol2::Json cert = parse_json_file(recheck_path);
        if (cert.value("scenario", invol2::Json()) != sc.raw)
          throw invol2::ParseError("certificate was issued for a different scenario");
        invol2::RecheckReport reprt = invol2::recheck_certificate(cert, opt);
        for (const auto& f : reprt.failures) std::cerr << "recheck: " << f << "\n";
        std::cout << (reprt.ok ? "recheck ok" : "recheck failed") << "\n";
        return reprt.ok ? 0 : 1;
      }
      invol2::Json cert = invol2::run_scenario(sc, opt);
      write_output(cert, out_path);
      return invol2::certificate_ok(cert) ? 0 : 1;
    }
    if (*vp) {
      invol2::AcceptanceOptions opt;
      opt.seed = vseed;
      opt.scale = scale;
      opt.degree_budget = budget;
      auto rs = invol2::run_acceptance(opt);
      if (as_json)
        std::cout << invol2::acceptance_to_json(rs).dump(2) << "\n";
      else
        std::cout << invol2::format_acceptance(rs);
      return invol2::acceptance_all_pass(rs) ? 0 : 1;
    }
    if (*pf) {
      invol2::DecomposedAlgebra d = build_from_flags(pf_vars, pf_factors, budget);
      invol2::Json out;
      invol2::Json gens = invol2::Json::array();
      for (const auto& g : d.pf.gens) gens.push_back(g.to_string());
      invol2::Json exp = invol2::Json::array();
      for (const auto& e : d.pf.expansion.entries) exp.push_back(e.to_string());
      out["generators"] = gens;
      out["expansion"] = exp;
      out["i_invariant"] = d.i_invariant_value();
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*ii) {
      auto ctx = invol2::FieldCtx::rational(split_csv(ii_vars), budget);
      std::vector<invol2::RatFunc> gens;
      for (const auto& g : ii_gens) gens.push_back(invol2::parse_ratfunc(ctx, g));
      invol2::PfisterForm p = invol2::make_pfister(gens);
      invol2::Json out;
      out["i_invariant"] = invol2::i_invariant(p);
      out["anisotropic"] = invol2::is_anisotropic(p.expansion).anisotropic;
      std::cout << out.dump(2) << "\n";
      return 0;
    }
    if (*rep) {
      invol2::DecomposedAlgebra d = build_from_flags(rep_vars, rep_factors, budget);
      invol2::RatFunc alpha = invol2::parse_ratfunc(d.ctx, rep_alpha);
      invol2::RepresentsResult r = invol2::represents(d, alpha);
      invol2::Json out;
      out["verdict"] = r.yes ? "yes" : "no";
      if (r.yes) out["witness"] = invol2::elem_to_json(*r.witness);
      std::cout << out.dump(2) << "\n";
      return 0;
    }
  } catch (const invol2::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const invol2::DegreeOverflow& e) {
    std::cerr << "degree overflow: " << e.what() << "\n";
    return 3;
  } catch (const invol2::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "invol2/scenario.hpp"

using namespace invol2;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kDeg8 = R"({
  "field": {"vars": ["a","b","c","d"]},
  "factors": [
    {"type": "quat", "alpha": "a", "beta": "b", "involution": "tau"},
    {"type": "quat", "alpha": "c", "beta": "d"},
    {"type": "m2t"}
  ],
  "seed": 7,
  "actions": [
    {"op": "build", "expect": {"i_invariant": 1, "kind": "orthogonal"}},
    {"op": "lemma3", "expect": {"distinct": true, "verdict": true}},
    {"op": "witness-isotropy", "expect": {"present": true}},
    {"op": "represents", "alpha": "b+d", "expect": {"verdict": "yes"}},
    {"op": "cor-ia", "x": "v1", "expect": {"i_before": 1, "i_after": 2}},
    {"op": "pos", "x": "v1", "y": "v1*v3"},
    {"op": "met", "x": "v1"},
    {"op": "quat-embed", "x": "v1+v2", "subalgebra": "s1"},
    {"op": "count"}
  ]
})";
}  // namespace

TEST_CASE("element expressions") {
  Scenario s = load_scenario_text(kDeg8);
  detail::ScenarioState st = detail::build_state(s, {});
  DecomposedAlgebra& d = st.algebra();
  REQUIRE(parse_element(d, "v1") == d.V[0]);
  REQUIRE(parse_element(d, "u2*v1 + (u2*v1 + v1)*v3") ==
          d.U[1] * d.V[0] + (d.U[1] * d.V[0] + d.V[0]) * d.V[2]);
  REQUIRE(parse_element(d, "e12_3 + e21_3") == d.V[2]);
  REQUIRE(parse_element(d, "(a+b)*v1") == (RatFunc::var(d.ctx, 0) + RatFunc::var(d.ctx, 1)) * d.V[0]);
  REQUIRE(parse_element(d, "1 + v1") == d.A->unit() + d.V[0]);
  REQUIRE(parse_element(d, "v1^2") == d.A->scalar(RatFunc::var(d.ctx, 1)));
  REQUIRE_THROWS_AS(parse_element(d, "q9"), ParseError);
  REQUIRE_THROWS_AS(parse_element(d, "v1 / v2"), ParseError);
}

TEST_CASE("scenario run produces a passing certificate") {
  Scenario s = load_scenario_text(kDeg8);
  Json cert = run_scenario(s);
  REQUIRE(certificate_ok(cert));
  REQUIRE(cert["library_version"] == kVersion);
  REQUIRE(cert["seed"] == 7);
  REQUIRE(cert["results"].size() == 9);
  for (const auto& r : cert["results"]) {
    REQUIRE(r["verdict"] == "pass");
    REQUIRE(r.contains("reverify_hash"));
  }
}

TEST_CASE("unmet expectations fail the certificate") {
  Json j = Json::parse(kDeg8);
  j["actions"] = Json::array({Json{{"op", "build"}, {"expect", Json{{"i_invariant", 0}}}}});
  Scenario s = parse_scenario(j);
  Json cert = run_scenario(s);
  REQUIRE_FALSE(certificate_ok(cert));
  REQUIRE(cert["results"][0]["error"] == "expectation not met");
}

TEST_CASE("action errors are recorded, not fatal") {
  Json j = Json::parse(kDeg8);
  j["actions"] = Json::array({Json{{"op", "met"}, {"x", "v3"}},  // v3^2 = 1 is a square
                              Json{{"op", "build"}}});
  Scenario s = parse_scenario(j);
  Json cert = run_scenario(s);
  REQUIRE_FALSE(certificate_ok(cert));
  REQUIRE(cert["results"][0]["verdict"] == "fail");
  REQUIRE(cert["results"][1]["verdict"] == "pass");
}

TEST_CASE("certificates are deterministic modulo timings") {
  Scenario s = load_scenario_text(kDeg8);
  Json c1 = run_scenario(s), c2 = run_scenario(s);
  for (Json* c : {&c1, &c2})
    for (auto& r : (*c)["results"]) r.erase("time_ms");
  REQUIRE(c1.dump() == c2.dump());
}

TEST_CASE("certificate replay") {
  Scenario s = load_scenario_text(kDeg8);
  Json cert = run_scenario(s);
  SECTION("a fresh certificate rechecks clean") {
    RecheckReport rep = recheck_certificate(cert);
    for (const auto& f : rep.failures) INFO(f);
    REQUIRE(rep.ok);
  }
  SECTION("a tampered witness is caught") {
    Json bad = cert;
    bad["results"][3]["witnesses"]["x"] = Json::object();
    REQUIRE_FALSE(recheck_certificate(bad).ok);
  }
  SECTION("a tampered verdict value is caught") {
    Json bad = cert;
    bad["results"][4]["data"]["i_after"] = 3;
    REQUIRE_FALSE(recheck_certificate(bad).ok);
  }
}

TEST_CASE("schema violations") {
  REQUIRE_THROWS_AS(load_scenario_text("not json"), ParseError);
  REQUIRE_THROWS_AS(load_scenario_text("{}"), ParseError);
  REQUIRE_THROWS_AS(load_scenario_text(R"({"field":{"vars":["a"]}})"), ParseError);
  REQUIRE_THROWS_AS(load_scenario_text(R"({"field":{"vars":["a"]},"actions":[{"op":"nope"}]})"),
                    ParseError);
  REQUIRE_THROWS_AS(
      load_scenario_text(
          R"({"field":{"vars":["a"]},"factors":[{"type":"quat"}],"actions":[]})"),
      ParseError);
  REQUIRE_THROWS_AS(
      load_scenario_text(
          R"({"field":{"vars":["a"]},"factors":[{"type":"quat","alpha":"a","beta":"a","involution":"rho"}],"actions":[]})"),
      ParseError);
}

TEST_CASE("degree budget overrides") {
  Json j = Json::parse(kDeg8);
  j["degree_budget"] = 3;
  j["factors"][0]["beta"] = "b^4";  // exceeds the budget at parse time
  j["actions"] = Json::array({Json{{"op", "build"}}});
  Scenario s = parse_scenario(j);
  REQUIRE_THROWS_AS(run_scenario(s), DegreeOverflow);
}

TEST_CASE("bundled scenario files run green") {
  for (const char* name : {"anisotropic_deg4.json", "lemma3_deg8.json", "isotropic_deg4.json",
                           "anisotropic_deg8.json", "count_deg8.json", "exm1.json"}) {
    INFO(name);
    Scenario s = load_scenario_text(slurp(std::string(INVOL2_SCENARIO_DIR) + "/" + name));
    Json cert = run_scenario(s);
    if (!certificate_ok(cert)) INFO(cert.dump(2));
    REQUIRE(certificate_ok(cert));
    RecheckReport rep = recheck_certificate(cert);
    REQUIRE(rep.ok);
  }
}

TEST_CASE("algebra and involution serialization") {
  Scenario s = load_scenario_text(kDeg8);
  detail::ScenarioState st = detail::build_state(s, {});
  const Factor& f = st.algebra().factors[0];
  Json aj = algebra_to_json(*f.alg);
  REQUIRE(aj["dim"] == 4);
  REQUIRE(aj["labels"] == Json::array({"1", "u", "v", "w"}));
  REQUIRE(aj["table"].size() > 0);
  Json ij = involution_to_json(f.invol);
  REQUIRE(ij["kind"] == "orthogonal");
  REQUIRE(ij["images"].size() == 4);
  // tau(w) = v + w
  REQUIRE(ij["images"][3] == Json({{"v", "1"}, {"w", "1"}}));
}

TEST_CASE("seed override changes the echoed seed only, deterministically") {
  Scenario s = load_scenario_text(kDeg8);
  RunOptions opt;
  opt.seed_override = 99;
  Json cert = run_scenario(s, opt);
  REQUIRE(cert["seed"] == 99);
  REQUIRE(certificate_ok(cert));
}

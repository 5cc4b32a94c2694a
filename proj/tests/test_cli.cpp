#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
  CmdResult r;
  FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string kCli = INVOL2_CLI_PATH;
const std::string kScenarios = INVOL2_SCENARIO_DIR;

}  // namespace

TEST_CASE("run exits 0 on a green scenario and emits a certificate") {
  CmdResult r = run_cmd(kCli + " run " + kScenarios + "/lemma3_deg8.json");
  REQUIRE(r.exit_code == 0);
  auto cert = nlohmann::json::parse(r.out);
  REQUIRE(cert["overall"] == "pass");
}

TEST_CASE("run --out writes the certificate and --recheck replays it") {
  const std::string cert_path = "cli_test_cert.json";
  CmdResult r1 = run_cmd(kCli + " run " + kScenarios + "/anisotropic_deg4.json --out " + cert_path);
  REQUIRE(r1.exit_code == 0);
  CmdResult r2 =
      run_cmd(kCli + " run " + kScenarios + "/anisotropic_deg4.json --recheck " + cert_path);
  REQUIRE(r2.exit_code == 0);
  REQUIRE(r2.out.find("recheck ok") != std::string::npos);
  std::remove(cert_path.c_str());
}

TEST_CASE("malformed scenario exits 2") {
  const std::string bad = "cli_test_bad.json";
  {
    std::ofstream out(bad);
    out << "{ not json";
  }
  CmdResult r = run_cmd(kCli + " run " + bad);
  REQUIRE(r.exit_code == 2);
  std::remove(bad.c_str());
}

TEST_CASE("missing scenario file exits 2") {
  CmdResult r = run_cmd(kCli + " run does_not_exist.json");
  REQUIRE(r.exit_code == 2);
}

TEST_CASE("degree overflow exits 3") {
  const std::string f = "cli_test_overflow.json";
  {
    std::ofstream out(f);
    out << R"({"field":{"vars":["a","b"],"degree_budget":3},
               "factors":[{"type":"quat","alpha":"a","beta":"b^5"}],
               "actions":[{"op":"build"}]})";
  }
  CmdResult r = run_cmd(kCli + " run " + f);
  REQUIRE(r.exit_code == 3);
  std::remove(f.c_str());
}

TEST_CASE("failed expectations exit 1") {
  const std::string f = "cli_test_expect.json";
  {
    std::ofstream out(f);
    out << R"({"field":{"vars":["a","b"]},
               "factors":[{"type":"quat","alpha":"a","beta":"b"},{"type":"m2t"}],
               "actions":[{"op":"build","expect":{"i_invariant":0}}]})";
  }
  CmdResult r = run_cmd(kCli + " run " + f);
  REQUIRE(r.exit_code == 1);
  std::remove(f.c_str());
}

TEST_CASE("pfister subcommand") {
  CmdResult r = run_cmd(kCli + " pfister quat:a:b quat:c:d m2t --vars a,b,c,d");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["generators"] == nlohmann::json::array({"b", "d", "1"}));
  REQUIRE(j["i_invariant"] == 1);
}

TEST_CASE("i-invariant subcommand") {
  CmdResult r = run_cmd(kCli + " i-invariant 1 1 --vars a");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["i_invariant"] == 2);
  REQUIRE(j["anisotropic"] == false);
}

TEST_CASE("represents subcommand") {
  CmdResult r =
      run_cmd(kCli + " represents b+d --factors quat:a:b --factors quat:c:d --vars a,b,c,d");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["verdict"] == "yes");
  CmdResult r2 = run_cmd(kCli + " represents a --factors quat:a:b --factors quat:c:d --vars a,b,c,d");
  REQUIRE(r2.exit_code == 0);
  REQUIRE(nlohmann::json::parse(r2.out)["verdict"] == "no");
}

TEST_CASE("environment variable degree budget") {
  CmdResult r = run_cmd("INVOL2_DEGREE_BUDGET=3 " + kCli + " i-invariant a^5 --vars a");
  REQUIRE(r.exit_code == 3);
}

TEST_CASE("verify-paper --json reports every criterion") {
  CmdResult r = run_cmd(kCli + " verify-paper --json");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["overall"] == "pass");
  REQUIRE(j["criteria"].size() == 10);
  for (const auto& c : j["criteria"]) REQUIRE(c["pass"] == true);
}

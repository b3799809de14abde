#include <catch2/catch.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pseudoh/cli.hpp"

using namespace pseudoh;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("verify reports the non-pseudoregular counterexample") {
  const auto r = run({"verify", "catalog:example2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pseudo-H: false") != std::string::npos);
  CHECK(r.out.find("pseudoregular: false (witness e1)") != std::string::npos);
}

TEST_CASE("verify emits a machine-readable report") {
  const auto r = run({"verify", "catalog:heisenberg1", "--out", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("command") == "verify");
  CHECK(j.at("results").at("pseudo_h") == true);
  CHECK(j.at("results").at("pseudo_h_random_max_error").get<double>() < 1e-12);
  bool all_passed = true;
  for (const auto& suite : j.at("results").at("identity_suites"))
    all_passed = all_passed && suite.at("passed").get<bool>();
  CHECK(all_passed);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"conjugate", "analytic", "--bogus"}).code == 2);
  CHECK(run({"conjugate", "analytic"}).code == 2);  // missing required options
}

TEST_CASE("validation failures exit with code 3") {
  CHECK(run({"verify", "catalog:nonsense"}).code == 3);
  CHECK(run({"verify", "no_such_file.json"}).code == 3);
  const auto r = run({"conjugate", "analytic", "--algebra", "catalog:heisenberg1",
                      "--z0", "0", "--x0", "0,0"});
  CHECK(r.code == 3);
  CHECK(r.err.find("zero initial velocity") != std::string::npos);

  CHECK(run({"conjugate", "analytic", "--algebra", "catalog:heisenberg1", "--z0", "1,2",
             "--x0", "0,0"})
            .code == 3);  // wrong coordinate count
}

TEST_CASE("analytic conjugate CSV output") {
  const auto r = run({"conjugate", "analytic", "--algebra", "catalog:heisenberg1",
                      "--z0", "1", "--x0", "1,0", "--window", "0.1,9.4", "--out", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("t0,multiplicity,branch,residual\n", 0) == 0);
  CHECK(r.out.find("lattice") != std::string::npos);
  CHECK(r.out.find("A1") != std::string::npos);
}

TEST_CASE("analytic reports are byte identical across runs") {
  const std::vector<std::string> args{"conjugate", "analytic",        "--algebra",
                                      "catalog:example1-k1", "--z0", "0,1,0",
                                      "--x0",      "1,0,0,1",         "--window",
                                      "0.1,5"};
  const auto r1 = run(args);
  const auto r2 = run(args);
  REQUIRE(r1.code == 0);
  CHECK(r1.out == r2.out);
  const auto j = nlohmann::json::parse(r1.out);
  CHECK(j.at("ic").at("b").get<double>() == Approx(-2.0));
  CHECK(j.at("results").size() == 2);
}

TEST_CASE("numeric subcommand emits oracle points") {
  const auto r = run({"conjugate", "numeric", "--algebra", "catalog:heisenberg1",
                      "--z0", "1", "--x0", "0,0", "--window", "0.1,7", "--out", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.at("results").size() == 1);
  CHECK(j.at("results")[0].at("t0").get<double>() == Approx(2.0 * M_PI).margin(1e-6));
  CHECK(j.at("results")[0].at("multiplicity").get<int>() == 2);
  CHECK(j.at("results")[0].at("branch") == "numeric");
}

TEST_CASE("crosscheck of the pure-center Heisenberg geodesic") {
  const auto r = run({"crosscheck", "--algebra", "catalog:heisenberg1", "--z0", "1",
                      "--x0", "0,0", "--window", "0.1,20"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("matched points: 3") != std::string::npos);
  CHECK(r.out.find("full match") != std::string::npos);
}

TEST_CASE("scan sweeps an invariant into CSV") {
  const auto r = run({"scan", "--algebra", "catalog:example1-k1", "--z0", "1,1,0",
                      "--x0", "1,0,0,1", "--param", "b", "--range", "-12,-3,4",
                      "--window", "0.1,4"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("param,t0,multiplicity,branch\n", 0) == 0);
  // each swept b < 0 with null z0 has one root sqrt(-12/b) in (0, 4)
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
  CHECK(r.out.find("null-center") != std::string::npos);
  CHECK(r.out.find("-3,2,2,null-center") != std::string::npos);

  const auto missing_window =
      run({"scan", "--algebra", "catalog:example1-k1", "--z0", "1,1,0", "--x0",
           "1,0,0,1", "--param", "b", "--range", "-12,-3,4"});
  CHECK(missing_window.code == 2);  // --window is required
}

TEST_CASE("algebra files work everywhere a catalog name does") {
  const std::string path = "pseudoh_cli_algebra_test.json";
  {
    std::ofstream f(path);
    f << dump_json_deterministic(algebra_to_json(heisenberg_h_type(1)));
  }
  const auto v = run({"verify", path});
  CHECK(v.code == 0);
  CHECK(v.out.find("pseudo-H: true") != std::string::npos);

  const auto c = run({"conjugate", "analytic", "--algebra", path, "--z0", "1", "--x0",
                      "0,0", "--window", "0.1,7", "--out", "csv"});
  std::remove(path.c_str());
  REQUIRE(c.code == 0);
  CHECK(c.out.find("pure-center") != std::string::npos);
}

TEST_CASE("PSEUDOH_SEED environment variable is honored") {
  setenv("PSEUDOH_SEED", "1234", 1);
  const auto r = run({"verify", "catalog:heisenberg1", "--out", "json"});
  unsetenv("PSEUDOH_SEED");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("config").at("seed").get<unsigned>() == 1234u);
}

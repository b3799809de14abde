#include <catch2/catch.hpp>

#include <cstdio>
#include <fstream>

#include "pseudoh/catalog.hpp"
#include "pseudoh/io.hpp"
#include "test_util.hpp"

using namespace pseudoh;

TEST_CASE("algebra JSON loader mirrors brackets antisymmetrically") {
  const auto j = nlohmann::json::parse(R"({
    "dim_center": 1,
    "dim_v": 2,
    "metric_center": [[1.0]],
    "metric_v": [[1.0, 0.0], [0.0, 1.0]],
    "structure": [{"a": 0, "b": 1, "z": [1.0]}]
  })");
  const auto alg = algebra_from_json(j);
  CHECK(alg.structure(0)(0, 1) == 1.0);
  CHECK(alg.structure(0)(1, 0) == -1.0);
  CHECK(is_pseudo_h_type(alg));
}

TEST_CASE("algebra JSON loader rejects malformed input") {
  auto base = nlohmann::json::parse(R"({
    "dim_center": 1, "dim_v": 2,
    "metric_center": [[1.0]],
    "metric_v": [[1.0, 0.0], [0.0, 1.0]],
    "structure": [{"a": 0, "b": 1, "z": [1.0]}]
  })");

  auto bad_order = base;
  bad_order["structure"][0]["a"] = 1;
  bad_order["structure"][0]["b"] = 0;
  CHECK_THROWS_AS(algebra_from_json(bad_order), IoError);

  auto duplicate = base;
  duplicate["structure"].push_back(base["structure"][0]);
  CHECK_THROWS_AS(algebra_from_json(duplicate), IoError);

  auto missing = base;
  missing.erase("metric_v");
  CHECK_THROWS_AS(algebra_from_json(missing), IoError);

  auto ragged = base;
  ragged["metric_v"] = nlohmann::json::parse("[[1.0, 0.0], [0.0]]");
  CHECK_THROWS_AS(algebra_from_json(ragged), IoError);
}

TEST_CASE("catalog algebras survive a file round trip") {
  const auto alg = example_singular(2);
  const std::string path = "pseudoh_roundtrip_test.json";
  {
    std::ofstream f(path);
    f << dump_json_deterministic(algebra_to_json(alg));
  }
  const auto reloaded = load_algebra_file(path);
  std::remove(path.c_str());

  std::mt19937 rng(83);
  for (int i = 0; i < 20; ++i) {
    const auto u = test_util::random_element(rng, alg);
    const auto w = test_util::random_element(rng, alg);
    CHECK(inner(alg, u, w) == Approx(inner(reloaded, u, w)).margin(1e-14));
    CHECK(test_util::max_abs(bracket(alg, u, w) - bracket(reloaded, u, w)) < 1e-14);
  }
}

TEST_CASE("deterministic JSON dump") {
  nlohmann::json j;
  j["zeta"] = 1.0 / 3.0;
  j["alpha"] = 2;
  j["list"] = {1.5, 2.5};
  j["nested"] = {{"b", true}, {"a", "text"}};
  const std::string once = dump_json_deterministic(j);
  const std::string twice = dump_json_deterministic(j);
  CHECK(once == twice);
  // keys are emitted in sorted order and floats carry 17 significant digits
  CHECK(once.find("\"alpha\"") < once.find("\"zeta\""));
  CHECK(once.find("0.33333333333333331") != std::string::npos);

  nlohmann::json inf_j;
  inf_j["v"] = std::numeric_limits<double>::infinity();
  CHECK(dump_json_deterministic(inf_j).find("null") != std::string::npos);
}

TEST_CASE("conjugate point CSV format") {
  std::vector<ConjugatePoint> pts{{2.0 * M_PI, 1, Branch::Lattice, 1e-16},
                                  {8.5, 1, Branch::A1, 2e-13}};
  const std::string csv = conjugate_points_to_csv(pts);
  CHECK(csv.rfind("t0,multiplicity,branch,residual\n", 0) == 0);
  CHECK(csv.find(",lattice,") != std::string::npos);
  CHECK(csv.find(",A1,") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

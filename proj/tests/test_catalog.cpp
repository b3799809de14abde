#include <catch2/catch.hpp>

#include "pseudoh/catalog.hpp"
#include "pseudoh/io.hpp"
#include "test_util.hpp"

using namespace pseudoh;

TEST_CASE("every catalog algebra validates and exports round-trip") {
  std::mt19937 rng(41);
  for (const auto& name : catalog_names()) {
    const auto alg = catalog_algebra(name);
    REQUIRE(alg.has_value());

    const auto reloaded = algebra_from_json(algebra_to_json(*alg));
    CHECK(reloaded.dim_center() == alg->dim_center());
    CHECK(reloaded.dim_v() == alg->dim_v());
    for (int i = 0; i < 20; ++i) {
      const auto u = test_util::random_element(rng, *alg);
      const auto w = test_util::random_element(rng, *alg);
      CHECK(inner(*alg, u, w) == Approx(inner(reloaded, u, w)).margin(1e-14));
      CHECK(test_util::max_abs(bracket(*alg, u, w) - bracket(reloaded, u, w)) < 1e-14);
      const auto z = test_util::random_central(rng, *alg);
      CHECK((j_operator(*alg, z) - j_operator(reloaded, z)).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("the non-pseudoregular example has J^2 = -4I on its null direction") {
  const auto ex2 = example_nonpseudoregular();
  const auto j = j_operator(ex2, ex2.basis_vector(0) + ex2.basis_vector(1));
  const Eigen::MatrixXd dev = j * j + 4.0 * Eigen::MatrixXd::Identity(2, 2);
  CHECK(dev.cwiseAbs().maxCoeff() < 1e-14);
  CHECK_FALSE(is_pseudo_h_type(ex2));
}

TEST_CASE("null-cone rank drop across the singular family") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int k : {1, 2, 3}) {
    const auto alg = example_singular(k);
    REQUIRE(is_pseudo_h_type(alg));
    for (int i = 0; i < 20; ++i) {
      // Null central vectors satisfy a^2 = b^2 + c^2 for the (+,-,-) metric.
      const double b = unif(rng), c = unif(rng);
      if (b == 0.0 && c == 0.0) continue;
      Eigen::Vector3d z(std::sqrt(b * b + c * c), b, c);
      const auto zv = alg.central_vector(z);
      REQUIRE(causal_class(alg, zv) == CausalClass::Null);
      CHECK(jz_rank(alg, zv) == 2 * k);
    }
  }
}

TEST_CASE("heisenberg baseline is positive definite H-type") {
  const auto h5 = heisenberg_h_type(2);
  CHECK(h5.dim_v() == 4);
  CHECK(h5.dim_center() == 1);
  CHECK(is_pseudo_h_type(h5));
  for (Eigen::Index i = 0; i < h5.dim(); ++i)
    CHECK(causal_class(h5, h5.basis_vector(i)) == CausalClass::Timelike);
  CHECK(jz_rank(h5, h5.basis_vector(0)) == 4);
}

TEST_CASE("catalog name lookup") {
  CHECK(catalog_algebra("example1-k2").has_value());
  CHECK(catalog_algebra("heisenberg3").has_value());
  CHECK_FALSE(catalog_algebra("nonsense").has_value());
  CHECK_FALSE(catalog_algebra("example1-k0").has_value());
}

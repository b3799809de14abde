#include <catch2/catch.hpp>

#include "pseudoh/algebra.hpp"
#include "pseudoh/catalog.hpp"
#include "test_util.hpp"

using namespace pseudoh;

namespace {

AlgebraDescription heisenberg3_description() {
  AlgebraDescription d;
  d.dim_center = 1;
  d.dim_v = 2;
  d.metric_center = Eigen::MatrixXd::Identity(1, 1);
  d.metric_v = Eigen::MatrixXd::Identity(2, 2);
  d.structure.assign(1, Eigen::MatrixXd::Zero(2, 2));
  d.structure[0](0, 1) = 1.0;
  d.structure[0](1, 0) = -1.0;
  return d;
}

}  // namespace

TEST_CASE("validate accepts the 3-dimensional Heisenberg algebra") {
  const auto alg = validate_algebra(heisenberg3_description());
  CHECK(alg.dim_center() == 1);
  CHECK(alg.dim_v() == 2);
  CHECK(alg.pseudo_h());
}

TEST_CASE("validate rejects a non-antisymmetric structure tensor") {
  auto d = heisenberg3_description();
  d.structure[0](1, 0) = 1.0;  // should be -1
  CHECK_THROWS_AS(validate_algebra(d), NonAntisymmetricStructure);
}

TEST_CASE("validate rejects a degenerate center metric") {
  auto d = heisenberg3_description();
  d.metric_center(0, 0) = 0.0;
  CHECK_THROWS_AS(validate_algebra(d), DegenerateMetric);
}

TEST_CASE("validate rejects asymmetric metrics and bad dimensions") {
  auto d = heisenberg3_description();
  d.metric_v(0, 1) = 0.25;  // no mirror entry
  CHECK_THROWS_AS(validate_algebra(d), AsymmetricMetric);

  d = heisenberg3_description();
  d.metric_v = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(validate_algebra(d), DimensionMismatch);

  d = heisenberg3_description();
  d.structure.push_back(Eigen::MatrixXd::Zero(2, 2));
  CHECK_THROWS_AS(validate_algebra(d), DimensionMismatch);
}

TEST_CASE("bracket reproduces the defining structure constants") {
  const auto h3 = heisenberg_h_type(1);
  const auto e1 = h3.basis_vector(1);
  const auto e2 = h3.basis_vector(2);
  const auto z = bracket(h3, e1, e2);
  CHECK(z.z_part[0] == Approx(1.0));
  CHECK(z.v_part.isZero(0.0));

  const auto ex1 = example_singular(1);
  const auto x1 = ex1.basis_vector(3 + 0);
  const auto v1 = ex1.basis_vector(3 + 2);
  const auto b = bracket(ex1, x1, v1);
  CHECK(b.z_part[0] == Approx(0.5));
  CHECK(b.z_part[1] == Approx(-0.5));
  CHECK(b.z_part[2] == Approx(0.0).margin(1e-15));
}

TEST_CASE("central elements bracket to zero") {
  const auto ex1 = example_singular(1);
  std::mt19937 rng(7);
  const auto z = test_util::random_central(rng, ex1);
  const auto u = test_util::random_element(rng, ex1);
  const auto b = bracket(ex1, z, u);
  CHECK(test_util::max_abs(b) == 0.0);
}

TEST_CASE("bracket is bilinear and antisymmetric") {
  const auto ex1 = example_singular(2);
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto u = test_util::random_element(rng, ex1);
    const auto w = test_util::random_element(rng, ex1);
    const auto s = test_util::random_element(rng, ex1);
    const double c = 0.37;
    const auto lhs = bracket(ex1, u + s * c, w);
    const auto rhs = bracket(ex1, u, w) + bracket(ex1, s, w) * c;
    CHECK(test_util::max_abs(lhs - rhs) < 1e-12);
    const auto anti = bracket(ex1, u, w) + bracket(ex1, w, u);
    CHECK(test_util::max_abs(anti) < 1e-12);
  }
}

TEST_CASE("inner products of the singular example match its definition") {
  const auto ex1 = example_singular(1);
  const auto x1 = ex1.basis_vector(3 + 0);
  const auto w1 = ex1.basis_vector(3 + 3);
  const auto z1 = ex1.basis_vector(0);
  CHECK(inner(ex1, x1, w1) == Approx(-1.0));
  CHECK(inner(ex1, z1, z1) == Approx(1.0));
  CHECK(inner(ex1, x1, ex1.zero_vector()) == 0.0);
}

TEST_CASE("J_z of the Heisenberg algebra is a quarter turn") {
  const auto h3 = heisenberg_h_type(1);
  const auto j = j_operator(h3, h3.basis_vector(0));
  Eigen::Vector2d e1(1.0, 0.0), e2(0.0, 1.0);
  CHECK(((j * e1) - e2).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(((j * e2) + e1).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("J of the zero central element vanishes") {
  const auto ex1 = example_singular(1);
  const auto j = j_operator(ex1, ex1.zero_vector());
  CHECK(j.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("j_operator rejects non-central input") {
  const auto h3 = heisenberg_h_type(1);
  CHECK_THROWS_AS(j_operator(h3, h3.basis_vector(1)), NonCentralInput);
}

TEST_CASE("J_z^2 = -(a^2 - b^2 - c^2) I on the singular example") {
  const auto ex1 = example_singular(1);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    Eigen::Vector3d abc(unif(rng), unif(rng), unif(rng));
    const auto j = ex1.j_operator_coords(abc);
    const double lambda = abc[0] * abc[0] - abc[1] * abc[1] - abc[2] * abc[2];
    const Eigen::MatrixXd dev = j * j + lambda * Eigen::MatrixXd::Identity(4, 4);
    CHECK(dev.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("defining adjoint identity and skew-adjointness of J") {
  std::mt19937 rng(17);
  for (const auto& name : catalog_names()) {
    const auto alg = *catalog_algebra(name);
    for (int i = 0; i < 25; ++i) {
      const auto z = test_util::random_central(rng, alg);
      const auto x = test_util::random_v(rng, alg);
      const auto y = test_util::random_v(rng, alg);
      const auto j = j_operator(alg, z);
      const AlgebraVector jx{Eigen::VectorXd::Zero(alg.dim_center()), j * x.v_part};
      const AlgebraVector jy{Eigen::VectorXd::Zero(alg.dim_center()), j * y.v_part};
      CHECK(inner(alg, jx, y) == Approx(inner(alg, z, bracket(alg, x, y))).margin(1e-10));
      CHECK(inner(alg, jx, y) + inner(alg, x, jy) == Approx(0.0).margin(1e-10));
    }
  }
}

TEST_CASE("pseudo-H classification of the catalog") {
  CHECK(is_pseudo_h_type(example_singular(1)));
  CHECK(is_pseudo_h_type(heisenberg_h_type(1)));
  CHECK_FALSE(is_pseudo_h_type(example_nonpseudoregular()));
}

TEST_CASE("pseudo-H identities hold on random samples") {
  // <J_z x, J_z' x> = <z,z'><x,x>;  <J_z x, J_z y> = <z,z><x,y>;
  // J_z J_z' + J_z' J_z = -2 <z,z'> I;  [x, J_z x] = <x,x> z.
  std::mt19937 rng(23);
  for (const auto& name : {"example1-k1", "example1-k2", "example1-k3", "heisenberg1",
                           "heisenberg2"}) {
    const auto alg = *catalog_algebra(name);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(alg.dim_v(), alg.dim_v());
    for (int i = 0; i < 100; ++i) {
      const auto z = test_util::random_central(rng, alg);
      const auto zp = test_util::random_central(rng, alg);
      const auto x = test_util::random_v(rng, alg);
      const auto y = test_util::random_v(rng, alg);
      const auto jz = j_operator(alg, z);
      const auto jzp = j_operator(alg, zp);
      const auto as_v = [&](const Eigen::VectorXd& v) {
        return AlgebraVector{Eigen::VectorXd::Zero(alg.dim_center()), v};
      };

      CHECK(inner(alg, as_v(jz * x.v_part), as_v(jzp * x.v_part)) ==
            Approx(inner(alg, z, zp) * inner(alg, x, x)).margin(1e-10));
      CHECK(inner(alg, as_v(jz * x.v_part), as_v(jz * y.v_part)) ==
            Approx(inner(alg, z, z) * inner(alg, x, y)).margin(1e-10));
      const Eigen::MatrixXd anti = jz * jzp + jzp * jz + 2.0 * inner(alg, z, zp) * id;
      CHECK(anti.cwiseAbs().maxCoeff() < 1e-10);
      const auto bx = bracket(alg, x, as_v(jz * x.v_part));
      const auto expected = z * inner(alg, x, x);
      CHECK(test_util::max_abs(bx - expected) < 1e-10);
    }
  }
}

TEST_CASE("pseudoregularity verdicts") {
  const auto bad = is_pseudoregular(example_nonpseudoregular());
  CHECK(bad.verdict == PseudoregularVerdict::False);
  REQUIRE(bad.witness.has_value());
  CHECK(bad.witness_name == "e1");
  CHECK(bad.witness->v_part[0] == Approx(1.0));

  CHECK(is_pseudoregular(heisenberg_h_type(1)).verdict == PseudoregularVerdict::LikelyTrue);
  CHECK(is_pseudoregular(example_singular(1)).verdict == PseudoregularVerdict::LikelyTrue);
}

TEST_CASE("causal classification follows the timelike-positive convention") {
  const auto ex1 = example_singular(1);
  const auto z1 = ex1.basis_vector(0);
  const auto z2 = ex1.basis_vector(1);
  CHECK(causal_class(ex1, z1) == CausalClass::Timelike);
  CHECK(causal_class(ex1, z1 + z2) == CausalClass::Null);
  CHECK(causal_class(ex1, z2) == CausalClass::Spacelike);
}

TEST_CASE("J_z rank halves on null central directions") {
  const auto ex1 = example_singular(1);
  const auto z1 = ex1.basis_vector(0);
  const auto z2 = ex1.basis_vector(1);
  CHECK(jz_rank(ex1, z1 + z2) == 2);
  CHECK(jz_rank(ex1, z1) == 4);
  CHECK(jz_rank(ex1, ex1.zero_vector()) == 0);

  const auto ex2 = example_singular(2);
  CHECK(jz_rank(ex2, ex2.basis_vector(0) + ex2.basis_vector(1)) == 4);
}

TEST_CASE("odd-dimensional v is never pseudo-H") {
  AlgebraDescription d;
  d.dim_center = 1;
  d.dim_v = 3;
  d.metric_center = Eigen::MatrixXd::Identity(1, 1);
  d.metric_v = Eigen::MatrixXd::Identity(3, 3);
  d.structure.assign(1, Eigen::MatrixXd::Zero(3, 3));
  d.structure[0](0, 1) = 1.0;
  d.structure[0](1, 0) = -1.0;
  const auto alg = validate_algebra(d);
  CHECK_FALSE(is_pseudo_h_type(alg));
}

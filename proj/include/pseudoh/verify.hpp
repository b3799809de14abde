#pragma once

#include <random>
#include <string>
#include <vector>

#include "pseudoh/algebra.hpp"
#include "pseudoh/geometry.hpp"

namespace pseudoh {

struct IdentityCheck {
  std::string name;
  double max_error = 0.0;
  double tol = 0.0;
  int samples = 0;
  bool passed = false;
};

/// Max entrywise deviation of J_z^2 from -<z,z> I over seeded random central
/// directions; zero exactly when the pseudo-H defining identity holds on the
/// sampled set.
inline double pseudo_h_random_error(const MetricNilpotentAlgebra& alg, int samples = 100,
                                    unsigned seed = 0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  const Eigen::Index p = alg.dim_center();
  const Eigen::Index q = alg.dim_v();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(q, q);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd z(p);
    for (Eigen::Index i = 0; i < p; ++i) z[i] = unif(rng);
    const double zz = z.dot(alg.metric_center() * z);
    const Eigen::MatrixXd j = alg.j_operator_coords(z);
    worst = std::max(worst, (j * j + zz * id).cwiseAbs().maxCoeff());
  }
  return worst;
}

/// Scalar-square diagnostic for a distinguished central direction: the
/// best-fit lambda with J_z^2 ~ lambda I, the entrywise deviation from that
/// scalar matrix, and the pseudo-H prediction -<z,z>.
struct ScalarSquareCheck {
  std::string direction;
  std::vector<double> coords;
  double lambda = 0.0;
  double deviation_from_scalar = 0.0;
  double expected_lambda = 0.0;
};

inline std::vector<ScalarSquareCheck> scalar_square_checks(
    const MetricNilpotentAlgebra& alg) {
  const Eigen::Index p = alg.dim_center();
  const Eigen::Index q = alg.dim_v();
  std::vector<std::pair<std::string, Eigen::VectorXd>> directions;
  for (Eigen::Index a = 0; a < p; ++a) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(p);
    z[a] = 1.0;
    directions.emplace_back("z" + std::to_string(a + 1), z);
  }
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = a + 1; b < p; ++b) {
      Eigen::VectorXd zp = Eigen::VectorXd::Zero(p), zm = Eigen::VectorXd::Zero(p);
      zp[a] = zp[b] = 1.0;
      zm[a] = 1.0;
      zm[b] = -1.0;
      directions.emplace_back(
          "z" + std::to_string(a + 1) + "+z" + std::to_string(b + 1), zp);
      directions.emplace_back(
          "z" + std::to_string(a + 1) + "-z" + std::to_string(b + 1), zm);
    }
  }

  std::vector<ScalarSquareCheck> out;
  for (const auto& [name, z] : directions) {
    const Eigen::MatrixXd j2 = alg.j_operator_coords(z) * alg.j_operator_coords(z);
    ScalarSquareCheck c;
    c.direction = name;
    c.coords.assign(z.data(), z.data() + z.size());
    c.lambda = j2.trace() / static_cast<double>(q);
    c.deviation_from_scalar =
        (j2 - c.lambda * Eigen::MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff();
    c.expected_lambda = -z.dot(alg.metric_center() * z);
    if (c.expected_lambda == 0.0) c.expected_lambda = 0.0;  // normalize -0
    out.push_back(std::move(c));
  }
  return out;
}

/// Randomized identity suites: connection and curvature identities valid on
/// every validated algebra, plus the J identity suite that characterizes
/// pseudo-H algebras (run only when the algebra is pseudo-H).
inline std::vector<IdentityCheck> run_identity_suites(const MetricNilpotentAlgebra& alg,
                                                      int samples = 100,
                                                      unsigned seed = 0,
                                                      double tol = 1e-9) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Eigen::Index p = alg.dim_center();
  const Eigen::Index q = alg.dim_v();

  auto rand_vec = [&](Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = unif(rng);
    return v;
  };
  auto rand_el = [&] { return AlgebraVector{rand_vec(p), rand_vec(q)}; };
  auto max_abs = [](const AlgebraVector& u) {
    double m = 0.0;
    if (u.z_part.size()) m = u.z_part.cwiseAbs().maxCoeff();
    if (u.v_part.size()) m = std::max(m, u.v_part.cwiseAbs().maxCoeff());
    return m;
  };

  std::vector<IdentityCheck> checks;
  auto add = [&](const std::string& name, double err) {
    checks.push_back({name, err, tol, samples, err <= tol});
  };

  if (alg.pseudo_h()) {
    double e1 = 0.0, e2 = 0.0, e3 = 0.0, e4 = 0.0;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(q, q);
    for (int s = 0; s < samples; ++s) {
      const Eigen::VectorXd z = rand_vec(p), zp = rand_vec(p);
      const Eigen::VectorXd x = rand_vec(q), y = rand_vec(q);
      const Eigen::MatrixXd jz = alg.j_operator_coords(z);
      const Eigen::MatrixXd jzp = alg.j_operator_coords(zp);
      const double zz = z.dot(alg.metric_center() * z);
      const double zzp = z.dot(alg.metric_center() * zp);
      const double xx = x.dot(alg.metric_v() * x);
      const double xy = x.dot(alg.metric_v() * y);

      e1 = std::max(e1, std::abs((jz * x).dot(alg.metric_v() * (jzp * x)) - zzp * xx));
      e2 = std::max(e2, std::abs((jz * x).dot(alg.metric_v() * (jz * y)) - zz * xy));
      e3 = std::max(e3, (jz * jzp + jzp * jz + 2.0 * zzp * id).cwiseAbs().maxCoeff());
      e4 = std::max(
          e4, (alg.bracket_coords(x, jz * x) - xx * z).cwiseAbs().maxCoeff());
    }
    add("j_mixed_inner", e1);
    add("j_isometry", e2);
    add("j_anticommutator", e3);
    add("bracket_j_identity", e4);
  }

  {
    double torsion = 0.0, compat = 0.0;
    for (int s = 0; s < samples; ++s) {
      const auto x = rand_el(), y = rand_el(), z = rand_el();
      torsion = std::max(torsion, max_abs(connection(alg, x, y) - connection(alg, y, x) -
                                          bracket(alg, x, y)));
      compat = std::max(compat, std::abs(inner(alg, connection(alg, x, y), z) +
                                         inner(alg, y, connection(alg, x, z))));
    }
    add("torsion_free", torsion);
    add("metric_compatibility", compat);
  }

  {
    double skew = 0.0, pair = 0.0, bianchi = 0.0;
    for (int s = 0; s < samples; ++s) {
      const auto x = rand_el(), y = rand_el(), z = rand_el(), w = rand_el();
      const double rxyzw = inner(alg, curvature(alg, x, y, z), w);
      skew = std::max(skew, std::abs(rxyzw + inner(alg, curvature(alg, y, x, z), w)));
      skew = std::max(skew, std::abs(rxyzw + inner(alg, curvature(alg, x, y, w), z)));
      pair = std::max(pair, std::abs(rxyzw - inner(alg, curvature(alg, z, w, x), y)));
      bianchi = std::max(bianchi, max_abs(curvature(alg, x, y, z) + curvature(alg, y, z, x) +
                                          curvature(alg, z, x, y)));
    }
    add("curvature_skew_symmetry", skew);
    add("curvature_pair_symmetry", pair);
    add("first_bianchi", bianchi);
  }

  {
    double err = 0.0;
    for (int s = 0; s < samples; ++s) {
      const auto ic = GeodesicIC::make(alg, rand_vec(p), rand_vec(q));
      const double t = 3.0 * unif(rng);
      const auto y = rand_el();
      const auto gdot = geodesic_velocity(alg, ic, t);
      err = std::max(err, max_abs(jacobi_operator_along(alg, ic, t, y) -
                                  curvature(alg, y, gdot, gdot)));
    }
    add("jacobi_operator_consistency", err);
  }

  return checks;
}

}  // namespace pseudoh

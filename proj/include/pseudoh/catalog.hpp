#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pseudoh/algebra.hpp"

namespace pseudoh {

/// Pseudo-H algebra with 3-dimensional center of signature (+,-,-) and a
/// null basis (x_1..x_k, y_1..y_k, v_1..v_k, w_1..w_k) of v. J_z drops rank
/// on the null cone of the center, so the algebra is singular.
///
/// Nonzero inner products: <x_i, w_i> = -1, <y_i, v_i> = 1,
/// <z_1,z_1> = 1, <z_2,z_2> = <z_3,z_3> = -1.
/// Nonzero brackets: [x_i,v_i] = (z_1 - z_2)/2, [x_i,w_i] = z_3,
/// [y_i,v_i] = z_3, [y_i,w_i] = 2(z_1 + z_2).
inline MetricNilpotentAlgebra example_singular(int k) {
  if (k < 1) throw DimensionMismatch("example_singular requires k >= 1");
  AlgebraDescription d;
  d.dim_center = 3;
  d.dim_v = 4 * k;
  d.metric_center = Eigen::MatrixXd::Zero(3, 3);
  d.metric_center(0, 0) = 1.0;
  d.metric_center(1, 1) = -1.0;
  d.metric_center(2, 2) = -1.0;
  d.metric_v = Eigen::MatrixXd::Zero(d.dim_v, d.dim_v);
  for (int i = 0; i < k; ++i) {
    const Eigen::Index x = i, y = k + i, v = 2 * k + i, w = 3 * k + i;
    d.metric_v(x, w) = d.metric_v(w, x) = -1.0;
    d.metric_v(y, v) = d.metric_v(v, y) = 1.0;
    d.add_bracket(x, v, Eigen::Vector3d(0.5, -0.5, 0.0));
    d.add_bracket(x, w, Eigen::Vector3d(0.0, 0.0, 1.0));
    d.add_bracket(y, v, Eigen::Vector3d(0.0, 0.0, 1.0));
    d.add_bracket(y, w, Eigen::Vector3d(2.0, 2.0, 0.0));
  }
  return validate_algebra(d);
}

/// 4-dimensional algebra with [e_1,e_2] = z_1 - z_2, Euclidean v and a
/// (+,-) center. J on nonnull central directions is nonsingular, yet
/// ad_{e_1} is not surjective, so the algebra is not pseudoregular; it is
/// not of pseudo-H type either (J^2 = -4I on the null direction z_1 + z_2).
inline MetricNilpotentAlgebra example_nonpseudoregular() {
  AlgebraDescription d;
  d.dim_center = 2;
  d.dim_v = 2;
  d.metric_center = Eigen::MatrixXd::Zero(2, 2);
  d.metric_center(0, 0) = 1.0;
  d.metric_center(1, 1) = -1.0;
  d.metric_v = Eigen::MatrixXd::Identity(2, 2);
  d.add_bracket(0, 1, Eigen::Vector2d(1.0, -1.0));
  return validate_algebra(d);
}

/// Riemannian H-type baseline: dim v = 2m, one-dimensional center,
/// [e_i, e_{m+i}] = z, all metric blocks identity. J_z is the standard
/// symplectic rotation.
inline MetricNilpotentAlgebra heisenberg_h_type(int m) {
  if (m < 1) throw DimensionMismatch("heisenberg_h_type requires m >= 1");
  AlgebraDescription d;
  d.dim_center = 1;
  d.dim_v = 2 * m;
  d.metric_center = Eigen::MatrixXd::Identity(1, 1);
  d.metric_v = Eigen::MatrixXd::Identity(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    d.add_bracket(i, m + i, Eigen::VectorXd::Ones(1));
  return validate_algebra(d);
}

/// Names understood by catalog_algebra(); these are also the `catalog:NAME`
/// identifiers of the CLI.
inline std::vector<std::string> catalog_names() {
  return {"example1-k1", "example1-k2", "example1-k3", "example2",
          "heisenberg1", "heisenberg2", "heisenberg3"};
}

inline std::optional<MetricNilpotentAlgebra> catalog_algebra(const std::string& name) {
  if (name.rfind("example1-k", 0) == 0) {
    const std::string suffix = name.substr(10);
    try {
      std::size_t pos = 0;
      const int k = std::stoi(suffix, &pos);
      if (pos == suffix.size() && k >= 1) return example_singular(k);
    } catch (const std::exception&) {
    }
    return std::nullopt;
  }
  if (name == "example2") return example_nonpseudoregular();
  if (name.rfind("heisenberg", 0) == 0) {
    const std::string suffix = name.substr(10);
    try {
      std::size_t pos = 0;
      const int m = std::stoi(suffix, &pos);
      if (pos == suffix.size() && m >= 1) return heisenberg_h_type(m);
    } catch (const std::exception&) {
    }
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace pseudoh

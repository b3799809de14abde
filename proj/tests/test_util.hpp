#pragma once

#include <Eigen/Dense>

#include <functional>
#include <random>

#include "pseudoh/algebra.hpp"

namespace test_util {

inline Eigen::VectorXd random_vector(std::mt19937& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = unif(rng);
  return v;
}

inline pseudoh::AlgebraVector random_element(std::mt19937& rng,
                                             const pseudoh::MetricNilpotentAlgebra& alg) {
  return {random_vector(rng, alg.dim_center()), random_vector(rng, alg.dim_v())};
}

inline pseudoh::AlgebraVector random_central(std::mt19937& rng,
                                             const pseudoh::MetricNilpotentAlgebra& alg) {
  return {random_vector(rng, alg.dim_center()), Eigen::VectorXd::Zero(alg.dim_v())};
}

inline pseudoh::AlgebraVector random_v(std::mt19937& rng,
                                       const pseudoh::MetricNilpotentAlgebra& alg) {
  return {Eigen::VectorXd::Zero(alg.dim_center()), random_vector(rng, alg.dim_v())};
}

inline double max_abs(const pseudoh::AlgebraVector& u) {
  double m = 0.0;
  if (u.z_part.size()) m = u.z_part.cwiseAbs().maxCoeff();
  if (u.v_part.size()) m = std::max(m, u.v_part.cwiseAbs().maxCoeff());
  return m;
}

/// Independent long-double bisection oracle for frozen expected roots.
/// Requires a sign change on [lo, hi].
inline double bisect_root(const std::function<long double(long double)>& f, long double lo,
                          long double hi) {
  long double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const long double mid = (lo + hi) / 2;
    if (mid == lo || mid == hi) break;
    const long double fm = f(mid);
    if (fm == 0) return static_cast<double>(mid);
    if (flo * fm < 0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return static_cast<double>((lo + hi) / 2);
}

}  // namespace test_util

#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <vector>

#include "pseudoh/algebra.hpp"

namespace pseudoh {

/// Left-invariant Levi-Civita connection evaluated on algebra elements:
///   grad_z z' = 0,  grad_z e = grad_e z = -J_z e / 2,  grad_e e' = [e,e']/2,
/// extended bilinearly over the splitting n = z (+) v.
inline AlgebraVector connection(const MetricNilpotentAlgebra& alg, const AlgebraVector& x,
                                const AlgebraVector& y) {
  alg.check_conforms(x, "connection");
  alg.check_conforms(y, "connection");
  Eigen::VectorXd v_out =
      -0.5 * (alg.j_operator_coords(x.z_part) * y.v_part +
              alg.j_operator_coords(y.z_part) * x.v_part);
  Eigen::VectorXd z_out = 0.5 * alg.bracket_coords(x.v_part, y.v_part);
  return {std::move(z_out), std::move(v_out)};
}

/// Curvature tensor R(x, y) w, assembled from the component formulas on the
/// z/v splitting:
///   R(z,z')z'' = 0
///   R(z,z')e   = (J_z J_z' - J_z' J_z) e / 4
///   R(z,e)z'   = J_z J_z' e / 4
///   R(z,e)e'   = [e, J_z e'] / 4
///   R(e,e')z   = -([e, J_z e'] + [J_z e, e']) / 4
///   R(e,e')e'' = (J_[e,e''] e' - J_[e',e''] e) / 4 + J_[e,e'] e'' / 2
/// with the mixed orderings obtained from antisymmetry in the first two slots.
inline AlgebraVector curvature(const MetricNilpotentAlgebra& alg, const AlgebraVector& x,
                               const AlgebraVector& y, const AlgebraVector& w) {
  alg.check_conforms(x, "curvature");
  alg.check_conforms(y, "curvature");
  alg.check_conforms(w, "curvature");

  const Eigen::MatrixXd jx = alg.j_operator_coords(x.z_part);
  const Eigen::MatrixXd jy = alg.j_operator_coords(y.z_part);
  const Eigen::MatrixXd jw = alg.j_operator_coords(w.z_part);
  const Eigen::VectorXd& ex = x.v_part;
  const Eigen::VectorXd& ey = y.v_part;
  const Eigen::VectorXd& ew = w.v_part;

  Eigen::VectorXd v_out = Eigen::VectorXd::Zero(alg.dim_v());
  // R(z_x, z_y) e_w
  v_out += 0.25 * (jx * (jy * ew) - jy * (jx * ew));
  // R(z_x, e_y) z_w and R(e_x, z_y) z_w
  v_out += 0.25 * (jx * (jw * ey)) - 0.25 * (jy * (jw * ex));
  // R(e_x, e_y) e_w
  v_out += 0.25 * (alg.j_operator_coords(alg.bracket_coords(ex, ew)) * ey -
                   alg.j_operator_coords(alg.bracket_coords(ey, ew)) * ex) +
           0.5 * (alg.j_operator_coords(alg.bracket_coords(ex, ey)) * ew);

  Eigen::VectorXd z_out = Eigen::VectorXd::Zero(alg.dim_center());
  // R(z_x, e_y) e_w and R(e_x, z_y) e_w
  z_out += 0.25 * alg.bracket_coords(ey, jx * ew);
  z_out -= 0.25 * alg.bracket_coords(ex, jy * ew);
  // R(e_x, e_y) z_w
  z_out -= 0.25 * (alg.bracket_coords(ex, jw * ey) + alg.bracket_coords(jw * ex, ey));

  return {std::move(z_out), std::move(v_out)};
}

/// Initial data of a geodesic through the identity, z0 in the center and x0
/// in v, together with the cached scalar invariants a = <z0,z0>,
/// b = <x0,x0>, g = a + b and the operator J = J_{z0}.
struct GeodesicIC {
  Eigen::VectorXd z0;  // center coordinates
  Eigen::VectorXd x0;  // v coordinates
  double a = 0.0;
  double b = 0.0;
  double g = 0.0;
  Eigen::MatrixXd J;

  static GeodesicIC make(const MetricNilpotentAlgebra& alg, const Eigen::VectorXd& z0,
                         const Eigen::VectorXd& x0) {
    if (z0.size() != alg.dim_center() || x0.size() != alg.dim_v())
      throw DimensionMismatch("GeodesicIC: coordinate sizes do not match algebra");
    GeodesicIC ic;
    ic.z0 = z0;
    ic.x0 = x0;
    ic.a = z0.dot(alg.metric_center() * z0);
    ic.b = x0.dot(alg.metric_v() * x0);
    ic.g = ic.a + ic.b;
    ic.J = alg.j_operator_coords(z0);
    return ic;
  }

  AlgebraVector velocity0(const MetricNilpotentAlgebra& alg) const {
    (void)alg;
    return {z0, x0};
  }
};

/// General dense matrix exponential (scaling-and-squaring Pade), used as the
/// fallback when no closed form applies.
inline Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m) {
  return m.exp();
}

/// e^{tJ} for J = J_{z0}. On pseudo-H algebras J^2 = -a I with a = <z0,z0>,
/// which gives closed forms:
///   a > 0: cos(sqrt(a) t) I + sin(sqrt(a) t)/sqrt(a) J
///   a < 0: cosh(sqrt(-a) t) I + sinh(sqrt(-a) t)/sqrt(-a) J
///   a = 0: I + t J
/// Other algebras fall back to the generic matrix exponential.
inline Eigen::MatrixXd exp_tJ(const MetricNilpotentAlgebra& alg, const GeodesicIC& ic,
                              double t) {
  const Eigen::Index q = alg.dim_v();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(q, q);
  if (!alg.pseudo_h()) return matrix_exponential(t * ic.J);
  const double null_cut = 1e-9 * (1.0 + ic.z0.squaredNorm());
  if (ic.a > null_cut) {
    const double al = std::sqrt(ic.a);
    return std::cos(al * t) * id + (std::sin(al * t) / al) * ic.J;
  }
  if (ic.a < -null_cut) {
    const double be = std::sqrt(-ic.a);
    return std::cosh(be * t) * id + (std::sinh(be * t) / be) * ic.J;
  }
  return id + t * ic.J;
}

/// Left-trivialized geodesic velocity z0 + e^{tJ} x0.
inline AlgebraVector geodesic_velocity(const MetricNilpotentAlgebra& alg,
                                       const GeodesicIC& ic, double t) {
  return {ic.z0, exp_tJ(alg, ic, t) * ic.x0};
}

/// Jacobi operator along the geodesic, applied to y = z + x with z central
/// and x in v. With x' = e^{tJ} x0 and J = J_{z0}:
///   v part: 3/4 J_{[x,x']} x' + 1/2 J_z J x' - 1/4 J J_z x' - 1/4 J^2 x
///   z part: -1/2 [x, Jx'] + 1/4 [x', Jx] + 1/4 [x', J_z x']
/// This agrees with curvature(y, gdot, gdot) for gdot = z0 + x'.
inline AlgebraVector jacobi_operator_along(const MetricNilpotentAlgebra& alg,
                                           const GeodesicIC& ic, double t,
                                           const AlgebraVector& y) {
  alg.check_conforms(y, "jacobi_operator_along");
  const Eigen::VectorXd xp = exp_tJ(alg, ic, t) * ic.x0;
  const Eigen::VectorXd& x = y.v_part;
  const Eigen::MatrixXd jz = alg.j_operator_coords(y.z_part);
  const Eigen::VectorXd j_xp = ic.J * xp;
  const Eigen::VectorXd jz_xp = jz * xp;

  Eigen::VectorXd v_out =
      0.75 * (alg.j_operator_coords(alg.bracket_coords(x, xp)) * xp) +
      0.5 * (jz * j_xp) - 0.25 * (ic.J * jz_xp) - 0.25 * (ic.J * (ic.J * x));

  Eigen::VectorXd z_out = -0.5 * alg.bracket_coords(x, j_xp) +
                          0.25 * alg.bracket_coords(xp, ic.J * x) +
                          0.25 * alg.bracket_coords(xp, jz_xp);

  return {std::move(z_out), std::move(v_out)};
}

/// Detailed result of the totally geodesic subalgebra certificate.
struct SubalgebraCheck {
  bool closed_under_bracket = false;
  bool closed_under_connection = false;
  /// The induced inner product on the span is degenerate. The certificate
  /// below is a sufficient condition in the nondegenerate case; for
  /// degenerate spans it certifies closure of the left-invariant data only.
  bool induced_metric_degenerate = false;

  bool certified() const { return closed_under_bracket && closed_under_connection; }
};

inline SubalgebraCheck check_totally_geodesic_subalgebra(
    const MetricNilpotentAlgebra& alg, const std::vector<AlgebraVector>& basis,
    double tol = 1e-10) {
  if (basis.empty()) throw DependentBasis("empty basis");
  const Eigen::Index n = alg.dim();
  const Eigen::Index m = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd span(n, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& u = basis[static_cast<std::size_t>(i)];
    alg.check_conforms(u, "is_totally_geodesic_subalgebra");
    span.col(i) << u.z_part, u.v_part;
  }
  if (matrix_rank(span, 1e-12) < m)
    throw DependentBasis("basis vectors are linearly dependent");

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(span);
  auto in_span = [&](const AlgebraVector& u) {
    Eigen::VectorXd w(n);
    w << u.z_part, u.v_part;
    const Eigen::VectorXd coeffs = cod.solve(w);
    return (span * coeffs - w).cwiseAbs().maxCoeff() <= tol * (1.0 + w.cwiseAbs().maxCoeff());
  };

  SubalgebraCheck out;
  out.closed_under_bracket = true;
  out.closed_under_connection = true;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& u = basis[static_cast<std::size_t>(i)];
      const auto& w = basis[static_cast<std::size_t>(j)];
      if (j > i && !in_span(bracket(alg, u, w))) out.closed_under_bracket = false;
      if (!in_span(connection(alg, u, w))) out.closed_under_connection = false;
    }
  }

  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      gram(i, j) = inner(alg, basis[static_cast<std::size_t>(i)],
                         basis[static_cast<std::size_t>(j)]);
  out.induced_metric_degenerate = matrix_rank(gram, 1e-10) < m;
  return out;
}

/// True iff span(basis) is closed under both bracket and connection. For
/// left-invariant data this certifies that the subgroup generated by the
/// span is totally geodesic (sufficient condition; see SubalgebraCheck for
/// the degenerate-span caveat).
inline bool is_totally_geodesic_subalgebra(const MetricNilpotentAlgebra& alg,
                                           const std::vector<AlgebraVector>& basis,
                                           double tol = 1e-10) {
  return check_totally_geodesic_subalgebra(alg, basis, tol).certified();
}

}  // namespace pseudoh

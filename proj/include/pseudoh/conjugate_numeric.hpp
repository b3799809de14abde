#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pseudoh/algebra.hpp"
#include "pseudoh/conjugate_analytic.hpp"
#include "pseudoh/geometry.hpp"
#include "pseudoh/ode.hpp"

namespace pseudoh {

enum class IntegratorMethod { Rk45Adaptive, Rk4Fixed };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::Rk45Adaptive;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double step = 1e-3;  // fixed-step mode only
  int scan_points_per_period = 64;
  double rank_tol = 1e-7;    // relative singular value threshold
  double bisect_tol = 1e-9;  // width target for the minimum refinement
  double dead_zone_frac = 1e-3;
  // A refined minimum must also be a sharp dip against its bracket: genuine
  // zeros shrink smin by orders of magnitude, while exponentially growing
  // Jacobi blocks can push smin/sigma_max below rank_tol without any actual
  // rank drop.
  double dip_ratio = 1e-3;
  // Shared cap on integration steps across a whole scan/detection run.
  // Spacelike z0 with nonzero x0 makes the Jacobi coefficients grow like
  // e^{2 beta t}, so overlong hyperbolic windows fail fast instead of
  // grinding for hours.
  long max_total_steps = 2000000;

  void validate() const {
    if (rel_tol <= 0.0 || abs_tol <= 0.0 || step <= 0.0 || rank_tol <= 0.0 ||
        bisect_tol <= 0.0 || dip_ratio <= 0.0)
      throw Error("IntegratorConfig: tolerances must be positive");
    if (scan_points_per_period < 32)
      throw Error("IntegratorConfig: scan_points_per_period must be >= 32");
    if (max_total_steps <= 0)
      throw Error("IntegratorConfig: max_total_steps must be positive");
  }
};

/// Matrix whose column i is the Jacobi field Y_i(t) with Y_i(0) = 0 and
/// (grad_gdot Y_i)(0) = basis vector i, in left-trivialized coordinates.
/// Rank drop of M signals a conjugate point.
struct JacobiEndpointMatrix {
  double t = 0.0;
  Eigen::MatrixXd M;
  double smin = 0.0;
  double sigma_max = 0.0;
  double logdet = 0.0;  // log |det M|, -inf when singular
  int det_sign = 0;
};

namespace detail {

/// Shared per-evaluation work of the first-order Jacobi system
///   Y' = P - Gamma(gdot, Y),   P' = -R_gdot(Y) - Gamma(gdot, P)
/// with Gamma the left-invariant connection and x' = e^{tJ} x0 the v part
/// of the velocity.
class JacobiSystem {
public:
  JacobiSystem(const MetricNilpotentAlgebra& alg, const GeodesicIC& ic)
      : alg_(alg), ic_(ic), p_(alg.dim_center()), q_(alg.dim_v()), n_(p_ + q_) {}

  Eigen::Index state_dim() const { return 2 * n_ * n_; }
  Eigen::Index n() const { return n_; }

  /// One column: state (Y, P) as p+q coordinate pairs.
  void column_rhs(double t, const Eigen::VectorXd& y_z, const Eigen::VectorXd& y_v,
                  const Eigen::VectorXd& p_z, const Eigen::VectorXd& p_v,
                  Eigen::VectorXd& yd_z, Eigen::VectorXd& yd_v, Eigen::VectorXd& pd_z,
                  Eigen::VectorXd& pd_v) const {
    const Eigen::VectorXd xp = exp_tJ(alg_, ic_, t) * ic_.x0;
    column_rhs_with_xp(xp, y_z, y_v, p_z, p_v, yd_z, yd_v, pd_z, pd_v);
  }

  void column_rhs_with_xp(const Eigen::VectorXd& xp, const Eigen::VectorXd& y_z,
                          const Eigen::VectorXd& y_v, const Eigen::VectorXd& p_z,
                          const Eigen::VectorXd& p_v, Eigen::VectorXd& yd_z,
                          Eigen::VectorXd& yd_v, Eigen::VectorXd& pd_z,
                          Eigen::VectorXd& pd_v) const {
    // Gamma(gdot, U) with gdot = z0 + x'
    auto gamma_v = [&](const Eigen::VectorXd& u_z, const Eigen::VectorXd& u_v) {
      return (-0.5 * (ic_.J * u_v + alg_.j_operator_coords(u_z) * xp)).eval();
    };
    auto gamma_z = [&](const Eigen::VectorXd& u_v) {
      return (0.5 * alg_.bracket_coords(xp, u_v)).eval();
    };

    // R_gdot(Y), same expression as jacobi_operator_along
    const Eigen::MatrixXd jz = alg_.j_operator_coords(y_z);
    const Eigen::VectorXd j_xp = ic_.J * xp;
    const Eigen::VectorXd jz_xp = jz * xp;
    const Eigen::VectorXd r_v =
        0.75 * (alg_.j_operator_coords(alg_.bracket_coords(y_v, xp)) * xp) +
        0.5 * (jz * j_xp) - 0.25 * (ic_.J * jz_xp) - 0.25 * (ic_.J * (ic_.J * y_v));
    const Eigen::VectorXd r_z = -0.5 * alg_.bracket_coords(y_v, j_xp) +
                                0.25 * alg_.bracket_coords(xp, ic_.J * y_v) +
                                0.25 * alg_.bracket_coords(xp, jz_xp);

    yd_z = p_z - gamma_z(y_v);
    yd_v = p_v - gamma_v(y_z, y_v);
    pd_z = -r_z - gamma_z(p_v);
    pd_v = -r_v - gamma_v(p_z, p_v);
  }

  /// Batched right-hand side on the flattened state [vec(Y); vec(P)],
  /// Y and P being n x n with one Jacobi field per column.
  void matrix_rhs(double t, const Eigen::VectorXd& state, Eigen::VectorXd& deriv) const {
    const Eigen::VectorXd xp = exp_tJ(alg_, ic_, t) * ic_.x0;
    deriv.resize(state.size());
    const Eigen::Index nn = n_ * n_;
    Eigen::Map<const Eigen::MatrixXd> ym(state.data(), n_, n_);
    Eigen::Map<const Eigen::MatrixXd> pm(state.data() + nn, n_, n_);
    Eigen::Map<Eigen::MatrixXd> ydm(deriv.data(), n_, n_);
    Eigen::Map<Eigen::MatrixXd> pdm(deriv.data() + nn, n_, n_);

    Eigen::VectorXd yd_z(p_), yd_v(q_), pd_z(p_), pd_v(q_);
    for (Eigen::Index j = 0; j < n_; ++j) {
      column_rhs_with_xp(xp, ym.col(j).head(p_), ym.col(j).tail(q_), pm.col(j).head(p_),
                         pm.col(j).tail(q_), yd_z, yd_v, pd_z, pd_v);
      ydm.col(j) << yd_z, yd_v;
      pdm.col(j) << pd_z, pd_v;
    }
  }

  Eigen::VectorXd initial_state() const {
    Eigen::VectorXd state = Eigen::VectorXd::Zero(state_dim());
    Eigen::Map<Eigen::MatrixXd>(state.data() + n_ * n_, n_, n_).setIdentity();
    return state;
  }

private:
  const MetricNilpotentAlgebra& alg_;
  const GeodesicIC& ic_;
  Eigen::Index p_, q_, n_;
};

}  // namespace detail

/// First-order reduction of the Jacobi equation for a single field:
/// given (Y, P) with P = grad_gdot Y, returns (Y', P').
inline std::pair<AlgebraVector, AlgebraVector> jacobi_system_rhs(
    const MetricNilpotentAlgebra& alg, const GeodesicIC& ic, double t,
    const AlgebraVector& y, const AlgebraVector& p) {
  alg.check_conforms(y, "jacobi_system_rhs");
  alg.check_conforms(p, "jacobi_system_rhs");
  detail::JacobiSystem sys(alg, ic);
  Eigen::VectorXd yd_z, yd_v, pd_z, pd_v;
  sys.column_rhs(t, y.z_part, y.v_part, p.z_part, p.v_part, yd_z, yd_v, pd_z, pd_v);
  return {AlgebraVector{std::move(yd_z), std::move(yd_v)},
          AlgebraVector{std::move(pd_z), std::move(pd_v)}};
}

namespace detail {

inline double scan_step(const GeodesicIC& ic, Window w, const IntegratorConfig& cfg) {
  double characteristic;
  const double null_cut = 1e-9 * (1.0 + ic.z0.squaredNorm());
  if (ic.a > null_cut)
    characteristic = 2.0 * M_PI / std::sqrt(ic.a);
  else if (ic.a < -null_cut)
    characteristic = 1.0 / std::sqrt(-ic.a);
  else if (ic.b < 0.0)
    characteristic = std::sqrt(-12.0 / ic.b);
  else
    characteristic = w.t_max - w.t_min;
  // A window-relative floor keeps the grid usable when the natural period
  // dwarfs the window (nearly null z0).
  characteristic = std::min(characteristic, 2.0 * (w.t_max - w.t_min));
  return characteristic / static_cast<double>(cfg.scan_points_per_period);
}

/// Integrates the full Jacobi basis and caches the state at every scan-grid
/// node, so nearby off-grid states can be reproduced cheaply.
class JacobiBasisIntegration {
public:
  JacobiBasisIntegration(const MetricNilpotentAlgebra& alg, const GeodesicIC& ic,
                         Window w, const IntegratorConfig& cfg)
      : sys_(alg, ic), cfg_(cfg), window_(w), steps_left_(cfg.max_total_steps) {
    cfg.validate();
    if (!(w.t_max > w.t_min) || w.t_min < 0.0)
      throw Error("numeric window must satisfy 0 <= t_min < t_max");

    const double dt_target = scan_step(ic, w, cfg);
    const auto cells = std::max<std::size_t>(
        8, static_cast<std::size_t>(std::ceil((w.t_max - w.t_min) / dt_target)));
    grid_.resize(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i)
      grid_[i] = w.t_min + (w.t_max - w.t_min) * static_cast<double>(i) /
                               static_cast<double>(cells);
    grid_.back() = w.t_max;

    Eigen::VectorXd state = sys_.initial_state();
    advance(state, 0.0, grid_[0]);
    states_.reserve(grid_.size());
    states_.push_back(state);
    for (std::size_t i = 1; i < grid_.size(); ++i) {
      advance(state, grid_[i - 1], grid_[i]);
      states_.push_back(state);
    }
  }

  const std::vector<double>& grid() const { return grid_; }

  Eigen::MatrixXd endpoint_matrix(std::size_t i) const {
    return Eigen::Map<const Eigen::MatrixXd>(states_[i].data(), sys_.n(), sys_.n());
  }

  Eigen::MatrixXd endpoint_matrix_at(double t) const {
    const std::size_t i = node_at_or_before(t);
    if (grid_[i] == t)
      return endpoint_matrix(i);
    Eigen::VectorXd state = states_[i];
    advance(state, grid_[i], t);
    return Eigen::Map<const Eigen::MatrixXd>(state.data(), sys_.n(), sys_.n());
  }

  Eigen::VectorXd state_at(double t) const {
    const std::size_t i = node_at_or_before(t);
    Eigen::VectorXd state = states_[i];
    if (grid_[i] != t) advance(state, grid_[i], t);
    return state;
  }

  JacobiEndpointMatrix sample(double t) const { return make_sample(t, endpoint_matrix_at(t)); }

  JacobiEndpointMatrix sample_node(std::size_t i) const {
    return make_sample(grid_[i], endpoint_matrix(i));
  }

private:
  static JacobiEndpointMatrix make_sample(double t, Eigen::MatrixXd m) {
    JacobiEndpointMatrix s;
    s.t = t;
    s.M = std::move(m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.M);
    const auto& sv = svd.singularValues();
    s.sigma_max = sv.size() ? sv[0] : 0.0;
    s.smin = sv.size() ? sv[sv.size() - 1] : 0.0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(s.M);
    double logdet = 0.0;
    bool singular = false;
    for (Eigen::Index i = 0; i < s.M.rows(); ++i) {
      const double r = std::abs(qr.matrixR()(i, i));
      if (r == 0.0) {
        singular = true;
        break;
      }
      logdet += std::log(r);
    }
    s.logdet = singular ? -std::numeric_limits<double>::infinity() : logdet;
    const double det = s.M.partialPivLu().determinant();
    s.det_sign = det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
    return s;
  }

  std::size_t node_at_or_before(double t) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    if (it == grid_.begin()) return 0;
    return static_cast<std::size_t>(std::distance(grid_.begin(), it)) - 1;
  }

  void advance(Eigen::VectorXd& state, double from, double to) const {
    if (to == from) return;
    if (steps_left_ <= 0)
      throw IntegratorFailure(
          "total integration step budget exhausted; the Jacobi coefficients likely "
          "grow exponentially on this window (spacelike z0 with x0 != 0) - shorten "
          "the window, relax tolerances, or raise max_total_steps");
    auto rhs = [this](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
      sys_.matrix_rhs(t, x, dx);
    };
    long used = 0;
    if (cfg_.method == IntegratorMethod::Rk45Adaptive) {
      OdeOptions opt;
      opt.rel_tol = cfg_.rel_tol;
      opt.abs_tol = cfg_.abs_tol;
      opt.max_steps = steps_left_;
      used = integrate_rk45(rhs, from, to, state, opt);
    } else {
      used = integrate_rk4_fixed(rhs, from, to, state, cfg_.step);
    }
    steps_left_ -= used;
  }

  JacobiSystem sys_;
  IntegratorConfig cfg_;
  Window window_;
  std::vector<double> grid_;
  std::vector<Eigen::VectorXd> states_;
  mutable long steps_left_ = 0;
};

}  // namespace detail

/// Samples the Jacobi endpoint matrix along a uniform scan grid.
inline std::vector<JacobiEndpointMatrix> integrate_jacobi_basis(
    const MetricNilpotentAlgebra& alg, const GeodesicIC& ic, Window window,
    const IntegratorConfig& cfg = {}) {
  detail::JacobiBasisIntegration run(alg, ic, window, cfg);
  std::vector<JacobiEndpointMatrix> out;
  out.reserve(run.grid().size());
  for (std::size_t i = 0; i < run.grid().size(); ++i) out.push_back(run.sample_node(i));
  return out;
}

struct NumericResult {
  std::vector<ConjugatePoint> points;
  std::vector<std::string> notes;
};

/// Brute-force conjugate point detector: locates the zeros of the smallest
/// singular value of the Jacobi endpoint matrix. Candidate brackets come
/// from grid-local minima of smin/sigma_max and from determinant sign
/// changes; each is refined by golden-section minimization and accepted when
/// the refined smin drops below rank_tol * sigma_max. The multiplicity is
/// the number of singular values below that threshold.
inline NumericResult detect_conjugate_points(const MetricNilpotentAlgebra& alg,
                                             const GeodesicIC& ic, Window window,
                                             const IntegratorConfig& cfg = {}) {
  detail::JacobiBasisIntegration run(alg, ic, window, cfg);
  const auto& grid = run.grid();
  const std::size_t n_nodes = grid.size();

  std::vector<double> rel_smin(n_nodes);
  std::vector<int> det_sign(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const JacobiEndpointMatrix s = run.sample_node(i);
    rel_smin[i] = s.sigma_max > 0.0 ? s.smin / s.sigma_max : 0.0;
    det_sign[i] = s.det_sign;
  }

  const double dead_zone =
      std::max(window.t_min, cfg.dead_zone_frac * (window.t_max - window.t_min));

  std::vector<std::pair<double, double>> brackets;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    bool is_local_min;
    if (i == 0)
      is_local_min = n_nodes > 1 && rel_smin[0] < rel_smin[1];
    else if (i + 1 == n_nodes)
      is_local_min = rel_smin[i] < rel_smin[i - 1];
    else
      is_local_min = rel_smin[i] <= rel_smin[i - 1] && rel_smin[i] <= rel_smin[i + 1];
    if (is_local_min) {
      const double lo = i > 0 ? grid[i - 1] : grid[i];
      const double hi = i + 1 < n_nodes ? grid[i + 1] : grid[i];
      if (lo < hi) brackets.emplace_back(lo, hi);
    }
    if (i + 1 < n_nodes && det_sign[i] * det_sign[i + 1] < 0)
      brackets.emplace_back(grid[i], grid[i + 1]);
  }

  auto smin_at = [&](double t) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(run.endpoint_matrix_at(t));
    return svd.singularValues()(svd.singularValues().size() - 1);
  };

  NumericResult out;
  struct Refined {
    double t;
    double smin;
    double bracket_smin;  // largest smin at the original bracket ends

    bool operator<(const Refined& o) const { return t < o.t; }
  };
  std::vector<Refined> refined;
  for (const auto& [lo0, hi0] : brackets) {
    double lo = lo0, hi = hi0;
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = smin_at(c), fd = smin_at(d);
    while (hi - lo > cfg.bisect_tol) {
      if (fc < fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - inv_phi * (hi - lo);
        fc = smin_at(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + inv_phi * (hi - lo);
        fd = smin_at(d);
      }
    }
    const double t_star = 0.5 * (lo + hi);
    if (t_star < dead_zone) continue;
    refined.push_back({t_star, smin_at(t_star), std::max(smin_at(lo0), smin_at(hi0))});
  }
  std::sort(refined.begin(), refined.end());

  // Candidates closer than 10 * bisect_tol are below the refinement's
  // resolution (overlapping brackets and det-sign corroboration usually
  // re-find the same minimum); keep the best representative per cluster and
  // note clusters whose spread suggests more than a re-find.
  for (std::size_t i = 0; i < refined.size();) {
    std::size_t j = i + 1;
    double best_t = refined[i].t;
    double best_smin = refined[i].smin;
    double bracket_smin = refined[i].bracket_smin;
    while (j < refined.size() && refined[j].t - refined[j - 1].t <= 10.0 * cfg.bisect_tol) {
      if (refined[j].smin < best_smin) {
        best_smin = refined[j].smin;
        best_t = refined[j].t;
        bracket_smin = refined[j].bracket_smin;
      }
      ++j;
    }
    const double spread = refined[j - 1].t - refined[i].t;
    i = j;

    const JacobiEndpointMatrix s = run.sample(best_t);
    if (s.sigma_max <= 0.0 || s.smin > cfg.rank_tol * s.sigma_max) continue;
    if (bracket_smin > 0.0 && s.smin > cfg.dip_ratio * bracket_smin) continue;
    if (spread > 2.0 * cfg.bisect_tol)
      out.notes.push_back("candidate cluster of width " + std::to_string(spread) +
                          " near t = " + std::to_string(best_t) +
                          " merged; not resolved below 10x the refinement tolerance");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.M);
    const auto& sv = svd.singularValues();
    int mult = 0;
    for (Eigen::Index i2 = 0; i2 < sv.size(); ++i2)
      if (sv[i2] <= cfg.rank_tol * s.sigma_max) ++mult;

    out.points.push_back({best_t, mult, Branch::Numeric, s.smin / s.sigma_max});
  }

  std::sort(out.points.begin(), out.points.end(),
            [](const ConjugatePoint& l, const ConjugatePoint& r) { return l.t0 < r.t0; });
  return out;
}

struct MatchedPair {
  double t_analytic = 0.0;
  double t_numeric = 0.0;
  double dt = 0.0;
  int mult_analytic = 0;
  int mult_numeric = 0;
  bool mult_match = false;
};

struct CrossCheckReport {
  std::vector<MatchedPair> matched;
  std::vector<ConjugatePoint> analytic_only;
  std::vector<ConjugatePoint> numeric_only;
  bool multiplicities_agree = true;

  bool full_match(bool mult_strict) const {
    return analytic_only.empty() && numeric_only.empty() &&
           (!mult_strict || multiplicities_agree);
  }
};

/// Pairs up analytic and numeric conjugate points by |dt| < t_tol.
/// Both lists must be sorted by t0.
inline CrossCheckReport cross_validate(const std::vector<ConjugatePoint>& analytic,
                                       const std::vector<ConjugatePoint>& numeric,
                                       double t_tol = 1e-5, bool mult_strict = true) {
  CrossCheckReport rep;
  std::size_t i = 0, j = 0;
  while (i < analytic.size() && j < numeric.size()) {
    const double dt = numeric[j].t0 - analytic[i].t0;
    if (std::abs(dt) < t_tol) {
      MatchedPair m;
      m.t_analytic = analytic[i].t0;
      m.t_numeric = numeric[j].t0;
      m.dt = dt;
      m.mult_analytic = analytic[i].multiplicity;
      m.mult_numeric = numeric[j].multiplicity;
      m.mult_match = m.mult_analytic == m.mult_numeric;
      if (!m.mult_match) rep.multiplicities_agree = false;
      rep.matched.push_back(m);
      ++i;
      ++j;
    } else if (analytic[i].t0 < numeric[j].t0) {
      rep.analytic_only.push_back(analytic[i]);
      ++i;
    } else {
      rep.numeric_only.push_back(numeric[j]);
      ++j;
    }
  }
  for (; i < analytic.size(); ++i) rep.analytic_only.push_back(analytic[i]);
  for (; j < numeric.size(); ++j) rep.numeric_only.push_back(numeric[j]);
  (void)mult_strict;
  return rep;
}

}  // namespace pseudoh

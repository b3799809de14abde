#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "pseudoh/algebra.hpp"

namespace pseudoh {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_initial = 0.0;  // 0 = choose from the interval length
  long max_steps = 2000000;
};

/// Adaptive Dormand-Prince 5(4) integrator. Advances y from t0 to t1 in
/// place and returns the number of attempted steps; f has signature
/// f(t, y, dydt). Throws IntegratorFailure on step underflow or when the
/// step budget is exhausted.
template <typename Rhs>
long integrate_rk45(Rhs&& f, double t0, double t1, Eigen::VectorXd& y,
                    const OdeOptions& opt = {}) {
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                          a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0,
                          e3 = 500.0 / 1113.0 - 7571.0 / 16695.0,
                          e4 = 125.0 / 192.0 - 393.0 / 640.0,
                          e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0,
                          e6 = 11.0 / 84.0 - 187.0 / 2100.0, e7 = -1.0 / 40.0;

  if (t1 == t0) return 0;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  double t = t0;
  double h = opt.h_initial > 0.0 ? opt.h_initial : span / 100.0;
  h = std::min(h, span);

  const Eigen::Index n = y.size();
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n);
  f(t, y, k1);

  for (long step = 0; step < opt.max_steps; ++step) {
    if (dir * (t - t1) >= 0.0) return step;
    h = std::min(h, std::abs(t1 - t));
    const double hd = dir * h;
    if (h < 1e-14 * span)
      throw IntegratorFailure("adaptive step size underflow");

    ytmp = y + hd * (a21 * k1);
    f(t + 0.2 * hd, ytmp, k2);
    ytmp = y + hd * (a31 * k1 + a32 * k2);
    f(t + 0.3 * hd, ytmp, k3);
    ytmp = y + hd * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + 0.8 * hd, ytmp, k4);
    ytmp = y + hd * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + 8.0 / 9.0 * hd, ytmp, k5);
    ytmp = y + hd * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + hd, ytmp, k6);
    y5 = y + hd * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + hd, y5, k7);

    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ei =
          hd * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc =
          opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (err <= 1.0) {
      t += hd;
      y.swap(y5);
      k1.swap(k7);  // first-same-as-last
      if (dir * (t - t1) >= 0.0) return step + 1;
    }
    const double factor =
        err <= 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
  }
  throw IntegratorFailure(
      "integration step budget exhausted; the Jacobi system's coefficients likely "
      "grow exponentially on this window (spacelike z0 with x0 != 0) - shorten the "
      "window or relax the tolerances");
}

/// Fixed-step classical RK4, kept for reproducibility runs. Returns the
/// number of steps taken.
template <typename Rhs>
long integrate_rk4_fixed(Rhs&& f, double t0, double t1, Eigen::VectorXd& y, double step) {
  if (step <= 0.0) throw IntegratorFailure("RK4 step must be positive");
  if (t1 == t0) return 0;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const auto n_steps =
      static_cast<long>(std::ceil(std::abs(t1 - t0) / step - 1e-12));
  const double h = dir * std::abs(t1 - t0) / static_cast<double>(std::max<long>(1, n_steps));

  const Eigen::Index n = y.size();
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), ytmp(n);
  double t = t0;
  for (long i = 0; i < std::max<long>(1, n_steps); ++i) {
    f(t, y, k1);
    ytmp = y + 0.5 * h * k1;
    f(t + 0.5 * h, ytmp, k2);
    ytmp = y + 0.5 * h * k2;
    f(t + 0.5 * h, ytmp, k3);
    ytmp = y + h * k3;
    f(t + h, ytmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return std::max<long>(1, n_steps);
}

}  // namespace pseudoh

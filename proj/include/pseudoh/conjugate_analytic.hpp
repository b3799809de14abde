#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "pseudoh/algebra.hpp"
#include "pseudoh/geometry.hpp"

namespace pseudoh {

/// Scalar data the closed-form conjugate loci depend on.
struct GeodesicInvariants {
  double a = 0.0;  // <z0, z0>
  double b = 0.0;  // <x0, x0>
  double g = 0.0;  // <gdot, gdot> = a + b
  int p = 0;       // dim center
  int q = 0;       // dim v
  bool z0_zero = false;
  bool x0_zero = false;
  CausalClass z0_class = CausalClass::Null;

  /// Build directly from scalars; the causal class of z0 is taken from the
  /// exact sign of a.
  static GeodesicInvariants from_scalars(double a, double b, int p, int q,
                                         bool z0_zero = false, bool x0_zero = false) {
    GeodesicInvariants inv;
    inv.a = a;
    inv.b = b;
    inv.g = a + b;
    inv.p = p;
    inv.q = q;
    inv.z0_zero = z0_zero;
    inv.x0_zero = x0_zero;
    inv.z0_class = z0_zero || a == 0.0
                       ? CausalClass::Null
                       : (a > 0.0 ? CausalClass::Timelike : CausalClass::Spacelike);
    return inv;
  }
};

inline GeodesicInvariants geodesic_invariants(const MetricNilpotentAlgebra& alg,
                                              const GeodesicIC& ic) {
  if (ic.z0.isZero(0.0) && ic.x0.isZero(0.0))
    throw ZeroVelocity("geodesic has zero initial velocity");
  GeodesicInvariants inv;
  inv.a = ic.a;
  inv.b = ic.b;
  inv.g = ic.g;
  inv.p = static_cast<int>(alg.dim_center());
  inv.q = static_cast<int>(alg.dim_v());
  inv.z0_zero = ic.z0.isZero(0.0);
  inv.x0_zero = ic.x0.isZero(0.0);
  inv.z0_class = inv.z0_zero
                     ? CausalClass::Null
                     : causal_class(alg, {ic.z0, Eigen::VectorXd::Zero(alg.dim_v())});
  return inv;
}

enum class Branch {
  Lattice,
  A1,
  A2,
  A1A2,
  B1,
  B2,
  B1B2,
  NullCenter,
  PureCenter,
  PureV,
  Numeric
};

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::Lattice: return "lattice";
    case Branch::A1: return "A1";
    case Branch::A2: return "A2";
    case Branch::A1A2: return "A1A2";
    case Branch::B1: return "B1";
    case Branch::B2: return "B2";
    case Branch::B1B2: return "B1B2";
    case Branch::NullCenter: return "null-center";
    case Branch::PureCenter: return "pure-center";
    case Branch::PureV: return "pure-v";
    case Branch::Numeric: return "numeric";
  }
  return "?";
}

struct ConjugatePoint {
  double t0 = 0.0;
  int multiplicity = 0;
  Branch branch = Branch::Numeric;
  double residual = 0.0;
};

struct Window {
  double t_min = 0.0;
  double t_max = 0.0;
};

struct SolverConfig {
  double tol = 1e-12;          // relative residual target for refined roots
  int grid_per_period = 64;    // bracketing subintervals per natural period
  double merge_tol_scale = 1e-9;  // duplicate merge distance, times the period
};

namespace detail {

/// Pole-free branch functions. The A1/B1 equations are multiplied through by
/// sin/sinh so bisection sees a continuous function; t = 0 becomes a
/// spurious zero that the scan skips.
template <typename Real>
Real branch_function(Branch br, Real a, Real b, Real g, Real t) {
  switch (br) {
    case Branch::A1: {
      const Real u = std::sqrt(a) * t / Real(2);
      return b * u * std::cos(u) - g * std::sin(u);
    }
    case Branch::B1: {
      const Real u = std::sqrt(-a) * t / Real(2);
      if (std::abs(u) > Real(300))  // divide by cosh(u) to avoid overflow
        return b * u - g * std::tanh(u);
      return b * u * std::cosh(u) - g * std::sinh(u);
    }
    case Branch::A2: {
      const Real u = std::sqrt(a) * t;
      return u - (b / (g + a)) * std::sin(u);
    }
    case Branch::B2: {
      const Real u = std::sqrt(-a) * t;
      if (std::abs(u) > Real(300))
        return u / std::cosh(u) - (b / (g + a)) * std::tanh(u);
      return u - (b / (g + a)) * std::sinh(u);
    }
    default:
      throw Error("branch_function: not a transcendental branch");
  }
}

template <typename Real>
Real branch_residual(Branch br, Real a, Real b, Real g, Real t) {
  const Real f = branch_function(br, a, b, g, t);
  Real scale = Real(0);
  switch (br) {
    case Branch::A1: {
      const Real u = std::sqrt(a) * t / Real(2);
      scale = std::max(std::abs(b * u * std::cos(u)), std::abs(g * std::sin(u)));
      break;
    }
    case Branch::B1: {
      const Real u = std::sqrt(-a) * t / Real(2);
      if (std::abs(u) > Real(300))
        scale = std::max(std::abs(b * u), std::abs(g * std::tanh(u)));
      else
        scale = std::max(std::abs(b * u * std::cosh(u)), std::abs(g * std::sinh(u)));
      break;
    }
    case Branch::A2:
    case Branch::B2:
      scale = std::abs(std::sqrt(std::abs(a)) * t);
      break;
    default:
      throw Error("branch_residual: not a transcendental branch");
  }
  return std::abs(f) / (scale + Real(1e-300));
}

}  // namespace detail

/// All roots t != 0 of the branch equation inside the window, found by sign
/// scanning on a uniform bracketing grid and refined by bisection.
inline std::vector<double> solve_transcendental(Branch br, const GeodesicInvariants& inv,
                                                Window window,
                                                const SolverConfig& cfg = {}) {
  if (br == Branch::A1 || br == Branch::A2) {
    if (inv.z0_class != CausalClass::Timelike)
      throw WrongCausalClass("A branches require timelike z0 (<z0,z0> > 0)");
  } else if (br == Branch::B1 || br == Branch::B2) {
    if (inv.z0_class != CausalClass::Spacelike)
      throw WrongCausalClass("B branches require spacelike z0 (<z0,z0> < 0)");
  } else {
    throw Error("solve_transcendental handles A1, A2, B1, B2 only");
  }
  if (br == Branch::A2 || br == Branch::B2) {
    if (inv.p < 2) throw CenterTooSmall("A2/B2 require dim center >= 2");
    if (std::abs(inv.g + inv.a) <= 1e-12 * (1.0 + std::abs(inv.g) + std::abs(inv.a)))
      throw DegenerateDenominator("A2/B2 undefined when <gdot,gdot> + <z0,z0> = 0");
    // |sin u| <= |u|, so u = K sin u with |K| <= 1 admits only u = 0.
    const double coeff = inv.b / (inv.g + inv.a);
    if (br == Branch::A2 && std::abs(coeff) <= 1.0) return {};
    // |sinh u| >= |u|: u = K sinh u has nonzero roots only for K in (0,1).
    if (br == Branch::B2 && (coeff <= 0.0 || coeff >= 1.0)) return {};
  }

  const double alpha = std::sqrt(std::abs(inv.a));
  const double period = (br == Branch::A1 || br == Branch::A2)
                            ? 2.0 * M_PI / alpha
                            : 1.0 / alpha;
  if (!(window.t_max > window.t_min)) return {};
  // Keep at least ~2 cells per grid_per_period across the window even when
  // the period dwarfs it (nearly null z0), so short-scale roots still get
  // bracketed.
  const double h = std::min(period / std::max(4, cfg.grid_per_period),
                            (window.t_max - window.t_min) /
                                (2.0 * std::max(4, cfg.grid_per_period)));

  auto f = [&](double t) {
    return detail::branch_function(br, inv.a, inv.b, inv.g, t);
  };

  const auto n_cells =
      static_cast<std::size_t>(std::ceil((window.t_max - window.t_min) / h));
  std::vector<double> roots;
  const double zero_guard = 1e-12 * period;

  double t_prev = window.t_min;
  double f_prev = f(t_prev);
  for (std::size_t i = 1; i <= n_cells; ++i) {
    double t_cur = window.t_min + static_cast<double>(i) * h;
    if (t_cur > window.t_max) t_cur = window.t_max;
    const double f_cur = f(t_cur);
    const bool contains_zero = t_prev <= 0.0 && t_cur >= 0.0;
    if (!contains_zero && f_prev == 0.0 && std::abs(t_prev) > zero_guard)
      roots.push_back(t_prev);
    if (!contains_zero && f_prev * f_cur < 0.0) {
      double lo = t_prev, hi = t_cur, flo = f_prev;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (flo * fm < 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      const double root = 0.5 * (lo + hi);
      if (std::abs(root) > zero_guard &&
          detail::branch_residual(br, inv.a, inv.b, inv.g, root) < cfg.tol)
        roots.push_back(root);
    }
    t_prev = t_cur;
    f_prev = f_cur;
    if (t_cur >= window.t_max) break;
  }
  if (f_prev == 0.0 && std::abs(t_prev) > zero_guard &&
      !(t_prev <= 0.0 && window.t_min <= 0.0))
    roots.push_back(t_prev);

  std::sort(roots.begin(), roots.end());
  const double merge_tol = cfg.merge_tol_scale * period;
  std::vector<double> dedup;
  for (double r : roots)
    if (dedup.empty() || r - dedup.back() > merge_tol) dedup.push_back(r);
  return dedup;
}

/// Multiplicity table. `membership` is the set of defining loci that contain
/// t0; mixing trigonometric and hyperbolic branches, or combining the
/// special-velocity branches with anything else, is inconsistent.
inline int multiplicity(const GeodesicInvariants& inv, double t0,
                        const std::set<Branch>& membership) {
  (void)t0;
  if (membership.empty()) throw InconsistentMembership("empty branch membership");
  if (membership.count(Branch::Numeric))
    throw InconsistentMembership("numeric points carry their own multiplicity");

  const bool has_a = membership.count(Branch::A1) || membership.count(Branch::A2) ||
                     membership.count(Branch::A1A2);
  const bool has_b = membership.count(Branch::B1) || membership.count(Branch::B2) ||
                     membership.count(Branch::B1B2);
  const bool special = membership.count(Branch::PureV) ||
                       membership.count(Branch::PureCenter) ||
                       membership.count(Branch::NullCenter);
  if (has_a && has_b)
    throw InconsistentMembership("cannot mix trigonometric and hyperbolic branches");
  if (special && membership.size() > 1)
    throw InconsistentMembership("special-velocity branches cannot combine");

  if (membership.count(Branch::PureV)) return inv.p;
  if (membership.count(Branch::PureCenter)) return inv.q;
  if (membership.count(Branch::NullCenter)) return inv.p - 1;

  if (membership.count(Branch::Lattice)) {
    const bool g_plus_a_zero =
        std::abs(inv.g + inv.a) <= 1e-12 * (1.0 + std::abs(inv.g) + std::abs(inv.a));
    return g_plus_a_zero ? inv.p + inv.q - 2 : inv.q - 1;
  }

  const bool one = membership.count(Branch::A1) || membership.count(Branch::B1);
  const bool two = membership.count(Branch::A2) || membership.count(Branch::B2);
  const bool both = membership.count(Branch::A1A2) || membership.count(Branch::B1B2) ||
                    (one && two);
  if (both) return inv.p;
  if (one) return 1;
  if (two) return inv.p - 1;
  throw InconsistentMembership("unrecognized branch membership");
}

struct AnalyticResult {
  std::vector<ConjugatePoint> points;
  std::vector<std::string> notes;
};

namespace detail {

inline void append_symmetric_sqrt_points(std::vector<ConjugatePoint>& out, double b,
                                         int mult, Branch br, Window w) {
  // Conjugate condition t^2 = -12/b, real only for b < 0.
  if (b >= 0.0) return;
  const double t0 = std::sqrt(-12.0 / b);
  for (double t : {-t0, t0}) {
    if (t >= w.t_min && t <= w.t_max && t != 0.0) {
      const double res = std::abs(b * t * t + 12.0) / (12.0 + std::abs(b) * t * t);
      out.push_back({t, mult, br, res});
    }
  }
}

}  // namespace detail

/// Closed-form conjugate points of a geodesic with invariants `inv`, inside
/// the window. Dispatches on (z0 == 0, x0 == 0, causal class of z0):
///   z0 = 0:        t = +-sqrt(-12/b) when b < 0, multiplicity p
///   x0 = 0:        t in (2 pi / sqrt(a)) Z* when a > 0, multiplicity q
///   timelike z0:   lattice union A1 union A2
///   spacelike z0:  B1 union B2
///   null z0 != 0:  t = +-sqrt(-12/b) when b < 0, multiplicity p - 1
/// Points from different loci that coincide within the merge tolerance are
/// combined; a lattice point absorbs a coinciding A1/A2 root and keeps the
/// lattice multiplicity (noted in the result).
inline AnalyticResult analytic_conjugate_points(const GeodesicInvariants& inv,
                                                Window window,
                                                const SolverConfig& cfg = {}) {
  if (inv.z0_zero && inv.x0_zero) throw ZeroVelocity("zero initial velocity");
  AnalyticResult out;

  const bool g_null = std::abs(inv.g) <= 1e-12 * (1.0 + std::abs(inv.a) + std::abs(inv.b));
  if (g_null && !inv.z0_zero && !inv.x0_zero)
    out.notes.push_back(
        "null geodesic (<gdot,gdot> = 0): closed-form loci evaluated outside their "
        "stated normalization; cross-check with the numeric oracle");

  if (inv.z0_zero) {
    if (inv.b < 0.0) {
      detail::append_symmetric_sqrt_points(out.points, inv.b, inv.p, Branch::PureV,
                                           window);
    } else {
      out.notes.push_back("z0 = 0 with <x0,x0> >= 0: conjugate set is empty");
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const ConjugatePoint& l, const ConjugatePoint& r) { return l.t0 < r.t0; });
    return out;
  }

  if (inv.x0_zero) {
    if (inv.z0_class == CausalClass::Timelike) {
      const double alpha = std::sqrt(inv.a);
      const double period = 2.0 * M_PI / alpha;
      const auto k_lo = static_cast<long>(std::ceil(window.t_min / period - 1e-12));
      const auto k_hi = static_cast<long>(std::floor(window.t_max / period + 1e-12));
      for (long k = k_lo; k <= k_hi; ++k) {
        if (k == 0) continue;
        const double t = period * static_cast<double>(k);
        if (t < window.t_min || t > window.t_max) continue;
        out.points.push_back(
            {t, inv.q, Branch::PureCenter, std::abs(std::sin(alpha * t / 2.0))});
      }
    } else {
      out.notes.push_back("x0 = 0 with non-timelike z0: conjugate set is empty");
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const ConjugatePoint& l, const ConjugatePoint& r) { return l.t0 < r.t0; });
    return out;
  }

  if (inv.z0_class == CausalClass::Null) {
    if (inv.b < 0.0) {
      if (inv.p - 1 >= 1) {
        detail::append_symmetric_sqrt_points(out.points, inv.b, inv.p - 1,
                                             Branch::NullCenter, window);
      } else {
        out.notes.push_back(
            "null z0 with one-dimensional center: multiplicity table gives 0, no "
            "conjugate points emitted");
      }
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const ConjugatePoint& l, const ConjugatePoint& r) { return l.t0 < r.t0; });
    return out;
  }

  const bool timelike = inv.z0_class == CausalClass::Timelike;
  const double alpha = std::sqrt(std::abs(inv.a));
  const double period = timelike ? 2.0 * M_PI / alpha : 1.0 / alpha;
  const double merge_tol = cfg.merge_tol_scale * period;
  const bool g_plus_a_zero =
      std::abs(inv.g + inv.a) <= 1e-12 * (1.0 + std::abs(inv.g) + std::abs(inv.a));
  const bool b_zero = std::abs(inv.b) <= 1e-12 * (1.0 + std::abs(inv.a) + std::abs(inv.g));

  struct Tagged {
    double t;
    Branch br;
    double residual;
  };
  std::vector<Tagged> tagged;

  if (timelike) {
    const auto k_lo = static_cast<long>(std::ceil(window.t_min / period - 1e-12));
    const auto k_hi = static_cast<long>(std::floor(window.t_max / period + 1e-12));
    for (long k = k_lo; k <= k_hi; ++k) {
      if (k == 0) continue;
      const double t = period * static_cast<double>(k);
      if (t < window.t_min || t > window.t_max) continue;
      tagged.push_back({t, Branch::Lattice, std::abs(std::sin(alpha * t / 2.0))});
    }
    if (b_zero) {
      out.notes.push_back(
          "<x0,x0> = 0: the A1 locus degenerates to the lattice and is folded into it");
    } else {
      for (double t : solve_transcendental(Branch::A1, inv, window, cfg))
        tagged.push_back(
            {t, Branch::A1, detail::branch_residual(Branch::A1, inv.a, inv.b, inv.g, t)});
    }
    if (inv.p >= 2) {
      if (g_plus_a_zero) {
        // The A2 coefficient b/(g+a) diverges on this slice and the locus
        // degenerates to sin(alpha t) = 0, the half lattice. Even multiples
        // of pi/alpha coincide with the lattice, whose multiplicity row
        // p + q - 2 already absorbs the extra fields; odd multiples are
        // genuine conjugate points with the A2 multiplicity p - 1 (the
        // numeric oracle confirms them).
        out.notes.push_back(
            "<gdot,gdot> + <z0,z0> = 0: degenerate A2 slice; odd multiples of "
            "pi/alpha emitted with the A2 multiplicity row, even multiples fold "
            "into the lattice rule");
        if (!b_zero) {
          const double half_period = M_PI / alpha;
          const auto k_lo =
              static_cast<long>(std::ceil(window.t_min / half_period - 1e-12));
          const auto k_hi =
              static_cast<long>(std::floor(window.t_max / half_period + 1e-12));
          for (long k = k_lo; k <= k_hi; ++k) {
            if (k == 0 || k % 2 == 0) continue;
            const double t = half_period * static_cast<double>(k);
            if (t < window.t_min || t > window.t_max) continue;
            tagged.push_back({t, Branch::A2, std::abs(std::sin(alpha * t))});
          }
        }
      } else {
        for (double t : solve_transcendental(Branch::A2, inv, window, cfg))
          tagged.push_back({t, Branch::A2,
                            detail::branch_residual(Branch::A2, inv.a, inv.b, inv.g, t)});
      }
    }
  } else {
    if (b_zero) {
      out.notes.push_back("<x0,x0> = 0 with spacelike z0: B1 has no roots");
    } else {
      for (double t : solve_transcendental(Branch::B1, inv, window, cfg))
        tagged.push_back(
            {t, Branch::B1, detail::branch_residual(Branch::B1, inv.a, inv.b, inv.g, t)});
    }
    if (inv.p >= 2) {
      if (g_plus_a_zero) {
        out.notes.push_back(
            "<gdot,gdot> + <z0,z0> = 0: B2 denominator vanishes; no B2 roots emitted");
      } else {
        for (double t : solve_transcendental(Branch::B2, inv, window, cfg))
          tagged.push_back({t, Branch::B2,
                            detail::branch_residual(Branch::B2, inv.a, inv.b, inv.g, t)});
      }
    }
  }

  std::sort(tagged.begin(), tagged.end(),
            [](const Tagged& l, const Tagged& r) { return l.t < r.t; });

  for (std::size_t i = 0; i < tagged.size();) {
    std::set<Branch> membership{tagged[i].br};
    double t_rep = tagged[i].t;
    double residual = tagged[i].residual;
    std::size_t j = i + 1;
    while (j < tagged.size() && tagged[j].t - tagged[j - 1].t <= merge_tol) {
      membership.insert(tagged[j].br);
      if (tagged[j].br == Branch::Lattice) t_rep = tagged[j].t;
      residual = std::min(residual, tagged[j].residual);
      ++j;
    }

    Branch br;
    if (membership.count(Branch::Lattice)) {
      br = Branch::Lattice;
      if (membership.size() > 1)
        out.notes.push_back("lattice point at t = " + std::to_string(t_rep) +
                            " coincides with a transcendental root; lattice "
                            "multiplicity applied");
      membership = {Branch::Lattice};
    } else if (membership.count(Branch::A1) && membership.count(Branch::A2)) {
      br = Branch::A1A2;
      membership = {Branch::A1A2};
    } else if (membership.count(Branch::B1) && membership.count(Branch::B2)) {
      br = Branch::B1B2;
      membership = {Branch::B1B2};
    } else {
      br = *membership.begin();
    }

    out.points.push_back({t_rep, multiplicity(inv, t_rep, membership), br, residual});
    i = j;
  }

  return out;
}

}  // namespace pseudoh

#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pseudoh/algebra.hpp"
#include "pseudoh/catalog.hpp"
#include "pseudoh/conjugate_analytic.hpp"
#include "pseudoh/conjugate_numeric.hpp"
#include "pseudoh/io.hpp"
#include "pseudoh/verify.hpp"

namespace pseudoh {

namespace cli_detail {

struct AlgebraRef {
  MetricNilpotentAlgebra alg;
  std::string id;
};

inline AlgebraRef resolve_algebra(const std::string& selector) {
  if (selector.rfind("catalog:", 0) == 0) {
    const std::string name = selector.substr(8);
    auto alg = catalog_algebra(name);
    if (!alg) throw IoError("unknown catalog algebra: " + name);
    return {*alg, selector};
  }
  return {load_algebra_file(selector), selector};
}

inline Eigen::VectorXd parse_coords(const std::string& s, Eigen::Index expected,
                                    const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      vals.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw IoError(what + ": cannot parse coordinate '" + item + "'");
    }
  }
  if (static_cast<Eigen::Index>(vals.size()) != expected)
    throw DimensionMismatch(what + ": expected " + std::to_string(expected) +
                            " coordinates, got " + std::to_string(vals.size()));
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

inline Window parse_window(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw IoError("window must be given as t_min,t_max");
  try {
    const double lo = std::stod(s.substr(0, comma));
    const double hi = std::stod(s.substr(comma + 1));
    if (!(hi > lo)) throw IoError("window must satisfy t_min < t_max");
    return {lo, hi};
  } catch (const std::invalid_argument&) {
    throw IoError("window must be given as t_min,t_max");
  }
}

/// Default search windows: six periods for timelike z0, 20/beta for
/// spacelike z0, and a multiple of the square-root conjugate time otherwise.
/// With `numeric_safe` the spacelike window is capped at the provable reach
/// of the hyperbolic roots (u coth u = g/b forces u <= |g/b|), because the
/// oracle's cost grows like e^{beta t_max} there.
inline Window default_window(const GeodesicInvariants& inv, bool numeric_safe = false) {
  if (!inv.z0_zero && inv.z0_class == CausalClass::Timelike) {
    const double period = 2.0 * M_PI / std::sqrt(inv.a);
    return {0.0, 6.0 * period};
  }
  if (!inv.z0_zero && inv.z0_class == CausalClass::Spacelike) {
    const double beta = std::sqrt(-inv.a);
    double reach = 20.0;
    if (numeric_safe) {
      reach = std::abs(inv.b) > 1e-12 * (1.0 + std::abs(inv.g))
                  ? std::min(20.0, 2.0 * std::abs(inv.g / inv.b) + 6.0)
                  : 6.0;
    }
    return {0.0, reach / beta};
  }
  if (inv.b < 0.0) return {0.0, 2.5 * std::sqrt(-12.0 / inv.b)};
  return {0.0, 10.0};
}

inline unsigned seed_from_env() {
  if (const char* env = std::getenv("PSEUDOH_SEED")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
    }
  }
  return 0;
}

inline nlohmann::json ic_to_json(const GeodesicIC& ic) {
  nlohmann::json j;
  j["z0"] = std::vector<double>(ic.z0.data(), ic.z0.data() + ic.z0.size());
  j["x0"] = std::vector<double>(ic.x0.data(), ic.x0.data() + ic.x0.size());
  j["a"] = ic.a;
  j["b"] = ic.b;
  j["g"] = ic.g;
  return j;
}

inline nlohmann::json base_report(const std::string& command, const std::string& algebra_id) {
  nlohmann::json j;
  j["command"] = command;
  j["algebra_id"] = algebra_id;
  j["version"] = kVersion;
  return j;
}

struct VerifyOptions {
  std::string target;
  int samples = 100;
  double tol = 1e-9;
  std::string out_format = "table";
};

inline int cmd_verify(const VerifyOptions& opt, std::ostream& out) {
  const auto ref = resolve_algebra(opt.target);
  const auto& alg = ref.alg;
  const unsigned seed = seed_from_env();

  const bool ph = is_pseudo_h_type(alg);
  const double ph_err = pseudo_h_random_error(alg, opt.samples, seed);
  const auto squares = scalar_square_checks(alg);
  const auto preg = is_pseudoregular(alg, std::max(50, opt.samples), seed);
  const auto suites = run_identity_suites(alg, opt.samples, seed, opt.tol);

  if (opt.out_format == "json") {
    nlohmann::json j = base_report("verify", ref.id);
    j["config"] = {{"samples", opt.samples}, {"tol", opt.tol}, {"seed", seed}};
    nlohmann::json results;
    results["dim_center"] = alg.dim_center();
    results["dim_v"] = alg.dim_v();
    results["pseudo_h"] = ph;
    results["pseudo_h_random_max_error"] = ph_err;
    nlohmann::json sq = nlohmann::json::array();
    for (const auto& c : squares) {
      sq.push_back({{"direction", c.direction},
                    {"coords", c.coords},
                    {"lambda", c.lambda},
                    {"deviation_from_scalar", c.deviation_from_scalar},
                    {"expected_lambda", c.expected_lambda}});
    }
    results["scalar_square_checks"] = sq;
    results["pseudoregular"] = {{"verdict", to_string(preg.verdict)},
                                {"witness", preg.witness_name}};
    nlohmann::json su = nlohmann::json::array();
    for (const auto& c : suites) {
      su.push_back({{"name", c.name},
                    {"max_error", c.max_error},
                    {"tol", c.tol},
                    {"samples", c.samples},
                    {"passed", c.passed}});
    }
    results["identity_suites"] = su;
    j["results"] = results;
    out << dump_json_deterministic(j);
    return 0;
  }

  out << "algebra: " << ref.id << "  (dim center " << alg.dim_center() << ", dim v "
      << alg.dim_v() << ")\n";
  out << "pseudo-H: " << (ph ? "true" : "false") << "  (max |J_z^2 + <z,z>I| = "
      << ph_err << " over " << opt.samples << " random z)\n";
  out << "pseudoregular: " << to_string(preg.verdict);
  if (!preg.witness_name.empty()) out << " (witness " << preg.witness_name << ")";
  out << "\n";
  out << "J^2 scalar diagnostics:\n";
  for (const auto& c : squares) {
    out << "  " << std::left << std::setw(10) << c.direction << std::right
        << " lambda = " << std::setw(13) << c.lambda
        << "   |J^2 - lambda I| = " << c.deviation_from_scalar
        << "   -<z,z> = " << c.expected_lambda << "\n";
  }
  out << "identity suites (tol " << opt.tol << ", " << opt.samples << " samples):\n";
  for (const auto& c : suites) {
    out << "  " << std::left << std::setw(28) << c.name << std::right
        << " max error = " << std::setw(12) << c.max_error << "  "
        << (c.passed ? "pass" : "FAIL") << "\n";
  }
  return 0;
}

struct ConjugateOptions {
  std::string algebra;
  std::string z0;
  std::string x0;
  std::string window;
  std::string out_format = "json";
  // analytic solver
  double tol = 1e-12;
  int grid = 64;
  // numeric oracle
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double rank_tol = 1e-7;
  double bisect_tol = 1e-9;
  int scan_points = 64;
  std::string method = "rk45";
  double step = 1e-3;
};

inline GeodesicIC make_ic(const MetricNilpotentAlgebra& alg, const ConjugateOptions& opt) {
  const auto z0 = parse_coords(opt.z0, alg.dim_center(), "--z0");
  const auto x0 = parse_coords(opt.x0, alg.dim_v(), "--x0");
  return GeodesicIC::make(alg, z0, x0);
}

inline IntegratorConfig make_integrator_config(const ConjugateOptions& opt) {
  IntegratorConfig cfg;
  cfg.method =
      opt.method == "rk4" ? IntegratorMethod::Rk4Fixed : IntegratorMethod::Rk45Adaptive;
  cfg.rel_tol = opt.rel_tol;
  cfg.abs_tol = opt.abs_tol;
  cfg.rank_tol = opt.rank_tol;
  cfg.bisect_tol = opt.bisect_tol;
  cfg.scan_points_per_period = opt.scan_points;
  cfg.step = opt.step;
  return cfg;
}

inline nlohmann::json points_json(const std::vector<ConjugatePoint>& pts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& cp : pts) arr.push_back(conjugate_point_to_json(cp));
  return arr;
}

inline int cmd_conjugate(const ConjugateOptions& opt, bool analytic, std::ostream& out) {
  const auto ref = resolve_algebra(opt.algebra);
  const auto ic = make_ic(ref.alg, opt);
  const auto inv = geodesic_invariants(ref.alg, ic);
  const Window window = opt.window.empty() ? default_window(inv, !analytic)
                                           : parse_window(opt.window);

  std::vector<ConjugatePoint> points;
  std::vector<std::string> notes;
  nlohmann::json config;
  config["window"] = {{"t_min", window.t_min}, {"t_max", window.t_max}};

  if (analytic) {
    SolverConfig cfg;
    cfg.tol = opt.tol;
    cfg.grid_per_period = opt.grid;
    auto res = analytic_conjugate_points(inv, window, cfg);
    points = std::move(res.points);
    notes = std::move(res.notes);
    config["tol"] = cfg.tol;
    config["grid_per_period"] = cfg.grid_per_period;
    config["merge_tol_scale"] = cfg.merge_tol_scale;
  } else {
    const auto cfg = make_integrator_config(opt);
    auto res = detect_conjugate_points(ref.alg, ic, window, cfg);
    points = std::move(res.points);
    notes = std::move(res.notes);
    config["method"] = opt.method;
    config["rel_tol"] = cfg.rel_tol;
    config["abs_tol"] = cfg.abs_tol;
    config["rank_tol"] = cfg.rank_tol;
    config["bisect_tol"] = cfg.bisect_tol;
    config["scan_points_per_period"] = cfg.scan_points_per_period;
    if (cfg.method == IntegratorMethod::Rk4Fixed) config["step"] = cfg.step;
  }

  if (opt.out_format == "csv") {
    out << conjugate_points_to_csv(points);
    return 0;
  }
  nlohmann::json j = base_report(analytic ? "conjugate-analytic" : "conjugate-numeric",
                                 ref.id);
  j["ic"] = ic_to_json(ic);
  j["config"] = config;
  j["results"] = points_json(points);
  j["notes"] = notes;
  out << dump_json_deterministic(j);
  return 0;
}

struct CrosscheckOptions : ConjugateOptions {
  double t_tol = 1e-5;
  bool mult_strict = true;
};

inline int cmd_crosscheck(const CrosscheckOptions& opt, std::ostream& out) {
  const auto ref = resolve_algebra(opt.algebra);
  const auto ic = make_ic(ref.alg, opt);
  const auto inv = geodesic_invariants(ref.alg, ic);
  const Window window = opt.window.empty() ? default_window(inv, true)
                                           : parse_window(opt.window);

  SolverConfig scfg;
  scfg.tol = opt.tol;
  scfg.grid_per_period = opt.grid;
  const auto analytic = analytic_conjugate_points(inv, window, scfg);
  const auto ncfg = make_integrator_config(opt);
  const auto numeric = detect_conjugate_points(ref.alg, ic, window, ncfg);
  const auto rep = cross_validate(analytic.points, numeric.points, opt.t_tol,
                                  opt.mult_strict);
  const bool ok = rep.full_match(opt.mult_strict);

  if (opt.out_format == "json") {
    nlohmann::json j = base_report("crosscheck", ref.id);
    j["ic"] = ic_to_json(ic);
    j["config"] = {{"window", {{"t_min", window.t_min}, {"t_max", window.t_max}}},
                   {"t_tol", opt.t_tol},
                   {"mult_strict", opt.mult_strict},
                   {"rel_tol", ncfg.rel_tol},
                   {"rank_tol", ncfg.rank_tol},
                   {"scan_points_per_period", ncfg.scan_points_per_period}};
    nlohmann::json matched = nlohmann::json::array();
    for (const auto& m : rep.matched) {
      matched.push_back({{"t_analytic", m.t_analytic},
                         {"t_numeric", m.t_numeric},
                         {"dt", m.dt},
                         {"mult_analytic", m.mult_analytic},
                         {"mult_numeric", m.mult_numeric},
                         {"mult_match", m.mult_match}});
    }
    nlohmann::json mismatches = nlohmann::json::array();
    for (const auto& cp : rep.analytic_only) {
      auto e = conjugate_point_to_json(cp);
      e["side"] = "analytic-only";
      mismatches.push_back(e);
    }
    for (const auto& cp : rep.numeric_only) {
      auto e = conjugate_point_to_json(cp);
      e["side"] = "numeric-only";
      mismatches.push_back(e);
    }
    j["results"] = {{"matched", matched}, {"full_match", ok}};
    j["mismatches"] = mismatches;
    j["notes"] = analytic.notes;
    out << dump_json_deterministic(j);
    return ok ? 0 : 1;
  }

  out << "crosscheck " << ref.id << " on [" << window.t_min << ", " << window.t_max
      << "]\n";
  out << "matched points: " << rep.matched.size() << "\n";
  for (const auto& m : rep.matched) {
    out << "  t = " << std::setw(12) << m.t_analytic << "  dt = " << std::setw(10)
        << m.dt << "  mult " << m.mult_analytic << " vs " << m.mult_numeric
        << (m.mult_match ? "" : "  (MULTIPLICITY MISMATCH)") << "\n";
  }
  for (const auto& cp : rep.analytic_only)
    out << "  analytic-only: t = " << cp.t0 << " (" << to_string(cp.branch) << ")\n";
  for (const auto& cp : rep.numeric_only)
    out << "  numeric-only: t = " << cp.t0 << "\n";
  out << (ok ? "full match\n" : "MISMATCH\n");
  return ok ? 0 : 1;
}

struct ScanOptions : ConjugateOptions {
  std::string param = "b";
  std::string range;
};

inline int cmd_scan(const ScanOptions& opt, std::ostream& out) {
  const auto ref = resolve_algebra(opt.algebra);
  const auto ic = make_ic(ref.alg, opt);
  const auto base = geodesic_invariants(ref.alg, ic);
  if (opt.window.empty()) throw IoError("scan requires an explicit --window");
  const Window window = parse_window(opt.window);

  std::vector<std::string> parts;
  std::stringstream ss(opt.range);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 3) throw IoError("--range must be lo,hi,count");
  const double lo = std::stod(parts[0]);
  const double hi = std::stod(parts[1]);
  const int count = std::stoi(parts[2]);
  if (count < 2) throw IoError("--range needs at least two sweep points");

  SolverConfig cfg;
  cfg.tol = opt.tol;
  cfg.grid_per_period = opt.grid;

  out << "param,t0,multiplicity,branch\n";
  for (int i = 0; i < count; ++i) {
    const double value = lo + (hi - lo) * static_cast<double>(i) /
                                  static_cast<double>(count - 1);
    GeodesicInvariants inv =
        opt.param == "a"
            ? GeodesicInvariants::from_scalars(value, base.b, base.p, base.q,
                                               false, base.x0_zero)
            : GeodesicInvariants::from_scalars(base.a, value, base.p, base.q,
                                               base.z0_zero, false);
    const auto res = analytic_conjugate_points(inv, window, cfg);
    for (const auto& cp : res.points) {
      out << detail::format_double(value) << "," << detail::format_double(cp.t0) << ","
          << cp.multiplicity << "," << to_string(cp.branch) << "\n";
    }
  }
  return 0;
}

}  // namespace cli_detail

/// Front end behind the `pseudoh` binary. Exit codes: 0 success, 1 crosscheck
/// mismatch, 2 usage error, 3 validation/domain failure.
inline int run_command(const std::vector<std::string>& argv, std::ostream& out,
                       std::ostream& err) {
  CLI::App app{"geometry of 2-step nilpotent Lie groups with indefinite metrics"};
  app.name("pseudoh");
  app.require_subcommand(1);

  int exit_code = 0;

  cli_detail::VerifyOptions vopt;
  auto* verify = app.add_subcommand(
      "verify", "validate an algebra and run structure checks and identity suites");
  verify->add_option("algebra", vopt.target, "algebra file or catalog:NAME")->required();
  verify->add_option("--samples", vopt.samples, "random samples per suite");
  verify->add_option("--tol", vopt.tol, "identity suite tolerance");
  verify->add_option("--out", vopt.out_format, "output format")
      ->check(CLI::IsMember({"table", "json"}));
  verify->callback([&] { exit_code = cli_detail::cmd_verify(vopt, out); });

  auto* conjugate = app.add_subcommand("conjugate", "locate conjugate points");
  conjugate->require_subcommand(1);
  cli_detail::ConjugateOptions copt;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--algebra", copt.algebra, "algebra file or catalog:NAME")->required();
    cmd->add_option("--z0", copt.z0, "center coordinates of the initial velocity")
        ->required();
    cmd->add_option("--x0", copt.x0, "v coordinates of the initial velocity")->required();
    cmd->add_option("--window", copt.window, "t_min,t_max search window");
    cmd->add_option("--out", copt.out_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
  };
  auto* analytic = conjugate->add_subcommand("analytic", "closed-form conjugate points");
  add_common(analytic);
  analytic->add_option("--tol", copt.tol, "root residual tolerance");
  analytic->add_option("--grid", copt.grid, "bracketing subintervals per period");
  analytic->callback([&] { exit_code = cli_detail::cmd_conjugate(copt, true, out); });

  auto* numeric =
      conjugate->add_subcommand("numeric", "Jacobi-field ODE oracle conjugate points");
  add_common(numeric);
  numeric->add_option("--rel-tol", copt.rel_tol, "integrator relative tolerance");
  numeric->add_option("--abs-tol", copt.abs_tol, "integrator absolute tolerance");
  numeric->add_option("--rank-tol", copt.rank_tol, "relative singular value threshold");
  numeric->add_option("--bisect-tol", copt.bisect_tol, "refinement width in t");
  numeric->add_option("--scan", copt.scan_points, "scan points per period");
  numeric->add_option("--method", copt.method, "integration method")
      ->check(CLI::IsMember({"rk45", "rk4"}));
  numeric->add_option("--step", copt.step, "fixed step size for rk4");
  numeric->callback([&] { exit_code = cli_detail::cmd_conjugate(copt, false, out); });

  cli_detail::CrosscheckOptions xopt;
  auto* crosscheck = app.add_subcommand(
      "crosscheck", "run both pipelines and compare their conjugate sets");
  crosscheck->add_option("--algebra", xopt.algebra, "algebra file or catalog:NAME")
      ->required();
  crosscheck->add_option("--z0", xopt.z0, "center coordinates")->required();
  crosscheck->add_option("--x0", xopt.x0, "v coordinates")->required();
  crosscheck->add_option("--window", xopt.window, "t_min,t_max search window");
  crosscheck->add_option("--out", xopt.out_format, "output format")
      ->check(CLI::IsMember({"json", "table"}));
  crosscheck->add_option("--t-tol", xopt.t_tol, "matching tolerance in t");
  crosscheck->add_flag("--mult-strict,!--no-mult-strict", xopt.mult_strict,
                       "require matching multiplicities");
  crosscheck->add_option("--rel-tol", xopt.rel_tol, "integrator relative tolerance");
  crosscheck->add_option("--rank-tol", xopt.rank_tol, "relative singular value threshold");
  crosscheck->add_option("--scan", xopt.scan_points, "scan points per period");
  crosscheck->add_option("--grid", xopt.grid, "analytic bracketing grid per period");
  xopt.out_format = "table";
  crosscheck->callback([&] { exit_code = cli_detail::cmd_crosscheck(xopt, out); });

  cli_detail::ScanOptions sopt;
  auto* scan = app.add_subcommand(
      "scan", "sweep an invariant and emit the analytic conjugate set as CSV");
  scan->add_option("--algebra", sopt.algebra, "algebra file or catalog:NAME")->required();
  scan->add_option("--z0", sopt.z0, "baseline center coordinates")->required();
  scan->add_option("--x0", sopt.x0, "baseline v coordinates")->required();
  scan->add_option("--param", sopt.param, "invariant to sweep")
      ->check(CLI::IsMember({"a", "b"}));
  scan->add_option("--range", sopt.range, "lo,hi,count")->required();
  scan->add_option("--window", sopt.window, "t_min,t_max search window")->required();
  scan->add_option("--grid", sopt.grid, "bracketing subintervals per period");
  scan->callback([&] { exit_code = cli_detail::cmd_scan(sopt, out); });

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return exit_code;
}

}  // namespace pseudoh

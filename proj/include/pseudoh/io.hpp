#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pseudoh/algebra.hpp"
#include "pseudoh/conjugate_analytic.hpp"

namespace pseudoh {

inline constexpr const char* kVersion = "1.0.0";

/// Algebra file schema:
/// {
///   "dim_center": p, "dim_v": q,
///   "metric_center": [[...]], "metric_v": [[...]],
///   "structure": [{"a": i, "b": j, "z": [c_1, ..., c_p]}, ...]
/// }
/// Structure entries list only pairs a < b (0-based); the loader mirrors
/// them antisymmetrically and every unlisted bracket is zero.
inline MetricNilpotentAlgebra algebra_from_json(const nlohmann::json& j) {
  AlgebraDescription d;
  try {
    d.dim_center = j.at("dim_center").get<Eigen::Index>();
    d.dim_v = j.at("dim_v").get<Eigen::Index>();
    auto read_matrix = [](const nlohmann::json& rows) {
      const auto r = static_cast<Eigen::Index>(rows.size());
      Eigen::MatrixXd m(r, r > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : 0);
      for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = rows.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != m.cols())
          throw IoError("ragged matrix in algebra file");
        for (Eigen::Index k = 0; k < m.cols(); ++k)
          m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
      }
      return m;
    };
    d.metric_center = read_matrix(j.at("metric_center"));
    d.metric_v = read_matrix(j.at("metric_v"));

    std::vector<std::pair<Eigen::Index, Eigen::Index>> seen;
    for (const auto& entry : j.at("structure")) {
      const auto a = entry.at("a").get<Eigen::Index>();
      const auto b = entry.at("b").get<Eigen::Index>();
      if (a >= b) throw IoError("structure entries must have a < b");
      for (const auto& [sa, sb] : seen)
        if (sa == a && sb == b) throw IoError("duplicate structure entry");
      seen.emplace_back(a, b);
      const auto& zj = entry.at("z");
      Eigen::VectorXd z(static_cast<Eigen::Index>(zj.size()));
      for (Eigen::Index k = 0; k < z.size(); ++k)
        z[k] = zj.at(static_cast<std::size_t>(k)).get<double>();
      d.add_bracket(a, b, z);
    }
    if (d.structure.empty())
      d.structure.assign(static_cast<std::size_t>(d.dim_center),
                         Eigen::MatrixXd::Zero(d.dim_v, d.dim_v));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed algebra file: ") + e.what());
  }
  return validate_algebra(d);
}

inline MetricNilpotentAlgebra load_algebra_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open algebra file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return algebra_from_json(j);
}

inline nlohmann::json algebra_to_json(const MetricNilpotentAlgebra& alg) {
  nlohmann::json j;
  j["dim_center"] = alg.dim_center();
  j["dim_v"] = alg.dim_v();
  auto matrix_to_json = [](const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
      rows.push_back(row);
    }
    return rows;
  };
  j["metric_center"] = matrix_to_json(alg.metric_center());
  j["metric_v"] = matrix_to_json(alg.metric_v());
  nlohmann::json structure = nlohmann::json::array();
  for (Eigen::Index a = 0; a < alg.dim_v(); ++a) {
    for (Eigen::Index b = a + 1; b < alg.dim_v(); ++b) {
      Eigen::VectorXd z(alg.dim_center());
      for (Eigen::Index alpha = 0; alpha < alg.dim_center(); ++alpha)
        z[alpha] = alg.structure(alpha)(a, b);
      if (z.isZero(0.0)) continue;
      nlohmann::json entry;
      entry["a"] = a;
      entry["b"] = b;
      entry["z"] = std::vector<double>(z.data(), z.data() + z.size());
      structure.push_back(entry);
    }
  }
  j["structure"] = structure;
  return j;
}

namespace detail {

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void dump_deterministic_impl(const nlohmann::json& j, std::string& out, int indent,
                                    int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string pad_close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += nlohmann::json(it.key()).dump();
        out += ": ";
        dump_deterministic_impl(it.value(), out, indent, depth + 1);
      }
      out += "\n" + pad_close + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_deterministic_impl(el, out, indent, depth + 1);
      }
      out += "\n" + pad_close + "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

/// JSON serialization with sorted keys (nlohmann objects are key-ordered)
/// and floats printed with 17 significant digits, so identical inputs
/// produce byte-identical reports.
inline std::string dump_json_deterministic(const nlohmann::json& j, int indent = 2) {
  std::string out;
  detail::dump_deterministic_impl(j, out, indent, 0);
  out += "\n";
  return out;
}

inline nlohmann::json conjugate_point_to_json(const ConjugatePoint& cp) {
  nlohmann::json j;
  j["t0"] = cp.t0;
  j["multiplicity"] = cp.multiplicity;
  j["branch"] = to_string(cp.branch);
  j["residual"] = cp.residual;
  return j;
}

/// CSV with the fixed column order `t0,multiplicity,branch,residual`.
inline std::string conjugate_points_to_csv(const std::vector<ConjugatePoint>& points) {
  std::string out = "t0,multiplicity,branch,residual\n";
  for (const auto& cp : points) {
    out += detail::format_double(cp.t0);
    out += ",";
    out += std::to_string(cp.multiplicity);
    out += ",";
    out += to_string(cp.branch);
    out += ",";
    out += detail::format_double(cp.residual);
    out += "\n";
  }
  return out;
}

}  // namespace pseudoh

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pseudoh {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};
class AsymmetricMetric : public Error {
public:
  using Error::Error;
};
class DegenerateMetric : public Error {
public:
  using Error::Error;
};
class NonAntisymmetricStructure : public Error {
public:
  using Error::Error;
};
class NonCentralInput : public Error {
public:
  using Error::Error;
};
class ZeroVelocity : public Error {
public:
  using Error::Error;
};
class DependentBasis : public Error {
public:
  using Error::Error;
};
class WrongCausalClass : public Error {
public:
  using Error::Error;
};
class CenterTooSmall : public Error {
public:
  using Error::Error;
};
class DegenerateDenominator : public Error {
public:
  using Error::Error;
};
class InconsistentMembership : public Error {
public:
  using Error::Error;
};
class IntegratorFailure : public Error {
public:
  using Error::Error;
};
class IoError : public Error {
public:
  using Error::Error;
};

/// Element of n = z (+) v, stored as coordinates in the chosen bases.
struct AlgebraVector {
  Eigen::VectorXd z_part;
  Eigen::VectorXd v_part;

  AlgebraVector() = default;
  AlgebraVector(Eigen::VectorXd z, Eigen::VectorXd v)
      : z_part(std::move(z)), v_part(std::move(v)) {}

  bool is_zero() const {
    return z_part.isZero(0.0) && v_part.isZero(0.0);
  }

  AlgebraVector operator+(const AlgebraVector& o) const {
    return {z_part + o.z_part, v_part + o.v_part};
  }
  AlgebraVector operator-(const AlgebraVector& o) const {
    return {z_part - o.z_part, v_part - o.v_part};
  }
  AlgebraVector operator*(double s) const {
    return {s * z_part, s * v_part};
  }
  friend AlgebraVector operator*(double s, const AlgebraVector& u) {
    return u * s;
  }
};

enum class CausalClass { Timelike, Null, Spacelike };

inline const char* to_string(CausalClass c) {
  switch (c) {
    case CausalClass::Timelike: return "timelike";
    case CausalClass::Null: return "null";
    case CausalClass::Spacelike: return "spacelike";
  }
  return "?";
}

/// Raw, unvalidated description of a 2-step nilpotent metric Lie algebra.
/// structure[alpha](a, b) is the z_alpha coefficient of [e_a, e_b].
struct AlgebraDescription {
  Eigen::Index dim_center = 0;
  Eigen::Index dim_v = 0;
  Eigen::MatrixXd metric_center;
  Eigen::MatrixXd metric_v;
  std::vector<Eigen::MatrixXd> structure;

  /// Record [e_a, e_b] = sum_alpha z_coeffs[alpha] z_alpha (and its
  /// antisymmetric mirror). Structure matrices are allocated on first use.
  void add_bracket(Eigen::Index a, Eigen::Index b, const Eigen::VectorXd& z_coeffs) {
    if (structure.empty())
      structure.assign(static_cast<std::size_t>(dim_center),
                       Eigen::MatrixXd::Zero(dim_v, dim_v));
    if (a < 0 || b < 0 || a >= dim_v || b >= dim_v)
      throw DimensionMismatch("add_bracket: basis index out of range");
    if (z_coeffs.size() != dim_center)
      throw DimensionMismatch("add_bracket: wrong center coefficient count");
    for (Eigen::Index alpha = 0; alpha < dim_center; ++alpha) {
      structure[static_cast<std::size_t>(alpha)](a, b) += z_coeffs[alpha];
      structure[static_cast<std::size_t>(alpha)](b, a) -= z_coeffs[alpha];
    }
  }
};

/// Validated 2-step nilpotent Lie algebra with an indefinite inner product
/// that is block diagonal with respect to n = z (+) v. Immutable after
/// construction; all member queries are safe for concurrent readers.
class MetricNilpotentAlgebra {
public:
  /// Validates a raw description: dimension consistency, symmetric and
  /// nondegenerate metric blocks (|det| >= 1e-10), antisymmetric structure
  /// tensor. The J operators for the central basis are assembled here and
  /// verified against the defining identity <J_z x, y> = <z, [x, y]>.
  static MetricNilpotentAlgebra validate(const AlgebraDescription& d) {
    const Eigen::Index p = d.dim_center;
    const Eigen::Index q = d.dim_v;
    if (p <= 0 || q <= 0)
      throw DimensionMismatch("algebra dimensions must be positive");
    if (d.metric_center.rows() != p || d.metric_center.cols() != p)
      throw DimensionMismatch("metric_center must be dim_center x dim_center");
    if (d.metric_v.rows() != q || d.metric_v.cols() != q)
      throw DimensionMismatch("metric_v must be dim_v x dim_v");
    if (d.structure.size() != static_cast<std::size_t>(p))
      throw DimensionMismatch("structure tensor must have dim_center slices");
    for (const auto& c : d.structure)
      if (c.rows() != q || c.cols() != q)
        throw DimensionMismatch("structure slice must be dim_v x dim_v");

    check_symmetric(d.metric_center, "metric_center");
    check_symmetric(d.metric_v, "metric_v");
    check_nondegenerate(d.metric_center, "metric_center");
    check_nondegenerate(d.metric_v, "metric_v");

    for (std::size_t alpha = 0; alpha < d.structure.size(); ++alpha) {
      const Eigen::MatrixXd& c = d.structure[alpha];
      const double scale = 1.0 + c.cwiseAbs().maxCoeff();
      if (((c + c.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale)
        throw NonAntisymmetricStructure(
            "structure slice " + std::to_string(alpha) + " is not antisymmetric");
    }

    return MetricNilpotentAlgebra(d);
  }

  Eigen::Index dim_center() const { return p_; }
  Eigen::Index dim_v() const { return q_; }
  Eigen::Index dim() const { return p_ + q_; }

  const Eigen::MatrixXd& metric_center() const { return g_z_; }
  const Eigen::MatrixXd& metric_v() const { return g_v_; }
  const Eigen::MatrixXd& metric_v_inverse() const { return g_v_inv_; }
  const Eigen::MatrixXd& structure(Eigen::Index alpha) const {
    return structure_[static_cast<std::size_t>(alpha)];
  }
  /// J operator of the alpha-th central basis vector.
  const Eigen::MatrixXd& j_basis(Eigen::Index alpha) const {
    return j_basis_[static_cast<std::size_t>(alpha)];
  }

  /// Pseudo-H verdict computed once at validation (tol 1e-10).
  bool pseudo_h() const { return pseudo_h_; }

  AlgebraVector zero_vector() const {
    return {Eigen::VectorXd::Zero(p_), Eigen::VectorXd::Zero(q_)};
  }
  AlgebraVector central_vector(const Eigen::VectorXd& z_coords) const {
    if (z_coords.size() != p_)
      throw DimensionMismatch("central_vector: wrong coordinate count");
    return {z_coords, Eigen::VectorXd::Zero(q_)};
  }
  AlgebraVector v_vector(const Eigen::VectorXd& v_coords) const {
    if (v_coords.size() != q_)
      throw DimensionMismatch("v_vector: wrong coordinate count");
    return {Eigen::VectorXd::Zero(p_), v_coords};
  }
  /// Basis vector of n: indices [0, p) are central, [p, p+q) lie in v.
  AlgebraVector basis_vector(Eigen::Index i) const {
    AlgebraVector u = zero_vector();
    if (i < p_)
      u.z_part[i] = 1.0;
    else
      u.v_part[i - p_] = 1.0;
    return u;
  }

  void check_conforms(const AlgebraVector& u, const char* what) const {
    if (u.z_part.size() != p_ || u.v_part.size() != q_)
      throw DimensionMismatch(std::string(what) + ": vector does not conform to algebra");
  }

  /// z coordinates of [x, y] for v-coordinate vectors x, y.
  Eigen::VectorXd bracket_coords(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd out(p_);
    for (Eigen::Index alpha = 0; alpha < p_; ++alpha)
      out[alpha] = x.dot(structure_[static_cast<std::size_t>(alpha)] * y);
    return out;
  }

  /// J operator of the central element with coordinates z: the unique matrix
  /// with <J_z x, y>_v = <z, [x, y]>_z. Linear in z.
  Eigen::MatrixXd j_operator_coords(const Eigen::VectorXd& z) const {
    if (z.size() != p_)
      throw DimensionMismatch("j_operator: wrong center coordinate count");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(q_, q_);
    for (Eigen::Index alpha = 0; alpha < p_; ++alpha)
      if (z[alpha] != 0.0) j += z[alpha] * j_basis_[static_cast<std::size_t>(alpha)];
    return j;
  }

  /// ad_x as a map v -> z in coordinates: row alpha is x^T C_alpha.
  Eigen::MatrixXd ad_matrix(const Eigen::VectorXd& x) const {
    if (x.size() != q_)
      throw DimensionMismatch("ad_matrix: wrong v coordinate count");
    Eigen::MatrixXd ad(p_, q_);
    for (Eigen::Index alpha = 0; alpha < p_; ++alpha)
      ad.row(alpha) = (structure_[static_cast<std::size_t>(alpha)].transpose() * x).transpose();
    return ad;
  }

private:
  explicit MetricNilpotentAlgebra(const AlgebraDescription& d)
      : p_(d.dim_center),
        q_(d.dim_v),
        g_z_(d.metric_center),
        g_v_(d.metric_v),
        structure_(d.structure) {
    g_v_inv_ = g_v_.partialPivLu().inverse();

    // J_{z_alpha} = G_v^{-1} B^T with B = sum_beta (G_z e_alpha)_beta C_beta.
    // The transpose fixes the index-order ambiguity; the loop below asserts
    // the defining adjoint identity on every basis triple.
    j_basis_.reserve(static_cast<std::size_t>(p_));
    for (Eigen::Index alpha = 0; alpha < p_; ++alpha) {
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(q_, q_);
      for (Eigen::Index beta = 0; beta < p_; ++beta) {
        const double w = g_z_(beta, alpha);
        if (w != 0.0) b += w * structure_[static_cast<std::size_t>(beta)];
      }
      j_basis_.push_back(g_v_inv_ * b.transpose());
    }
    self_test_j_identity();
    pseudo_h_ = compute_pseudo_h(1e-10);
  }

  static void check_symmetric(const Eigen::MatrixXd& m, const char* name) {
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw AsymmetricMetric(std::string(name) + " is not symmetric");
  }

  static void check_nondegenerate(const Eigen::MatrixXd& m, const char* name) {
    if (std::abs(m.partialPivLu().determinant()) < 1e-10)
      throw DegenerateMetric(std::string(name) + " is degenerate (|det| < 1e-10)");
  }

  void self_test_j_identity() const {
    double scale = 1.0;
    for (const auto& c : structure_) scale = std::max(scale, c.cwiseAbs().maxCoeff());
    for (Eigen::Index alpha = 0; alpha < p_; ++alpha) {
      const Eigen::MatrixXd& j = j_basis_[static_cast<std::size_t>(alpha)];
      for (Eigen::Index a = 0; a < q_; ++a) {
        for (Eigen::Index b = 0; b < q_; ++b) {
          const double lhs = (g_v_ * j.col(a))(b);
          double rhs = 0.0;
          for (Eigen::Index beta = 0; beta < p_; ++beta)
            rhs += g_z_(alpha, beta) * structure_[static_cast<std::size_t>(beta)](a, b);
          if (std::abs(lhs - rhs) > 1e-9 * scale)
            throw std::logic_error("J operator assembly violates the adjoint identity");
        }
      }
    }
  }

  bool compute_pseudo_h(double tol) const {
    if (q_ % 2 != 0) return false;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(q_, q_);
    for (Eigen::Index a = 0; a < p_; ++a) {
      const Eigen::MatrixXd& ja = j_basis_[static_cast<std::size_t>(a)];
      for (Eigen::Index b = a; b < p_; ++b) {
        const Eigen::MatrixXd& jb = j_basis_[static_cast<std::size_t>(b)];
        const Eigen::MatrixXd lhs = ja * jb + jb * ja + 2.0 * g_z_(a, b) * id;
        if (lhs.cwiseAbs().maxCoeff() > tol) return false;
      }
    }
    return true;
  }

  Eigen::Index p_ = 0;
  Eigen::Index q_ = 0;
  Eigen::MatrixXd g_z_;
  Eigen::MatrixXd g_v_;
  Eigen::MatrixXd g_v_inv_;
  std::vector<Eigen::MatrixXd> structure_;
  std::vector<Eigen::MatrixXd> j_basis_;
  bool pseudo_h_ = false;
};

inline MetricNilpotentAlgebra validate_algebra(const AlgebraDescription& d) {
  return MetricNilpotentAlgebra::validate(d);
}

/// Lie bracket. The result is central (2-step nilpotency), so its v part
/// is identically zero.
inline AlgebraVector bracket(const MetricNilpotentAlgebra& alg, const AlgebraVector& u,
                             const AlgebraVector& w) {
  alg.check_conforms(u, "bracket");
  alg.check_conforms(w, "bracket");
  return {alg.bracket_coords(u.v_part, w.v_part), Eigen::VectorXd::Zero(alg.dim_v())};
}

/// Inner product; the center and v are orthogonal blocks.
inline double inner(const MetricNilpotentAlgebra& alg, const AlgebraVector& u,
                    const AlgebraVector& w) {
  alg.check_conforms(u, "inner");
  alg.check_conforms(w, "inner");
  return u.z_part.dot(alg.metric_center() * w.z_part) +
         u.v_part.dot(alg.metric_v() * w.v_part);
}

/// J_z for a central element z (nonzero v part is rejected).
inline Eigen::MatrixXd j_operator(const MetricNilpotentAlgebra& alg, const AlgebraVector& z) {
  alg.check_conforms(z, "j_operator");
  if (!z.v_part.isZero(0.0))
    throw NonCentralInput("j_operator requires a central element");
  return alg.j_operator_coords(z.z_part);
}

/// Entrywise check of the polarized identity
///   J_a J_b + J_b J_a = -2 <z_a, z_b> I
/// on all central basis pairs; equivalent to J_z^2 = -<z,z> I for all z.
inline bool is_pseudo_h_type(const MetricNilpotentAlgebra& alg, double tol = 1e-10) {
  if (alg.dim_v() % 2 != 0) return false;
  const Eigen::Index p = alg.dim_center();
  const Eigen::Index q = alg.dim_v();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(q, q);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = a; b < p; ++b) {
      const Eigen::MatrixXd dev = alg.j_basis(a) * alg.j_basis(b) +
                                  alg.j_basis(b) * alg.j_basis(a) +
                                  2.0 * alg.metric_center()(a, b) * id;
      if (dev.cwiseAbs().maxCoeff() > tol) return false;
    }
  }
  return true;
}

/// Causal classification with a scale-invariant null cutoff:
/// |<u,u>| <= tol * (1 + |u|_e^2) counts as null, where |.|_e is the
/// Euclidean coordinate norm.
inline CausalClass causal_class(const MetricNilpotentAlgebra& alg, const AlgebraVector& u,
                                double tol = 1e-9) {
  const double s = inner(alg, u, u);
  const double cutoff = tol * (1.0 + u.z_part.squaredNorm() + u.v_part.squaredNorm());
  if (std::abs(s) <= cutoff) return CausalClass::Null;
  return s > 0.0 ? CausalClass::Timelike : CausalClass::Spacelike;
}

/// Numerical rank of J_z: singular values above tol * sigma_max.
inline int jz_rank(const MetricNilpotentAlgebra& alg, const AlgebraVector& z,
                   double tol = 1e-8) {
  const Eigen::MatrixXd j = j_operator(alg, z);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = tol * sv[0];
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  return rank;
}

inline int matrix_rank(const Eigen::MatrixXd& m, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  const double cutoff = tol * sv[0];
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  return rank;
}

enum class PseudoregularVerdict { True, False, LikelyTrue };

inline const char* to_string(PseudoregularVerdict v) {
  switch (v) {
    case PseudoregularVerdict::True: return "true";
    case PseudoregularVerdict::False: return "false";
    case PseudoregularVerdict::LikelyTrue: return "likely-true";
  }
  return "?";
}

struct PseudoregularResult {
  PseudoregularVerdict verdict = PseudoregularVerdict::LikelyTrue;
  std::optional<AlgebraVector> witness;
  std::string witness_name;
};

/// Sampling check of pseudoregularity: ad_x surjective onto the center for
/// every nonnull x in v, and J_z nonsingular for every nonnull central z.
/// The condition quantifies over infinitely many vectors, so a passing run
/// returns LikelyTrue; a failure returns False together with a witness.
/// Basis-aligned nonnull vectors are checked deterministically before
/// sampling, so witnesses are reproducible.
inline PseudoregularResult is_pseudoregular(const MetricNilpotentAlgebra& alg,
                                            int sample_count = 200,
                                            unsigned rng_seed = 0, double tol = 1e-9) {
  const Eigen::Index p = alg.dim_center();
  const Eigen::Index q = alg.dim_v();
  const double rank_tol = 1e-10;

  auto fail_v = [&](const Eigen::VectorXd& x, std::string name) {
    PseudoregularResult r;
    r.verdict = PseudoregularVerdict::False;
    r.witness = AlgebraVector{Eigen::VectorXd::Zero(p), x};
    r.witness_name = std::move(name);
    return r;
  };
  auto fail_z = [&](const Eigen::VectorXd& z, std::string name) {
    PseudoregularResult r;
    r.verdict = PseudoregularVerdict::False;
    r.witness = AlgebraVector{z, Eigen::VectorXd::Zero(q)};
    r.witness_name = std::move(name);
    return r;
  };

  // Deterministic pass over nonnull basis vectors.
  for (Eigen::Index a = 0; a < q; ++a) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(q);
    x[a] = 1.0;
    if (causal_class(alg, {Eigen::VectorXd::Zero(p), x}, tol) == CausalClass::Null) continue;
    if (matrix_rank(alg.ad_matrix(x), rank_tol) < p)
      return fail_v(x, "e" + std::to_string(a + 1));
  }
  for (Eigen::Index alpha = 0; alpha < p; ++alpha) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(p);
    z[alpha] = 1.0;
    if (causal_class(alg, {z, Eigen::VectorXd::Zero(q)}, tol) == CausalClass::Null) continue;
    if (matrix_rank(alg.j_operator_coords(z), rank_tol) < q)
      return fail_z(z, "z" + std::to_string(alpha + 1));
  }

  std::mt19937 rng(rng_seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto draw = [&](Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = unif(rng);
    return v;
  };

  for (int s = 0; s < sample_count; ++s) {
    Eigen::VectorXd x = draw(q);
    for (int tries = 0;
         causal_class(alg, {Eigen::VectorXd::Zero(p), x}, tol) == CausalClass::Null &&
         tries < 64;
         ++tries)
      x = draw(q);
    if (causal_class(alg, {Eigen::VectorXd::Zero(p), x}, tol) != CausalClass::Null &&
        matrix_rank(alg.ad_matrix(x), rank_tol) < p)
      return fail_v(x, "sampled v vector");

    Eigen::VectorXd z = draw(p);
    for (int tries = 0;
         causal_class(alg, {z, Eigen::VectorXd::Zero(q)}, tol) == CausalClass::Null &&
         tries < 64;
         ++tries)
      z = draw(p);
    if (causal_class(alg, {z, Eigen::VectorXd::Zero(q)}, tol) != CausalClass::Null &&
        matrix_rank(alg.j_operator_coords(z), rank_tol) < q)
      return fail_z(z, "sampled central vector");
  }

  PseudoregularResult r;
  r.verdict = PseudoregularVerdict::LikelyTrue;
  return r;
}

}  // namespace pseudoh

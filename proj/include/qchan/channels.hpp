#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qchan/common.hpp"
#include "qchan/linalg.hpp"
#include "qchan/states.hpp"

namespace qchan {

// ============================================================================
// Kraus-set representation and channel-level operations.
// ============================================================================

/// Ordered list of Kraus operators sharing dimensions. Construction only
/// measures the completeness defect ||sum K^dag K - I||_F; raw intermediate
/// sets (operator bases, projector lists) are built with
/// `non_trace_preserving` set and are rejected by apply().
struct KrausSet {
  int dim_in = 0;
  int dim_out = 0;
  std::vector<Matrix> operators;
  std::string label;
  bool non_trace_preserving = false;

  double completeness_defect() const {
    if (operators.empty()) return static_cast<double>(dim_in);
    Matrix sum = Matrix::Zero(dim_in, dim_in);
    for (const Matrix& k : operators) sum += k.adjoint() * k;
    return (sum - identity(dim_in)).norm();
  }
};

inline KrausSet make_kraus(std::vector<Matrix> operators, std::string label,
                           bool non_trace_preserving = false) {
  if (operators.empty()) throw InvalidArgument("make_kraus: empty operator list");
  KrausSet set;
  set.dim_out = static_cast<int>(operators.front().rows());
  set.dim_in = static_cast<int>(operators.front().cols());
  for (const Matrix& k : operators) {
    if (k.rows() != set.dim_out || k.cols() != set.dim_in)
      throw DimensionMismatch("make_kraus: operators disagree on dimensions");
    if (!all_finite(k)) throw InvalidArgument("make_kraus: non-finite operator");
  }
  set.operators = std::move(operators);
  set.label = std::move(label);
  set.non_trace_preserving = non_trace_preserving;
  return set;
}

inline double check_completeness(const KrausSet& k) {
  if (k.operators.empty()) throw InvalidArgument("check_completeness: empty set");
  return k.completeness_defect();
}

/// sum_m K_m rho K_m^dagger. Requires a complete set.
inline DensityMatrix apply(const KrausSet& k, const DensityMatrix& rho) {
  if (k.dim_in != rho.dim())
    throw DimensionMismatch("apply: channel and state dimensions differ");
  if (k.non_trace_preserving || k.completeness_defect() > tol::completeness)
    throw IncompleteKrausSet("apply: Kraus set is not complete");
  Matrix out = Matrix::Zero(k.dim_out, k.dim_out);
  for (const Matrix& op : k.operators)
    out += op * rho.matrix() * op.adjoint();
  out = (out + out.adjoint()) / 2.0;
  return DensityMatrix(std::move(out));
}

/// p * I/n + (1 - p) * rho, the reference output every reconstruction is
/// measured against.
inline DensityMatrix depolarize_reference(const DensityMatrix& rho, double p) {
  if (p < 0.0 || p > 1.0)
    throw InvalidArgument("depolarize_reference: p outside [0,1]");
  const int n = rho.dim();
  Matrix out = p * identity(n) / static_cast<double>(n) + (1.0 - p) * rho.matrix();
  return DensityMatrix(std::move(out));
}

/// sum_m vec(K_m) vec(K_m)^dagger. Two Kraus sets decompose the same channel
/// iff their process matrices coincide, which gives an exact equality test to
/// go with the Monte-Carlo one.
inline Matrix process_matrix(const KrausSet& k) {
  const Eigen::Index d = static_cast<Eigen::Index>(k.dim_in) * k.dim_out;
  Matrix phi = Matrix::Zero(d, d);
  for (const Matrix& op : k.operators) {
    const Vector v = vectorize(op);
    phi += v * v.adjoint();
  }
  return phi;
}

struct ChannelEqualityReport {
  double max_bloch_distance_sq = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
};

/// Applies both channels to seeded random mixed states and reports the worst
/// Bloch-vector discrepancy between the outputs.
inline ChannelEqualityReport channels_equal(const KrausSet& a, const KrausSet& b,
                                            int samples, std::uint64_t seed) {
  if (a.dim_in != b.dim_in || a.dim_out != b.dim_out)
    throw DimensionMismatch("channels_equal: dimension mismatch");
  if (samples < 1) throw InvalidArgument("channels_equal: samples must be >= 1");
  ChannelEqualityReport report;
  report.samples = samples;
  report.seed = seed;
  for (int i = 0; i < samples; ++i) {
    const DensityMatrix rho = random_density(a.dim_in, derive_seed(seed, i));
    const double d = bloch_distance_sq(apply(a, rho), apply(b, rho));
    if (d > report.max_bloch_distance_sq) report.max_bloch_distance_sq = d;
  }
  return report;
}

namespace detail {

/// Express each operator of `set` in the orthonormal canonical operator basis
/// obtained from the eigenvectors of a process matrix. Rows index operators.
inline Matrix canonical_coefficients(const KrausSet& set,
                                     const std::vector<Vector>& canon_vecs,
                                     const std::vector<double>& canon_scale) {
  const int n_ops = static_cast<int>(set.operators.size());
  const int r = static_cast<int>(canon_vecs.size());
  Matrix coeff(n_ops, r);
  for (int k = 0; k < n_ops; ++k) {
    const Vector v = vectorize(set.operators[k]);
    for (int c = 0; c < r; ++c)
      coeff(k, c) = canon_vecs[c].dot(v) / canon_scale[c];
  }
  return coeff;
}

/// Orthonormal basis of the orthogonal complement of the column span of an
/// isometry-like matrix, taken from the trailing left singular vectors.
inline Matrix orthogonal_complement(const Matrix& a, int complement_cols) {
  if (complement_cols == 0) return Matrix(a.rows(), 0);
  Eigen::JacobiSVD<Matrix> solver(a, Eigen::ComputeFullU);
  return solver.matrixU().rightCols(complement_cols);
}

}  // namespace detail

/// Finds a unitary U with E_k = sum_l U_{k,l} G_l after zero-padding the
/// shorter set, or nullopt when the two sets do not decompose the same
/// channel. The construction goes through the shared canonical Kraus basis of
/// the process matrix, then pairs up the left-over dimensions of both
/// coefficient isometries.
inline std::optional<Matrix> unitary_relate(const KrausSet& e, const KrausSet& g,
                                            double tolerance = 1e-8) {
  if (e.dim_in != g.dim_in || e.dim_out != g.dim_out)
    throw DimensionMismatch("unitary_relate: dimension mismatch");
  const int n_ops = static_cast<int>(std::max(e.operators.size(), g.operators.size()));

  auto padded = [n_ops](const KrausSet& set) {
    std::vector<Matrix> ops = set.operators;
    while (static_cast<int>(ops.size()) < n_ops)
      ops.push_back(Matrix::Zero(set.dim_out, set.dim_in));
    KrausSet out = set;
    out.operators = std::move(ops);
    return out;
  };
  const KrausSet ep = padded(e);
  const KrausSet gp = padded(g);

  const Matrix phi_e = process_matrix(ep);
  const Matrix phi_g = process_matrix(gp);
  const double scale = std::max(1.0, phi_e.norm());
  if ((phi_e - phi_g).norm() > tolerance * scale) return std::nullopt;

  const HermitianEigen eig = eig_hermitian((phi_e + phi_g) / 2.0);
  std::vector<Vector> canon_vecs;
  std::vector<double> canon_scale;
  const double cutoff = std::max(eig.eigenvalues.maxCoeff(), 0.0) * 1e-12;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    if (eig.eigenvalues(i) > cutoff) {
      canon_vecs.push_back(eig.eigenvectors.col(i));
      canon_scale.push_back(std::sqrt(eig.eigenvalues(i)));
    }
  }
  const int r = static_cast<int>(canon_vecs.size());
  if (r > n_ops) return std::nullopt;

  const Matrix a = detail::canonical_coefficients(ep, canon_vecs, canon_scale);
  const Matrix b = detail::canonical_coefficients(gp, canon_vecs, canon_scale);
  Matrix u = a * b.adjoint();
  if (r < n_ops) {
    const Matrix a_perp = detail::orthogonal_complement(a, n_ops - r);
    const Matrix b_perp = detail::orthogonal_complement(b, n_ops - r);
    u += a_perp * b_perp.adjoint();
  }

  if (unitarity_defect(u) > tolerance) return std::nullopt;
  for (int k = 0; k < n_ops; ++k) {
    Matrix rebuilt = Matrix::Zero(e.dim_out, e.dim_in);
    for (int l = 0; l < n_ops; ++l) rebuilt += u(k, l) * gp.operators[l];
    if ((rebuilt - ep.operators[k]).norm() > tolerance) return std::nullopt;
  }
  return u;
}

}  // namespace qchan

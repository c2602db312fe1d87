#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "qchan/common.hpp"

namespace qchan {

// ============================================================================
// Dense complex-matrix kernels shared by every module. All routines are pure
// and deterministic: fixed algorithms, descending value order, and a fixed
// eigenvector phase convention, so identical input bits give identical
// output bits.
// ============================================================================

struct HermitianEigen {
  RealVector eigenvalues;  // descending
  Matrix eigenvectors;     // columns are unit eigenvectors
};

struct SvdFactors {
  Matrix left_unitary;        // W
  RealVector singular_values; // descending, nonnegative
  Matrix right_unitary;       // X, so that A = W * diag(S) * X^dagger
};

struct LeastSquaresSolution {
  Vector coefficients;
  double residual;  // ||basis * x - target||_2
};

namespace detail {

/// Rotate each column so its largest-magnitude entry (lowest index on ties)
/// becomes real and nonnegative.
inline void fix_column_phases(Matrix& vecs) {
  for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
    Eigen::Index best = 0;
    double best_mag = 0.0;
    for (Eigen::Index r = 0; r < vecs.rows(); ++r) {
      const double mag = std::abs(vecs(r, c));
      if (mag > best_mag + 1e-14) {
        best_mag = mag;
        best = r;
      }
    }
    if (best_mag > 0.0) {
      const Complex phase = vecs(best, c) / best_mag;
      vecs.col(c) *= std::conj(phase);
    }
  }
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
/// herm_tol < 0 selects the default 1e-10 * dim gate on ||A - A^dagger||_F.
inline HermitianEigen eig_hermitian(const Matrix& a, double herm_tol = -1.0) {
  if (a.rows() != a.cols()) throw NonSquare("eig_hermitian: matrix not square");
  if (!all_finite(a)) throw InvalidArgument("eig_hermitian: non-finite input");
  if (herm_tol < 0) herm_tol = tol::hermitian * static_cast<double>(a.rows());
  if (hermiticity_defect(a) > herm_tol)
    throw NonHermitianInput("eig_hermitian: hermiticity tolerance exceeded");

  Eigen::SelfAdjointEigenSolver<Matrix> solver((a + a.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw Error("eig_hermitian: solver failed to converge");

  const Eigen::Index n = a.rows();
  HermitianEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  // Eigen returns ascending order; reverse.
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
    out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  detail::fix_column_phases(out.eigenvectors);
  return out;
}

/// Full singular value decomposition A = W * diag(S) * X^dagger with square
/// unitary factors and descending singular values.
inline SvdFactors svd(const Matrix& a) {
  if (!all_finite(a)) throw InvalidArgument("svd: non-finite input");
  Eigen::JacobiSVD<Matrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return SvdFactors{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

/// Right polar decomposition A = U * Pos with U unitary and Pos Hermitian PSD.
/// On rank-deficient input U is the SVD-completed unitary W * X^dagger; Pos is
/// always unique.
inline std::pair<Matrix, Matrix> polar_right(const Matrix& a) {
  if (a.rows() != a.cols()) throw NonSquare("polar_right: matrix not square");
  const SvdFactors f = svd(a);
  Matrix u = f.left_unitary * f.right_unitary.adjoint();
  Matrix pos = f.right_unitary * f.singular_values.asDiagonal() *
               f.right_unitary.adjoint();
  return {std::move(u), std::move(pos)};
}

/// Number of singular values above tol * max(sigma).
inline int rank(const Matrix& a, double tol_rel = tol::rank_rel) {
  if (tol_rel <= 0) throw InvalidArgument("rank: tolerance must be positive");
  Eigen::JacobiSVD<Matrix> solver(a);
  const auto& s = solver.singularValues();
  if (s.size() == 0) return 0;
  const double cutoff = tol_rel * s(0);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) ++r;
  return r;
}

/// Least-squares solve of basis * x = target for a basis with full column
/// rank. Throws RankDeficientBasis when the smallest singular value falls
/// under rank_tol * largest.
inline LeastSquaresSolution solve_linear(const Matrix& basis_columns,
                                         const Vector& target,
                                         double rank_tol = tol::rank_rel) {
  if (basis_columns.rows() != target.size())
    throw DimensionMismatch("solve_linear: basis rows != target size");
  Eigen::JacobiSVD<Matrix> solver(basis_columns,
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = solver.singularValues();
  if (s.size() == 0 || s(s.size() - 1) <= rank_tol * s(0))
    throw RankDeficientBasis("solve_linear: basis is rank deficient");
  Vector x = solver.solve(target);
  const double residual = (basis_columns * x - target).norm();
  return {std::move(x), residual};
}

}  // namespace qchan

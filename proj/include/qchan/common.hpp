#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qchan {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// ============================================================================
// Errors
// ============================================================================

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonSquare : Error {
  using Error::Error;
};
struct NonHermitianInput : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct RankDeficientBasis : Error {
  using Error::Error;
};
struct ExpansionResidual : Error {
  using Error::Error;
};
struct NotAProjector : Error {
  using Error::Error;
};
struct NonUnitaryU : Error {
  using Error::Error;
};
struct NonHermitianGamma : Error {
  using Error::Error;
};
struct IncompleteKrausSet : Error {
  using Error::Error;
};
struct ProjectorDefect : Error {
  using Error::Error;
};
struct ZeroTrace : Error {
  using Error::Error;
};
struct NonPureInput : Error {
  using Error::Error;
};
struct InvalidArgument : Error {
  using Error::Error;
};
struct MalformedInput : Error {
  using Error::Error;
};

// ============================================================================
// Default tolerances
// ============================================================================

namespace tol {
inline constexpr double hermitian = 1e-10;       // scaled by dimension
inline constexpr double reconstruction = 1e-10;  // scaled by input norm
inline constexpr double rank_rel = 1e-9;         // relative to largest sigma
inline constexpr double projector = 1e-10;
inline constexpr double completeness = 1e-8;     // gate for channel application
inline constexpr double verdict = 1e-8;          // correctability verdict, per unit tr(P)
}  // namespace tol

// ============================================================================
// Small helpers shared by every module
// ============================================================================

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

/// Elementary matrix with a single 1 at (row, col), 1-based indices.
inline Matrix elementary(int n, int row, int col) {
  if (row < 1 || row > n || col < 1 || col > n)
    throw InvalidArgument("elementary: index out of range");
  Matrix e = Matrix::Zero(n, n);
  e(row - 1, col - 1) = Complex(1, 0);
  return e;
}

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

inline double hermiticity_defect(const Matrix& a) {
  return (a - a.adjoint()).norm();
}

inline double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - identity(u.cols())).norm();
}

/// Column-major vectorization; the single flattening convention used for
/// operator spans, Gram matrices, and process matrices.
inline Vector vectorize(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

inline Matrix unvectorize(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw DimensionMismatch("unvectorize: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace qchan

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

#include "qchan/common.hpp"
#include "qchan/linalg.hpp"

namespace qchan {

// ============================================================================
// Density matrices, pure states, seeded sampling, Bloch metrics.
// ============================================================================

/// n x n Hermitian, positive semidefinite, trace-1 matrix. The constructor
/// enforces the invariants; use DensityMatrix::unchecked only for outputs a
/// caller has already proven valid.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix rho) : rho_(std::move(rho)) { validate(); }

  static DensityMatrix unchecked(Matrix rho) {
    DensityMatrix out;
    out.rho_ = std::move(rho);
    return out;
  }

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Matrix& matrix() const { return rho_; }

 private:
  DensityMatrix() = default;

  void validate() const {
    if (rho_.rows() != rho_.cols())
      throw NonSquare("DensityMatrix: matrix not square");
    if (!all_finite(rho_)) throw InvalidArgument("DensityMatrix: non-finite entries");
    if (hermiticity_defect(rho_) > tol::hermitian * static_cast<double>(rho_.rows()))
      throw NonHermitianInput("DensityMatrix: not Hermitian");
    if (std::abs(rho_.trace().real() - 1.0) > 1e-10 ||
        std::abs(rho_.trace().imag()) > 1e-10)
      throw InvalidArgument("DensityMatrix: trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> solver((rho_ + rho_.adjoint()) / 2.0,
                                                 Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-9)
      throw InvalidArgument("DensityMatrix: negative eigenvalue");
  }

  Matrix rho_;
};

/// Unit-norm complex amplitude vector.
class PureState {
 public:
  explicit PureState(Vector amplitudes) : amp_(std::move(amplitudes)) {
    if (!amp_.allFinite()) throw InvalidArgument("PureState: non-finite entries");
    if (std::abs(amp_.norm() - 1.0) > 1e-12)
      throw InvalidArgument("PureState: norm != 1");
  }

  int dim() const { return static_cast<int>(amp_.size()); }
  const Vector& amplitudes() const { return amp_; }
  Matrix projector() const { return amp_ * amp_.adjoint(); }

 private:
  Vector amp_;
};

// ============================================================================
// Seeded sampling
// ============================================================================

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Stream seed for sample `index` of a run with `master` seed. Serial and
/// parallel sample loops agree because each sample owns its own stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return detail::splitmix64(master ^ detail::splitmix64(index + 1));
}

/// Deterministic random stream: mt19937_64 plus an explicit Box-Muller
/// transform, so the produced doubles do not depend on the standard library's
/// distribution implementations.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : engine_(detail::splitmix64(seed)) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Complex complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im);
  }

  Matrix ginibre(int rows, int cols) {
    Matrix g(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) g(r, c) = complex_gaussian();
    return g;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Full-rank random mixed state rho = G G^dagger / tr(G G^dagger) with G a
/// square matrix of independent complex Gaussians.
inline DensityMatrix random_density(int n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("random_density: n must be >= 2");
  SampleRng rng(seed);
  const Matrix g = rng.ginibre(n, n);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (rho + rho.adjoint()) / 2.0;
  return DensityMatrix(std::move(rho));
}

inline PureState random_pure(int n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("random_pure: n must be >= 1");
  SampleRng rng(seed);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.complex_gaussian();
  v /= v.norm();
  return PureState(std::move(v));
}

// ============================================================================
// Bloch metrics
// ============================================================================

/// (n tr(rho^2) - 1) / (n - 1): 1 iff pure, 0 for the maximally mixed state.
/// Not clamped; tiny negatives from roundoff are reported as-is.
inline double bloch_purity(const DensityMatrix& rho) {
  const int n = rho.dim();
  if (n < 2) throw InvalidArgument("bloch_purity: dimension must be >= 2");
  const double purity = (rho.matrix() * rho.matrix()).trace().real();
  return (n * purity - 1.0) / (n - 1.0);
}

/// Square magnitude of the Bloch-vector difference,
/// (n / (n - 1)) tr((A - B)^2).
inline double bloch_distance_sq(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("bloch_distance_sq: dimension mismatch");
  const int n = a.dim();
  const Matrix d = a.matrix() - b.matrix();
  return (static_cast<double>(n) / (n - 1.0)) * (d * d).trace().real();
}

// ============================================================================
// Composition and reduction
// ============================================================================

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Raw partial trace over the second factor, for matrices that are not
/// states (projector algebra, operator sandwiches).
inline Matrix partial_trace_second(const Matrix& m, int n_sys, int n_anc) {
  if (m.rows() != m.cols() || m.rows() != n_sys * n_anc)
    throw DimensionMismatch("partial_trace_second: dim != n_sys * n_anc");
  Matrix out = Matrix::Zero(n_sys, n_sys);
  for (int i = 0; i < n_sys; ++i)
    for (int j = 0; j < n_sys; ++j) {
      Complex sum(0, 0);
      for (int a = 0; a < n_anc; ++a) sum += m(i * n_anc + a, j * n_anc + a);
      out(i, j) = sum;
    }
  return out;
}

/// Trace over the second tensor factor of a (n_sys * n_anc)-dimensional state.
inline DensityMatrix partial_trace_ancilla(const DensityMatrix& rho, int n_sys,
                                           int n_anc) {
  if (rho.dim() != n_sys * n_anc)
    throw DimensionMismatch("partial_trace_ancilla: dim != n_sys * n_anc");
  return DensityMatrix(partial_trace_second(rho.matrix(), n_sys, n_anc));
}

/// Pure state on dim n * R whose partial trace over the second factor
/// reproduces rho; built from the eigendecomposition as
/// sum_j sqrt(lambda_j) |e_j> (x) |j>.
inline PureState purify(const DensityMatrix& rho, double rank_tol = 1e-12) {
  const HermitianEigen eig = eig_hermitian(rho.matrix());
  int r = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
    if (eig.eigenvalues(i) > rank_tol) ++r;
  if (r == 0) throw InvalidArgument("purify: state has no positive weight");
  const int n = rho.dim();
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(n) * r);
  for (int j = 0; j < r; ++j) {
    const double w = std::sqrt(eig.eigenvalues(j));
    for (int i = 0; i < n; ++i) psi(i * r + j) = w * eig.eigenvectors(i, j);
  }
  psi /= psi.norm();
  return PureState(std::move(psi));
}

}  // namespace qchan

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qchan/channels.hpp"
#include "qchan/common.hpp"
#include "qchan/linalg.hpp"
#include "qchan/states.hpp"

namespace qchan {

// ============================================================================
// Random-unitary constructions for dephasing, permutation, maximal-mixing
// and depolarization channels, the explicit RU Kraus set, and the
// Hilbert-Schmidt completeness machinery built on top of it.
// ============================================================================

/// Strictly increasing 1-based flip positions; empty means "no flips".
using SignIndexVector = std::vector<int>;

/// Diagonal involutory unitary I - 2 E_(k,k), 1-based k.
inline Matrix sign_flip(int k, int n) {
  if (k < 1 || k > n) throw InvalidArgument("sign_flip: k out of range");
  Matrix out = identity(n);
  out(k - 1, k - 1) = Complex(-1, 0);
  return out;
}

inline Matrix sign_flip_multi(const SignIndexVector& flips, int n) {
  Matrix out = identity(n);
  int prev = 0;
  for (int k : flips) {
    if (k < 1 || k > n) throw InvalidArgument("sign_flip_multi: index out of range");
    if (k <= prev)
      throw InvalidArgument("sign_flip_multi: indices must be strictly increasing");
    prev = k;
    out(k - 1, k - 1) = Complex(-1, 0);
  }
  return out;
}

/// The 2^(n-1) flip-position vectors, ordered as the empty vector followed by
/// the k-combinations of [1..n] for k = 1..n in lexicographic order,
/// truncated after 2^(n-1) entries. The discarded tail consists exactly of
/// the complements of kept vectors, whose sign matrices are global negatives
/// of kept ones.
inline std::vector<SignIndexVector> enumerate_sign_vectors(int n) {
  if (n < 2) throw InvalidArgument("enumerate_sign_vectors: n must be >= 2");
  const std::size_t target = std::size_t{1} << (n - 1);
  std::vector<SignIndexVector> out;
  out.reserve(target);
  out.push_back({});
  for (int k = 1; k <= n && out.size() < target; ++k) {
    // first combination 1,2,...,k; advance lexicographically
    SignIndexVector combo(k);
    for (int i = 0; i < k; ++i) combo[i] = i + 1;
    while (out.size() < target) {
      out.push_back(combo);
      int i = k - 1;
      while (i >= 0 && combo[i] == n - (k - 1 - i)) --i;
      if (i < 0) break;
      ++combo[i];
      for (int j = i + 1; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  return out;
}

/// Cyclic permutation matrix whose rows are the elemental row vectors
/// R_m, R_(m+1), ..., wrapping past n. permutation_matrix(1, n) is I.
inline Matrix permutation_matrix(int m, int n) {
  if (m < 1 || m > n) throw InvalidArgument("permutation_matrix: m out of range");
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) out(i, (m - 1 + i) % n) = Complex(1, 0);
  return out;
}

// ----------------------------------------------------------------------------
// Recursive channel forms
// ----------------------------------------------------------------------------

/// One dephasing stage: rho -> rho/2 + N_k rho N_k / 2, which zeroes the
/// off-diagonal entries of row k and column k and leaves the rest intact.
inline DensityMatrix dephase_step(const DensityMatrix& rho, int k) {
  const int n = rho.dim();
  if (k < 1 || k > n - 1) throw InvalidArgument("dephase_step: k out of range");
  const Matrix nk = sign_flip(k, n);
  Matrix out = 0.5 * rho.matrix() + 0.5 * nk * rho.matrix() * nk.adjoint();
  return DensityMatrix(std::move(out));
}

/// Full dephasing: stages k = 1..n-1 composed, leaving only the diagonal.
inline DensityMatrix dephase_full(const DensityMatrix& rho) {
  DensityMatrix out = rho;
  for (int k = 1; k <= rho.dim() - 1; ++k) out = dephase_step(out, k);
  return out;
}

/// (1/n) sum_m Pi_m rho Pi_m^dagger; equalizes any diagonal input.
inline DensityMatrix permutation_channel(const DensityMatrix& rho) {
  const int n = rho.dim();
  Matrix out = Matrix::Zero(n, n);
  for (int m = 1; m <= n; ++m) {
    const Matrix pi = permutation_matrix(m, n);
    out += pi * rho.matrix() * pi.adjoint();
  }
  out /= static_cast<double>(n);
  return DensityMatrix(std::move(out));
}

/// Dephase then permute: every input goes to I/n.
inline DensityMatrix maximal_mixing(const DensityMatrix& rho) {
  return permutation_channel(dephase_full(rho));
}

/// Depolarization through the random-unitary pipeline:
/// p * maximal_mixing(rho) + (1 - p) * rho.
inline DensityMatrix depolarize_ru(const DensityMatrix& rho, double p) {
  if (p < 0.0 || p > 1.0) throw InvalidArgument("depolarize_ru: p outside [0,1]");
  Matrix out = p * maximal_mixing(rho).matrix() + (1.0 - p) * rho.matrix();
  return DensityMatrix(std::move(out));
}

// ----------------------------------------------------------------------------
// Explicit RU Kraus set
// ----------------------------------------------------------------------------

inline double ru_normalization(int n) {
  return 1.0 / std::sqrt(static_cast<double>(n) * std::pow(2.0, n - 1));
}

/// The n * 2^(n-1) Kraus operators (1/sqrt(n 2^(n-1))) Pi_m N_x, ordered by
/// permutation family m ascending, then by the sign-vector enumeration.
/// Every operator is sqrt(p) times a unitary with p = 1 / (n 2^(n-1)).
inline KrausSet ru_kraus_set(int n, int max_dim = 16) {
  if (n < 2) throw InvalidArgument("ru_kraus_set: n must be >= 2");
  if (n > max_dim)
    throw InvalidArgument("ru_kraus_set: n exceeds the configured dimension cap");
  const double scale = ru_normalization(n);
  const std::vector<SignIndexVector> xs = enumerate_sign_vectors(n);
  std::vector<Matrix> ops;
  ops.reserve(static_cast<std::size_t>(n) * xs.size());
  for (int m = 1; m <= n; ++m) {
    const Matrix pi = permutation_matrix(m, n);
    for (const SignIndexVector& x : xs) ops.push_back(scale * pi * sign_flip_multi(x, n));
  }
  return make_kraus(std::move(ops), "ru_maximal_mixing[" + std::to_string(n) + "]");
}

/// The single matrix relating each permutation family's supporting elementary
/// matrices to the family's first n RU Kraus operators:
/// (1/sqrt(n 2^(n-1))) * (all-ones - 2 * subdiagonal).
inline Matrix transformation_matrix(int n) {
  if (n < 2) throw InvalidArgument("transformation_matrix: n must be >= 2");
  Matrix t = Matrix::Ones(n, n);
  for (int k = 1; k <= n - 1; ++k) t(k, k - 1) = Complex(-1, 0);
  return ru_normalization(n) * t;
}

/// Row index (1-based) of the single nonzero entry of column j (1-based) of
/// permutation_matrix(m, n).
inline int permutation_support_row(int m, int j, int n) {
  return ((j - m) % n + n) % n + 1;
}

struct HsBasis {
  KrausSet operators;       // the n^2 selected RU operators, flagged non-TP
  int gram_rank = 0;        // rank of the Gram matrix of vectorized operators
  double family_relation_residual = 0.0;  // worst transformation-matrix defect
};

/// First n operators from each of the n permutation families: an n^2-element
/// subset that spans all n x n matrices. Verifies both the transformation
/// relation against the supporting elementary matrices and the Gram rank.
inline HsBasis hs_basis(int n) {
  if (n < 2) throw InvalidArgument("hs_basis: n must be >= 2");
  const double scale = ru_normalization(n);
  const Matrix t = transformation_matrix(n);

  std::vector<Matrix> ops;
  ops.reserve(static_cast<std::size_t>(n) * n);
  double worst = 0.0;
  for (int m = 1; m <= n; ++m) {
    const Matrix pi = permutation_matrix(m, n);
    for (int i = 0; i < n; ++i) {
      SignIndexVector x;
      if (i > 0) x.push_back(i);
      Matrix op = scale * pi * sign_flip_multi(x, n);
      Matrix rebuilt = Matrix::Zero(n, n);
      for (int j = 1; j <= n; ++j)
        rebuilt += t(i, j - 1) * elementary(n, permutation_support_row(m, j, n), j);
      worst = std::max(worst, (op - rebuilt).norm());
      ops.push_back(std::move(op));
    }
  }

  Matrix stacked(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(n) * n);
  for (std::size_t k = 0; k < ops.size(); ++k)
    stacked.col(static_cast<Eigen::Index>(k)) = vectorize(ops[k]);
  Matrix gram = stacked.adjoint() * stacked;

  HsBasis basis;
  basis.operators = make_kraus(std::move(ops), "hs_basis[" + std::to_string(n) + "]",
                               /*non_trace_preserving=*/true);
  basis.gram_rank = rank(gram);
  basis.family_relation_residual = worst;
  if (basis.gram_rank != n * n)
    throw Error("hs_basis: selection does not span the full operator space");
  return basis;
}

/// Unique expansion coefficients of A over a full-rank operator basis, by a
/// linear solve over vectorized operators. The RU operators are not mutually
/// orthogonal under the Hilbert-Schmidt inner product, so inner products
/// cannot be used here.
inline Vector hs_expand(const Matrix& a, const KrausSet& basis,
                        double rank_tol = tol::rank_rel) {
  if (basis.operators.empty()) throw InvalidArgument("hs_expand: empty basis");
  if (a.rows() != basis.dim_out || a.cols() != basis.dim_in)
    throw DimensionMismatch("hs_expand: operand does not match basis dimensions");
  Matrix columns(a.size(), static_cast<Eigen::Index>(basis.operators.size()));
  for (std::size_t k = 0; k < basis.operators.size(); ++k)
    columns.col(static_cast<Eigen::Index>(k)) = vectorize(basis.operators[k]);
  const LeastSquaresSolution sol = solve_linear(columns, vectorize(a), rank_tol);
  if (sol.residual > tol::reconstruction * std::max(1.0, a.norm()))
    throw ExpansionResidual("hs_expand: operand not in basis span");
  return sol.coefficients;
}

}  // namespace qchan

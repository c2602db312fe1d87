#pragma once

// Independent oracles shared by the test suites. Everything here sticks to
// raw loops over std::complex so the checked quantities never go through the
// library's own Eigen code paths.

#include <complex>
#include <cstdint>
#include <vector>

#include "qchan/common.hpp"
#include "qchan/states.hpp"

namespace testsupport {

using qchan::Complex;
using qchan::Matrix;

/// Rank by Gaussian elimination with partial pivoting on the Gram matrix of
/// the given vectors.
inline int gram_rank_oracle(const std::vector<std::vector<Complex>>& vecs,
                            double tol = 1e-9) {
  const std::size_t k = vecs.size();
  std::vector<std::vector<Complex>> gram(k, std::vector<Complex>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      Complex sum(0, 0);
      for (std::size_t t = 0; t < vecs[i].size(); ++t)
        sum += std::conj(vecs[i][t]) * vecs[j][t];
      gram[i][j] = sum;
    }

  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) scale = std::max(scale, std::abs(gram[i][j]));
  if (scale == 0.0) return 0;

  int rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < k && row < k; ++col) {
    std::size_t pivot = row;
    for (std::size_t r = row + 1; r < k; ++r)
      if (std::abs(gram[r][col]) > std::abs(gram[pivot][col])) pivot = r;
    if (std::abs(gram[pivot][col]) <= tol * scale) continue;
    std::swap(gram[pivot], gram[row]);
    for (std::size_t r = row + 1; r < k; ++r) {
      const Complex factor = gram[r][col] / gram[row][col];
      for (std::size_t c = col; c < k; ++c) gram[r][c] -= factor * gram[row][c];
    }
    ++row;
    ++rank;
  }
  return rank;
}

inline std::vector<std::vector<Complex>> to_raw_vectors(
    const std::vector<Matrix>& ops) {
  std::vector<std::vector<Complex>> out;
  out.reserve(ops.size());
  for (const Matrix& op : ops) {
    std::vector<Complex> v;
    v.reserve(op.size());
    for (Eigen::Index r = 0; r < op.rows(); ++r)
      for (Eigen::Index c = 0; c < op.cols(); ++c) v.push_back(op(r, c));
    out.push_back(std::move(v));
  }
  return out;
}

/// Positive-semidefiniteness probe: the quadratic form on seeded random
/// vectors never dips below -tol.
inline bool psd_oracle(const Matrix& m, std::uint64_t seed, int trials = 200,
                       double tol = 1e-10) {
  qchan::SampleRng rng(seed);
  const Eigen::Index n = m.rows();
  for (int t = 0; t < trials; ++t) {
    std::vector<Complex> v(n);
    double norm_sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      v[i] = rng.complex_gaussian();
      norm_sq += std::norm(v[i]);
    }
    Complex quad(0, 0);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) quad += std::conj(v[i]) * m(i, j) * v[j];
    if (quad.real() < -tol * norm_sq) return false;
  }
  return true;
}

/// Brute-force residual of the correctability conditions for one (j, k) pair:
/// max entry deviation of P E_j^dag E_k P from alpha_jk P, all raw loops.
inline double kl_residual_oracle(const std::vector<Matrix>& ops, const Matrix& p,
                                 const Matrix& alpha) {
  const Eigen::Index n = p.rows();
  auto matmul = [n](const std::vector<std::vector<Complex>>& a,
                    const std::vector<std::vector<Complex>>& b) {
    std::vector<std::vector<Complex>> c(n, std::vector<Complex>(n, Complex(0, 0)));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index t = 0; t < n; ++t)
        for (Eigen::Index j = 0; j < n; ++j) c[i][j] += a[i][t] * b[t][j];
    return c;
  };
  auto to_raw = [n](const Matrix& m) {
    std::vector<std::vector<Complex>> out(n, std::vector<Complex>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) out[i][j] = m(i, j);
    return out;
  };
  auto dagger = [n](const std::vector<std::vector<Complex>>& m) {
    std::vector<std::vector<Complex>> out(n, std::vector<Complex>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) out[i][j] = std::conj(m[j][i]);
    return out;
  };

  const auto praw = to_raw(p);
  double worst = 0.0;
  for (std::size_t j = 0; j < ops.size(); ++j)
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const auto lhs =
          matmul(matmul(matmul(praw, dagger(to_raw(ops[j]))), to_raw(ops[k])), praw);
      for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
          const Complex want = alpha(static_cast<Eigen::Index>(j),
                                     static_cast<Eigen::Index>(k)) *
                               p(r, c);
          worst = std::max(worst, std::abs(lhs[r][c] - want));
        }
    }
  return worst;
}

}  // namespace testsupport

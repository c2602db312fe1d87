#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "qchan/channels.hpp"
#include "qchan/common.hpp"
#include "qchan/linalg.hpp"
#include "qchan/states.hpp"

namespace qchan {

// ============================================================================
// State-dependent random-unitary decomposition: for a known pure input and a
// known mixed output, the channel action is a convex mixture of unitaries
// carrying the input onto each output eigenstate.
// ============================================================================

/// Deterministic unitary whose first column equals the given unit vector.
/// Built from the Householder reflection that swaps v with (phase of v_1)*e_1,
/// followed by a phase rotation of the first column; v = e_1 maps exactly to
/// the identity.
inline Matrix unitary_with_first_column(const Vector& v) {
  if (std::abs(v.norm() - 1.0) > 1e-10)
    throw InvalidArgument("unitary_with_first_column: input not normalized");
  const Eigen::Index n = v.size();
  Complex beta(1, 0);
  if (std::abs(v(0)) > 1e-14) beta = v(0) / std::abs(v(0));

  Vector u = beta * Vector::Unit(n, 0) - v;
  const double norm_u = u.norm();
  if (norm_u < 1e-14) {
    Matrix out = identity(n);
    out(0, 0) = beta;
    return out;
  }
  u /= norm_u;
  Matrix reflector = identity(n) - 2.0 * (u * u.adjoint());
  reflector.col(0) *= beta;
  return reflector;
}

struct StateRuDecomposition {
  RealVector weights;             // descending eigenvalues of the output state
  std::vector<Matrix> unitaries;  // U_j carrying the input onto eigenstate j
  KrausSet kraus;                 // K_j = sqrt(weight_j) U_j
};

/// Decomposes the (pure input, mixed output) pair into weighted unitaries:
/// eigendecompose the output, then pair the input's completed eigenbasis with
/// each output eigenstate's completed eigenbasis.
inline StateRuDecomposition decompose(const PureState& psi,
                                      const DensityMatrix& rho_out,
                                      double rank_tol = 1e-12) {
  if (psi.dim() != rho_out.dim())
    throw DimensionMismatch("decompose: input and output dimensions differ");
  const HermitianEigen eig = eig_hermitian(rho_out.matrix());
  const Matrix eps_in = unitary_with_first_column(psi.amplitudes());

  StateRuDecomposition out;
  std::vector<double> kept;
  std::vector<Matrix> ops;
  for (Eigen::Index j = 0; j < eig.eigenvalues.size(); ++j) {
    if (eig.eigenvalues(j) <= rank_tol) continue;
    const Matrix eps_out = unitary_with_first_column(eig.eigenvectors.col(j));
    Matrix u = eps_out * eps_in.adjoint();
    ops.push_back(std::sqrt(eig.eigenvalues(j)) * u);
    out.unitaries.push_back(std::move(u));
    kept.push_back(eig.eigenvalues(j));
  }
  if (kept.empty()) throw InvalidArgument("decompose: output has no positive weight");
  out.weights = Eigen::Map<const RealVector>(kept.data(), kept.size());
  out.kraus = make_kraus(std::move(ops), "state_ru");
  return out;
}

/// Density-matrix entry point; rejects mixed inputs rather than silently
/// purifying them.
inline StateRuDecomposition decompose(const DensityMatrix& rho_in,
                                      const DensityMatrix& rho_out,
                                      double rank_tol = 1e-12) {
  const HermitianEigen eig = eig_hermitian(rho_in.matrix());
  if (1.0 - eig.eigenvalues(0) > 1e-8)
    throw NonPureInput("decompose: input state is not pure");
  Vector amplitudes = eig.eigenvectors.col(0);
  amplitudes /= amplitudes.norm();
  return decompose(PureState(std::move(amplitudes)), rho_out, rank_tol);
}

/// Applies the decomposition to the pure input it was built for.
inline DensityMatrix reconstruct_output(const StateRuDecomposition& d,
                                        const PureState& psi) {
  Matrix out = Matrix::Zero(psi.dim(), psi.dim());
  for (const Matrix& k : d.kraus.operators)
    out += (k * psi.amplitudes()) * (k * psi.amplitudes()).adjoint();
  out = (out + out.adjoint()) / 2.0;
  return DensityMatrix(std::move(out));
}

}  // namespace qchan

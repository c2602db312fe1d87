#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qchan/channels.hpp"
#include "qchan/common.hpp"
#include "qchan/linalg.hpp"
#include "qchan/ru_construct.hpp"

namespace qchan {

// ============================================================================
// Correctability-condition checking and the conversion of an arbitrary Kraus
// set into one whose correctability is inherited from a known-correctable
// operator basis.
// ============================================================================

inline void require_projector(const Matrix& p) {
  if (p.rows() != p.cols()) throw NotAProjector("projector not square");
  const double scale = std::max(1.0, p.norm());
  if (hermiticity_defect(p) > tol::projector * scale)
    throw NotAProjector("projector not Hermitian");
  if ((p * p - p).norm() > tol::projector * scale * 10.0)
    throw NotAProjector("projector not idempotent");
  if (p.trace().real() <= 0.5) throw NotAProjector("projector has zero trace");
}

/// Candidate compatibility matrix alpha_(l,m) = tr(P E_l^dag E_m P) / tr(P).
inline Matrix build_alpha(const KrausSet& e, const Matrix& p) {
  require_projector(p);
  if (p.rows() != e.dim_in)
    throw DimensionMismatch("build_alpha: projector does not match operators");
  const int k = static_cast<int>(e.operators.size());
  const double trp = p.trace().real();
  Matrix alpha(k, k);
  for (int l = 0; l < k; ++l)
    for (int m = 0; m < k; ++m)
      alpha(l, m) =
          (p * e.operators[l].adjoint() * e.operators[m] * p).trace() / trp;
  return alpha;
}

struct CorrectabilityReport {
  Matrix alpha;
  double max_residual = 0.0;        // worst ||P E_j^dag E_k P - alpha_jk P||_F / tr(P)
  double hermiticity_defect = 0.0;  // ||alpha - alpha^dag||_F
  bool satisfied = false;
  double tolerance = tol::verdict;
};

/// Measures how well a candidate alpha reproduces every sandwiched product.
/// This is a measurement, never an assertion: the verdict reports what the
/// residuals say for this particular (E, P) pair.
inline CorrectabilityReport check_correctability(const KrausSet& e, const Matrix& p,
                                                 double tolerance = tol::verdict) {
  CorrectabilityReport report;
  report.alpha = build_alpha(e, p);
  report.tolerance = tolerance;
  report.hermiticity_defect = hermiticity_defect(report.alpha);
  const double trp = p.trace().real();
  const int k = static_cast<int>(e.operators.size());
  for (int j = 0; j < k; ++j)
    for (int l = 0; l < k; ++l) {
      const Matrix lhs = p * e.operators[j].adjoint() * e.operators[l] * p;
      const double res = (lhs - report.alpha(j, l) * p).norm() / trp;
      if (res > report.max_residual) report.max_residual = res;
    }
  report.satisfied = report.max_residual <= tolerance &&
                     report.hermiticity_defect <= tolerance;
  return report;
}

/// Correctability transfer to the unitarily related set G_l = sum_k U*_(k,l) E_k:
/// beta_(j,k) = sum_(l,m) U_(l,j) U*_(m,k) alpha_(l,m). The returned report
/// carries beta and the measured residuals on the G set.
inline CorrectabilityReport transfer_correctability(const KrausSet& e,
                                                    const Matrix& alpha,
                                                    const Matrix& u,
                                                    const Matrix& p,
                                                    double tolerance = tol::verdict) {
  if (u.rows() != u.cols()) throw NonUnitaryU("transfer_correctability: U not square");
  if (unitarity_defect(u) > 1e-8)
    throw NonUnitaryU("transfer_correctability: U not unitary");
  const int k = static_cast<int>(e.operators.size());
  if (u.rows() != k || alpha.rows() != k || alpha.cols() != k)
    throw DimensionMismatch("transfer_correctability: size mismatch");

  Matrix beta = u.transpose() * alpha * u.conjugate();

  std::vector<Matrix> g_ops(k, Matrix::Zero(e.dim_out, e.dim_in));
  for (int l = 0; l < k; ++l)
    for (int m = 0; m < k; ++m) g_ops[l] += std::conj(u(m, l)) * e.operators[m];
  const KrausSet g = make_kraus(std::move(g_ops), e.label + "_related",
                                e.non_trace_preserving);

  CorrectabilityReport report;
  report.alpha = std::move(beta);
  report.tolerance = tolerance;
  report.hermiticity_defect = hermiticity_defect(report.alpha);
  const double trp = p.trace().real();
  for (int j = 0; j < k; ++j)
    for (int l = 0; l < k; ++l) {
      const Matrix lhs = p * g.operators[j].adjoint() * g.operators[l] * p;
      const double res = (lhs - report.alpha(j, l) * p).norm() / trp;
      if (res > report.max_residual) report.max_residual = res;
    }
  report.satisfied = report.max_residual <= tolerance &&
                     report.hermiticity_defect <= tolerance;
  return report;
}

// ----------------------------------------------------------------------------
// Conversion pipeline
// ----------------------------------------------------------------------------

/// H_(k,l) = sum_j m_(j,k) m*_(j,l); Hermitian PSD for any coefficient matrix.
inline Matrix build_h(const Matrix& m) {
  return m.transpose() * m.conjugate();
}

struct ConversionResult {
  Matrix coefficients;   // rows expand the input operators over the basis
  Matrix h;              // Hermitian PSD matrix built from the coefficients
  RealVector lambdas;    // eigenvalues of h, descending, negatives clamped to 0
  Matrix h_eigenvectors; // full eigenvector matrix of h
  int kept = 0;          // eigenvalues above the rank cutoff
  KrausSet g;            // the kept combined operators, generally not complete
  KrausSet f_tilde;      // sqrt(lambda) scaled set; decomposes the input channel
};

namespace detail {

inline ConversionResult convert_from_coefficients(const KrausSet& f,
                                                  const KrausSet& basis,
                                                  Matrix m, double rank_tol) {
  // The coefficient rows must actually expand the input operators.
  for (std::size_t j = 0; j < f.operators.size(); ++j) {
    Matrix rebuilt = Matrix::Zero(f.dim_out, f.dim_in);
    for (std::size_t k = 0; k < basis.operators.size(); ++k)
      rebuilt += m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) *
                 basis.operators[k];
    const double scale = std::max(1.0, f.operators[j].norm());
    if ((rebuilt - f.operators[j]).norm() > tol::reconstruction * scale * 10.0)
      throw ExpansionResidual("convert: coefficients do not reproduce operators");
  }

  ConversionResult out;
  out.h = build_h(m);
  out.coefficients = std::move(m);
  const HermitianEigen eig = eig_hermitian(out.h);
  out.lambdas = eig.eigenvalues.cwiseMax(0.0);
  out.h_eigenvectors = eig.eigenvectors;

  const double cutoff = rank_tol * std::max(out.lambdas.maxCoeff(), 1e-300);
  std::vector<Matrix> g_ops;
  std::vector<Matrix> ft_ops;
  for (Eigen::Index r = 0; r < out.lambdas.size(); ++r) {
    if (out.lambdas(r) <= cutoff) continue;
    Matrix g = Matrix::Zero(f.dim_out, f.dim_in);
    for (std::size_t k = 0; k < basis.operators.size(); ++k)
      g += out.h_eigenvectors(static_cast<Eigen::Index>(k), r) * basis.operators[k];
    ft_ops.push_back(std::sqrt(out.lambdas(r)) * g);
    g_ops.push_back(std::move(g));
  }
  out.kept = static_cast<int>(g_ops.size());
  if (out.kept == 0) throw ExpansionResidual("convert: H has no positive weight");
  out.g = make_kraus(std::move(g_ops), f.label + "_combined",
                     /*non_trace_preserving=*/true);
  out.f_tilde = make_kraus(std::move(ft_ops), f.label + "_converted");
  return out;
}

}  // namespace detail

/// Converts a complete Kraus set into one made of scaled combinations of the
/// given full-rank operator basis. The combined set decomposes the same
/// channel and inherits the basis set's correctability on any code where the
/// basis satisfies the correctability conditions.
inline ConversionResult convert(const KrausSet& f, const KrausSet& basis,
                                double rank_tol = tol::rank_rel) {
  const int j = static_cast<int>(f.operators.size());
  const int k = static_cast<int>(basis.operators.size());
  Matrix m(j, k);
  for (int row = 0; row < j; ++row)
    m.row(row) = hs_expand(f.operators[row], basis, rank_tol).transpose();
  return detail::convert_from_coefficients(f, basis, std::move(m), rank_tol);
}

/// Conversion with caller-supplied expansion coefficients, for overcomplete
/// or hand-picked bases where the expansion is not unique.
inline ConversionResult convert_with_coefficients(const KrausSet& f,
                                                  const KrausSet& basis,
                                                  const Matrix& m,
                                                  double rank_tol = tol::rank_rel) {
  if (m.rows() != static_cast<Eigen::Index>(f.operators.size()) ||
      m.cols() != static_cast<Eigen::Index>(basis.operators.size()))
    throw DimensionMismatch("convert_with_coefficients: coefficient shape mismatch");
  return detail::convert_from_coefficients(f, basis, m, rank_tol);
}

/// gamma_(j,k) = sqrt(lambda_j lambda_k) (eps_H^dag alpha eps_H)_(j,k), the
/// compatibility matrix the converted set satisfies whenever the basis set
/// satisfies alpha on the same projector.
inline Matrix gamma_matrix(const RealVector& lambda, const Matrix& eps_h,
                           const Matrix& alpha) {
  if (hermiticity_defect(alpha) > 1e-8 * std::max(1.0, alpha.norm()))
    throw NonHermitianInput("gamma_matrix: alpha not Hermitian");
  if (eps_h.rows() != alpha.rows() || eps_h.cols() != lambda.size())
    throw DimensionMismatch("gamma_matrix: size mismatch");
  RealVector sqrt_lambda(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -tol::rank_rel)
      throw InvalidArgument("gamma_matrix: negative weight beyond tolerance");
    sqrt_lambda(i) = std::sqrt(std::max(lambda(i), 0.0));
  }
  Matrix core = eps_h.adjoint() * alpha * eps_h;
  Matrix gamma = sqrt_lambda.asDiagonal() * core * sqrt_lambda.asDiagonal();
  return (gamma + gamma.adjoint()) / 2.0;
}

// ----------------------------------------------------------------------------
// Ornstein-Uhlenbeck phase-noise fixture
// ----------------------------------------------------------------------------

/// Four diagonal Kraus operators with q = sqrt(1 - p^2); a two-qubit phase
/// damping channel that scales rho_(j,k) by p or p^2 off the diagonal.
inline KrausSet ou_channel(double p) {
  if (p < 0.0 || p > 1.0) throw InvalidArgument("ou_channel: p outside [0,1]");
  const double q = std::sqrt(1.0 - p * p);
  auto diag4 = [](double a, double b, double c, double d) {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    m(3, 3) = d;
    return m;
  };
  std::vector<Matrix> ops;
  ops.push_back(diag4(p * p, p, p, 1.0));
  ops.push_back(diag4(p * q, 0.0, q, 0.0));
  ops.push_back(diag4(q * p, q, 0.0, 0.0));
  ops.push_back(diag4(q * q, 0.0, 0.0, 0.0));
  return make_kraus(std::move(ops), "ou_phase_noise");
}

/// The five diagonal RU operators (1/sqrt(32)) {I, N_1, N_2, N_3, N_4} used
/// to expand the phase-noise fixture. Overcomplete on the diagonal subspace:
/// the last four sum to twice the first.
inline KrausSet ou_basis_prefix() {
  const double scale = ru_normalization(4);
  std::vector<Matrix> ops;
  ops.push_back(scale * identity(4));
  for (int k = 1; k <= 4; ++k) ops.push_back(scale * sign_flip(k, 4));
  return make_kraus(std::move(ops), "ou_basis_prefix",
                    /*non_trace_preserving=*/true);
}

/// Closed-form expansion coefficients of ou_channel(p) over ou_basis_prefix(),
/// with a = sqrt(32).
inline Matrix ou_coefficient_matrix(double p) {
  if (p < 0.0 || p > 1.0)
    throw InvalidArgument("ou_coefficient_matrix: p outside [0,1]");
  const double q = std::sqrt(1.0 - p * p);
  const double half_a = std::sqrt(32.0) / 2.0;
  Matrix m(4, 5);
  m.row(0) << (p + 1) * (p + 1), -p * p, -p, -p, -1.0;
  m.row(1) << (p + 1) * q, -p * q, 0.0, -q, 0.0;
  m.row(2) << (p + 1) * q, -p * q, -q, 0.0, 0.0;
  m.row(3) << q * q, -q * q, 0.0, 0.0, 0.0;
  return half_a * m;
}

/// Closed form of build_h(ou_coefficient_matrix(p)) with s = 1 + p.
inline Matrix ou_h_closed_form(double p) {
  if (p < 0.0 || p > 1.0)
    throw InvalidArgument("ou_h_closed_form: p outside [0,1]");
  const double s = 1.0 + p;
  const double s2 = s * s;
  const double p2 = p * p;
  Matrix h(5, 5);
  h.row(0) << 4 * s2, -s2, -s2, -s2, -s2;
  h.row(1) << -s2, 1.0, p, p, p2;
  h.row(2) << -s2, p, 1.0, p2, p;
  h.row(3) << -s2, p, p2, 1.0, p;
  h.row(4) << -s2, p2, p, p, 1.0;
  return 8.0 * h;
}

}  // namespace qchan

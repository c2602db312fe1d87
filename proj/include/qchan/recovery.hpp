#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qchan/channels.hpp"
#include "qchan/common.hpp"
#include "qchan/correctability.hpp"
#include "qchan/linalg.hpp"
#include "qchan/states.hpp"

namespace qchan {

// ============================================================================
// Recovery channels: syndrome projectors and correction unitaries built from
// a correctable Kraus set and a code projector, plus the universal-recovery
// condition checkers.
// ============================================================================

struct CodeSpec {
  int n_sys = 0;       // system dimension
  int n_anc = 0;       // ancilla dimension
  Matrix projector;    // code-space projector P on the joint space
  Matrix encoder;      // unitary U_C on the joint space
  std::string description;

  int joint_dim() const { return n_sys * n_anc; }

  void validate() const {
    if (n_sys < 2 || n_anc < 1) throw InvalidArgument("CodeSpec: bad dimensions");
    if (projector.rows() != joint_dim() || encoder.rows() != joint_dim())
      throw DimensionMismatch("CodeSpec: matrices do not match joint dimension");
    require_projector(projector);
    if (projector.trace().real() < n_sys - 1e-9)
      throw InvalidArgument("CodeSpec: projector rank below system dimension");
    if (unitarity_defect(encoder) > 1e-10 * joint_dim())
      throw NonUnitaryU("CodeSpec: encoder not unitary");
  }
};

inline Matrix pauli_x() {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = Complex(1, 0);
  x(1, 0) = Complex(1, 0);
  return x;
}

inline Matrix pauli_z() {
  Matrix z = identity(2);
  z(1, 1) = Complex(-1, 0);
  return z;
}

/// X acting on qubit `target` (1-based) of a `qubits`-qubit register.
inline Matrix single_qubit_op(const Matrix& op, int target, int qubits) {
  Matrix out = Matrix::Ones(1, 1);
  for (int q = 1; q <= qubits; ++q) out = kron(out, q == target ? op : identity(2));
  return out;
}

/// Three-qubit repetition code: one system qubit, two ancilla qubits, encoder
/// |b>|00> -> |bbb> extended to the full space by controlled flips, projector
/// onto span{|000>, |111>}.
inline CodeSpec bitflip_code() {
  CodeSpec code;
  code.n_sys = 2;
  code.n_anc = 4;
  code.description = "three-qubit bit-flip repetition code";

  Matrix u = Matrix::Zero(8, 8);
  for (int b1 = 0; b1 < 2; ++b1)
    for (int b2 = 0; b2 < 2; ++b2)
      for (int b3 = 0; b3 < 2; ++b3) {
        const int in = (b1 << 2) | (b2 << 1) | b3;
        const int out = (b1 << 2) | ((b2 ^ b1) << 1) | (b3 ^ b1);
        u(out, in) = Complex(1, 0);
      }
  code.encoder = std::move(u);

  Matrix p = Matrix::Zero(8, 8);
  p(0, 0) = Complex(1, 0);
  p(7, 7) = Complex(1, 0);
  code.projector = std::move(p);

  code.validate();
  return code;
}

/// The correctable error set the bit-flip fixture is built around:
/// {I, X_1, X_2, X_3} / 2, a complete Kraus set on the joint space.
inline KrausSet bitflip_error_basis() {
  std::vector<Matrix> ops;
  ops.push_back(0.5 * identity(8));
  for (int q = 1; q <= 3; ++q)
    ops.push_back(0.5 * single_qubit_op(pauli_x(), q, 3));
  return make_kraus(std::move(ops), "bitflip_error_basis");
}

// ----------------------------------------------------------------------------
// Plan construction
// ----------------------------------------------------------------------------

struct BarSet {
  KrausSet operators;  // combinations that diagonalize the compatibility matrix
  RealVector weights;  // eigenvalues of gamma, descending
};

/// Recombines a Kraus set by the eigenvectors of its compatibility matrix so
/// that P F_a^dag F_b P = delta_(a,b) d_b P.
inline BarSet bar_set(const KrausSet& f_tilde, const Matrix& gamma) {
  const int k = static_cast<int>(f_tilde.operators.size());
  if (gamma.rows() != k || gamma.cols() != k)
    throw DimensionMismatch("bar_set: gamma does not match operator count");
  if (hermiticity_defect(gamma) > 1e-8 * std::max(1.0, gamma.norm()))
    throw NonHermitianGamma("bar_set: gamma not Hermitian");
  const HermitianEigen eig = eig_hermitian((gamma + gamma.adjoint()) / 2.0);

  std::vector<Matrix> ops(k, Matrix::Zero(f_tilde.dim_out, f_tilde.dim_in));
  for (int a = 0; a < k; ++a)
    for (int j = 0; j < k; ++j) ops[a] += eig.eigenvectors(j, a) * f_tilde.operators[j];
  BarSet out;
  out.operators = make_kraus(std::move(ops), f_tilde.label + "_bar",
                             f_tilde.non_trace_preserving);
  out.weights = eig.eigenvalues;
  return out;
}

struct RecoveryPlan {
  std::vector<Matrix> projectors;  // syndrome projectors, completion last if present
  std::vector<Matrix> unitaries;   // correction unitaries, aligned with projectors
  RealVector weights;              // the weights d_k of the kept branches
  int rank_used = 0;               // branches above the rank cutoff
  bool has_completion = false;
};

/// Builds syndrome projectors P_k = Fbar_k P U_k^dag / sqrt(d_k) with U_k the
/// polar unitary of Fbar_k P, appending the completion projector I - sum P_k
/// with identity correction when the kept branches do not resolve the whole
/// space. Throws ProjectorDefect when the produced operators fail projector
/// or orthogonality checks, which signals the input set was not actually
/// correctable on this code.
inline RecoveryPlan build_recovery(const KrausSet& f_bar, const CodeSpec& code,
                                   const RealVector& d,
                                   double rank_tol = tol::rank_rel) {
  code.validate();
  if (f_bar.dim_in != code.joint_dim())
    throw DimensionMismatch("build_recovery: operators do not match code space");
  if (d.size() != static_cast<Eigen::Index>(f_bar.operators.size()))
    throw DimensionMismatch("build_recovery: weight count mismatch");

  const int dim = code.joint_dim();
  const double cutoff = rank_tol * std::max(d.size() ? d.maxCoeff() : 0.0, 0.0);

  RecoveryPlan plan;
  std::vector<double> kept;
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (d(k) <= cutoff || d(k) <= 0.0) continue;
    const Matrix fp = f_bar.operators[k] * code.projector;
    const Matrix u = polar_right(fp).first;
    Matrix proj = fp * u.adjoint() / std::sqrt(d(k));
    proj = (proj + proj.adjoint()) / 2.0;
    if ((proj * proj - proj).norm() > 1e-8)
      throw ProjectorDefect("build_recovery: branch is not a projector");
    plan.projectors.push_back(std::move(proj));
    plan.unitaries.push_back(u);
    kept.push_back(d(k));
  }
  plan.rank_used = static_cast<int>(kept.size());
  plan.weights = Eigen::Map<const RealVector>(kept.data(), kept.size());

  Matrix sum = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < plan.projectors.size(); ++k) {
    for (std::size_t l = 0; l < k; ++l)
      if ((plan.projectors[k] * plan.projectors[l]).norm() > 1e-8)
        throw ProjectorDefect("build_recovery: branches are not orthogonal");
    sum += plan.projectors[k];
  }
  if ((sum - identity(dim)).norm() > 1e-9) {
    Matrix completion = identity(dim) - sum;
    completion = (completion + completion.adjoint()) / 2.0;
    if ((completion * completion - completion).norm() > 1e-8)
      throw ProjectorDefect("build_recovery: completion is not a projector");
    plan.projectors.push_back(std::move(completion));
    plan.unitaries.push_back(identity(dim));
    plan.has_completion = true;
  }
  return plan;
}

/// sum_k U_k^dag P_k^dag sigma P_k U_k, renormalized by its trace.
inline DensityMatrix apply_recovery(const RecoveryPlan& plan,
                                    const DensityMatrix& sigma) {
  if (plan.projectors.empty()) throw InvalidArgument("apply_recovery: empty plan");
  const int dim = sigma.dim();
  if (plan.projectors.front().rows() != dim)
    throw DimensionMismatch("apply_recovery: dimension mismatch");
  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < plan.projectors.size(); ++k) {
    const Matrix branch = plan.projectors[k].adjoint() * sigma.matrix() *
                          plan.projectors[k];
    out += plan.unitaries[k].adjoint() * branch * plan.unitaries[k];
  }
  const double trace = out.trace().real();
  if (trace < 1e-12)
    throw ZeroTrace("apply_recovery: state annihilated by every projector");
  out /= trace;
  out = (out + out.adjoint()) / 2.0;
  return DensityMatrix(std::move(out));
}

// ----------------------------------------------------------------------------
// End-to-end pipeline
// ----------------------------------------------------------------------------

inline DensityMatrix encode(const DensityMatrix& rho, const CodeSpec& code) {
  if (rho.dim() != code.n_sys)
    throw DimensionMismatch("encode: state does not match system dimension");
  Matrix anc = Matrix::Zero(code.n_anc, code.n_anc);
  anc(0, 0) = Complex(1, 0);
  Matrix joint = kron(rho.matrix(), anc);
  Matrix out = code.encoder * joint * code.encoder.adjoint();
  return DensityMatrix(std::move(out));
}

inline DensityMatrix decode_and_trace(const DensityMatrix& sigma,
                                      const CodeSpec& code) {
  Matrix decoded = code.encoder.adjoint() * sigma.matrix() * code.encoder;
  return partial_trace_ancilla(DensityMatrix(std::move(decoded)), code.n_sys,
                               code.n_anc);
}

/// Recovery plan for everything expandable over a correctable base set: the
/// base's own compatibility matrix plays the diagonalized-weight role.
inline RecoveryPlan recovery_plan_for_base(const KrausSet& base,
                                           const CodeSpec& code) {
  const Matrix alpha = build_alpha(base, code.projector);
  const BarSet bar = bar_set(base, alpha);
  return build_recovery(bar.operators, code, bar.weights);
}

/// Per-noise plan through the conversion pipeline: expand the noise over the
/// base, recombine by the eigenvectors of the coefficient Gram matrix, and
/// diagonalize the transferred compatibility matrix.
inline RecoveryPlan recovery_plan_for_noise(const KrausSet& noise,
                                            const KrausSet& base,
                                            const CodeSpec& code,
                                            ConversionResult* conversion_out = nullptr,
                                            BarSet* bar_out = nullptr) {
  const ConversionResult conv = convert(noise, base);
  const Matrix alpha = build_alpha(base, code.projector);
  const Matrix gamma =
      gamma_matrix(conv.lambdas.head(conv.kept),
                   conv.h_eigenvectors.leftCols(conv.kept), alpha);
  const BarSet bar = bar_set(conv.f_tilde, gamma);
  RecoveryPlan plan = build_recovery(bar.operators, code, bar.weights);
  if (conversion_out) *conversion_out = conv;
  if (bar_out) *bar_out = bar;
  return plan;
}

/// Encode, corrupt, recover, decode, trace out the ancilla. The plan is the
/// base-set plan, so noise supported on the base's span comes back intact and
/// anything outside that span is simply measured as a failed recovery.
inline DensityMatrix recover_end_to_end(const DensityMatrix& rho,
                                        const CodeSpec& code,
                                        const KrausSet& noise,
                                        const KrausSet& base) {
  const RecoveryPlan plan = recovery_plan_for_base(base, code);
  const DensityMatrix encoded = encode(rho, code);
  const DensityMatrix corrupted = apply(noise, encoded);
  const DensityMatrix recovered = apply_recovery(plan, corrupted);
  return decode_and_trace(recovered, code);
}

// ----------------------------------------------------------------------------
// Universal-recovery condition checkers
// ----------------------------------------------------------------------------

struct UniversalConditionsReport {
  bool hs_complete = false;
  int gram_rank = 0;
  int required_rank = 0;
  bool correctable = false;
  double correctability_residual = 0.0;
  double alpha_hermiticity_defect = 0.0;
  double eps_alpha_unitarity_defect = 0.0;
  bool code_stabilized = false;
  double stabilization_residual = 0.0;
  bool ancilla_size_sufficient = false;  // n_anc >= n_sys^2 sizing guideline
  double completeness_defect = 0.0;
};

/// Measures the three requirements a universal error-correction operation
/// places on a candidate operator set and code: Hilbert-Schmidt completeness,
/// correctability on the code projector, and stabilization of every encoded
/// input. Pure measurement; nothing is asserted.
inline UniversalConditionsReport check_universal_conditions(const KrausSet& q,
                                                            const CodeSpec& code) {
  code.validate();
  if (q.dim_in != code.joint_dim() || q.dim_out != code.joint_dim())
    throw DimensionMismatch("check_universal_conditions: dimension mismatch");

  UniversalConditionsReport report;
  report.completeness_defect = q.completeness_defect();
  report.ancilla_size_sufficient = code.n_anc >= code.n_sys * code.n_sys;

  // 1. span of the operator set
  const int d = q.dim_in;
  Matrix stacked(static_cast<Eigen::Index>(d) * d,
                 static_cast<Eigen::Index>(q.operators.size()));
  for (std::size_t k = 0; k < q.operators.size(); ++k)
    stacked.col(static_cast<Eigen::Index>(k)) = vectorize(q.operators[k]);
  report.required_rank = d * d;
  report.gram_rank = rank(stacked.adjoint() * stacked);
  report.hs_complete = report.gram_rank == report.required_rank;

  // 2. correctability on the code projector, with the eigenvector-unitarity
  //    probe on the candidate compatibility matrix
  const CorrectabilityReport corr = check_correctability(q, code.projector);
  report.correctable = corr.satisfied;
  report.correctability_residual = corr.max_residual;
  report.alpha_hermiticity_defect = corr.hermiticity_defect;
  Eigen::ComplexEigenSolver<Matrix> general(corr.alpha);
  report.eps_alpha_unitarity_defect =
      general.info() == Eigen::Success
          ? unitarity_defect(general.eigenvectors())
          : std::numeric_limits<double>::infinity();

  // 3. every encoded basis input must live inside the code space
  double worst = 0.0;
  for (int i = 0; i < code.n_sys; ++i) {
    Vector joint = Vector::Zero(code.joint_dim());
    joint(static_cast<Eigen::Index>(i) * code.n_anc) = Complex(1, 0);  // |i> (x) |0>
    const Vector encoded = code.encoder * joint;
    worst = std::max(worst,
                     ((identity(code.joint_dim()) - code.projector) * encoded).norm());
  }
  report.stabilization_residual = worst;
  report.code_stabilized = worst <= 1e-9;
  return report;
}

}  // namespace qchan

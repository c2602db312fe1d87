#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qchan/channels.hpp"
#include "qchan/correctability.hpp"
#include "qchan/ru_construct.hpp"
#include "test_support.hpp"

using namespace qchan;

namespace {

/// The textbook single-qubit depolarizing decomposition
/// { sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z }.
KrausSet qubit_depolarizing(double p) {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  Matrix y = Matrix::Zero(2, 2);
  y(0, 1) = Complex(0, -1);
  y(1, 0) = Complex(0, 1);
  Matrix z = identity(2);
  z(1, 1) = -1.0;
  std::vector<Matrix> ops;
  ops.push_back(std::sqrt(1.0 - 0.75 * p) * identity(2));
  ops.push_back(std::sqrt(0.25 * p) * x);
  ops.push_back(std::sqrt(0.25 * p) * y);
  ops.push_back(std::sqrt(0.25 * p) * z);
  return make_kraus(std::move(ops), "qubit_depolarizing");
}

KrausSet random_unitary_stack(int n, int ops, std::uint64_t seed) {
  SampleRng rng(seed);
  std::vector<Matrix> k;
  double remaining = 1.0;
  for (int i = 0; i < ops; ++i) {
    const double w = (i + 1 == ops) ? remaining : remaining * rng.uniform01();
    remaining -= (i + 1 == ops) ? 0.0 : w;
    const Matrix g = rng.ginibre(n, n);
    const Matrix u = polar_right(g).first;
    k.push_back(std::sqrt(w) * u);
  }
  return make_kraus(std::move(k), "random_unitary_stack");
}

}  // namespace

TEST_CASE("apply identity and depolarizing anchors") {
  const DensityMatrix rho2 = random_density(2, 8);
  const KrausSet id = make_kraus({identity(2)}, "identity");
  REQUIRE((apply(id, rho2).matrix() - rho2.matrix()).norm() < 1e-14);

  const DensityMatrix out = apply(qubit_depolarizing(1.0), rho2);
  REQUIRE((out.matrix() - identity(2) / 2.0).norm() < 1e-12);
}

TEST_CASE("apply reproduces the phase-noise damping pattern") {
  const double p = 0.5;
  const DensityMatrix rho = random_density(4, 91);
  const DensityMatrix out = apply(ou_channel(p), rho);
  Matrix want = rho.matrix();
  const double damp[4][4] = {{1, p, p, p * p},
                             {p, 1, p * p, p},
                             {p, p * p, 1, p},
                             {p * p, p, p, 1}};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) want(r, c) *= damp[r][c];
  REQUIRE((out.matrix() - want).norm() < 1e-12);
}

TEST_CASE("check_completeness anchors") {
  REQUIRE(check_completeness(qubit_depolarizing(0.37)) < 1e-12);
  REQUIRE(check_completeness(ru_kraus_set(4)) < 1e-12);

  const KrausSet halved = make_kraus({0.5 * identity(2)}, "half", true);
  REQUIRE(check_completeness(halved) == Catch::Approx((0.25 * identity(2) -
                                                       identity(2))
                                                          .norm()));
  const DensityMatrix rho = random_density(2, 3);
  REQUIRE_THROWS_AS(apply(halved, rho), IncompleteKrausSet);
}

TEST_CASE("depolarize_reference anchors") {
  const DensityMatrix rho = random_density(4, 12);
  REQUIRE((depolarize_reference(rho, 0.0).matrix() - rho.matrix()).norm() < 1e-14);
  REQUIRE((depolarize_reference(rho, 1.0).matrix() - identity(4) / 4.0).norm() <
          1e-14);

  Matrix e0 = Matrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  const DensityMatrix half = depolarize_reference(DensityMatrix(e0), 0.5);
  REQUIRE(half.matrix()(0, 0).real() == Catch::Approx(0.75));
  REQUIRE(half.matrix()(1, 1).real() == Catch::Approx(0.25));

  REQUIRE_THROWS_AS(depolarize_reference(rho, 1.5), InvalidArgument);
}

TEST_CASE("apply preserves trace, hermiticity and positivity") {
  for (std::uint64_t s = 0; s < 25; ++s) {
    const KrausSet k = random_unitary_stack(3, 2 + static_cast<int>(s % 4),
                                            derive_seed(5150, s));
    REQUIRE(k.completeness_defect() < 1e-10);
    const DensityMatrix rho = random_density(3, derive_seed(5151, s));
    const DensityMatrix out = apply(k, rho);
    REQUIRE(std::abs(out.matrix().trace().real() - 1.0) < 1e-10);
    REQUIRE(hermiticity_defect(out.matrix()) < 1e-10);
    REQUIRE(testsupport::psd_oracle(out.matrix(), derive_seed(5152, s), 100, 1e-9));
  }
}

TEST_CASE("unitary_relate identity, permutation, and padding") {
  const KrausSet e = qubit_depolarizing(0.3);
  const auto self = unitary_relate(e, e);
  REQUIRE(self.has_value());
  REQUIRE((*self - identity(4)).norm() < 1e-8);

  KrausSet swapped = e;
  std::swap(swapped.operators[0], swapped.operators[3]);
  std::swap(swapped.operators[1], swapped.operators[2]);
  const auto perm = unitary_relate(e, swapped);
  REQUIRE(perm.has_value());
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const double want = (r + c == 3) ? 1.0 : 0.0;
      REQUIRE(std::abs((*perm)(r, c) - want) < 1e-8);
    }

  KrausSet padded = e;
  padded.operators.push_back(Matrix::Zero(2, 2));
  const auto pad = unitary_relate(padded, e);
  REQUIRE(pad.has_value());
  REQUIRE(unitarity_defect(*pad) < 1e-8);
}

TEST_CASE("unitary_relate connects a channel to its converted set") {
  const double p = 0.3;
  const KrausSet f = ou_channel(p);
  const ConversionResult conv =
      convert_with_coefficients(f, ou_basis_prefix(), ou_coefficient_matrix(p));
  const auto u = unitary_relate(f, conv.f_tilde);
  REQUIRE(u.has_value());
  REQUIRE(unitarity_defect(*u) < 1e-8);

  const int n_ops = static_cast<int>(
      std::max(f.operators.size(), conv.f_tilde.operators.size()));
  for (int k = 0; k < static_cast<int>(f.operators.size()); ++k) {
    Matrix rebuilt = Matrix::Zero(4, 4);
    for (int l = 0; l < n_ops; ++l) {
      const Matrix gl = l < static_cast<int>(conv.f_tilde.operators.size())
                            ? conv.f_tilde.operators[l]
                            : Matrix::Zero(4, 4);
      rebuilt += (*u)(k, l) * gl;
    }
    REQUIRE((rebuilt - f.operators[k]).norm() < 1e-8);
  }
}

TEST_CASE("unitary_relate rejects different channels") {
  REQUIRE(!unitary_relate(qubit_depolarizing(0.3), qubit_depolarizing(0.6))
               .has_value());
}

TEST_CASE("channels_equal separates equal from unequal") {
  const KrausSet a = qubit_depolarizing(0.4);
  const ChannelEqualityReport same = channels_equal(a, a, 50, 7);
  REQUIRE(same.max_bloch_distance_sq == 0.0);

  const ChannelEqualityReport diff =
      channels_equal(a, qubit_depolarizing(0.8), 50, 7);
  REQUIRE(diff.max_bloch_distance_sq > 1e-3);
}

TEST_CASE("process matrices decide channel equality exactly") {
  const double p = 0.45;
  const KrausSet f = ou_channel(p);
  const ConversionResult conv =
      convert_with_coefficients(f, ou_basis_prefix(), ou_coefficient_matrix(p));
  REQUIRE((process_matrix(f) - process_matrix(conv.f_tilde)).norm() < 1e-10);
  REQUIRE((process_matrix(f) - process_matrix(ou_channel(0.2))).norm() > 1e-2);
}

TEST_CASE("unitarily related sets decompose the same channel") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const KrausSet e = random_unitary_stack(3, 3, derive_seed(606, s));
    // Mix by a random unitary to get another decomposition of the channel.
    SampleRng rng(derive_seed(607, s));
    const Matrix u = polar_right(rng.ginibre(3, 3)).first;
    std::vector<Matrix> mixed(3, Matrix::Zero(3, 3));
    for (int l = 0; l < 3; ++l)
      for (int m = 0; m < 3; ++m)
        mixed[l] += std::conj(u(m, l)) * e.operators[m];
    const KrausSet g = make_kraus(std::move(mixed), "mixed");

    const auto relation = unitary_relate(e, g);
    REQUIRE(relation.has_value());
    REQUIRE(channels_equal(e, g, 25, derive_seed(608, s)).max_bloch_distance_sq <
            1e-9);
  }
}

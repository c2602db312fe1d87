#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>

#include "qchan/states.hpp"
#include "test_support.hpp"

using namespace qchan;

TEST_CASE("bloch_purity anchor values") {
  REQUIRE(bloch_purity(DensityMatrix(0.25 * identity(4))) ==
          Catch::Approx(0.0).margin(1e-14));

  const PureState psi = random_pure(4, 11);
  REQUIRE(bloch_purity(DensityMatrix(psi.projector())) == Catch::Approx(1.0));

  Matrix half = Matrix::Zero(4, 4);
  half(0, 0) = 0.5;
  half(1, 1) = 0.5;
  REQUIRE(bloch_purity(DensityMatrix(half)) == Catch::Approx(1.0 / 3.0));

  REQUIRE_THROWS_AS(
      [] {
        Matrix one = Matrix::Ones(1, 1);
        return bloch_purity(DensityMatrix(one));
      }(),
      InvalidArgument);
}

TEST_CASE("bloch_distance_sq anchor values") {
  const DensityMatrix rho = random_density(4, 3);
  REQUIRE(bloch_distance_sq(rho, rho) == Catch::Approx(0.0).margin(1e-14));

  Matrix e0 = Matrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  Matrix e1 = Matrix::Zero(2, 2);
  e1(1, 1) = 1.0;
  REQUIRE(bloch_distance_sq(DensityMatrix(e0), DensityMatrix(e1)) ==
          Catch::Approx(4.0));

  Matrix odd = Matrix::Zero(2, 2);
  odd(0, 0) = 1.0;
  REQUIRE_THROWS_AS(
      bloch_distance_sq(DensityMatrix(odd), DensityMatrix(0.25 * identity(4))),
      DimensionMismatch);
}

TEST_CASE("bloch distance vanishes exactly when states coincide") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const DensityMatrix a = random_density(3, derive_seed(17, s));
    const DensityMatrix b = random_density(3, derive_seed(18, s));
    const double dist = bloch_distance_sq(a, b);
    const double frob = (a.matrix() - b.matrix()).norm();
    REQUIRE(dist >= -1e-14);
    if (frob < 1e-10) REQUIRE(dist < 1e-10);
    if (dist < 1e-10) REQUIRE(frob < 1e-4);
  }
}

TEST_CASE("random_density sampling invariants") {
  // Constructor re-checks Hermiticity, unit trace and positivity, so a pass
  // here is a pass of the state invariants for every draw.
  for (int n : {2, 3, 4, 6}) {
    for (std::uint64_t i = 0; i < 2500; ++i)
      REQUIRE_NOTHROW(random_density(n, derive_seed(1000 + n, i)));
  }

  const DensityMatrix a = random_density(4, 505);
  const DensityMatrix b = random_density(4, 505);
  REQUIRE(std::memcmp(a.matrix().data(), b.matrix().data(),
                      sizeof(Complex) * a.matrix().size()) == 0);

  double mean_purity = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i)
    mean_purity += bloch_purity(random_density(4, derive_seed(42, i)));
  mean_purity /= 1000.0;
  REQUIRE(mean_purity > 0.0);
  REQUIRE(mean_purity < 1.0);
}

TEST_CASE("random_pure sampling invariants") {
  for (std::uint64_t i = 0; i < 2500; ++i) {
    const PureState psi = random_pure(4, derive_seed(7, i));
    REQUIRE(std::abs(psi.amplitudes().norm() - 1.0) < 1e-12);
  }
  const PureState a = random_pure(5, 99);
  const PureState b = random_pure(5, 99);
  REQUIRE((a.amplitudes() - b.amplitudes()).norm() == 0.0);
  REQUIRE(bloch_purity(DensityMatrix(a.projector())) == Catch::Approx(1.0));
}

TEST_CASE("kron anchor values") {
  REQUIRE((kron(identity(2), identity(2)) - identity(4)).norm() == 0.0);

  Matrix ab = Matrix::Zero(2, 2);
  ab(0, 0) = Complex(0.3, 0);
  ab(1, 1) = Complex(0.7, 0);
  Matrix e0 = Matrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  const Matrix got = kron(ab, e0);
  Matrix want = Matrix::Zero(4, 4);
  want(0, 0) = 0.3;
  want(2, 2) = 0.7;
  REQUIRE((got - want).norm() < 1e-15);
}

TEST_CASE("partial trace undoes tensoring") {
  const DensityMatrix rho = random_density(3, 21);
  const DensityMatrix sigma = random_density(4, 22);
  const DensityMatrix joint =
      DensityMatrix(kron(rho.matrix(), sigma.matrix()));
  const DensityMatrix reduced = partial_trace_ancilla(joint, 3, 4);
  REQUIRE((reduced.matrix() - rho.matrix()).norm() < 1e-12);

  const DensityMatrix mixed = DensityMatrix(identity(8) / 8.0);
  REQUIRE((partial_trace_ancilla(mixed, 2, 4).matrix() - identity(2) / 2.0).norm() <
          1e-14);

  REQUIRE_THROWS_AS(partial_trace_ancilla(rho, 2, 4), DimensionMismatch);

  // For non-state factors the raw reduction scales by the trace of the
  // second factor.
  SampleRng rng(4);
  const Matrix g = rng.ginibre(3, 3);
  const Matrix traced = partial_trace_second(kron(rho.matrix(), g), 3, 3);
  REQUIRE((traced - rho.matrix() * g.trace()).norm() < 1e-12);
}

TEST_CASE("purify round trips") {
  const PureState psi = random_pure(3, 33);
  const DensityMatrix pure_rho = DensityMatrix(psi.projector());
  const PureState purified = purify(pure_rho);
  REQUIRE(purified.dim() == 3);
  REQUIRE((partial_trace_ancilla(DensityMatrix(purified.projector()), 3, 1).matrix() -
           pure_rho.matrix())
              .norm() < 1e-10);

  const DensityMatrix maximally = DensityMatrix(identity(2) / 2.0);
  const PureState bell = purify(maximally);
  REQUIRE(bell.dim() == 4);
  REQUIRE((partial_trace_ancilla(DensityMatrix(bell.projector()), 2, 2).matrix() -
           maximally.matrix())
              .norm() < 1e-10);

  for (std::uint64_t s = 0; s < 20; ++s) {
    const DensityMatrix rho = random_density(4, derive_seed(77, s));
    const PureState big = purify(rho);
    const int r = big.dim() / 4;
    REQUIRE((partial_trace_ancilla(DensityMatrix(big.projector()), 4, r).matrix() -
             rho.matrix())
                .norm() < 1e-10);
  }
}

TEST_CASE("state invariants are enforced") {
  Matrix not_herm = Matrix::Zero(2, 2);
  not_herm(0, 1) = Complex(1, 0);
  not_herm(0, 0) = 1.0;
  REQUIRE_THROWS_AS(DensityMatrix(not_herm), NonHermitianInput);

  REQUIRE_THROWS_AS(DensityMatrix(2.0 * identity(2)), InvalidArgument);

  Matrix indefinite = Matrix::Zero(2, 2);
  indefinite(0, 0) = 1.5;
  indefinite(1, 1) = -0.5;
  REQUIRE_THROWS_AS(DensityMatrix(indefinite), InvalidArgument);

  Vector long_vec = Vector::Ones(3);
  REQUIRE_THROWS_AS(PureState(long_vec), InvalidArgument);
}

#include <doctest.h>

#include <cmath>
#include <limits>

#include "qaixi/linalg.hpp"
#include "qaixi/sampling.hpp"

using namespace qaixi;

namespace {

DensityOperator qubit_zero() { return basis_state(2, 0); }
DensityOperator qubit_one() { return basis_state(2, 1); }

}  // namespace

TEST_CASE("tensor products") {
  DensityOperator half = maximally_mixed(2);
  DensityOperator quarter = tensor(half, half);
  CHECK(quarter.dim() == 4);
  CHECK(quarter.dims() == std::vector<int>{2, 2});
  CHECK(max_abs(quarter.matrix() - ComplexMatrix::Identity(4, 4) / 4.0) < 1e-12);

  DensityOperator p01 = tensor(qubit_zero(), qubit_one());
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(1, 1) = 1.0;  // |01>
  CHECK(max_abs(p01.matrix() - expected) < 1e-12);

  // trace multiplicativity on random pairs
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    DensityOperator a = random_density(3, rng);
    DensityOperator b = random_density(2, rng);
    DensityOperator ab = tensor(a, b);
    CHECK(ab.trace() == doctest::Approx(a.trace() * b.trace()).epsilon(1e-12));
  }
}

TEST_CASE("partial trace") {
  Rng rng(12);
  DensityOperator rho = random_density(2, rng);
  DensityOperator sigma = random_density(3, rng);
  DensityOperator joint = tensor(rho, sigma);

  DensityOperator first = partial_trace(joint, {0});
  CHECK(max_abs(first.matrix() - rho.matrix() * sigma.trace()) < 1e-10);
  CHECK(first.trace() == doctest::Approx(joint.trace()).epsilon(1e-10));

  DensityOperator bell = maximally_entangled(2).to_density({2, 2});
  DensityOperator reduced = partial_trace(bell, {1});
  CHECK(max_abs(reduced.matrix() - ComplexMatrix::Identity(2, 2) / 2.0) < 1e-10);

  DensityOperator keep_all = partial_trace(joint, {0, 1});
  CHECK(max_abs(keep_all.matrix() - joint.matrix()) < 1e-12);

  CHECK_THROWS_AS(partial_trace(joint, {2}), std::invalid_argument);
  CHECK_THROWS_AS(partial_trace(joint, {}), std::invalid_argument);
}

TEST_CASE("trace distance") {
  DensityOperator zero = qubit_zero();
  CHECK(trace_distance(zero, zero) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trace_distance(zero, qubit_one()) == doctest::Approx(1.0).epsilon(1e-12));
  // eigenvalues of |0><0| - I/2 are +-1/2
  CHECK(trace_distance(zero, maximally_mixed(2)) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(trace_distance(zero, maximally_mixed(4)),
                  std::invalid_argument);

  // range, symmetry and triangle inequality on sampled triples
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    DensityOperator a = random_density(4, rng);
    DensityOperator b = random_density(4, rng);
    DensityOperator c = random_density(4, rng);
    double ab = trace_distance(a, b);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 + 1e-12);
    CHECK(ab == doctest::Approx(trace_distance(b, a)).epsilon(1e-12));
    CHECK(ab <= trace_distance(a, c) + trace_distance(c, b) + 1e-8);
  }
}

TEST_CASE("relative entropy") {
  DensityOperator zero = qubit_zero();
  Rng rng(14);
  DensityOperator rho = random_density(3, rng);
  CHECK(relative_entropy(rho, rho) == doctest::Approx(0.0).epsilon(1e-9));

  CHECK(relative_entropy(zero, maximally_mixed(2)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  CHECK(std::isinf(relative_entropy(zero, qubit_one())));
  CHECK_THROWS_AS(relative_entropy(zero, maximally_mixed(4)),
                  std::invalid_argument);

  SUBCASE("Klein inequality for unit-trace pairs") {
    for (int i = 0; i < 100; ++i) {
      DensityOperator a = random_density(3, rng);
      DensityOperator b = random_density(3, rng);
      CHECK(relative_entropy(a, b) >= -1e-8);
    }
  }

  SUBCASE("Pinsker inequality") {
    for (int i = 0; i < 200; ++i) {
      DensityOperator a = random_density(4, rng);
      DensityOperator b = random_density(4, rng);
      double d = relative_entropy(a, b);
      if (!std::isfinite(d)) continue;
      CHECK(trace_distance(a, b) <= std::sqrt(0.5 * d) + 1e-8);
    }
  }
}

TEST_CASE("hermitian eigendecomposition") {
  ComplexMatrix diag = ComplexMatrix::Zero(3, 3);
  diag(0, 0) = 1;
  diag(1, 1) = 2;
  diag(2, 2) = 3;
  EigenSystem sys = eigendecompose_hermitian(diag);
  CHECK(sys.values(0) == doctest::Approx(1.0));
  CHECK(sys.values(1) == doctest::Approx(2.0));
  CHECK(sys.values(2) == doctest::Approx(3.0));

  ComplexMatrix pauli_x(2, 2);
  pauli_x << 0, 1, 1, 0;
  EigenSystem xs = eigendecompose_hermitian(pauli_x);
  CHECK(xs.values(0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(xs.values(1) == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(15);
  for (int i = 0; i < 20; ++i) {
    ComplexMatrix g(4, 4);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        g(r, c) = Complex(rng.next_gaussian(), rng.next_gaussian());
      }
    }
    ComplexMatrix h = 0.5 * (g + ComplexMatrix(g.adjoint()));
    EigenSystem es = eigendecompose_hermitian(h);
    ComplexMatrix rebuilt = es.vectors * es.values.cast<Complex>().asDiagonal() *
                            es.vectors.adjoint();
    CHECK(max_abs(rebuilt - h) < 1e-8);
    for (int k = 1; k < 4; ++k) CHECK(es.values(k) >= es.values(k - 1));
  }

  ComplexMatrix skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK_THROWS_AS(eigendecompose_hermitian(skew), std::invalid_argument);
}

TEST_CASE("state invariants are enforced") {
  ComplexMatrix not_psd(2, 2);
  not_psd << 1.5, 0, 0, -0.5;
  CHECK_THROWS_AS((DensityOperator(not_psd)), std::invalid_argument);

  ComplexMatrix too_big = ComplexMatrix::Identity(2, 2);
  CHECK_THROWS_AS((DensityOperator(too_big)), std::invalid_argument);  // trace 2

  ComplexMatrix not_herm(2, 2);
  not_herm << 0.5, 0.3, 0.0, 0.5;
  CHECK_THROWS_AS((DensityOperator(not_herm)), std::invalid_argument);

  ComplexMatrix semi = 0.25 * ComplexMatrix::Identity(2, 2);
  DensityOperator sub(semi);  // trace 1/2: sub-normalised states are fine
  CHECK(sub.trace() == doctest::Approx(0.5));
  CHECK(sub.normalized().trace() == doctest::Approx(1.0));

  ComplexVector unnormalised(2);
  unnormalised << 1.0, 1.0;
  CHECK_THROWS_AS((PureState(unnormalised)), std::invalid_argument);
}

TEST_CASE("norms") {
  ComplexMatrix pauli_x(2, 2);
  pauli_x << 0, 1, 1, 0;
  CHECK(trace_norm(pauli_x) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(hilbert_schmidt_norm(pauli_x) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

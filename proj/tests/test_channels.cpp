#include <doctest.h>

#include <cmath>

#include "qaixi/channels.hpp"
#include "qaixi/linalg.hpp"
#include "qaixi/sampling.hpp"

using namespace qaixi;

namespace {

ComplexMatrix pauli_x() {
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

// Brute-force sum_j M rho M^dagger with explicit index loops; kept separate
// from the library path on purpose.
ComplexMatrix kraus_sum_oracle(const std::vector<ComplexMatrix>& ops,
                               const ComplexMatrix& rho) {
  const int d = static_cast<int>(rho.rows());
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& m : ops) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        Complex acc(0, 0);
        for (int a = 0; a < d; ++a) {
          for (int b = 0; b < d; ++b) {
            acc += m(i, a) * rho(a, b) * std::conj(m(j, b));
          }
        }
        out(i, j) += acc;
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("apply_channel") {
  Rng rng(21);
  DensityOperator rho = random_density(2, rng);

  CHECK(max_abs(apply_channel(KrausChannel::identity(2), rho).matrix() -
                rho.matrix()) < 1e-12);

  DensityOperator flipped =
      apply_channel(KrausChannel::from_unitary(pauli_x()), basis_state(2, 0));
  CHECK(max_abs(flipped.matrix() - basis_state(2, 1).matrix()) < 1e-12);

  DensityOperator depolarized =
      apply_channel(KrausChannel::depolarizing_qubit(1.0), rho);
  CHECK(max_abs(depolarized.matrix() - ComplexMatrix::Identity(2, 2) / 2.0) <
        1e-10);

  CHECK_THROWS_AS(apply_channel(KrausChannel::identity(3), rho),
                  std::invalid_argument);

  SUBCASE("CPTP channels preserve trace and positivity") {
    for (int i = 0; i < 50; ++i) {
      int d = 2 + static_cast<int>(rng.next_double() * 3);
      KrausChannel ch = random_cptp_channel(d, 2, rng);
      DensityOperator in = random_density(d, rng);
      DensityOperator out = apply_channel(ch, in);  // ctor re-checks PSD
      CHECK(out.trace() == doctest::Approx(in.trace()).epsilon(1e-10));
      CHECK(max_abs(out.matrix() -
                    kraus_sum_oracle(ch.kraus_ops(), in.matrix())) < 1e-10);
    }
  }
}

TEST_CASE("branch_apply") {
  ComplexVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  DensityOperator plus_state = PureState(plus).to_density();
  Instrument basis = Instrument::computational_basis(2);

  BranchResult b0 = branch_apply(basis, "0", plus_state);
  BranchResult b1 = branch_apply(basis, "1", plus_state);
  CHECK(b0.prob == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(b1.prob == doctest::Approx(0.5).epsilon(1e-12));

  BranchResult certain = branch_apply(basis, "0", basis_state(2, 0));
  CHECK(certain.prob == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(max_abs(certain.post->matrix() - basis_state(2, 0).matrix()) < 1e-12);

  BranchResult never = branch_apply(basis, "1", basis_state(2, 0));
  CHECK(never.prob <= tol::branch_cutoff);
  CHECK(!never.post.has_value());

  CHECK_THROWS_AS(branch_apply(basis, "nope", plus_state),
                  std::invalid_argument);

  SUBCASE("scaled-identity POVM leaves the state untouched") {
    Instrument povm({{"low", KrausChannel({std::sqrt(0.3) *
                                           ComplexMatrix::Identity(2, 2)})},
                     {"high", KrausChannel({std::sqrt(0.7) *
                                            ComplexMatrix::Identity(2, 2)})}});
    Rng rng(22);
    DensityOperator rho = random_density(2, rng);
    BranchResult low = branch_apply(povm, "low", rho);
    BranchResult high = branch_apply(povm, "high", rho);
    CHECK(low.prob == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(high.prob == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(max_abs(low.post->matrix() - rho.matrix()) < 1e-10);
    CHECK(max_abs(high.post->matrix() - rho.matrix()) < 1e-10);
  }
}

TEST_CASE("instrument_distribution") {
  Instrument basis = Instrument::computational_basis(2);
  ComplexMatrix diag = ComplexMatrix::Zero(2, 2);
  diag(0, 0) = 0.2;
  diag(1, 1) = 0.8;
  std::vector<double> probs = instrument_distribution(basis, DensityOperator(diag));
  CHECK(probs[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(probs[1] == doctest::Approx(0.8).epsilon(1e-12));

  probs = instrument_distribution(basis, maximally_mixed(2));
  CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-12));

  SUBCASE("matches the per-Kraus brute-force sum") {
    Rng rng(23);
    for (int i = 0; i < 30; ++i) {
      Instrument instr = random_instrument(3, 4, rng);
      DensityOperator rho = random_density(3, rng);
      std::vector<double> dist = instrument_distribution(instr, rho);
      double total = 0.0;
      for (size_t k = 0; k < dist.size(); ++k) {
        double expected =
            kraus_sum_oracle(instr.branches()[k].kraus_ops(), rho.matrix())
                .trace()
                .real();
        CHECK(dist[k] == doctest::Approx(expected).epsilon(1e-10));
        CHECK(dist[k] >= -1e-10);
        total += dist[k];
      }
      CHECK(total == doctest::Approx(rho.trace()).epsilon(1e-9));
    }
  }
}

TEST_CASE("choi state") {
  DensityOperator id_choi = choi_state(KrausChannel::identity(2));
  DensityOperator phi_plus = maximally_entangled(2).to_density({2, 2});
  CHECK(max_abs(id_choi.matrix() - phi_plus.matrix()) < 1e-12);

  // (id (x) X)|Phi+> = (|01> + |10>)/sqrt(2)
  DensityOperator x_choi = choi_state(KrausChannel::from_unitary(pauli_x()));
  ComplexVector expected(4);
  expected << 0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0;
  CHECK(max_abs(x_choi.matrix() - PureState(expected).to_density().matrix()) <
        1e-12);

  SUBCASE("Kraus-sum oracle on the entangled reference state") {
    KrausChannel depol = KrausChannel::depolarizing_qubit(1.0);
    DensityOperator choi = choi_state(depol);
    std::vector<ComplexMatrix> lifted;
    for (const auto& m : depol.kraus_ops()) {
      lifted.push_back(tensor(ComplexMatrix::Identity(2, 2), m));
    }
    ComplexMatrix expected_m = kraus_sum_oracle(lifted, phi_plus.matrix());
    CHECK(max_abs(choi.matrix() - expected_m) < 1e-10);
  }

  SUBCASE("unitary channels give pure Choi states") {
    Rng rng(24);
    for (int i = 0; i < 10; ++i) {
      KrausChannel u = KrausChannel::from_unitary(haar_unitary(3, rng));
      CHECK(purity(choi_state(u)) == doctest::Approx(1.0).epsilon(1e-9));
      KrausChannel noisy = random_cptp_channel(3, 3, rng);
      CHECK(purity(choi_state(noisy)) < 1.0 + 1e-9);
    }
  }

  CHECK_THROWS_AS(choi_state(KrausChannel({ComplexMatrix::Zero(2, 3)})),
                  std::invalid_argument);
}

TEST_CASE("validation reports") {
  Instrument basis = Instrument::computational_basis(3);
  CHECK(validate(basis).ok());

  KrausChannel inflated({1.1 * ComplexMatrix::Identity(2, 2)});
  ValidationReport report = validate(inflated);
  REQUIRE_FALSE(report.ok());
  CHECK(report.failures.front().residual ==
        doctest::Approx(0.21).epsilon(1e-9));

  // instrument missing a branch: only |0><0| of a qubit basis
  Instrument incomplete(
      {{"0", KrausChannel({basis_state(2, 0).matrix()})}});
  ValidationReport bad = validate(incomplete);
  REQUIRE_FALSE(bad.ok());
  bool completeness_flagged = false;
  for (const auto& f : bad.failures) {
    if (f.invariant.find("completeness") != std::string::npos) {
      completeness_flagged = true;
    }
  }
  CHECK(completeness_flagged);

  CHECK(validate(UnitaryAction(pauli_x())).ok());
  CHECK_THROWS_AS(UnitaryAction(1.1 * pauli_x()), std::invalid_argument);
}

TEST_CASE("data-processing inequality on random triples") {
  Rng rng(25);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    int d = 2 + static_cast<int>(rng.next_double() * 2);
    KrausChannel ch = random_cptp_channel(d, 2, rng);
    DensityOperator rho = random_density(d, rng);
    DensityOperator sigma = random_density(d, rng);
    double before = relative_entropy(rho, sigma);
    if (!std::isfinite(before)) continue;
    double after = relative_entropy(apply_channel(ch, rho),
                                    apply_channel(ch, sigma));
    CHECK(after <= before + 1e-8);
    ++checked;
  }
  CHECK(checked > 150);
}

TEST_CASE("random channel generators are well formed") {
  Rng rng(26);
  for (int i = 0; i < 50; ++i) {
    KrausChannel ch = random_cptp_channel(4, 3, rng);
    CHECK(ch.trace_preserving());
    CHECK(validate(ch).ok());
    Instrument instr = random_instrument(3, 3, rng);
    CHECK(validate(instr).ok());
  }

  SUBCASE("unitary samples are unitary and seed-reproducible") {
    Rng a(7), b(7);
    ComplexMatrix u = haar_unitary(4, a);
    CHECK(max_abs(u.adjoint() * u - ComplexMatrix::Identity(4, 4)) < 1e-12);
    CHECK(max_abs(u - haar_unitary(4, b)) == 0.0);
    CHECK(max_abs(u - haar_unitary(4, a)) > 1e-3);  // stream advances
  }

  SUBCASE("derived streams differ from each other") {
    Rng s0 = Rng::derive(123, 0);
    Rng s1 = Rng::derive(123, 1);
    CHECK(s0.next_u64() != s1.next_u64());
  }
}

TEST_CASE("lift to second factor") {
  Rng rng(27);
  DensityOperator a = random_density(2, rng);
  DensityOperator b = random_density(2, rng);
  DensityOperator joint = tensor(a, b);
  KrausChannel lifted = lift_to_second_factor(2, KrausChannel::from_unitary(pauli_x()));
  DensityOperator moved = apply_channel(lifted, joint);
  DensityOperator expected = tensor(a, apply_channel(KrausChannel::from_unitary(pauli_x()), b));
  CHECK(max_abs(moved.matrix() - expected.matrix()) < 1e-12);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "qdarwin/errors.hpp"
#include "qdarwin/infotheory.hpp"
#include "qdarwin/qstate.hpp"
#include "qdarwin/util.hpp"

using namespace qdarwin;
using complexd = std::complex<double>;

namespace {

StateVector qubit(int label, complexd a0, complexd a1) {
  Eigen::VectorXcd amps(2);
  amps << a0, a1;
  return StateVector(TensorSpace::single(label, 2), amps);
}

StateVector plus(int label) {
  return qubit(label, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
}

StateVector ghz(int qubits) {
  const TensorSpace space = TensorSpace::qubits(qubits);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(space.total_dimension());
  amps[0] = amps[space.total_dimension() - 1] = 1.0 / std::sqrt(2.0);
  return StateVector(space, amps);
}

DensityOperator random_density(Rng& rng, const TensorSpace& space) {
  Eigen::MatrixXcd g = rng.gaussian_matrix(
      static_cast<int>(space.total_dimension()),
      static_cast<int>(space.total_dimension()));
  Eigen::MatrixXcd rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(space, (rho + rho.adjoint().eval()) / 2.0);
}

Observable random_observable(Rng& rng, const TensorSpace& space,
                             std::vector<int> acts_on) {
  std::int64_t dim = 1;
  for (int label : acts_on) dim *= space.dimension_of(label);
  return Observable::from_basis(space, std::move(acts_on),
                                rng.unitary(static_cast<int>(dim)));
}

}  // namespace

TEST_CASE("tensor product of basis states") {
  const StateVector product = tensor_product({qubit(0, 1, 0), qubit(1, 1, 0)});
  CHECK(product.amplitudes()[0] == complexd(1.0));
  for (int i = 1; i < 4; ++i) CHECK(std::abs(product.amplitudes()[i]) == 0.0);
}

TEST_CASE("tensor product of plus states is uniform") {
  const StateVector product = tensor_product({plus(0), plus(1)});
  for (int i = 0; i < 4; ++i)
    CHECK(product.amplitudes()[i].real() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("tensor product amplitude bookkeeping") {
  const StateVector product =
      tensor_product({qubit(0, 0.6, 0.8), plus(1), plus(2)});
  CHECK(std::abs(product.amplitudes().norm() - 1.0) < 1e-12);
  CHECK(product.amplitudes()[0].real() == doctest::Approx(0.3).epsilon(1e-14));
  // Against the independent Kronecker oracle.
  Eigen::VectorXcd a(2), b(2);
  a << 0.6, 0.8;
  b << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Eigen::VectorXcd expected = oracle::kron({a, b, b});
  CHECK((product.amplitudes() - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("tensor product rejects label collisions") {
  CHECK_THROWS_AS(tensor_product({plus(0), plus(0)}), LabelCollisionError);
}

TEST_CASE("partial trace of a product state recovers the factor") {
  Rng rng(11);
  const StateVector a = StateVector(TensorSpace::single(0, 2), rng.unit_vector(2));
  const StateVector b = StateVector(TensorSpace::single(1, 3), rng.unit_vector(3));
  const DensityOperator joint = tensor_product({a, b}).to_density();
  const DensityOperator reduced = partial_trace(joint, {0});
  const Eigen::MatrixXcd expected = a.amplitudes() * a.amplitudes().adjoint();
  CHECK((reduced.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace of GHZ is maximally mixed") {
  const DensityOperator rho = ghz(2).to_density();
  const DensityOperator reduced = partial_trace(rho, {0});
  CHECK(reduced.matrix()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(reduced.matrix()(1, 1).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(reduced.matrix()(0, 1)) < 1e-14);
}

TEST_CASE("partial trace matches the digit-bookkeeping oracle") {
  Rng rng(23);
  const TensorSpace space({{0, 2}, {1, 3}, {2, 2}});
  for (int trial = 0; trial < 20; ++trial) {
    const DensityOperator rho = random_density(rng, space);
    for (const std::vector<int>& keep :
         {std::vector<int>{0}, {1}, {2}, {0, 2}, {1, 2}, {0, 1, 2}}) {
      const DensityOperator reduced = partial_trace(rho, keep);
      const Eigen::MatrixXcd expected =
          oracle::partial_trace(rho.matrix(), {2, 3, 2}, keep);
      CHECK((reduced.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(std::abs(reduced.matrix().trace().real() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("partial trace rejects an empty keep set") {
  CHECK_THROWS_AS(partial_trace(ghz(2).to_density(), {}), std::domain_error);
}

TEST_CASE("partial trace keeps subsystem identity under shuffled labels") {
  // Space assembled out of label order: position order is (1, 0).
  Rng rng(5);
  const StateVector left(TensorSpace::single(1, 2), rng.unit_vector(2));
  const StateVector right(TensorSpace::single(0, 2), rng.unit_vector(2));
  const DensityOperator joint = tensor_product({left, right}).to_density();
  const DensityOperator reduced = partial_trace(joint, {0});
  const Eigen::MatrixXcd expected =
      right.amplitudes() * right.amplitudes().adjoint();
  CHECK((reduced.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("born statistics of sigma_z") {
  const TensorSpace space = TensorSpace::qubits(1);
  const Observable z = Observable::pauli_z(space, 0);

  const ProbabilityDistribution on_plus =
      born_probabilities(plus(0).to_density(), z);
  CHECK(on_plus[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(on_plus[1] == doctest::Approx(0.5).epsilon(1e-12));

  const ProbabilityDistribution on_zero =
      born_probabilities(qubit(0, 1, 0).to_density(), z);
  CHECK(on_zero[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(on_zero[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("born probabilities sum to one on random inputs") {
  Rng rng(37);
  const TensorSpace space = TensorSpace::qubits(3);
  for (int trial = 0; trial < 50; ++trial) {
    const DensityOperator rho = random_density(rng, space);
    const Observable obs = random_observable(rng, space, {0, 2});
    const ProbabilityDistribution p = born_probabilities(rho, obs);
    double sum = 0.0;
    for (int i = 0; i < p.size(); ++i) {
      CHECK(p[i] >= 0.0);
      sum += p[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("born probabilities reject a space mismatch") {
  const Observable z = Observable::pauli_z(TensorSpace::qubits(1), 0);
  CHECK_THROWS_AS(born_probabilities(ghz(2).to_density(), z),
                  SpaceMismatchError);
}

TEST_CASE("conditional state projects as expected") {
  const TensorSpace one = TensorSpace::qubits(1);
  const Observable z1 = Observable::pauli_z(one, 0);
  const DensityOperator conditioned =
      conditional_state(plus(0).to_density(), z1, 0);
  CHECK(conditioned.matrix()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));

  const TensorSpace two = TensorSpace::qubits(2);
  const Observable z2 = Observable::pauli_z(two, 0);
  const DensityOperator branch = conditional_state(ghz(2).to_density(), z2, 0);
  CHECK(branch.matrix()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(conditional_state(qubit(0, 1, 0).to_density(), z1, 1),
                  NullConditioningError);
}

TEST_CASE("conditioning then measuring is deterministic") {
  Rng rng(101);
  const TensorSpace space = TensorSpace::qubits(2);
  for (int trial = 0; trial < 25; ++trial) {
    const DensityOperator rho = random_density(rng, space);
    const Observable obs = random_observable(rng, space, {1});
    const ProbabilityDistribution p = born_probabilities(rho, obs);
    for (int outcome = 0; outcome < obs.outcome_count(); ++outcome) {
      if (p[outcome] <= 1e-12) continue;
      const ProbabilityDistribution repeated =
          born_probabilities(conditional_state(rho, obs, outcome), obs);
      CHECK(repeated[outcome] == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("coarse grain merges ranks and keeps completeness") {
  const TensorSpace space = TensorSpace::qubits(2);
  const Observable full = Observable::computational(space, {0, 1});
  const Observable grouped = coarse_grain(full, {0, 0, 1, 1});
  REQUIRE(grouped.outcome_count() == 2);
  CHECK(grouped.local_projector(0).trace().real() ==
        doctest::Approx(2.0).epsilon(1e-14));

  const Observable identity_mapped = coarse_grain(full, {0, 1, 2, 3});
  REQUIRE(identity_mapped.outcome_count() == 4);
  for (int i = 0; i < 4; ++i)
    CHECK((identity_mapped.local_projector(i) - full.local_projector(i))
              .cwiseAbs()
              .maxCoeff() < 1e-14);

  CHECK_THROWS_AS(coarse_grain(full, {0, 0, 1}), IncompleteMapError);
}

TEST_CASE("coarse graining a perfect record zeroes the conditional entropy") {
  // A four-outcome fragment record of a two-outcome system observable: the
  // grouped record determines the system exactly, so H(A|X') vanishes.
  const TensorSpace space({{0, 2}, {1, 2}, {2, 2}});
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(8);
  // |0>(|00>+|01>)/sqrt2 and |1>(|10>+|11>)/sqrt2 with equal weights.
  amps[0] = amps[1] = 0.5;
  amps[6] = amps[7] = 0.5;
  const DensityOperator rho = StateVector(space, amps).to_density();
  const Observable a = Observable::pauli_z(space, 0);
  const Observable x = Observable::computational(space, {1, 2});

  const Eigen::MatrixXd table = conditional_probability(rho, a, x);
  std::vector<int> map(x.outcome_count(), 0);
  for (int j = 0; j < x.outcome_count(); ++j) {
    Eigen::Index best = 0;
    table.col(j).maxCoeff(&best);
    map[j] = static_cast<int>(best);
  }
  const Observable grouped = coarse_grain(x, map);
  CHECK(grouped.outcome_count() == 2);
  CHECK(conditional_entropy(rho, a, grouped) < 1e-12);
  CHECK(conditional_entropy(rho, grouped, a) < 1e-12);
}

TEST_CASE("refine is idempotent and absorbs the identity") {
  const TensorSpace space = TensorSpace::qubits(2);
  const Observable z = Observable::pauli_z(space, 0);

  const Refinement self = refine(z, z);
  REQUIRE(self.observable.outcome_count() == 2);
  for (int i = 0; i < 2; ++i)
    CHECK((self.observable.local_projector(i) - z.local_projector(i))
              .cwiseAbs()
              .maxCoeff() < 1e-12);

  const Refinement with_id = refine(z, Observable::identity(space));
  REQUIRE(with_id.observable.outcome_count() == 2);
  const Eigen::MatrixXcd embedded = z.embedded_projector(0);
  CHECK((with_id.observable.embedded_projector(0) - embedded)
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("refine rejects noncommuting inputs with a norm report") {
  const TensorSpace space = TensorSpace::qubits(1);
  const Observable z = Observable::pauli_z(space, 0);
  const Observable x = Observable::pauli_x(space, 0);
  try {
    refine(z, x);
    FAIL("expected CommutatorViolationError");
  } catch (const CommutatorViolationError& err) {
    CHECK(err.max_commutator_norm > 0.1);
  }
}

TEST_CASE("refine then coarse grain recovers both factors exactly") {
  Rng rng(53);
  const TensorSpace space = TensorSpace::qubits(2);
  const Observable b = random_observable(rng, space, {0});
  const Observable c = random_observable(rng, space, {1});
  const Refinement refined = refine(b, c);

  const Observable b_back =
      coarse_grain(refined.observable, refined.first_factor_map());
  REQUIRE(b_back.outcome_count() == b.outcome_count());
  for (int i = 0; i < b.outcome_count(); ++i)
    CHECK((b_back.embedded_projector(i) - b.embedded_projector(i))
              .cwiseAbs()
              .maxCoeff() < 1e-12);

  const Observable c_back =
      coarse_grain(refined.observable, refined.second_factor_map());
  REQUIRE(c_back.outcome_count() == c.outcome_count());
  for (int j = 0; j < c.outcome_count(); ++j)
    CHECK((c_back.embedded_projector(j) - c.embedded_projector(j))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("observable invariants hold for spectral decompositions") {
  Rng rng(71);
  const TensorSpace space = TensorSpace::qubits(2);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXcd h = rng.gaussian_matrix(4, 4);
    h = (h + h.adjoint().eval()) / 2.0;
    const Observable obs = Observable::from_hermitian(space, {0, 1}, h);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(4, 4);
    for (int i = 0; i < obs.outcome_count(); ++i) {
      const Eigen::MatrixXcd& p = obs.local_projector(i);
      CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((p - p.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-10);
      for (int j = 0; j < i; ++j)
        CHECK((p * obs.local_projector(j)).cwiseAbs().maxCoeff() < 1e-10);
      sum += p;
    }
    CHECK((sum - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("negative probabilities beyond the clamp are rejected") {
  CHECK_THROWS_AS(ProbabilityDistribution({1.1, -0.1}), InvariantViolation);
  const ProbabilityDistribution clamped({1.0, -1e-13});
  CHECK(clamped[1] == 0.0);
}

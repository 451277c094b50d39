"""Tests for the state representations and their basic operations."""

import json

import numpy as np
import pytest

from entvar.states import (
    Bipartition,
    DensityMatrix,
    StateVector,
    allclose_up_to_phase,
    fidelity_pure,
    marginal_of_pure,
    max_entangled_state,
    measure_probabilities,
    overlap_with_pure,
    partial_trace,
    random_density_matrix,
    random_pure_state,
    sample_counts,
    tensor_product,
)

INV_SQRT2 = 1.0 / np.sqrt(2.0)


def bell_pair() -> StateVector:
    return StateVector(2, [INV_SQRT2, 0, 0, INV_SQRT2])


class TestStateVector:
    def test_zero_state(self):
        s = StateVector.zero(3)
        assert s.amplitudes[0] == 1.0
        assert np.count_nonzero(s.amplitudes) == 1

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError, match="amplitudes"):
            StateVector(2, [1, 0, 0])

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="norm"):
            StateVector(1, [1, 1])

    def test_amplitudes_read_only(self):
        s = StateVector.zero(1)
        with pytest.raises(ValueError):
            s.amplitudes[0] = 0.0

    def test_json_round_trip(self):
        rng = np.random.default_rng(5)
        s = random_pure_state(3, rng)
        again = StateVector.from_json(s.to_json())
        assert np.allclose(again.amplitudes, s.amplitudes, atol=1e-15)

    def test_json_schema_keys(self):
        obj = json.loads(StateVector.zero(1).to_json())
        assert set(obj) == {"n_qubits", "re", "im"}


class TestDensityMatrix:
    def test_from_pure(self):
        rho = bell_pair().density()
        assert rho.matrix[0, 0] == pytest.approx(0.5)
        assert rho.matrix[0, 3] == pytest.approx(0.5)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(1, [[0.5, 0.5], [0.0, 0.5]])

    def test_rejects_wrong_trace(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(1, [[0.9, 0], [0, 0.2]])

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError, match="eigenvalue"):
            DensityMatrix(1, [[1.2, 0], [0, -0.2]])

    def test_json_round_trip(self):
        rng = np.random.default_rng(6)
        rho = random_density_matrix(2, 3, rng)
        again = DensityMatrix.from_json(rho.to_json())
        assert np.allclose(again.matrix, rho.matrix, atol=1e-15)


class TestTensorProduct:
    def test_zero_zero(self):
        out = tensor_product(StateVector.basis(1, 0), StateVector.basis(1, 0))
        assert np.allclose(out.amplitudes, [1, 0, 0, 0])

    def test_one_zero_index_convention(self):
        # first factor occupies the most significant position
        out = tensor_product(StateVector.basis(1, 1), StateVector.basis(1, 0))
        assert np.allclose(out.amplitudes, [0, 0, 1, 0])

    def test_superposition_times_basis(self):
        plus = StateVector(1, [INV_SQRT2, INV_SQRT2])
        out = tensor_product(plus, StateVector.basis(1, 1))
        assert np.allclose(out.amplitudes, [0, INV_SQRT2, 0, INV_SQRT2])


class TestPartialTrace:
    def test_bell_marginal_is_maximally_mixed(self):
        rho_a = partial_trace(bell_pair().density(), Bipartition.natural(1), "A")
        assert np.allclose(rho_a.matrix, np.eye(2) / 2, atol=1e-12)

    def test_product_state(self):
        rho = StateVector(2, [1, 0, 0, 0]).density()
        rho_a = partial_trace(rho, Bipartition.natural(1), "A")
        assert np.allclose(rho_a.matrix, [[1, 0], [0, 0]], atol=1e-12)

    def test_benchmark_state_marginal_eigenvalues(self):
        # squares of the known Schmidt coefficients (0.958, 0.286)
        from entvar.circuits import benchmark_two_qubit_state

        rho_a = partial_trace(
            benchmark_two_qubit_state().density(), Bipartition.natural(1), "A"
        )
        eigs = np.sort(np.linalg.eigvalsh(rho_a.matrix))[::-1]
        assert eigs == pytest.approx([0.918, 0.082], abs=1e-3)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="qubits"):
            partial_trace(bell_pair().density(), Bipartition(1, 2), "A")

    def test_product_inputs_recover_factor(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            rho_a = random_density_matrix(1, 2, rng)
            rho_b = random_density_matrix(2, 2, rng)
            joint = DensityMatrix(3, np.kron(rho_a.matrix, rho_b.matrix))
            back = partial_trace(joint, Bipartition(1, 2), "A")
            assert np.allclose(back.matrix, rho_a.matrix, atol=1e-10)
            back_b = partial_trace(joint, Bipartition(1, 2), "B")
            assert np.allclose(back_b.matrix, rho_b.matrix, atol=1e-10)

    def test_marginal_of_pure_matches_partial_trace(self):
        rng = np.random.default_rng(8)
        part = Bipartition(2, 1)
        for _ in range(10):
            psi = random_pure_state(3, rng)
            for keep in ("A", "B"):
                a = marginal_of_pure(psi, part, keep)
                b = partial_trace(psi.density(), part, keep)
                assert np.allclose(a.matrix, b.matrix, atol=1e-12)


class TestFidelityAndOverlap:
    def test_identical(self):
        s = StateVector.basis(1, 0)
        assert fidelity_pure(s, s) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert fidelity_pure(StateVector.basis(1, 0), StateVector.basis(1, 1)) == 0.0

    def test_bell_with_zero(self):
        assert fidelity_pure(bell_pair(), StateVector(2, [1, 0, 0, 0])) == pytest.approx(
            INV_SQRT2
        )

    def test_symmetric(self):
        rng = np.random.default_rng(9)
        a, b = random_pure_state(2, rng), random_pure_state(2, rng)
        assert fidelity_pure(a, b) == pytest.approx(fidelity_pure(b, a), abs=1e-14)

    def test_overlap_maximally_mixed(self):
        rho = DensityMatrix(2, np.eye(4) / 4)
        assert overlap_with_pure(rho, bell_pair()) == pytest.approx(0.25)

    def test_overlap_projector_onto_itself(self):
        assert overlap_with_pure(bell_pair().density(), bell_pair()) == pytest.approx(1.0)

    def test_overlap_zero_with_bell(self):
        rho = StateVector(2, [1, 0, 0, 0]).density()
        assert overlap_with_pure(rho, bell_pair()) == pytest.approx(0.5)

    def test_fidelity_squared_equals_overlap(self):
        rng = np.random.default_rng(10)
        for _ in range(25):
            psi, phi = random_pure_state(2, rng), random_pure_state(2, rng)
            assert fidelity_pure(psi, phi) ** 2 == pytest.approx(
                overlap_with_pure(psi.density(), phi), abs=1e-10
            )

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity_pure(StateVector.zero(1), StateVector.zero(2))


class TestMeasureProbabilities:
    def test_bell(self):
        assert np.allclose(measure_probabilities(bell_pair()), [0.5, 0, 0, 0.5])

    def test_zero_state(self):
        probs = measure_probabilities(StateVector.zero(3))
        assert probs[0] == 1.0 and probs.sum() == pytest.approx(1.0)

    def test_maximally_mixed(self):
        rho = DensityMatrix(2, np.eye(4) / 4)
        assert np.allclose(measure_probabilities(rho), 0.25)

    def test_random_states_normalized_nonnegative(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            probs = measure_probabilities(random_pure_state(3, rng))
            assert np.all(probs >= 0)
            assert probs.sum() == pytest.approx(1.0, abs=1e-9)
            probs = measure_probabilities(random_density_matrix(2, 3, rng))
            assert np.all(probs >= 0)
            assert probs.sum() == pytest.approx(1.0, abs=1e-9)


class TestSampleCounts:
    def test_deterministic_outcome(self):
        assert np.array_equal(sample_counts(np.array([1.0, 0.0]), 100, 0), [100, 0])

    def test_reproducible(self):
        probs = np.array([0.3, 0.7])
        assert np.array_equal(sample_counts(probs, 1000, 42), sample_counts(probs, 1000, 42))

    def test_binomial_three_sigma(self):
        counts = sample_counts(np.array([0.5, 0.5]), 10**6, 12345)
        assert abs(counts[0] - 500000) < 3 * 500

    def test_counts_sum_to_shots(self):
        counts = sample_counts(np.array([0.2, 0.5, 0.3]), 777, 3)
        assert counts.sum() == 777

    def test_rejects_negative_probability(self):
        with pytest.raises(ValueError, match="nonnegative"):
            sample_counts(np.array([1.1, -0.1]), 10, 0)


class TestTransposeTrick:
    def test_identity_on_random_operators(self):
        # (M (x) I)|Phi+> == (I (x) M^T)|Phi+> elementwise
        rng = np.random.default_rng(12)
        for n in (1, 2, 3):
            d = 2**n
            phi = max_entangled_state(n).amplitudes
            for _ in range(34):
                m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
                left = np.kron(m, np.eye(d)) @ phi
                right = np.kron(np.eye(d), m.T) @ phi
                assert np.allclose(left, right, atol=1e-10)


class TestMaxEntangled:
    def test_two_qubit_case_is_bell(self):
        assert np.allclose(max_entangled_state(1).amplitudes, bell_pair().amplitudes)

    def test_uniform_diagonal_support(self):
        s = max_entangled_state(2)
        amps = s.amplitudes.reshape(4, 4)
        assert np.allclose(np.diag(amps), 0.5)
        assert np.count_nonzero(amps) == 4


class TestPhaseInsensitiveComparison:
    def test_global_phase_ignored(self):
        rng = np.random.default_rng(13)
        v = random_pure_state(2, rng).amplitudes
        assert allclose_up_to_phase(np.exp(0.7j) * v, v)

    def test_distinct_states_differ(self):
        rng = np.random.default_rng(14)
        a = random_pure_state(2, rng).amplitudes
        b = random_pure_state(2, rng).amplitudes
        assert not allclose_up_to_phase(a, b)

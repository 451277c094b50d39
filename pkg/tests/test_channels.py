"""Tests for the Kraus noise channels."""

import numpy as np
import pytest

from entvar.channels import KrausChannel, amplitude_damping, apply_channel, depolarizing
from entvar.states import DensityMatrix, max_entangled_state, random_density_matrix

LEVELS = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


class TestAmplitudeDamping:
    def test_zero_level_is_identity(self):
        rng = np.random.default_rng(0)
        rho = random_density_matrix(1, 2, rng)
        out = apply_channel(amplitude_damping(0.0), rho, 0)
        assert np.allclose(out.matrix, rho.matrix, atol=1e-12)

    def test_half_level_on_excited_state(self):
        rho = DensityMatrix(1, [[0, 0], [0, 1]])
        out = apply_channel(amplitude_damping(0.5), rho, 0)
        assert np.allclose(out.matrix, np.diag([0.5, 0.5]), atol=1e-12)

    def test_ground_state_is_fixed_point(self):
        rho = DensityMatrix(1, [[1, 0], [0, 0]])
        for p in (0.2, 0.7, 0.99):
            out = apply_channel(amplitude_damping(p), rho, 0)
            assert np.allclose(out.matrix, rho.matrix, atol=1e-12)

    def test_level_range(self):
        with pytest.raises(ValueError):
            amplitude_damping(-0.1)
        with pytest.raises(ValueError):
            amplitude_damping(1.1)


class TestDepolarizing:
    def test_zero_level_is_identity(self):
        rng = np.random.default_rng(1)
        rho = random_density_matrix(1, 2, rng)
        out = apply_channel(depolarizing(0.0), rho, 0)
        assert np.allclose(out.matrix, rho.matrix, atol=1e-12)

    def test_maximally_mixed_fixed_point(self):
        rho = DensityMatrix(1, np.eye(2) / 2)
        out = apply_channel(depolarizing(0.8), rho, 0)
        assert np.allclose(out.matrix, rho.matrix, atol=1e-12)

    def test_formula_on_ground_state(self):
        rho = DensityMatrix(1, [[1, 0], [0, 0]])
        out = apply_channel(depolarizing(0.8), rho, 0)
        assert np.allclose(out.matrix, np.diag([0.6, 0.4]), atol=1e-12)

    def test_matches_affine_map_on_random_inputs(self):
        # action must equal (1-p) rho + p I/2 regardless of Kraus realization
        rng = np.random.default_rng(2)
        for p in LEVELS:
            rho = random_density_matrix(1, 2, rng)
            out = apply_channel(depolarizing(p), rho, 0)
            expected = (1 - p) * rho.matrix + p * np.eye(2) / 2
            assert np.allclose(out.matrix, expected, atol=1e-12)


class TestApplyChannel:
    def test_full_damping_on_bell_pair(self):
        rho = max_entangled_state(1).density()
        out = apply_channel(amplitude_damping(1.0), rho, 0)
        expected = np.kron(np.diag([1.0, 0.0]), np.eye(2) / 2)
        assert np.allclose(out.matrix, expected, atol=1e-12)

    def test_acts_on_requested_qubit_only(self):
        rho = DensityMatrix(2, np.diag([0, 0, 0, 1.0]))  # |11><11|
        out = apply_channel(amplitude_damping(0.3), rho, 1)
        # qubit 1 damps, qubit 0 untouched
        assert np.allclose(np.diag(out.matrix).real, [0, 0, 0.3, 0.7], atol=1e-12)

    def test_index_out_of_range(self):
        rho = DensityMatrix(1, np.eye(2) / 2)
        with pytest.raises(ValueError, match="out of range"):
            apply_channel(amplitude_damping(0.1), rho, 1)

    def test_trace_and_positivity_preserved(self):
        rng = np.random.default_rng(3)
        for maker in (amplitude_damping, depolarizing):
            for p in LEVELS:
                rho = random_density_matrix(2, 3, rng)
                out = apply_channel(maker(p), rho, int(rng.integers(2)))
                assert np.trace(out.matrix).real == pytest.approx(1.0, abs=1e-10)
                assert np.linalg.eigvalsh(out.matrix)[0] > -1e-10
                assert np.allclose(out.matrix, out.matrix.conj().T, atol=1e-10)

    def test_trace_preservation_validated(self):
        bad = np.array([[1, 0], [0, 0.5]], dtype=complex)
        with pytest.raises(ValueError, match="identity"):
            KrausChannel((bad,), "broken", 0.0)

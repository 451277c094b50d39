"""Tests for parameter-shift gradients, ADAM ascent and coordinate SMO."""

import numpy as np
import pytest

from entvar.algorithms import AnsatzConfig, schmidt_cost_spec
from entvar.circuits import (
    build_amplitude_ladder,
    build_max_entangled_circuit,
    hardware_efficient_ansatz,
    ladder_amplitudes,
)
from entvar.cost import CostSpec, evaluate_cost
from entvar.oracle import exact_schmidt
from entvar.optim import (
    OptimConfig,
    adam_maximize,
    param_shift_gradient,
    random_init,
    smo_maximize,
)
from entvar.circuits import benchmark_two_qubit_state
from entvar.states import Bipartition, random_pure_state


def cos_cost(center=0.0, offset=0.5, amplitude=0.5):
    return lambda t: offset + amplitude * np.cos(float(t[0]) - center)


def benchmark_sd_cost():
    psi = benchmark_two_qubit_state()
    spec = schmidt_cost_spec(psi, Bipartition.natural(1), AnsatzConfig(depth=1))
    target = exact_schmidt(psi, Bipartition.natural(1)).coefficients
    ladder_p = ladder_amplitudes(build_amplitude_ladder(1))
    bound = float(np.sum(ladder_p * target)) ** 2
    return spec, bound


class TestParamShiftGradient:
    def test_extremum_gives_zero(self):
        g = param_shift_gradient(cos_cost(), np.array([0.0]))
        assert g[0] == pytest.approx(0.0, abs=1e-15)

    def test_analytic_slope(self):
        g = param_shift_gradient(cos_cost(), np.array([np.pi / 2]))
        assert g[0] == pytest.approx(-0.5, abs=1e-12)

    def test_matches_finite_differences_on_circuit_cost(self):
        rng = np.random.default_rng(0)
        part = Bipartition.natural(1)
        psi = random_pure_state(2, rng)
        spec = CostSpec(
            input=psi, part=part, pqc_a=hardware_efficient_ansatz(1, 2), pqc_b=None,
            subcircuit=build_max_entangled_circuit(part),
        )
        cost = lambda t: evaluate_cost(spec, t)  # noqa: E731
        h = 1e-5
        for _ in range(5):
            theta = rng.uniform(0, 2 * np.pi, spec.n_params)
            shift = param_shift_gradient(cost, theta)
            for i in range(theta.size):
                up, dn = theta.copy(), theta.copy()
                up[i] += h
                dn[i] -= h
                fd = (cost(up) - cost(dn)) / (2 * h)
                assert shift[i] == pytest.approx(fd, abs=1e-6)


class TestAdam:
    def test_one_dimensional_sinusoid(self):
        cfg = OptimConfig(method="ADAM", max_iters=400, learning_rate=0.05,
                          convergence_tol=1e-9, seed=0)
        trace = adam_maximize(cos_cost(center=1.0), np.array([0.0]), cfg)
        assert trace.final_theta[0] == pytest.approx(1.0, abs=1e-2)
        assert trace.final_cost == pytest.approx(1.0, abs=1e-4)

    def test_benchmark_cost_reaches_weighted_sum_bound(self):
        spec, bound = benchmark_sd_cost()
        cost = lambda t: evaluate_cost(spec, t)  # noqa: E731
        hits = 0
        for seed in range(6):
            cfg = OptimConfig(method="ADAM", max_iters=100, seed=seed)
            trace = adam_maximize(cost, random_init(spec.n_params, seed), cfg)
            hits += abs(trace.best()[0] - bound) < 1e-3
        assert hits >= 5

    def test_ascent_sanity(self):
        cfg = OptimConfig(method="ADAM", max_iters=50, seed=1)
        trace = adam_maximize(cos_cost(center=0.7), np.array([2.5]), cfg)
        assert trace.final_cost >= trace.initial_cost

    def test_trace_shape(self):
        cfg = OptimConfig(method="ADAM", max_iters=20, convergence_tol=0.0, seed=2)
        trace = adam_maximize(cos_cost(), np.array([0.3]), cfg)
        assert len(trace.records) == 20
        assert trace.records[0].iteration == 1
        assert np.all((trace.costs >= 0) & (trace.costs <= 1))

    def test_reproducible(self):
        spec, _ = benchmark_sd_cost()
        cost = lambda t: evaluate_cost(spec, t)  # noqa: E731
        cfg = OptimConfig(method="ADAM", max_iters=15, seed=4)
        t0 = random_init(spec.n_params, 4)
        a = adam_maximize(cost, t0, cfg)
        b = adam_maximize(cost, t0, cfg)
        assert np.array_equal(a.final_theta, b.final_theta)
        assert a.costs.tolist() == b.costs.tolist()


class TestSmo:
    def test_exact_sinusoid_recovered_in_one_sweep(self):
        cfg = OptimConfig(method="SMO", max_iters=1, seed=0)
        for theta0 in (-2.0, 0.0, 0.5, 2.9, 5.5):
            trace = smo_maximize(cos_cost(center=1.0, offset=0.3, amplitude=0.5),
                                 np.array([theta0]), cfg)
            assert trace.final_theta[0] == pytest.approx(1.0, abs=1e-9)

    def test_constant_cost_leaves_parameters(self):
        cfg = OptimConfig(method="SMO", max_iters=3, seed=0)
        trace = smo_maximize(lambda t: 0.42, np.array([1.1, 2.2]), cfg)
        assert np.allclose(trace.final_theta, [1.1, 2.2])

    def test_matches_adam_on_benchmark_cost(self):
        spec, _ = benchmark_sd_cost()
        cost = lambda t: evaluate_cost(spec, t)  # noqa: E731
        smo_cfg = OptimConfig(method="SMO", max_iters=60, seed=3)
        adam_cfg = OptimConfig(method="ADAM", max_iters=100, seed=3)
        t0 = random_init(spec.n_params, 3)
        smo = smo_maximize(cost, t0, smo_cfg)
        adam = adam_maximize(cost, t0, adam_cfg)
        assert smo.best()[0] == pytest.approx(adam.best()[0], abs=1e-3)

    def test_per_coordinate_updates_never_decrease_exact_cost(self):
        # every third stencil evaluation probes the current point, so the
        # sequence of those probes tracks the post-update costs coordinate
        # by coordinate
        spec, _ = benchmark_sd_cost()
        evals = []

        def cost(t):
            value = evaluate_cost(spec, t)
            evals.append(value)
            return value

        cfg = OptimConfig(method="SMO", max_iters=4, convergence_tol=0.0, seed=5)
        smo_maximize(cost, random_init(spec.n_params, 5), cfg)
        n = spec.n_params
        per_sweep = 3 * n + 1
        # drop the initial evaluation, then walk sweep by sweep
        body = evals[1:]
        for s in range(4):
            sweep = body[s * per_sweep : (s + 1) * per_sweep]
            at_points = sweep[0::3][:n] + [sweep[-1]]
            for before, after in zip(at_points, at_points[1:]):
                assert after >= before - 1e-12

    def test_reproducible(self):
        spec, _ = benchmark_sd_cost()
        cost = lambda t: evaluate_cost(spec, t)  # noqa: E731
        cfg = OptimConfig(method="SMO", max_iters=10, seed=6)
        t0 = random_init(spec.n_params, 6)
        a = smo_maximize(cost, t0, cfg)
        b = smo_maximize(cost, t0, cfg)
        assert np.array_equal(a.final_theta, b.final_theta)

    def test_shot_mode_still_climbs(self):
        psi = benchmark_two_qubit_state()
        spec = schmidt_cost_spec(psi, Bipartition.natural(1), AnsatzConfig(depth=1),
                                 shots=4096, seed=11)
        cost = lambda t: evaluate_cost(spec, t)  # noqa: E731
        cfg = OptimConfig(method="SMO", max_iters=25, seed=11)
        trace = smo_maximize(cost, random_init(spec.n_params, 11), cfg)
        assert trace.best()[0] > 0.85  # exact optimum is ~0.918


class TestConfigAndTrace:
    def test_invalid_configs(self):
        with pytest.raises(ValueError):
            OptimConfig(method="SGD")
        with pytest.raises(ValueError):
            OptimConfig(max_iters=0)
        with pytest.raises(ValueError):
            OptimConfig(learning_rate=0.0)
        with pytest.raises(ValueError):
            OptimConfig(adam_betas=(1.0, 0.5))

    def test_trace_jsonl(self):
        import json

        cfg = OptimConfig(method="SMO", max_iters=3, convergence_tol=0.0, seed=0)
        trace = smo_maximize(cos_cost(), np.array([0.2]), cfg)
        lines = trace.to_jsonl().splitlines()
        assert len(lines) == 3
        rec = json.loads(lines[0])
        assert set(rec) == {"iteration", "cost", "theta"}

    def test_random_init_range_and_determinism(self):
        a = random_init(50, 9)
        b = random_init(50, 9)
        assert np.array_equal(a, b)
        assert np.all((a >= 0) & (a < 2 * np.pi))

    def test_convergence_window_halts(self):
        cfg = OptimConfig(method="SMO", max_iters=100, convergence_tol=1e-6, seed=0)
        trace = smo_maximize(cos_cost(center=0.5), np.array([1.5]), cfg)
        assert len(trace.records) < 100

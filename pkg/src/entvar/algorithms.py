"""End-to-end drivers: Schmidt decomposition, log-negativity, detection.

All three share one pipeline: party circuits are trained to maximize the
all-zero-outcome probability behind the inverse of a fixed depth-2
subcircuit.  The Schmidt driver trains both parties against the
decreasing-weight reference state and reads the coefficients off the rotated
A marginal; the other two train party A alone against the maximally
entangled state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle
from .circuits import (
    AmplitudeLadder,
    Circuit,
    Gate,
    build_amplitude_ladder,
    build_max_entangled_circuit,
    build_reference_circuit,
    hardware_efficient_ansatz,
    inverse,
)
from .cost import (
    CostSpec,
    _draw_seed,
    error_metric,
    evaluate_cost,
    readout_schmidt_coefficients,
    transformed_state,
)
from .optim import OptimConfig, OptimTrace, maximize, random_init
from .states import (
    Bipartition,
    DensityMatrix,
    StateVector,
    marginal_of_pure,
    partial_trace,
)

DEGENERACY_GAP = 1e-4  # adjacent sorted coefficients closer than this are flagged


@dataclass(frozen=True)
class AnsatzConfig:
    """Shape of the per-party hardware-efficient circuits."""

    depth: int = 1
    entangler: str = "CNOT"


@dataclass(frozen=True)
class SchmidtResult:
    """Output of the variational Schmidt decomposition.

    ``basis_a`` applied to the computational state |j> prepares the j-th
    party-A Schmidt vector up to a global phase (likewise ``basis_b``), valid
    for indices not listed in ``degenerate_indices``.
    """

    coefficients: np.ndarray           # descending
    coefficients_by_index: np.ndarray  # readout order
    basis_a: Circuit
    basis_b: Circuit
    trace: OptimTrace
    error_vs_oracle: float | None
    degenerate_indices: tuple[int, ...]


@dataclass(frozen=True)
class DetectionResult:
    detected: bool
    fef_lower_bound: float  # max observed cost, a valid FEF lower bound
    threshold: float        # 1/d
    halted_early: bool
    trace: OptimTrace


def schmidt_cost_spec(
    input_state: StateVector | DensityMatrix,
    part: Bipartition,
    ansatz_cfg: AnsatzConfig,
    ladder: AmplitudeLadder | None = None,
    shots: int | None = None,
    seed: int = 0,
) -> CostSpec:
    """The two-sided cost specification used by ``schmidt_decompose``."""
    if ladder is None:
        ladder = build_amplitude_ladder(part.n_a)
    pqc_a = hardware_efficient_ansatz(part.n_a, ansatz_cfg.depth, ansatz_cfg.entangler)
    pqc_b = hardware_efficient_ansatz(part.n_b, ansatz_cfg.depth, ansatz_cfg.entangler)
    return CostSpec(
        input=input_state,
        part=part,
        pqc_a=pqc_a,
        pqc_b=pqc_b,
        subcircuit=build_reference_circuit(part, ladder),
        shots=shots,
        seed=seed,
    )


def _reduced_a(state: StateVector | DensityMatrix, part: Bipartition) -> DensityMatrix:
    if isinstance(state, StateVector):
        return marginal_of_pure(state, part, "A")
    return partial_trace(state, part, "A")


def schmidt_decompose(
    input_state: StateVector | DensityMatrix,
    part: Bipartition,
    ansatz_cfg: AnsatzConfig,
    optim_cfg: OptimConfig,
    ladder: AmplitudeLadder | None = None,
    shots: int | None = None,
) -> SchmidtResult:
    """Train both party circuits and read out Schmidt coefficients and bases.

    The readout is taken at the best-cost iterate of the trace.  For pure
    inputs ``error_vs_oracle`` holds the squared L2 distance to the exact SVD
    coefficients; for mixed inputs it is None (no pure-state oracle exists).
    """
    spec = schmidt_cost_spec(input_state, part, ansatz_cfg, ladder, shots, optim_cfg.seed)
    theta0 = random_init(spec.n_params, optim_cfg.seed)
    trace = maximize(lambda t: evaluate_cost(spec, t), theta0, optim_cfg)
    _, theta_opt = trace.best()

    rho_a = _reduced_a(transformed_state(spec, theta_opt), part)
    readout_seed = _draw_seed(spec.seed, theta_opt, 1)
    readout = readout_schmidt_coefficients(rho_a, shots=shots, seed=readout_seed)

    n_a = spec.pqc_a.n_params
    basis_a = inverse(spec.pqc_a.bind(theta_opt[:n_a]))
    basis_b = inverse(spec.pqc_b.bind(theta_opt[n_a:]))

    sorted_c = readout.sorted_desc
    degenerate = _degenerate_indices(sorted_c)

    error: float | None = None
    if isinstance(input_state, StateVector):
        actual = oracle.exact_schmidt(input_state, part).coefficients
        error = error_metric(sorted_c, actual)

    return SchmidtResult(
        coefficients=sorted_c,
        coefficients_by_index=readout.by_index,
        basis_a=basis_a,
        basis_b=basis_b,
        trace=trace,
        error_vs_oracle=error,
        degenerate_indices=degenerate,
    )


def _degenerate_indices(sorted_c: np.ndarray) -> tuple[int, ...]:
    flagged = set()
    for j in range(sorted_c.size - 1):
        if sorted_c[j] - sorted_c[j + 1] < DEGENERACY_GAP:
            flagged.add(j)
            flagged.add(j + 1)
    return tuple(sorted(flagged))


def schmidt_basis_circuit(result: SchmidtResult, j: int, side: str = "A") -> Circuit:
    """Circuit preparing the j-th Schmidt vector of one party from |0...0>.

    X gates write the bits of j, then the trained inverse circuit rotates the
    computational vector onto the Schmidt vector.  Refuses degenerate indices,
    where the correspondence is not guaranteed.
    """
    if j in result.degenerate_indices:
        raise ValueError(f"coefficient {j} is degenerate; its basis vector is not pinned")
    basis = result.basis_a if side == "A" else result.basis_b
    n = basis.n_qubits
    if not 0 <= j < 2**n:
        raise ValueError(f"index {j} out of range for {n} qubits")
    prep = tuple(Gate("X", (q,)) for q in range(n) if (j >> (n - 1 - q)) & 1)
    return Circuit(n, prep + basis.gates)


def _one_sided_spec(
    input_state: StateVector | DensityMatrix,
    part: Bipartition,
    ansatz_cfg: AnsatzConfig,
    shots: int | None,
    seed: int,
) -> CostSpec:
    pqc_a = hardware_efficient_ansatz(part.n_a, ansatz_cfg.depth, ansatz_cfg.entangler)
    return CostSpec(
        input=input_state,
        part=part,
        pqc_a=pqc_a,
        pqc_b=None,
        subcircuit=build_max_entangled_circuit(part),
        shots=shots,
        seed=seed,
    )


def estimate_log_negativity(
    input_state: StateVector,
    part: Bipartition,
    ansatz_cfg: AnsatzConfig,
    optim_cfg: OptimConfig,
    shots: int | None = None,
) -> float:
    """log2 of the best observed overlap cost, shifted by the party size.

    The overlap with the maximally entangled state peaks at (sum_j c_j)^2 / d
    over one-sided local unitaries, so log2(best cost) + n estimates the
    log-negativity of a pure input.
    """
    if not isinstance(input_state, StateVector):
        raise TypeError("log-negativity estimation expects a pure state")
    spec = _one_sided_spec(input_state, part, ansatz_cfg, shots, optim_cfg.seed)
    theta0 = random_init(spec.n_params, optim_cfg.seed)
    trace = maximize(lambda t: evaluate_cost(spec, t), theta0, optim_cfg)
    best_cost, _ = trace.best()
    return float(np.log2(best_cost) + part.n_a)


def detect_entanglement(
    input_state: DensityMatrix,
    part: Bipartition,
    ansatz_cfg: AnsatzConfig,
    optim_cfg: OptimConfig,
    shots: int | None = None,
    margin_sigmas: float = 3.0,
) -> DetectionResult:
    """Flag entanglement when the overlap cost provably exceeds 1/d.

    The run halts at the first iterate whose cost crosses the threshold: in
    exact mode by more than a 1e-10 float guard, in shot mode by more than
    ``margin_sigmas`` binomial standard errors.  Any observed cost is a valid
    lower bound on the fully entangled fraction, so the maximum over the
    whole trace is reported.
    """
    if not isinstance(input_state, DensityMatrix):
        input_state = input_state.density()
    d = part.dim_a
    threshold = 1.0 / d

    if shots is None:
        def crosses(c: float) -> bool:
            return c > threshold + 1e-10
    else:
        def crosses(c: float) -> bool:
            se = float(np.sqrt(max(c * (1.0 - c), 0.0) / shots))
            return c > threshold + margin_sigmas * se

    spec = _one_sided_spec(input_state, part, ansatz_cfg, shots, optim_cfg.seed)
    theta0 = random_init(spec.n_params, optim_cfg.seed)
    trace = maximize(lambda t: evaluate_cost(spec, t), theta0, optim_cfg, stop_when=crosses)
    best_cost, _ = trace.best()
    return DetectionResult(
        detected=bool(crosses(best_cost)),
        fef_lower_bound=best_cost,
        threshold=threshold,
        halted_early=trace.halted_early,
        trace=trace,
    )

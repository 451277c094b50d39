"""Cost evaluation for the variational algorithms.

Every cost is the probability of the all-zero measurement outcome after the
inverse of a fixed depth-2 subcircuit: with the reference subcircuit this
probability equals the squared fidelity with the decreasing-weight reference
state sum_j p_j |j>|j>; with the max-entangled subcircuit it equals the
overlap with the maximally entangled state.  Costs are exact expectation
values when ``shots`` is absent and sampled frequencies otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .circuits import (
    Ansatz,
    Circuit,
    _apply_gate_axes,
    _ry,
    _rz,
    _u3,
    apply,
    apply_density,
    gate_matrix,
    inverse,
    shift_circuit,
)
from .states import (
    Bipartition,
    DensityMatrix,
    StateVector,
    measure_probabilities,
    sample_counts,
)


def _subcircuit_kind(c: Circuit) -> str:
    kinds = {g.kind for g in c.gates}
    if "Ry" in kinds and "H" not in kinds:
        return "reference"
    if "H" in kinds and "Ry" not in kinds:
        return "max_entangled"
    raise ValueError("subcircuit is neither a reference nor a max-entangled preparation")


@dataclass(frozen=True)
class CostSpec:
    """Everything needed to evaluate one cost function.

    ``pqc_b`` is required with the reference subcircuit (both parties carry a
    circuit there) and must be absent with the max-entangled subcircuit (the
    one-sided formulation already covers all maximally entangled targets).
    """

    input: StateVector | DensityMatrix
    part: Bipartition
    pqc_a: Ansatz
    pqc_b: Ansatz | None
    subcircuit: Circuit
    shots: int | None = None
    seed: int = 0
    _inv_sub: Circuit = field(init=False, repr=False, compare=False)
    _program: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.input.n_qubits != self.part.n_qubits:
            raise ValueError("input size does not match the bipartition")
        if self.subcircuit.n_qubits != self.part.n_qubits:
            raise ValueError("subcircuit size does not match the bipartition")
        if self.pqc_a.n_qubits != self.part.n_a:
            raise ValueError("party-A circuit size does not match the bipartition")
        if self.pqc_b is not None and self.pqc_b.n_qubits != self.part.n_b:
            raise ValueError("party-B circuit size does not match the bipartition")
        kind = _subcircuit_kind(self.subcircuit)
        if kind == "reference" and self.pqc_b is None:
            raise ValueError("the reference subcircuit requires a party-B circuit")
        if kind == "max_entangled" and self.pqc_b is not None:
            raise ValueError("the max-entangled subcircuit forbids a party-B circuit")
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        object.__setattr__(self, "_inv_sub", inverse(self.subcircuit))
        # precompiled step list for the evaluation hot path
        program = _compile_ansatz(self.pqc_a, 0, 0)
        if self.pqc_b is not None:
            program += _compile_ansatz(self.pqc_b, self.part.n_a, self.pqc_a.n_params)
        program += tuple(
            _Step(None, g.targets, None, gate_matrix(g)) for g in self._inv_sub.gates
        )
        object.__setattr__(self, "_program", program)

    @property
    def n_params(self) -> int:
        return self.pqc_a.n_params + (self.pqc_b.n_params if self.pqc_b else 0)


def _split_theta(spec: CostSpec, theta) -> tuple[np.ndarray, np.ndarray | None]:
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.size != spec.n_params:
        raise ValueError(f"expected {spec.n_params} parameters, got {theta.size}")
    na = spec.pqc_a.n_params
    return theta[:na], (theta[na:] if spec.pqc_b is not None else None)


def transformed_state(spec: CostSpec, theta) -> StateVector | DensityMatrix:
    """The input state after the bound party circuits (before the subcircuit)."""
    ta, tb = _split_theta(spec, theta)
    n_total = spec.part.n_qubits
    circ_a = shift_circuit(spec.pqc_a.bind(ta), 0, n_total)
    state = spec.input
    if isinstance(state, StateVector):
        state = apply(circ_a, state)
        if tb is not None:
            state = apply(shift_circuit(spec.pqc_b.bind(tb), spec.part.n_a, n_total), state)
    else:
        state = apply_density(circ_a, state)
        if tb is not None:
            state = apply_density(
                shift_circuit(spec.pqc_b.bind(tb), spec.part.n_a, n_total), state
            )
    return state


class _Step(NamedTuple):
    """One compiled gate: either a fixed matrix or an angle recipe."""

    kind: str | None                 # None means fixed matrix
    targets: tuple[int, ...]
    angles: tuple | None             # per angle: (True, theta index) or (False, constant)
    matrix: np.ndarray | None


def _compile_ansatz(ansatz: Ansatz, offset: int, theta_offset: int) -> tuple[_Step, ...]:
    slot_of: dict[int, dict[int, int]] = {}
    for local, (gate_pos, angle_pos) in enumerate(ansatz.slots):
        slot_of.setdefault(gate_pos, {})[angle_pos] = theta_offset + local
    steps = []
    for pos, g in enumerate(ansatz.template):
        targets = tuple(t + offset for t in g.targets)
        if pos in slot_of:
            spec = tuple(
                (True, slot_of[pos][k]) if k in slot_of[pos] else (False, g.params[k])
                for k in range(len(g.params))
            )
            steps.append(_Step(g.kind, targets, spec, None))
        else:
            steps.append(_Step(None, targets, None, gate_matrix(g)))
    return tuple(steps)


def _step_matrix(step: _Step, theta: np.ndarray) -> np.ndarray:
    if step.kind is None:
        return step.matrix
    angles = [theta[int(value)] if is_slot else value for is_slot, value in step.angles]
    if step.kind == "U3":
        return _u3(*angles)
    if step.kind == "Ry":
        return _ry(angles[0])
    return _rz(angles[0])


def _run_program(spec: CostSpec, theta: np.ndarray):
    """State tensor after party circuits plus the inverse subcircuit."""
    n = spec.part.n_qubits
    if isinstance(spec.input, StateVector):
        t = spec.input.amplitudes.reshape((2,) * n)
        for step in spec._program:
            t = _apply_gate_axes(t, _step_matrix(step, theta), step.targets, n)
        return t, True
    t = spec.input.matrix.reshape((2,) * (2 * n))
    for step in spec._program:
        mat = _step_matrix(step, theta)
        t = _apply_gate_axes(t, mat, step.targets, 2 * n)
        col_axes = tuple(a + n for a in step.targets)
        t = _apply_gate_axes(t, mat.conj(), col_axes, 2 * n)
    return t, False


def _draw_seed(seed: int, theta: np.ndarray, tag: int) -> int:
    """Deterministic per-evaluation seed from (run seed, parameters)."""
    words = np.frombuffer(np.ascontiguousarray(theta, dtype=np.float64).tobytes(), dtype=np.uint32)
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, tag] + [int(w) for w in words])
    return int(ss.generate_state(1)[0])


def evaluate_cost(spec: CostSpec, theta) -> float:
    """Pr[all-zero outcome] after the inverse subcircuit at parameters theta."""
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.size != spec.n_params:
        raise ValueError(f"expected {spec.n_params} parameters, got {theta.size}")
    n = spec.part.n_qubits
    tensor, is_pure = _run_program(spec, theta)
    if is_pure:
        amps = tensor.reshape(-1)
        if spec.shots is None:
            p0 = abs(amps[0]) ** 2
            return float(min(max(p0, 0.0), 1.0))
        probs = np.abs(amps) ** 2
    else:
        mat = tensor.reshape(2**n, 2**n)
        if spec.shots is None:
            p0 = mat[0, 0].real
            return float(min(max(p0, 0.0), 1.0))
        probs = np.diag(mat).real.clip(min=0.0)
    counts = sample_counts(probs / probs.sum(), spec.shots, _draw_seed(spec.seed, theta, 0))
    return float(counts[0]) / spec.shots


class SchmidtReadout(NamedTuple):
    by_index: np.ndarray
    sorted_desc: np.ndarray


def readout_schmidt_coefficients(
    rho_a: DensityMatrix, shots: int | None = None, seed: int = 0
) -> SchmidtReadout:
    """Coefficients sqrt(<j|rho_A|j>), in index order and sorted copies.

    With ``shots`` the diagonal is estimated from a single multinomial sample
    (one run of the readout stage), so the squares still sum to one exactly.
    """
    probs = measure_probabilities(rho_a)
    if shots is not None:
        counts = sample_counts(probs, shots, seed)
        probs = counts / shots
    by_index = np.sqrt(probs)
    return SchmidtReadout(by_index, np.sort(by_index)[::-1])


def error_metric(estimated, actual) -> float:
    """Squared L2 distance between descending-sorted coefficient vectors.

    The shorter vector is zero-padded, so vectors of different Schmidt rank
    compare sensibly.
    """
    a = np.sort(np.asarray(estimated, dtype=float))[::-1]
    b = np.sort(np.asarray(actual, dtype=float))[::-1]
    n = max(a.size, b.size)
    a = np.pad(a, (0, n - a.size))
    b = np.pad(b, (0, n - b.size))
    return float(np.sum((a - b) ** 2))

"""Gate set, circuit application, variational ansaetze and state preparations.

Gate conventions (fixed for reproducibility):
    Ry(a) = [[cos(a/2), -sin(a/2)], [sin(a/2), cos(a/2)]], so
    Ry(a)|0> = cos(a/2)|0> + sin(a/2)|1>.
    Rz(a) = diag(exp(-i a/2), exp(i a/2)).
    U3(theta, phi, lam) = Rz(phi) @ Ry(theta) @ Rz(lam)  (ZYZ order).
    CNOT/CZ: targets[0] is the control, targets[1] the target.

Circuits and ansaetze are immutable; binding parameters yields a new Circuit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .states import Bipartition, DensityMatrix, StateVector

_FIXED_ARITY = {"H": 1, "X": 1, "Z": 1, "CNOT": 2, "CZ": 2}
_PARAM_ARITY = {"H": 0, "X": 0, "Z": 0, "CNOT": 0, "CZ": 0, "Ry": 1, "Rz": 1, "U3": 3}

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
_CZ = np.diag([1, 1, 1, -1]).astype(np.complex128)


@dataclass(frozen=True)
class Gate:
    """A single gate: kind, target qubit indices and rotation angles (radians)."""

    kind: str
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _PARAM_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        expected = _PARAM_ARITY[self.kind]
        if len(self.params) != expected:
            raise ValueError(f"{self.kind} takes {expected} angle(s), got {len(self.params)}")
        n_targets = _FIXED_ARITY.get(self.kind, 1)
        if len(self.targets) != n_targets:
            raise ValueError(f"{self.kind} acts on {n_targets} qubit(s), got {len(self.targets)}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"{self.kind} targets must be distinct: {self.targets}")


def _ry(a: float) -> np.ndarray:
    c, s = math.cos(a / 2), math.sin(a / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _rz(a: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * a), 0], [0, np.exp(0.5j * a)]], dtype=np.complex128
    )


def _u3(theta: float, phi: float, lam: float) -> np.ndarray:
    # closed form of Rz(phi) @ Ry(theta) @ Rz(lam)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c * np.exp(-0.5j * (phi + lam)), -s * np.exp(-0.5j * (phi - lam))],
            [s * np.exp(0.5j * (phi - lam)), c * np.exp(0.5j * (phi + lam))],
        ]
    )


def gate_matrix(g: Gate) -> np.ndarray:
    """The unitary matrix of a gate, in the conventions above."""
    if g.kind == "H":
        return _H
    if g.kind == "X":
        return _X
    if g.kind == "Z":
        return _Z
    if g.kind == "CNOT":
        return _CNOT
    if g.kind == "CZ":
        return _CZ
    if g.kind == "Ry":
        return _ry(g.params[0])
    if g.kind == "Rz":
        return _rz(g.params[0])
    if g.kind == "U3":
        return _u3(*g.params)
    raise ValueError(f"unknown gate kind {g.kind!r}")  # unreachable after validation


@dataclass(frozen=True)
class Circuit:
    """An ordered gate sequence on ``n_qubits`` qubits."""

    n_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.targets) >= self.n_qubits:
                raise ValueError(f"gate {g} targets qubit >= {self.n_qubits}")


def _apply_1q(tensor: np.ndarray, mat: np.ndarray, axis: int, n_axes: int) -> np.ndarray:
    """Apply a 2x2 matrix to one axis of a (2,)*n_axes tensor."""
    pre = 1 << axis
    post = 1 << (n_axes - axis - 1)
    t = tensor.reshape(pre, 2, post)
    return np.einsum("ab,ibj->iaj", mat, t)


def _apply_gate_axes(
    tensor: np.ndarray, mat: np.ndarray, axes: tuple[int, ...], n_axes: int
) -> np.ndarray:
    """Apply a k-qubit matrix to the given axes of a (2,)*n_axes tensor."""
    if len(axes) == 1:
        return _apply_1q(tensor, mat, axes[0], n_axes).reshape((2,) * n_axes)
    k = len(axes)
    g = mat.reshape((2,) * (2 * k))
    t = tensor.reshape((2,) * n_axes)
    t = np.tensordot(g, t, axes=(tuple(range(k, 2 * k)), axes))
    # tensordot puts the acted-on axes first; restore canonical order
    current = list(axes) + [a for a in range(n_axes) if a not in axes]
    return np.transpose(t, np.argsort(current))


def apply(c: Circuit, s: StateVector) -> StateVector:
    """Run a circuit on a pure state, gates in list order."""
    if c.n_qubits != s.n_qubits:
        raise ValueError(f"circuit on {c.n_qubits} qubits, state on {s.n_qubits}")
    n = s.n_qubits
    t = s.amplitudes.reshape((2,) * n)
    for g in c.gates:
        t = _apply_gate_axes(t, gate_matrix(g), g.targets, n)
    out = StateVector.__new__(StateVector)
    amps = np.ascontiguousarray(t.reshape(-1))
    amps.setflags(write=False)
    out.n_qubits = n
    out.amplitudes = amps
    return out


def apply_density(c: Circuit, r: DensityMatrix) -> DensityMatrix:
    """Run a circuit on a density matrix: rho -> U rho U^dagger."""
    if c.n_qubits != r.n_qubits:
        raise ValueError(f"circuit on {c.n_qubits} qubits, state on {r.n_qubits}")
    n = r.n_qubits
    t = r.matrix.reshape((2,) * (2 * n))
    for g in c.gates:
        mat = gate_matrix(g)
        t = _apply_gate_axes(t, mat, g.targets, 2 * n)
        col_axes = tuple(a + n for a in g.targets)
        t = _apply_gate_axes(t, mat.conj(), col_axes, 2 * n)
    d = 2**n
    return DensityMatrix._wrap(n, np.ascontiguousarray(t.reshape(d, d)))


_ADJOINT_SELF = {"H", "X", "Z", "CNOT", "CZ"}


def _adjoint(g: Gate) -> Gate:
    if g.kind in _ADJOINT_SELF:
        return g
    if g.kind in ("Ry", "Rz"):
        return Gate(g.kind, g.targets, (-g.params[0],))
    if g.kind == "U3":
        theta, phi, lam = g.params
        return Gate("U3", g.targets, (-theta, -lam, -phi))
    raise ValueError(f"unknown gate kind {g.kind!r}")


def inverse(c: Circuit) -> Circuit:
    """Reversed gate order with per-gate adjoints; apply(inverse(c), apply(c, s)) == s."""
    return Circuit(c.n_qubits, tuple(_adjoint(g) for g in reversed(c.gates)))


def shift_circuit(c: Circuit, offset: int, n_total: int) -> Circuit:
    """Embed a circuit into a larger register at the given qubit offset."""
    gates = tuple(
        Gate(g.kind, tuple(t + offset for t in g.targets), g.params) for g in c.gates
    )
    return Circuit(n_total, gates)


def circuit_to_json(c: Circuit) -> str:
    records = [
        {"kind": g.kind, "targets": list(g.targets), "params": list(g.params)}
        for g in c.gates
    ]
    return json.dumps({"n_qubits": c.n_qubits, "gates": records})


def circuit_from_json(text: str) -> Circuit:
    obj = json.loads(text)
    gates = tuple(
        Gate(r["kind"], tuple(r["targets"]), tuple(r["params"])) for r in obj["gates"]
    )
    return Circuit(obj["n_qubits"], gates)


# ---------------------------------------------------------------------------
# Variational ansatz
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ansatz:
    """A circuit template with parameter slots.

    ``slots[i]`` is the (gate position, angle position) pair that parameter i
    feeds; no parameter appears in more than one slot, so every parameter
    enters through a single rotation angle (the parameter-shift rule and the
    sinusoidal coordinate restriction both rely on this).
    """

    n_qubits: int
    template: tuple[Gate, ...]
    slots: tuple[tuple[int, int], ...]

    @property
    def n_params(self) -> int:
        return len(self.slots)

    def bind(self, theta) -> Circuit:
        """Substitute a parameter vector into the template."""
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.size != self.n_params:
            raise ValueError(f"expected {self.n_params} parameters, got {theta.size}")
        angles: dict[int, list[float]] = {}
        for value, (gate_pos, angle_pos) in zip(theta, self.slots):
            angles.setdefault(gate_pos, list(self.template[gate_pos].params))[angle_pos] = value
        gates = [
            Gate(g.kind, g.targets, tuple(angles[i])) if i in angles else g
            for i, g in enumerate(self.template)
        ]
        return Circuit(self.n_qubits, tuple(gates))


def hardware_efficient_ansatz(n_qubits: int, depth: int, entangler: str = "CNOT") -> Ansatz:
    """Layered ansatz: U3 on every qubit, then entanglers on neighbors (i, i+1).

    Total parameter count is 3 * n_qubits * depth.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if entangler not in ("CNOT", "CZ"):
        raise ValueError(f"entangler must be CNOT or CZ, got {entangler!r}")
    template: list[Gate] = []
    slots: list[tuple[int, int]] = []
    for _ in range(depth):
        for q in range(n_qubits):
            pos = len(template)
            template.append(Gate("U3", (q,), (0.0, 0.0, 0.0)))
            slots.extend((pos, k) for k in range(3))
        for q in range(n_qubits - 1):
            template.append(Gate(entangler, (q, q + 1)))
    return Ansatz(n_qubits, tuple(template), tuple(slots))


# ---------------------------------------------------------------------------
# The two fixed depth-2 subcircuits and their parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AmplitudeLadder:
    """Parameters of the parallel-Ry layer preparing strictly decreasing amplitudes.

    For qubit j (1-based, most significant first) the layer contributes
    sqrt(zero_probs[j])|0> + sqrt(1 - zero_probs[j])|1>.  The per-qubit odds
    beta_j = zero_prob/(1 - zero_prob) obey beta_n > 1, beta_{n-1} > beta_n
    and, recursively, each beta_j exceeds the product of all later ones; that
    ordering is exactly what makes the 2**n induced joint amplitudes strictly
    decreasing in the basis index.

    For n = 1 the single angle is 0 (amplitudes (1, 0)); odds/zero_probs are
    then empty.
    """

    n: int
    odds: tuple[float, ...]
    zero_probs: tuple[float, ...]
    angles: tuple[float, ...]


def build_amplitude_ladder(
    n: int, last_odds: float = 2.0, second_last_odds: float = 3.0, odds_gap: float = 1.0
) -> AmplitudeLadder:
    """Construct ladder parameters in O(n).

    Args:
        n: qubits per party.
        last_odds: odds for the least significant qubit; must exceed 1.
        second_last_odds: odds for the next qubit; must exceed last_odds.
        odds_gap: positive margin added on top of the running product in the
            recursion odds[j] = prod(odds[j+1:]) + odds_gap.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n == 1:
        return AmplitudeLadder(1, (), (), (0.0,))
    if not 1.0 < last_odds < second_last_odds:
        raise ValueError(
            f"need 1 < last_odds < second_last_odds, got {last_odds}, {second_last_odds}"
        )
    if odds_gap <= 0:
        raise ValueError(f"odds_gap must be positive, got {odds_gap}")
    odds = [0.0] * n
    odds[n - 1] = last_odds
    odds[n - 2] = second_last_odds
    prod = last_odds * second_last_odds
    for j in range(n - 3, -1, -1):
        odds[j] = prod + odds_gap
        prod *= odds[j]
    zero_probs = tuple(b / (b + 1.0) for b in odds)
    angles = tuple(2.0 * math.acos(math.sqrt(g)) for g in zero_probs)
    return AmplitudeLadder(n, tuple(odds), zero_probs, angles)


def ladder_amplitudes(ladder: AmplitudeLadder) -> np.ndarray:
    """Enumerate the 2**n induced joint amplitudes (strictly decreasing)."""
    if ladder.n == 1:
        return np.array([1.0, 0.0])
    out = np.array([1.0])
    for g in ladder.zero_probs:
        out = np.kron(out, np.array([math.sqrt(g), math.sqrt(1.0 - g)]))
    return out


def build_reference_circuit(part: Bipartition, ladder: AmplitudeLadder) -> Circuit:
    """Depth-2 circuit sending |0...0> to sum_j p_j |j>_A |j>_B.

    One Ry per A qubit, then one CNOT per qubit pair (A qubit j controls
    B qubit j), 2n gates in total.
    """
    if part.n_a != part.n_b or part.n_a != ladder.n:
        raise ValueError(
            f"need n_a = n_b = ladder.n, got ({part.n_a}, {part.n_b}, {ladder.n})"
        )
    n = ladder.n
    gates = [Gate("Ry", (j,), (ladder.angles[j],)) for j in range(n)]
    gates += [Gate("CNOT", (j, n + j)) for j in range(n)]
    return Circuit(2 * n, tuple(gates))


def build_max_entangled_circuit(part: Bipartition) -> Circuit:
    """Depth-2 circuit sending |0...0> to the maximally entangled state.

    n Hadamards on party A, then n cross-party CNOTs.
    """
    if part.n_a != part.n_b:
        raise ValueError(f"need n_a = n_b, got ({part.n_a}, {part.n_b})")
    n = part.n_a
    gates = [Gate("H", (j,)) for j in range(n)]
    gates += [Gate("CNOT", (j, n + j)) for j in range(n)]
    return Circuit(2 * n, tuple(gates))


# ---------------------------------------------------------------------------
# Input-state preparations
# ---------------------------------------------------------------------------


def uniform_schmidt_state(n: int, r: int) -> StateVector:
    """(1/sqrt(r)) sum_{j<r} |j>_A |j>_B on 2n qubits: exact Schmidt rank r."""
    d = 2**n
    if not 1 <= r <= d:
        raise ValueError(f"rank must be in [1, {d}], got {r}")
    amps = np.zeros(d * d, dtype=np.complex128)
    amps[np.arange(r) * d + np.arange(r)] = 1.0 / np.sqrt(r)
    return StateVector(2 * n, amps)


def benchmark_two_qubit_state() -> StateVector:
    """Two-qubit benchmark state: Ry(0.58) and Ry(1.58), then CZ.

    Its Schmidt coefficients are about (0.958, 0.286), which makes it a
    convenient nondegenerate test input.
    """
    prep = Circuit(
        2,
        (
            Gate("Ry", (0,), (0.58,)),
            Gate("Ry", (1,), (1.58,)),
            Gate("CZ", (0, 1)),
        ),
    )
    return apply(prep, StateVector.zero(2))

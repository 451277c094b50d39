"""Dense complex representations of pure and mixed n-qubit states.

Index convention: qubit 0 is the most significant bit, so the basis index
j = (j_1 j_2 ... j_n)_2 reads left to right across the register.  In a
bipartite register party A occupies qubits 0..n_a-1 (the most significant
positions) and party B the remaining qubits.

All objects are immutable after construction (backing arrays are marked
read-only); every operation returns a new value and is safe to call
concurrently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

CONSTRUCT_ATOL = 1e-8  # validation tolerance when building from raw data
EQ_ATOL = 1e-10        # equality assertions between computed states


class StateVector:
    """Normalized pure state on ``n_qubits`` qubits.

    Attributes:
        n_qubits: register size, >= 1.
        amplitudes: complex vector of length 2**n_qubits, L2 norm 1.
    """

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes) -> None:
        if n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
        amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 2**n_qubits:
            raise ValueError(
                f"expected {2**n_qubits} amplitudes for {n_qubits} qubits, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > CONSTRUCT_ATOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {CONSTRUCT_ATOL}")
        amps.setflags(write=False)
        self.n_qubits = n_qubits
        self.amplitudes = amps

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        """The all-zero computational basis state |0...0>."""
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    def density(self) -> "DensityMatrix":
        """|psi><psi| as a DensityMatrix."""
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_qubits": self.n_qubits,
                "re": self.amplitudes.real.tolist(),
                "im": self.amplitudes.imag.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "StateVector":
        obj = json.loads(text)
        return cls(obj["n_qubits"], np.array(obj["re"]) + 1j * np.array(obj["im"]))

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits})"


class DensityMatrix:
    """Mixed state on ``n_qubits`` qubits: Hermitian, trace one, PSD.

    Construction from raw data validates Hermiticity, trace and the minimum
    eigenvalue.  Internal trace-preserving operations use the unchecked
    ``_wrap`` path since they preserve those properties exactly.
    """

    __slots__ = ("n_qubits", "matrix")

    def __init__(self, n_qubits: int, matrix, validate: bool = True) -> None:
        if n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
        d = 2**n_qubits
        mat = np.array(matrix, dtype=np.complex128).reshape(d, d)
        if validate:
            if not np.allclose(mat, mat.conj().T, atol=CONSTRUCT_ATOL):
                raise ValueError("density matrix is not Hermitian")
            tr = np.trace(mat).real
            if abs(tr - 1.0) > CONSTRUCT_ATOL:
                raise ValueError(f"density matrix trace {tr} deviates from 1")
            min_eig = np.linalg.eigvalsh(mat)[0]
            if min_eig < -1e-8:
                raise ValueError(f"density matrix has negative eigenvalue {min_eig}")
        mat.setflags(write=False)
        self.n_qubits = n_qubits
        self.matrix = mat

    @classmethod
    def _wrap(cls, n_qubits: int, matrix: np.ndarray) -> "DensityMatrix":
        return cls(n_qubits, matrix, validate=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_json(self) -> str:
        flat = self.matrix.reshape(-1)  # row-major
        return json.dumps(
            {
                "n_qubits": self.n_qubits,
                "re": flat.real.tolist(),
                "im": flat.imag.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "DensityMatrix":
        obj = json.loads(text)
        d = 2 ** obj["n_qubits"]
        flat = np.array(obj["re"]) + 1j * np.array(obj["im"])
        return cls(obj["n_qubits"], flat.reshape(d, d))

    def __repr__(self) -> str:
        return f"DensityMatrix(n_qubits={self.n_qubits})"


@dataclass(frozen=True)
class Bipartition:
    """Split of a register into party A (most significant) and party B."""

    n_a: int
    n_b: int

    def __post_init__(self) -> None:
        if self.n_a < 1 or self.n_b < 1:
            raise ValueError("both parties need at least one qubit")

    @classmethod
    def natural(cls, n: int) -> "Bipartition":
        """The n-vs-n split of a 2n-qubit register used throughout."""
        return cls(n, n)

    @property
    def n_qubits(self) -> int:
        return self.n_a + self.n_b

    @property
    def dim_a(self) -> int:
        return 2**self.n_a

    @property
    def dim_b(self) -> int:
        return 2**self.n_b


def tensor_product(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product; ``a`` occupies the most significant positions."""
    return StateVector(a.n_qubits + b.n_qubits, np.kron(a.amplitudes, b.amplitudes))


def partial_trace(rho: DensityMatrix, part: Bipartition, keep: str) -> DensityMatrix:
    """Trace out one party of a bipartite density matrix.

    Args:
        rho: state on part.n_qubits qubits.
        part: the bipartition.
        keep: "A" to trace out B, "B" to trace out A.
    """
    if rho.n_qubits != part.n_qubits:
        raise ValueError(f"state has {rho.n_qubits} qubits, bipartition expects {part.n_qubits}")
    da, db = part.dim_a, part.dim_b
    t = rho.matrix.reshape(da, db, da, db)
    if keep == "A":
        reduced = np.einsum("abcb->ac", t)
        return DensityMatrix._wrap(part.n_a, reduced)
    if keep == "B":
        reduced = np.einsum("abad->bd", t)
        return DensityMatrix._wrap(part.n_b, reduced)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def marginal_of_pure(psi: StateVector, part: Bipartition, keep: str = "A") -> DensityMatrix:
    """Reduced state of a pure state, via the d_A x d_B matricization."""
    if psi.n_qubits != part.n_qubits:
        raise ValueError(f"state has {psi.n_qubits} qubits, bipartition expects {part.n_qubits}")
    x = psi.amplitudes.reshape(part.dim_a, part.dim_b)
    if keep == "A":
        return DensityMatrix._wrap(part.n_a, x @ x.conj().T)
    if keep == "B":
        return DensityMatrix._wrap(part.n_b, x.T @ x.conj())
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def fidelity_pure(psi: StateVector, phi: StateVector) -> float:
    """|<phi|psi>| between two pure states; symmetric in its arguments."""
    if psi.n_qubits != phi.n_qubits:
        raise ValueError("fidelity requires equal dimensions")
    return float(abs(np.vdot(phi.amplitudes, psi.amplitudes)))


def overlap_with_pure(rho: DensityMatrix, phi: StateVector) -> float:
    """Tr[rho |phi><phi|] as a real number."""
    if rho.n_qubits != phi.n_qubits:
        raise ValueError("overlap requires equal dimensions")
    val = np.vdot(phi.amplitudes, rho.matrix @ phi.amplitudes)
    return float(val.real)


def measure_probabilities(state: StateVector | DensityMatrix) -> np.ndarray:
    """Computational-basis outcome distribution of a state."""
    if isinstance(state, StateVector):
        probs = np.abs(state.amplitudes) ** 2
    else:
        probs = np.diag(state.matrix).real.copy()
        probs[probs < 0] = 0.0  # clip eigenvalue-tolerance dust
    return probs


def sample_counts(probs: np.ndarray, shots: int, seed: int) -> np.ndarray:
    """Multinomial counts for a probability vector; deterministic per seed."""
    probs = np.asarray(probs, dtype=float)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if np.any(probs < 0):
        raise ValueError("probabilities must be nonnegative")
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {total}, expected 1 within 1e-9")
    rng = np.random.default_rng(seed)
    return rng.multinomial(shots, probs / total)


def max_entangled_state(n: int) -> StateVector:
    """(1/sqrt(d)) sum_j |j>_A |j>_B on 2n qubits, d = 2**n."""
    d = 2**n
    amps = np.zeros(d * d, dtype=np.complex128)
    amps[np.arange(d) * d + np.arange(d)] = 1.0 / np.sqrt(d)
    return StateVector(2 * n, amps)


def random_pure_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state: normalized vector of standard complex Gaussians."""
    v = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
    return StateVector(n_qubits, v / np.linalg.norm(v))


def random_density_matrix(n_qubits: int, rank: int, rng: np.random.Generator) -> DensityMatrix:
    """Random rank-``rank`` mixed state from a complex Wishart factor."""
    d = 2**n_qubits
    if not 1 <= rank <= d:
        raise ValueError(f"rank must be in [1, {d}], got {rank}")
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return DensityMatrix._wrap(n_qubits, m / np.trace(m).real)


def allclose_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = EQ_ATOL) -> bool:
    """Vector equality modulo a global phase (used by tests and basis checks)."""
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    if a.shape != b.shape:
        return False
    k = int(np.argmax(np.abs(b)))
    if abs(b[k]) < atol:
        return bool(np.allclose(a, b, atol=atol))
    phase = a[k] / b[k]
    if abs(abs(phase) - 1.0) > atol:
        return False
    return bool(np.allclose(a, phase * b, atol=atol))

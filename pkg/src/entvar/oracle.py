"""Exact classical ground truth for verifying the variational algorithms.

Everything here works directly on dense matrices and never touches the
circuit, cost or optimizer machinery, so it can serve as an independent
check of those paths: SVD Schmidt decomposition, exact log-negativity,
closed-form and brute-force fully entangled fraction (FEF), the reduction
and PPT separability criteria, and constructors for the mixed-state
families with known FEF values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple

import numpy as np
from scipy.optimize import minimize

from .states import Bipartition, DensityMatrix, StateVector

FAMILIES = ("isotropic", "s_state", "werner2", "bpf_bell", "ad_bell")


class SchmidtTriple(NamedTuple):
    coefficients: np.ndarray  # singular values, descending
    left: np.ndarray          # left[:, k] is the k-th party-A basis vector
    right: np.ndarray         # right[:, k] is the k-th party-B basis vector


def exact_schmidt(psi: StateVector, part: Bipartition) -> SchmidtTriple:
    """Schmidt decomposition via SVD of the d_A x d_B matricization.

    Returns coefficients c (descending, squares summing to 1) and bases such
    that psi = sum_k c_k left[:, k] (x) right[:, k].
    """
    if psi.n_qubits != part.n_qubits:
        raise ValueError("state size does not match the bipartition")
    x = psi.amplitudes.reshape(part.dim_a, part.dim_b)
    u, s, vh = np.linalg.svd(x)
    return SchmidtTriple(s, u, vh.T)


def exact_log_negativity(psi: StateVector, part: Bipartition) -> float:
    """log2((sum_j c_j)^2) from the exact Schmidt coefficients."""
    s = exact_schmidt(psi, part).coefficients
    return float(np.log2(np.sum(s) ** 2))


def ladder_decrease_violations(
    n: int, last_odds: float, second_last_odds: float, odds_gap: float
) -> int:
    """Count adjacent non-decreasing pairs in the induced ladder weights.

    Exact-rational re-enumeration of the parallel-Ry weight construction: the
    odds recursion grows doubly exponentially, so beyond n ~ 6 the strict
    gaps at bit boundaries fall below double precision and only exact
    arithmetic can certify them.  Returns 0 when the 2**n squared weights are
    strictly decreasing.
    """
    if n == 1:
        return 0
    odds = [Fraction(0)] * n
    odds[n - 1] = Fraction(last_odds)
    odds[n - 2] = Fraction(second_last_odds)
    prod = odds[n - 1] * odds[n - 2]
    for j in range(n - 3, -1, -1):
        odds[j] = prod + Fraction(odds_gap)
        prod *= odds[j]
    squared = [Fraction(1)]
    for b in odds:
        zero_prob = b / (b + 1)
        squared = [s * f for s in squared for f in (zero_prob, 1 - zero_prob)]
    return sum(squared[i] <= squared[i + 1] for i in range(len(squared) - 1))


# ---------------------------------------------------------------------------
# Mixed-state families with known fully entangled fraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StateFamily:
    """A named mixed-state family and its parameters.

    Supported families and parameters:
        isotropic: p in [-1/(d^2-1), 1], any power-of-two local dimension d.
        s_state:   p in [0, 1], any power-of-two d.
        werner2:   alpha in [-1, 1], d = 2.
        bpf_bell:  p, q in [0, 1], d = 2.
        ad_bell:   gamma in [0, 1], d = 2 (one-sided amplitude damping).
    """

    family: str
    params: Mapping[str, float]
    local_dim: int = 2

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        object.__setattr__(self, "params", dict(self.params))
        d = self.local_dim
        if d < 2 or d & (d - 1):
            raise ValueError(f"local_dim must be a power of two >= 2, got {d}")
        p = self.params
        if self.family == "isotropic":
            lo = -1.0 / (d * d - 1.0)
            if not lo <= p["p"] <= 1.0:
                raise ValueError(f"isotropic p must be in [{lo}, 1], got {p['p']}")
        elif self.family == "s_state":
            if not 0.0 <= p["p"] <= 1.0:
                raise ValueError(f"s_state p must be in [0, 1], got {p['p']}")
        elif self.family == "werner2":
            if d != 2:
                raise ValueError("werner2 is defined for local_dim 2")
            if not -1.0 <= p["alpha"] <= 1.0:
                raise ValueError(f"werner2 alpha must be in [-1, 1], got {p['alpha']}")
        elif self.family == "bpf_bell":
            if d != 2:
                raise ValueError("bpf_bell is defined for local_dim 2")
            if not (0.0 <= p["p"] <= 1.0 and 0.0 <= p["q"] <= 1.0):
                raise ValueError("bpf_bell p, q must be in [0, 1]")
        elif self.family == "ad_bell":
            if d != 2:
                raise ValueError("ad_bell is defined for local_dim 2")
            if not 0.0 <= p["gamma"] <= 1.0:
                raise ValueError(f"ad_bell gamma must be in [0, 1], got {p['gamma']}")

    @property
    def n_per_party(self) -> int:
        return self.local_dim.bit_length() - 1


def _phi_plus_projector(d: int) -> np.ndarray:
    v = np.zeros(d * d, dtype=np.complex128)
    v[np.arange(d) * d + np.arange(d)] = 1.0 / math.sqrt(d)
    return np.outer(v, v.conj())


def _flip_operator(d: int) -> np.ndarray:
    f = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


_PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_I2 = np.eye(2, dtype=np.complex128)

# Local unitary mapping the 2x2 Werner family onto the isotropic family:
# (I (x) Y) sends the singlet to |Phi+> up to phase, so conjugating by it
# maps werner2(alpha) exactly onto isotropic(p=(1-2*alpha)/3).
WERNER_TO_ISOTROPIC = np.kron(_I2, _PAULI_Y)


def build_family(f: StateFamily) -> DensityMatrix:
    """Construct the named density matrix on 2 * n_per_party qubits."""
    d = f.local_dim
    n_qubits = 2 * f.n_per_party
    phi = _phi_plus_projector(d)
    if f.family == "isotropic":
        p = f.params["p"]
        mat = p * phi + (1.0 - p) * np.eye(d * d) / (d * d)
    elif f.family == "s_state":
        p = f.params["p"]
        zero = np.zeros((d * d, d * d), dtype=np.complex128)
        zero[0, 0] = 1.0
        mat = p * phi + (1.0 - p) * zero
    elif f.family == "werner2":
        alpha = f.params["alpha"]
        mat = ((d - alpha) * np.eye(d * d) + (d * alpha - 1.0) * _flip_operator(d)) / (
            d**3 - d
        )
    elif f.family == "bpf_bell":
        p, q = f.params["p"], f.params["q"]
        z = np.kron(_PAULI_Z, _I2)
        x = np.kron(_PAULI_X, _I2)
        rho1 = q * phi + (1.0 - q) * (z @ phi @ z)
        mat = p * rho1 + (1.0 - p) * (x @ rho1 @ x)
    else:  # ad_bell
        gamma = f.params["gamma"]
        e0 = np.array([[1, 0], [0, math.sqrt(1.0 - gamma)]], dtype=np.complex128)
        e1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=np.complex128)
        k0, k1 = np.kron(e0, _I2), np.kron(e1, _I2)
        mat = k0 @ phi @ k0.conj().T + k1 @ phi @ k1.conj().T
    return DensityMatrix(n_qubits, mat)


def fef_closed_form(f: StateFamily) -> float:
    """Closed-form fully entangled fraction of a supported family.

    For isotropic states with p < 0 the overlap term is minimized rather than
    maximized (a traceless local unitary), giving (1-p)/d^2; for p >= 0 the
    usual p + (1-p)/d^2 applies.  werner2 maps onto isotropic with
    p = (1-2*alpha)/3 under the local unitary ``WERNER_TO_ISOTROPIC``.

    bpf_bell is Bell diagonal with weights (pq, p(1-q), (1-p)q, (1-p)(1-q)),
    and in the magic basis the maximal overlap of a Bell-diagonal state with
    any maximally entangled state is its largest Bell weight, so the value is
    max(p, 1-p) * max(q, 1-q).  (The brute-force sweep confirms this family
    by family; detection still flags exactly the entangled members, which are
    those with a Bell weight above 1/2.)
    """
    d = f.local_dim
    if f.family == "isotropic":
        p = f.params["p"]
        return p + (1.0 - p) / (d * d) if p >= 0 else (1.0 - p) / (d * d)
    if f.family == "s_state":
        p = f.params["p"]
        return p + (1.0 - p) / d
    if f.family == "werner2":
        alpha = f.params["alpha"]
        return fef_closed_form(StateFamily("isotropic", {"p": (1.0 - 2.0 * alpha) / 3.0}, 2))
    if f.family == "bpf_bell":
        p, q = f.params["p"], f.params["q"]
        return max(p, 1.0 - p) * max(q, 1.0 - q)
    gamma = f.params["gamma"]
    return (2.0 + 2.0 * math.sqrt(1.0 - gamma) - gamma) / 4.0


# ---------------------------------------------------------------------------
# Brute-force fully entangled fraction, two qubits
# ---------------------------------------------------------------------------


def _euler_vectors(z1: np.ndarray, y: np.ndarray, z2: np.ndarray) -> np.ndarray:
    """Flattened (U (x) I)|Phi+> vectors for U = Rz(z1) Ry(y) Rz(z2).

    In the most-significant-A index convention (U (x) I)|Phi+> is just the
    row-major flattening of U divided by sqrt(2).
    """
    c, s = np.cos(y / 2.0), np.sin(y / 2.0)
    half_sum = (z1 + z2) / 2.0
    half_diff = (z1 - z2) / 2.0
    u00 = c * np.exp(-1j * half_sum)
    u01 = -s * np.exp(-1j * half_diff)
    u10 = s * np.exp(1j * half_diff)
    u11 = c * np.exp(1j * half_sum)
    return np.stack([u00, u01, u10, u11], axis=-1) / math.sqrt(2.0)


_grid_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _fef_grid(grid: int) -> tuple[np.ndarray, np.ndarray]:
    if grid not in _grid_cache:
        axis = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
        z1, y, z2 = np.meshgrid(axis, axis, axis, indexing="ij")
        angles = np.stack([z1.ravel(), y.ravel(), z2.ravel()], axis=1)
        vectors = _euler_vectors(angles[:, 0], angles[:, 1], angles[:, 2])
        _grid_cache[grid] = (angles, vectors)
    return _grid_cache[grid]


def _fef_point(rho: np.ndarray, angles: np.ndarray) -> float:
    v = _euler_vectors(angles[0:1], angles[1:2], angles[2:3])[0]
    return float(np.real(v.conj() @ rho @ v))


def _coordinate_peak(f, x: np.ndarray, i: int) -> None:
    """In-place single-coordinate update to the argmax of the exact sinusoid."""
    step = 2.0 * math.pi / 3.0
    x0 = x[i]
    c_at = f(x)
    x[i] = x0 + step
    c_plus = f(x)
    x[i] = x0 - step
    c_minus = f(x)
    a = (c_at + c_plus + c_minus) / 3.0
    u = c_at - a
    w = (c_minus - c_plus) / math.sqrt(3.0)
    if math.hypot(u, w) <= 1e-12:
        x[i] = x0
    else:
        x[i] = x0 - math.atan2(w, u)


def fef_brute_force_2q(rho: DensityMatrix, grid: int = 30) -> float:
    """Maximal overlap with the maximally entangled states, by exhaustion.

    A grid x grid x grid lattice over the three Euler angles of the
    party-A unitary is scanned, then the best point is polished by cyclic
    coordinate ascent (the overlap is an exact sinusoid in each angle) until
    the improvement per sweep drops below 1e-6.
    """
    if rho.n_qubits != 2:
        raise ValueError(f"expected a 2-qubit state, got {rho.n_qubits} qubits")
    angles, vectors = _fef_grid(grid)
    mat = rho.matrix
    values = np.einsum("ni,ij,nj->n", vectors.conj(), mat, vectors).real
    best = int(np.argmax(values))
    x = angles[best].copy()
    f = lambda a: _fef_point(mat, a)  # noqa: E731
    current = values[best]
    for _ in range(200):
        for i in range(3):
            _coordinate_peak(f, x, i)
        new = f(x)
        if new - current < 1e-6:
            current = max(current, new)
            break
        current = new
    return float(current)


def fef_verdict(fef: float, d: int) -> bool:
    """True when the fully entangled fraction certifies entanglement.

    The threshold is 1/d, boundary inclusive on the negative side: a state
    whose FEF is exactly 1/d is not flagged.
    """
    return fef > 1.0 / d


# ---------------------------------------------------------------------------
# Brute-force diagonalizing cost for noisy 2-qubit inputs
# ---------------------------------------------------------------------------


def _u3(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array(
        [
            [c * np.exp(-0.5j * (phi + lam)), -s * np.exp(-0.5j * (phi - lam))],
            [s * np.exp(0.5j * (phi - lam)), c * np.exp(0.5j * (phi + lam))],
        ]
    )


class BruteForceSchmidt(NamedTuple):
    cost: float
    coefficients: np.ndarray  # descending


def brute_force_schmidt_estimate_2q(
    rho: DensityMatrix, starts: int = 6, seed: int = 1234
) -> BruteForceSchmidt:
    """Maximize <00|(U (x) V) rho (U (x) V)^dag|00> over all six local angles.

    Nelder-Mead refinement from several seeded random starts (plus the
    identity), entirely on dense 4x4 algebra.  Returns the best cost and the
    Schmidt-coefficient readout sqrt(diag) of the rotated A marginal at the
    maximizer.
    """
    if rho.n_qubits != 2:
        raise ValueError(f"expected a 2-qubit state, got {rho.n_qubits} qubits")
    mat = rho.matrix

    def neg_cost(x: np.ndarray) -> float:
        w = np.kron(_u3(x[0], x[1], x[2]), _u3(x[3], x[4], x[5]))
        return -float(np.real(w[0] @ mat @ w[0].conj()))

    rng = np.random.default_rng(seed)
    candidates = [np.zeros(6)] + [rng.uniform(0, 2 * math.pi, 6) for _ in range(starts)]
    best_x, best_val = None, math.inf
    for x0 in candidates:
        res = minimize(
            neg_cost, x0, method="Nelder-Mead", options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 4000}
        )
        if res.fun < best_val:
            best_val, best_x = res.fun, res.x
    u = np.kron(_u3(best_x[0], best_x[1], best_x[2]), _u3(best_x[3], best_x[4], best_x[5]))
    rotated = u @ mat @ u.conj().T
    t = rotated.reshape(2, 2, 2, 2)
    diag_a = np.einsum("abcb->ac", t).diagonal().real.clip(min=0.0)
    coeffs = np.sort(np.sqrt(diag_a))[::-1]
    return BruteForceSchmidt(-best_val, coeffs)


# ---------------------------------------------------------------------------
# Separability criteria
# ---------------------------------------------------------------------------


def reduction_criterion(rho: DensityMatrix, part: Bipartition) -> float:
    """Minimum eigenvalue of I_A (x) rho_B - rho; negative means distillable."""
    if rho.n_qubits != part.n_qubits:
        raise ValueError("state size does not match the bipartition")
    da, db = part.dim_a, part.dim_b
    t = rho.matrix.reshape(da, db, da, db)
    rho_b = np.einsum("abad->bd", t)
    op = np.kron(np.eye(da), rho_b) - rho.matrix
    return float(np.linalg.eigvalsh(op)[0])


def ppt_criterion(rho: DensityMatrix, part: Bipartition) -> float:
    """Minimum eigenvalue of the partial transpose on party A."""
    if rho.n_qubits != part.n_qubits:
        raise ValueError("state size does not match the bipartition")
    da, db = part.dim_a, part.dim_b
    t = rho.matrix.reshape(da, db, da, db)
    pt = np.transpose(t, (2, 1, 0, 3)).reshape(da * db, da * db)
    return float(np.linalg.eigvalsh(pt)[0])

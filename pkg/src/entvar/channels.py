"""Single-qubit Kraus noise channels acting on density matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import DensityMatrix

_I2 = np.eye(2, dtype=np.complex128)
_PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True)
class KrausChannel:
    """A trace-preserving single-qubit channel given by its Kraus operators."""

    kraus: tuple[np.ndarray, ...]
    label: str
    level: float

    def __post_init__(self) -> None:
        total = sum(k.conj().T @ k for k in self.kraus)
        if not np.allclose(total, _I2, atol=1e-10):
            raise ValueError(f"Kraus operators of {self.label!r} do not sum to identity")


def amplitude_damping(p: float) -> KrausChannel:
    """Energy relaxation: |1> decays to |0> with probability p.

    p = 1 (complete damping) is allowed; the scan experiments stay below 1.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"noise level must be in [0, 1], got {p}")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=np.complex128)
    k1 = np.array([[0, np.sqrt(p)], [0, 0]], dtype=np.complex128)
    return KrausChannel((k0, k1), "ad", p)


def depolarizing(p: float) -> KrausChannel:
    """White noise: rho -> (1-p) rho + p I/2, in the standard Pauli Kraus form."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"noise level must be in [0, 1), got {p}")
    kraus = (
        np.sqrt(1 - 3 * p / 4) * _I2,
        np.sqrt(p / 4) * _PAULI_X,
        np.sqrt(p / 4) * _PAULI_Y,
        np.sqrt(p / 4) * _PAULI_Z,
    )
    return KrausChannel(kraus, "depolarizing", p)


def apply_channel(ch: KrausChannel, rho: DensityMatrix, qubit: int) -> DensityMatrix:
    """sum_k (K_k on target) rho (K_k^dagger on target)."""
    n = rho.n_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit index {qubit} out of range for {n} qubits")
    pre = 1 << qubit
    post = 1 << (n - qubit - 1)
    d = 2**n
    t = rho.matrix.reshape(pre, 2, post, pre, 2, post)
    out = np.zeros_like(t)
    for k in ch.kraus:
        tmp = np.einsum("ab,ibjkcl->iajkcl", k, t)
        out += np.einsum("icjkbl,ab->icjkal", tmp, k.conj())
    return DensityMatrix._wrap(n, out.reshape(d, d))

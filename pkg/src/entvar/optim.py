"""Classical optimizers for the variational loops.

Two maximizers are provided: ADAM ascent driven by parameter-shift gradients,
and a gradient-free sequential coordinate method that fits the exact sinusoid
``a + b*cos(theta_i - c)`` through three stencil points per coordinate and
jumps straight to its argmax.  Both are bit-reproducible for a fixed seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

_CONVERGED_WINDOW = 10  # consecutive small |delta cost| iterations before halting


@dataclass(frozen=True)
class OptimConfig:
    method: str = "ADAM"  # "ADAM" or "SMO"
    max_iters: int = 100
    learning_rate: float = 0.1
    adam_betas: tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    convergence_tol: float = 1e-6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.method not in ("ADAM", "SMO"):
            raise ValueError(f"method must be ADAM or SMO, got {self.method!r}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        b1, b2 = self.adam_betas
        if not (0 < b1 < 1 and 0 < b2 < 1):
            raise ValueError(f"adam_betas must lie in (0, 1), got {self.adam_betas}")


class TraceRecord(NamedTuple):
    iteration: int
    cost: float
    theta: np.ndarray


@dataclass(frozen=True)
class OptimTrace:
    """Per-iteration record of one optimizer run.

    ``records`` holds one entry per completed update step (an ADAM step or a
    full coordinate sweep); the starting point is kept separately so ascent
    checks against the initial cost remain possible.
    """

    initial_theta: np.ndarray
    initial_cost: float
    records: tuple[TraceRecord, ...]
    final_theta: np.ndarray
    final_cost: float
    halted_early: bool = False

    @property
    def costs(self) -> np.ndarray:
        return np.array([r.cost for r in self.records])

    def best(self) -> tuple[float, np.ndarray]:
        """Highest observed cost and the parameters that produced it."""
        best_cost, best_theta = self.initial_cost, self.initial_theta
        for r in self.records:
            if r.cost > best_cost:
                best_cost, best_theta = r.cost, r.theta
        return best_cost, best_theta

    def to_jsonl(self) -> str:
        lines = [
            json.dumps({"iteration": r.iteration, "cost": r.cost, "theta": r.theta.tolist()})
            for r in self.records
        ]
        return "\n".join(lines)


def random_init(n_params: int, seed: int) -> np.ndarray:
    """Uniform [0, 2pi) starting parameters."""
    return np.random.default_rng(seed).uniform(0.0, 2.0 * math.pi, n_params)


def param_shift_gradient(cost: Callable[[np.ndarray], float], theta) -> np.ndarray:
    """Exact gradient of a rotation-angle cost from +-pi/2 shifted evaluations.

    Valid because every ansatz parameter enters through exactly one rotation
    angle, which makes the cost an exact sinusoid in each coordinate.
    """
    theta = np.asarray(theta, dtype=float)
    grad = np.empty_like(theta)
    for i in range(theta.size):
        shifted = theta.copy()
        shifted[i] = theta[i] + math.pi / 2
        plus = cost(shifted)
        shifted[i] = theta[i] - math.pi / 2
        minus = cost(shifted)
        grad[i] = 0.5 * (plus - minus)
    return grad


def _finish(
    initial_theta: np.ndarray,
    initial_cost: float,
    records: list[TraceRecord],
    halted: bool,
) -> OptimTrace:
    if records:
        final_theta, final_cost = records[-1].theta, records[-1].cost
    else:
        final_theta, final_cost = initial_theta, initial_cost
    return OptimTrace(
        initial_theta=initial_theta,
        initial_cost=initial_cost,
        records=tuple(records),
        final_theta=final_theta,
        final_cost=final_cost,
        halted_early=halted,
    )


def adam_maximize(
    cost: Callable[[np.ndarray], float],
    theta0,
    cfg: OptimConfig,
    stop_when: Callable[[float], bool] | None = None,
) -> OptimTrace:
    """Standard ADAM ascent on ``cost`` using parameter-shift gradients.

    Halts at ``max_iters``, when |delta cost| stays below the convergence
    tolerance for 10 consecutive iterations, or as soon as ``stop_when``
    accepts an iterate's cost.
    """
    theta = np.asarray(theta0, dtype=float).copy()
    b1, b2 = cfg.adam_betas
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    initial_theta = theta.copy()
    prev = initial_cost = cost(theta)
    records: list[TraceRecord] = []
    streak = 0
    halted = False
    for t in range(1, cfg.max_iters + 1):
        g = param_shift_gradient(cost, theta)
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        m_hat = m / (1 - b1**t)
        v_hat = v / (1 - b2**t)
        theta = theta + cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)
        c = cost(theta)
        records.append(TraceRecord(t, c, theta.copy()))
        if stop_when is not None and stop_when(c):
            halted = True
            break
        streak = streak + 1 if abs(c - prev) < cfg.convergence_tol else 0
        prev = c
        if streak >= _CONVERGED_WINDOW:
            break
    return _finish(initial_theta, initial_cost, records, halted)


_STENCIL = 2.0 * math.pi / 3.0
_TWO_PI = 2.0 * math.pi


def sinusoid_peak(c_at: float, c_plus: float, c_minus: float, x0: float) -> float | None:
    """Argmax of a + b*cos(x - c) fitted through x0, x0 + 2pi/3, x0 - 2pi/3.

    Returns None when the fitted amplitude b is degenerate (constant cost).
    """
    a = (c_at + c_plus + c_minus) / 3.0
    u = c_at - a
    w = (c_minus - c_plus) / math.sqrt(3.0)
    if math.hypot(u, w) <= 1e-12:
        return None
    return (x0 - math.atan2(w, u)) % _TWO_PI


def smo_maximize(
    cost: Callable[[np.ndarray], float],
    theta0,
    cfg: OptimConfig,
    stop_when: Callable[[float], bool] | None = None,
) -> OptimTrace:
    """Sequential coordinate maximization via exact single-angle sinusoid fits.

    One trace iteration is one full sweep over all coordinates.  Degenerate
    coordinates (fitted amplitude ~ 0) are left unchanged.
    """
    theta = np.asarray(theta0, dtype=float).copy()
    initial_theta = theta.copy()
    prev = initial_cost = cost(theta)
    records: list[TraceRecord] = []
    streak = 0
    halted = False
    for sweep in range(1, cfg.max_iters + 1):
        for i in range(theta.size):
            c_at = cost(theta)
            probe = theta.copy()
            probe[i] = theta[i] + _STENCIL
            c_plus = cost(probe)
            probe[i] = theta[i] - _STENCIL
            c_minus = cost(probe)
            peak = sinusoid_peak(c_at, c_plus, c_minus, theta[i])
            if peak is not None:
                theta[i] = peak
        c = cost(theta)
        records.append(TraceRecord(sweep, c, theta.copy()))
        if stop_when is not None and stop_when(c):
            halted = True
            break
        streak = streak + 1 if abs(c - prev) < cfg.convergence_tol else 0
        prev = c
        if streak >= _CONVERGED_WINDOW:
            break
    return _finish(initial_theta, initial_cost, records, halted)


def maximize(
    cost: Callable[[np.ndarray], float],
    theta0,
    cfg: OptimConfig,
    stop_when: Callable[[float], bool] | None = None,
) -> OptimTrace:
    """Dispatch on ``cfg.method``."""
    if cfg.method == "ADAM":
        return adam_maximize(cost, theta0, cfg, stop_when)
    return smo_maximize(cost, theta0, cfg, stop_when)

"""Desk-scale experiment drivers and their machine-readable records.

Each runner executes one study (depth scan, noise scan or rank scan) from a
validated ExperimentConfig and returns a RunRecord whose JSON serialization
is byte-identical for identical (config, seed).  Per-repetition seeds derive
deterministically from the master seed, so repetitions may run in any order.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import oracle
from .algorithms import (
    AnsatzConfig,
    _reduced_a,
    estimate_log_negativity,
    schmidt_cost_spec,
    schmidt_decompose,
)
from .channels import amplitude_damping, apply_channel, depolarizing
from .circuits import benchmark_two_qubit_state, uniform_schmidt_state
from .cost import error_metric, readout_schmidt_coefficients, transformed_state
from .optim import OptimConfig
from .states import Bipartition, StateVector, random_pure_state

MAX_TOTAL_QUBITS = 16

EXPERIMENTS = ("schmidt", "logneg", "detect", "oracle", "depth-scan", "noise-scan", "rank-scan")


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


class ResourceLimitError(RuntimeError):
    """Configuration exceeds the simulator's qubit budget (CLI exit code 3)."""


@dataclass
class ExperimentConfig:
    experiment: str
    qubits: int = 1                 # per party
    depth: int = 1                  # ansatz layers for single-depth runs
    depths: tuple[int, ...] = (1, 8)  # depth-scan grid
    optimizer: str = "ADAM"
    iters: int = 100
    learning_rate: float = 0.1
    shots: int | None = None
    noise: str = "none"
    noise_levels: tuple[float, ...] = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    reps: int = 5
    seed: int = 0
    out: str | None = None

    def __post_init__(self) -> None:
        self.depths = tuple(int(d) for d in self.depths)
        self.noise_levels = tuple(float(p) for p in self.noise_levels)
        self.optimizer = self.optimizer.upper()

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.qubits < 1:
            raise ConfigError("qubits per party must be >= 1")
        if 2 * self.qubits > MAX_TOTAL_QUBITS:
            raise ResourceLimitError(
                f"{2 * self.qubits} total qubits exceeds the limit of {MAX_TOTAL_QUBITS}"
            )
        if self.optimizer not in ("ADAM", "SMO"):
            raise ConfigError(f"optimizer must be adam or smo, got {self.optimizer!r}")
        if self.iters < 1:
            raise ConfigError("iters must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning rate must be positive")
        if self.shots is not None and self.shots < 1:
            raise ConfigError("shots must be >= 1")
        if self.noise not in ("none", "ad", "depolarizing"):
            raise ConfigError(f"noise must be none, ad or depolarizing, got {self.noise!r}")
        if any(not 0.0 <= p < 1.0 for p in self.noise_levels):
            raise ConfigError("noise levels must lie in [0, 1)")
        if self.depth < 1 or any(d < 1 for d in self.depths):
            raise ConfigError("ansatz depths must be >= 1")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        if self.experiment == "depth-scan" and self.qubits > 5:
            raise ConfigError("depth-scan supports at most 5 qubits per party")
        if self.experiment == "noise-scan" and self.qubits != 1:
            raise ConfigError("noise-scan is defined for 1 qubit per party")
        if self.experiment == "rank-scan" and self.qubits != 3:
            raise ConfigError("rank-scan is defined for 3 qubits per party")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["depths"] = list(self.depths)
        d["noise_levels"] = list(self.noise_levels)
        return d

    def snapshot(self) -> dict:
        """Provenance copy embedded in records; drops the output path so the
        serialized record is byte-identical wherever it is written."""
        d = self.to_dict()
        d["out"] = None
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class RunRecord:
    """Config snapshot, per-repetition results and summary statistics.

    ``duration_s`` is kept for logging but excluded from ``to_json`` so the
    serialized record is byte-identical across runs of the same config.
    """

    config: dict
    results: list[dict]
    summary: dict
    duration_s: float = field(default=0.0, compare=False)

    def to_json(self) -> str:
        payload = {"config": self.config, "results": self.results, "summary": self.summary}
        return json.dumps(_jsonable(payload), sort_keys=True, indent=2)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _rep_seed(master: int, *indices: int) -> int:
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFF, *[int(i) for i in indices]])
    return int(ss.generate_state(1)[0])


def _stats(values: list[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    return {
        "median": float(np.median(arr)),
        "min": float(arr.min()),
        "max": float(arr.max()),
        "std": float(arr.std()),
    }


def _optim_cfg(cfg: ExperimentConfig, seed: int) -> OptimConfig:
    return OptimConfig(
        method=cfg.optimizer,
        max_iters=cfg.iters,
        learning_rate=cfg.learning_rate,
        seed=seed,
    )


def run_depth_scan(cfg: ExperimentConfig) -> RunRecord:
    """Schmidt decomposition of Haar-random states at several ansatz depths.

    Each repetition draws one random pure state and decomposes it at every
    depth in the grid, recording the coefficient error against the exact SVD
    at every iteration of the trace.
    """
    cfg.validate()
    start = time.monotonic()
    part = Bipartition.natural(cfg.qubits)
    results: list[dict] = []
    for rep in range(cfg.reps):
        state_seed = _rep_seed(cfg.seed, 9000, rep)
        psi = random_pure_state(part.n_qubits, np.random.default_rng(state_seed))
        actual = oracle.exact_schmidt(psi, part).coefficients
        for depth in cfg.depths:
            acfg = AnsatzConfig(depth=depth)
            run_seed = _rep_seed(cfg.seed, rep, depth)
            res = schmidt_decompose(psi, part, acfg, _optim_cfg(cfg, run_seed))
            yerrs = _iteration_errors(psi, part, acfg, res, actual, run_seed)
            results.append(
                {
                    "depth": depth,
                    "rep": rep,
                    "seed": run_seed,
                    "state_seed": state_seed,
                    "final_error": res.error_vs_oracle,
                    "final_cost": res.trace.best()[0],
                    "errors": yerrs,
                }
            )
    summary = {
        "per_depth": {
            str(d): _stats([r["final_error"] for r in results if r["depth"] == d])
            for d in cfg.depths
        }
    }
    return RunRecord(cfg.snapshot(), results, summary, time.monotonic() - start)


def _iteration_errors(
    psi: StateVector,
    part: Bipartition,
    acfg: AnsatzConfig,
    res,
    actual: np.ndarray,
    seed: int,
) -> list[float]:
    spec = schmidt_cost_spec(psi, part, acfg, seed=seed)
    errors = []
    for record in res.trace.records:
        rho_a = _reduced_a(transformed_state(spec, record.theta), part)
        readout = readout_schmidt_coefficients(rho_a)
        errors.append(error_metric(readout.sorted_desc, actual))
    return errors


def run_noise_scan(cfg: ExperimentConfig) -> RunRecord:
    """Schmidt coefficients of the noisy benchmark state across noise levels.

    Both channels are always scanned.  Per point the decomposition restarts
    ``reps`` times (fresh seeds) and the best-cost restart is reported, along
    with an independent brute-force maximization over the six local angles.
    """
    cfg.validate()
    start = time.monotonic()
    part = Bipartition.natural(1)
    base = benchmark_two_qubit_state()
    noiseless = oracle.exact_schmidt(base, part).coefficients
    acfg = AnsatzConfig(depth=cfg.depth)
    results: list[dict] = []
    for ch_idx, (name, maker) in enumerate((("ad", amplitude_damping), ("depolarizing", depolarizing))):
        for lv_idx, level in enumerate(cfg.noise_levels):
            channel = maker(level)
            rho = base.density()
            for qubit in range(part.n_qubits):
                rho = apply_channel(channel, rho, qubit)
            best = None
            for rep in range(cfg.reps):
                run_seed = _rep_seed(cfg.seed, ch_idx, lv_idx, rep)
                res = schmidt_decompose(rho, part, acfg, _optim_cfg(cfg, run_seed), shots=cfg.shots)
                if best is None or res.trace.best()[0] > best.trace.best()[0]:
                    best = res
            ref = oracle.brute_force_schmidt_estimate_2q(rho)
            est = best.coefficients
            results.append(
                {
                    "channel": name,
                    "level": level,
                    "coefficients": est,
                    "cost": best.trace.best()[0],
                    "oracle_coefficients": ref.coefficients,
                    "oracle_cost": ref.cost,
                    "dev_from_noiseless": float(np.max(np.abs(est - noiseless))),
                    "dev_from_oracle": float(np.max(np.abs(est - ref.coefficients))),
                }
            )
    summary = {
        "noiseless_coefficients": noiseless,
        "max_dev_from_oracle": max(r["dev_from_oracle"] for r in results),
        "per_channel_max_dev_from_noiseless": {
            name: max(r["dev_from_noiseless"] for r in results if r["channel"] == name)
            for name in ("ad", "depolarizing")
        },
    }
    return RunRecord(cfg.snapshot(), results, summary, time.monotonic() - start)


def run_rank_scan(cfg: ExperimentConfig) -> RunRecord:
    """Log-negativity estimates for uniform-coefficient states of rank 1..8.

    Every rank runs ``reps`` repetitions in exact mode and, when ``shots`` is
    set (1024 by default in the CLI), the same count of sampled repetitions.
    """
    cfg.validate()
    start = time.monotonic()
    part = Bipartition.natural(3)
    acfg = AnsatzConfig(depth=cfg.depth)
    modes: list[tuple[str, int | None]] = [("exact", None)]
    if cfg.shots is not None:
        modes.append(("shots", cfg.shots))
    results: list[dict] = []
    for r in range(1, 9):
        psi = uniform_schmidt_state(3, r)
        theory = float(np.log2(r))
        for mode_idx, (mode, shots) in enumerate(modes):
            for rep in range(cfg.reps):
                run_seed = _rep_seed(cfg.seed, r, mode_idx, rep)
                value = estimate_log_negativity(
                    psi, part, acfg, _optim_cfg(cfg, run_seed), shots=shots
                )
                results.append(
                    {"rank": r, "mode": mode, "rep": rep, "seed": run_seed,
                     "value": value, "theory": theory}
                )
    summary = {"per_rank": {}}
    for r in range(1, 9):
        entry = {"theory": float(np.log2(r))}
        for mode, _ in modes:
            vals = [x["value"] for x in results if x["rank"] == r and x["mode"] == mode]
            entry[mode] = _stats(vals)
            entry[f"{mode}_abs_err_of_median"] = float(abs(np.median(vals) - np.log2(r)))
        summary["per_rank"][str(r)] = entry
    return RunRecord(cfg.snapshot(), results, summary, time.monotonic() - start)


def run_experiment(cfg: ExperimentConfig) -> RunRecord:
    cfg.validate()
    if cfg.experiment == "depth-scan":
        return run_depth_scan(cfg)
    if cfg.experiment == "noise-scan":
        return run_noise_scan(cfg)
    if cfg.experiment == "rank-scan":
        return run_rank_scan(cfg)
    raise ConfigError(f"{cfg.experiment!r} is not a scan experiment")


# ---------------------------------------------------------------------------
# Delimited series output
# ---------------------------------------------------------------------------


def record_to_csv(record: RunRecord) -> str:
    """Flatten the per-repetition results into one delimited series."""
    experiment = record.config["experiment"]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    if experiment == "depth-scan":
        writer.writerow(["depth", "rep", "iteration", "error"])
        for r in record.results:
            for it, err in enumerate(r["errors"], start=1):
                writer.writerow([r["depth"], r["rep"], it, repr(float(err))])
    elif experiment == "noise-scan":
        writer.writerow(
            ["channel", "level", "c1_est", "c2_est", "c1_oracle", "c2_oracle", "c1_ref", "c2_ref"]
        )
        ref = record.summary["noiseless_coefficients"]
        for r in record.results:
            est, orc = r["coefficients"], r["oracle_coefficients"]
            writer.writerow(
                [r["channel"], r["level"]]
                + [repr(float(v)) for v in (est[0], est[1], orc[0], orc[1], ref[0], ref[1])]
            )
    elif experiment == "rank-scan":
        writer.writerow(["rank", "mode", "rep", "value", "theory"])
        for r in record.results:
            writer.writerow(
                [r["rank"], r["mode"], r["rep"], repr(float(r["value"])), repr(float(r["theory"]))]
            )
    else:
        raise ConfigError(f"no delimited layout for experiment {experiment!r}")
    return out.getvalue()

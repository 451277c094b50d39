"""Command-line entry point.

Subcommands: ``schmidt``, ``logneg``, ``detect``, ``oracle`` run a single
algorithm; ``experiment {depth-scan,noise-scan,rank-scan}`` runs a desk-scale
study and writes record.json, series.csv and a rendered PNG figure next to
each other.  All outputs are deterministic for a fixed (config, seed).

Exit codes: 0 success, 2 invalid configuration, 3 resource guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import oracle
from .algorithms import (
    AnsatzConfig,
    detect_entanglement,
    estimate_log_negativity,
    schmidt_decompose,
)
from .channels import amplitude_damping, apply_channel, depolarizing
from .circuits import benchmark_two_qubit_state, uniform_schmidt_state
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ResourceLimitError,
    MAX_TOTAL_QUBITS,
    record_to_csv,
    run_experiment,
)
from .optim import OptimConfig
from .states import Bipartition, DensityMatrix, StateVector, random_pure_state

_EXPERIMENT_DEFAULTS = {
    "depth-scan": {"qubits": 4, "optimizer": "ADAM", "iters": 60, "reps": 5, "depths": (1, 8)},
    "noise-scan": {"qubits": 1, "optimizer": "SMO", "iters": 100, "reps": 3},
    "rank-scan": {"qubits": 3, "optimizer": "SMO", "iters": 40, "reps": 10,
                  "depth": 5, "shots": 1024},
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with defaults (flags override it)")
    p.add_argument("--qubits", type=int, help="qubits per party")
    p.add_argument("--depth", type=int, help="ansatz layers")
    p.add_argument("--optimizer", choices=["adam", "smo"], help="classical optimizer")
    p.add_argument("--iters", type=int, help="max optimizer iterations/sweeps")
    p.add_argument("--lr", type=float, dest="learning_rate", help="ADAM learning rate")
    p.add_argument("--shots", type=int, help="sample instead of exact expectations")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", help="output file (single runs) or directory (experiments)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entvar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schmidt", help="variational Schmidt decomposition")
    _add_common(p)
    p.add_argument("--state", choices=["random", "bench2q", "rank"], help="input state")
    p.add_argument("--rank", type=int, help="Schmidt rank for --state rank")
    p.add_argument("--noise", choices=["none", "ad", "depolarizing"], help="noise channel")
    p.add_argument("--noise-level", type=float, help="channel level in [0, 1)")

    p = sub.add_parser("logneg", help="variational log-negativity estimate")
    _add_common(p)
    p.add_argument("--state", choices=["random", "rank"], help="input state")
    p.add_argument("--rank", type=int, help="Schmidt rank for --state rank")

    p = sub.add_parser("detect", help="variational entanglement detection")
    _add_common(p)
    p.add_argument("--family", choices=list(oracle.FAMILIES), required=True)
    p.add_argument("--p", type=float, help="family parameter p")
    p.add_argument("--q", type=float, help="family parameter q")
    p.add_argument("--alpha", type=float, help="family parameter alpha")
    p.add_argument("--gamma", type=float, help="family parameter gamma")
    p.add_argument("--margin-sigmas", type=float, help="shot-mode detection margin")

    p = sub.add_parser("oracle", help="exact classical values, no optimization")
    _add_common(p)
    p.add_argument("--family", choices=list(oracle.FAMILIES))
    p.add_argument("--p", type=float, help="family parameter p")
    p.add_argument("--q", type=float, help="family parameter q")
    p.add_argument("--alpha", type=float, help="family parameter alpha")
    p.add_argument("--gamma", type=float, help="family parameter gamma")
    p.add_argument("--state", choices=["random", "bench2q", "rank"], help="pure-state input")
    p.add_argument("--rank", type=int, help="Schmidt rank for --state rank")
    p.add_argument("--grid", type=int, help="brute-force lattice size per angle")

    p = sub.add_parser("experiment", help="run a desk-scale study")
    p.add_argument("name", choices=["depth-scan", "noise-scan", "rank-scan"])
    _add_common(p)
    p.add_argument("--depths", help="comma-separated depth grid (depth-scan)")
    p.add_argument("--reps", type=int, help="repetitions")
    p.add_argument("--noise-levels", help="comma-separated levels (noise-scan)")

    return parser


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge CLI flags over config-file values over hard defaults."""
    merged = dict(defaults)
    merged.update({k: v for k, v in _load_config(args.config).items() if v is not None})
    for key, value in vars(args).items():
        if key in ("command", "config", "name") or value is None:
            continue
        merged[key] = value
    return merged


def _guard_qubits(qubits: int) -> None:
    if qubits < 1:
        raise ConfigError("qubits per party must be >= 1")
    if 2 * qubits > MAX_TOTAL_QUBITS:
        raise ResourceLimitError(
            f"{2 * qubits} total qubits exceeds the limit of {MAX_TOTAL_QUBITS}"
        )


def _build_input(opts: dict, part: Bipartition) -> StateVector:
    kind = opts.get("state", "random")
    if kind == "bench2q":
        if part.n_a != 1:
            raise ConfigError("bench2q is a 2-qubit state; use --qubits 1")
        return benchmark_two_qubit_state()
    if kind == "rank":
        rank = opts.get("rank")
        if rank is None:
            raise ConfigError("--state rank requires --rank")
        return uniform_schmidt_state(part.n_a, rank)
    seed = opts.get("seed", 0)
    return random_pure_state(part.n_qubits, np.random.default_rng(seed))


def _optim_cfg(opts: dict) -> OptimConfig:
    return OptimConfig(
        method=str(opts.get("optimizer", "adam")).upper(),
        max_iters=int(opts.get("iters", 100)),
        learning_rate=float(opts.get("learning_rate", 0.1)),
        seed=int(opts.get("seed", 0)),
    )


def _family(opts: dict) -> oracle.StateFamily:
    name = opts.get("family")
    if not name:
        raise ConfigError("a --family is required")
    params = {
        k: opts[k] for k in ("p", "q", "alpha", "gamma") if opts.get(k) is not None
    }
    try:
        return oracle.StateFamily(name, params, opts.get("local_dim", 2))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid family parameters: {exc}") from None


def _emit(payload: dict, opts: dict, trace=None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2)
    print(text)
    out = opts.get("out")
    if out:
        out_path = Path(out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text + "\n")
        if trace is not None and len(trace.records):
            out_path.with_suffix(".trace.jsonl").write_text(trace.to_jsonl() + "\n")
            from . import plotting

            plotting.save_trace_figure(trace.costs, out_path.with_suffix(".png"))


def _cmd_schmidt(args: argparse.Namespace) -> int:
    opts = _resolve(args, {"qubits": 1, "depth": 1, "optimizer": "smo", "state": "random"})
    qubits = int(opts["qubits"])
    _guard_qubits(qubits)
    part = Bipartition.natural(qubits)
    psi = _build_input(opts, part)
    noise = opts.get("noise", "none") or "none"
    state: StateVector | DensityMatrix = psi
    if noise != "none":
        level = float(opts.get("noise_level", 0.0))
        maker = amplitude_damping if noise == "ad" else depolarizing
        rho = psi.density()
        for q in range(part.n_qubits):
            rho = apply_channel(maker(level), rho, q)
        state = rho
    result = schmidt_decompose(
        state,
        part,
        AnsatzConfig(depth=int(opts["depth"])),
        _optim_cfg(opts),
        shots=opts.get("shots"),
    )
    payload = {
        "command": "schmidt",
        "qubits": qubits,
        "state": opts.get("state"),
        "noise": noise,
        "seed": opts.get("seed", 0),
        "coefficients": [float(c) for c in result.coefficients],
        "degenerate_indices": list(result.degenerate_indices),
        "error_vs_oracle": result.error_vs_oracle,
        "best_cost": result.trace.best()[0],
        "iterations": len(result.trace.records),
    }
    _emit(payload, opts, trace=result.trace)
    return 0


def _cmd_logneg(args: argparse.Namespace) -> int:
    opts = _resolve(args, {"qubits": 1, "depth": 5, "optimizer": "smo", "state": "random"})
    qubits = int(opts["qubits"])
    _guard_qubits(qubits)
    part = Bipartition.natural(qubits)
    psi = _build_input(opts, part)
    value = estimate_log_negativity(
        psi, part, AnsatzConfig(depth=int(opts["depth"])), _optim_cfg(opts), shots=opts.get("shots")
    )
    payload = {
        "command": "logneg",
        "qubits": qubits,
        "state": opts.get("state"),
        "seed": opts.get("seed", 0),
        "log_negativity": value,
        "oracle_log_negativity": oracle.exact_log_negativity(psi, part),
    }
    _emit(payload, opts)
    return 0


def _cmd_detect(args: argparse.Namespace) -> int:
    opts = _resolve(args, {"depth": 1, "optimizer": "smo", "margin_sigmas": 3.0})
    family = _family(opts)
    rho = oracle.build_family(family)
    part = Bipartition.natural(family.n_per_party)
    _guard_qubits(part.n_a)
    result = detect_entanglement(
        rho,
        part,
        AnsatzConfig(depth=int(opts["depth"])),
        _optim_cfg(opts),
        shots=opts.get("shots"),
        margin_sigmas=float(opts["margin_sigmas"]),
    )
    payload = {
        "command": "detect",
        "family": family.family,
        "params": dict(family.params),
        "seed": opts.get("seed", 0),
        "detected": result.detected,
        "fef_lower_bound": result.fef_lower_bound,
        "threshold": result.threshold,
        "halted_early": result.halted_early,
        "iterations": len(result.trace.records),
    }
    _emit(payload, opts, trace=result.trace)
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    opts = _resolve(args, {"qubits": 1, "grid": 30})
    if opts.get("family"):
        family = _family(opts)
        rho = oracle.build_family(family)
        part = Bipartition.natural(family.n_per_party)
        payload = {
            "command": "oracle",
            "family": family.family,
            "params": dict(family.params),
            "fef_closed_form": oracle.fef_closed_form(family),
            "reduction_min_eig": oracle.reduction_criterion(rho, part),
            "ppt_min_eig": oracle.ppt_criterion(rho, part),
        }
        if rho.n_qubits == 2:
            fef = oracle.fef_brute_force_2q(rho, grid=int(opts["grid"]))
            payload["fef_brute_force"] = fef
        payload["entangled_by_fef"] = oracle.fef_verdict(
            payload["fef_closed_form"], family.local_dim
        )
    else:
        qubits = int(opts["qubits"])
        _guard_qubits(qubits)
        part = Bipartition.natural(qubits)
        psi = _build_input(opts, part)
        triple = oracle.exact_schmidt(psi, part)
        payload = {
            "command": "oracle",
            "qubits": qubits,
            "state": opts.get("state", "random"),
            "seed": opts.get("seed", 0),
            "coefficients": [float(c) for c in triple.coefficients],
            "schmidt_rank": int(np.sum(triple.coefficients > 1e-10)),
            "log_negativity": oracle.exact_log_negativity(psi, part),
        }
    _emit(payload, opts)
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    opts = _resolve(args, _EXPERIMENT_DEFAULTS[args.name])
    if isinstance(opts.get("depths"), str):
        opts["depths"] = tuple(int(x) for x in opts["depths"].split(","))
    if isinstance(opts.get("noise_levels"), str):
        opts["noise_levels"] = tuple(float(x) for x in opts["noise_levels"].split(","))
    known = set(ExperimentConfig.__dataclass_fields__)
    cfg = ExperimentConfig(
        experiment=args.name, **{k: v for k, v in opts.items() if k in known and k != "experiment"}
    )
    record = run_experiment(cfg)
    print(f"{args.name}: {record.duration_s:.1f}s", file=sys.stderr)
    out_dir = Path(cfg.out) if cfg.out else Path("runs") / args.name
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "record.json").write_text(record.to_json() + "\n")
    (out_dir / "series.csv").write_text(record_to_csv(record))
    from . import plotting

    plotting.save_record_figure(record, out_dir / "figure.png")
    summary = json.loads(record.to_json())["summary"]
    print(json.dumps({"out": str(out_dir), "summary": summary}, sort_keys=True, indent=2))
    return 0


_DISPATCH = {
    "schmidt": _cmd_schmidt,
    "logneg": _cmd_logneg,
    "detect": _cmd_detect,
    "oracle": _cmd_oracle,
    "experiment": _cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

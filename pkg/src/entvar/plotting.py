"""Render experiment records to figure files (headless matplotlib)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams.update(
    {
        "figure.figsize": (5.2, 3.4),
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "savefig.dpi": 150,
        "savefig.bbox": "tight",
    }
)


def save_depth_scan_figure(record, path: str | Path) -> Path:
    """Coefficient error versus iteration, one band per ansatz depth."""
    fig, ax = plt.subplots()
    depths = sorted({r["depth"] for r in record.results})
    cmap = plt.get_cmap("viridis")
    for k, depth in enumerate(depths):
        runs = [r["errors"] for r in record.results if r["depth"] == depth]
        n = min(len(e) for e in runs)
        series = np.array([e[:n] for e in runs])
        its = np.arange(1, n + 1)
        color = cmap(k / max(len(depths) - 1, 1))
        ax.plot(its, np.median(series, axis=0), color=color, label=f"depth {depth}")
        ax.fill_between(its, series.min(axis=0), series.max(axis=0), color=color, alpha=0.2)
    ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("squared L2 coefficient error")
    ax.legend()
    return _save(fig, path)


def save_noise_scan_figure(record, path: str | Path) -> Path:
    """Estimated Schmidt coefficients against the noise level, per channel."""
    fig, ax = plt.subplots()
    ref = record.summary["noiseless_coefficients"]
    styles = {"ad": ("tab:blue", "o"), "depolarizing": ("tab:red", "^")}
    for channel, (color, marker) in styles.items():
        rows = sorted(
            (r for r in record.results if r["channel"] == channel), key=lambda r: r["level"]
        )
        levels = [r["level"] for r in rows]
        for k in range(2):
            ax.plot(
                levels,
                [r["coefficients"][k] for r in rows],
                marker=marker,
                color=color,
                linestyle="-" if k == 0 else "--",
                label=f"{channel} c{k + 1}",
            )
    for k in range(2):
        ax.axhline(float(ref[k]), color="black", linestyle=":", linewidth=1)
    ax.set_xlabel("noise level")
    ax.set_ylabel("Schmidt coefficient")
    ax.legend(ncol=2, fontsize=8)
    return _save(fig, path)


def save_rank_scan_figure(record, path: str | Path) -> Path:
    """Log-negativity medians per Schmidt rank against the exact curve."""
    fig, ax = plt.subplots()
    ranks = np.arange(1, 9)
    ax.plot(ranks, np.log2(ranks), color="black", linestyle=":", label="log2(rank)")
    markers = {"exact": ("tab:red", "o"), "shots": ("tab:green", "s")}
    for mode, (color, marker) in markers.items():
        medians, stds, present = [], [], []
        for r in ranks:
            vals = [x["value"] for x in record.results if x["rank"] == r and x["mode"] == mode]
            if vals:
                present.append(r)
                medians.append(np.median(vals))
                stds.append(np.std(vals))
        if present:
            ax.errorbar(
                present, medians, yerr=stds, color=color, marker=marker,
                linestyle="none", capsize=3, label=f"{mode} median",
            )
    ax.set_xlabel("Schmidt rank")
    ax.set_ylabel("log-negativity")
    ax.legend()
    return _save(fig, path)


def save_trace_figure(costs, path: str | Path, ylabel: str = "cost") -> Path:
    """Learning curve of a single optimizer run."""
    fig, ax = plt.subplots()
    costs = np.asarray(costs, dtype=float)
    ax.plot(np.arange(1, costs.size + 1), costs, color="tab:blue")
    ax.set_xlabel("iteration")
    ax.set_ylabel(ylabel)
    return _save(fig, path)


def save_record_figure(record, path: str | Path) -> Path:
    """Dispatch on the record's experiment kind."""
    kind = record.config["experiment"]
    if kind == "depth-scan":
        return save_depth_scan_figure(record, path)
    if kind == "noise-scan":
        return save_noise_scan_figure(record, path)
    if kind == "rank-scan":
        return save_rank_scan_figure(record, path)
    raise ValueError(f"no figure layout for experiment {kind!r}")


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return path

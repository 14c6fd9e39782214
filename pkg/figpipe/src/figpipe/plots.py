"""The three figure families, rendered deterministically from CSV tables.

Rendering twice from the same input produces byte-identical vector files:
the SVG hash salt is pinned and no timestamps are embedded.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .schema import SchemaError, load_curves, load_sweep, regret_column

plt.rcParams["svg.hashsalt"] = "figpipe"

PANEL_METRICS = (
    ("mean_cost", "time-avg total cost per slot"),
    ("mean_backlog", "time-avg total backlog (requests)"),
    (None, "time-avg regret"),  # regret column resolved per input
    ("backlog_variance", "cross-node backlog variance"),
)


def _save(fig, out_path, fmt):
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, format=fmt, metadata={"Date": None} if fmt == "svg" else None)
    plt.close(fig)
    return out_path


def _sweep_panels(table, axis_label, xscale):
    policies = sorted({r["policy"] for r in table.rows})
    reg_col = regret_column(table.rows)
    fig, axes = plt.subplots(2, 2, figsize=(9.5, 7.0))
    for ax, (metric, label) in zip(axes.ravel(), PANEL_METRICS):
        col = reg_col if metric is None else metric
        for policy in policies:
            rows = sorted((r for r in table.rows if r["policy"] == policy), key=lambda r: r["axis_value"])
            xs = [r["axis_value"] for r in rows]
            ys = [r[col] for r in rows]
            ax.plot(xs, ys, marker="o", markersize=3, label=policy)
        ax.set_xlabel(axis_label)
        ax.set_ylabel(label if metric is not None else f"{label} ({reg_col})")
        if xscale == "log":
            ax.set_xscale("log")
        elif xscale == "symlog":
            ax.set_xscale("symlog", linthresh=1.0)
        ax.grid(True, alpha=0.3)
    axes[0, 0].legend(fontsize=8)
    fig.tight_layout()
    return fig


def plot_v_sweep(csv_path, out_path, fmt: str = "svg"):
    """Four panels (cost, backlog, regret, variance) versus the tradeoff weight."""
    table = load_sweep(csv_path, expected_axis="V")
    fig = _sweep_panels(table, "tradeoff weight V", xscale="log")
    return _save(fig, out_path, fmt)


def plot_beta_sweep(csv_path, out_path, fmt: str = "svg"):
    """Four panels versus the exploration weight, including the beta = 0 point."""
    table = load_sweep(csv_path, expected_axis="beta")
    fig = _sweep_panels(table, "exploration weight beta", xscale="symlog")
    return _save(fig, out_path, fmt)


def plot_regret_over_time(csv_path, out_path, fmt: str = "svg"):
    """One panel per beta, one regret-over-time curve per V, log time axis."""
    table = load_curves(csv_path)
    reg_col = regret_column(table.rows)
    betas = sorted({r["beta"] for r in table.rows})
    v_values = sorted({r["v"] for r in table.rows})
    ncols = 2 if len(betas) > 1 else 1
    nrows = math.ceil(len(betas) / ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(5.0 * ncols, 3.6 * nrows), squeeze=False)
    flat = axes.ravel()
    for ax in flat[len(betas):]:
        ax.set_visible(False)
    for ax, beta in zip(flat, betas):
        for v in v_values:
            rows = [r for r in table.rows if r["beta"] == beta and r["v"] == v]
            if not rows:
                continue
            xs = [r["t"] for r in rows]
            ys = [r[reg_col] for r in rows]
            ax.plot(xs, ys, label=f"V={v:g}")
        ax.set_xscale("log")
        ax.set_xlabel("time slot")
        ax.set_ylabel(f"time-avg regret ({reg_col})")
        ax.set_title(f"beta = {beta:g}")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, out_path, fmt)

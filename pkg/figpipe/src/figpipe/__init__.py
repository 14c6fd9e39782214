"""Render benchmark figures from sweep/curve CSV files (read-only, deterministic)."""

from .plots import plot_beta_sweep, plot_regret_over_time, plot_v_sweep
from .schema import CURVE_COLUMNS, SWEEP_COLUMNS, SchemaError, load_curves, load_sweep

__all__ = [
    "CURVE_COLUMNS",
    "SWEEP_COLUMNS",
    "SchemaError",
    "load_curves",
    "load_sweep",
    "plot_beta_sweep",
    "plot_regret_over_time",
    "plot_v_sweep",
]

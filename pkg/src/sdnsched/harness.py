"""Seeded multi-run execution, parameter sweeps, and result emission.

Reproducibility contract: every random draw derives from
``SeedSequence((master_seed, run_index, STREAM_*))``. The environment stream
never sees the policy id, so every policy of a run faces the same world
(paired comparisons); the policy stream is additionally keyed by the policy's
ordinal. Episodes advance in fixed-size blocks whose boundaries do not depend
on parallelism, so outputs are byte-stable for a given config and seed.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import kernel, metrics
from .environment import Environment
from .estimators import estimate_table
from .model import (
    LOCAL,
    POLICY_IDS,
    ArmStats,
    QueueState,
    RunConfig,
    RunTrace,
    ValidationError,
)
from .policies import POLICY_VARIANTS
from .scenarios import Scenario

STREAM_ENV = 7
STREAM_POLICY = 11
BLOCK = 16384

SWEEP_COLUMNS = (
    "scenario_id",
    "policy",
    "axis_name",
    "axis_value",
    "run_count",
    "mean_cost",
    "mean_backlog",
    "backlog_variance",
    "regret_eq9",
    "regret_vs_gs",
    "wallclock_s",
)

CURVE_COLUMNS = (
    "scenario_id",
    "policy",
    "v",
    "beta",
    "run_count",
    "t",
    "regret_eq9",
    "regret_vs_gs",
)

AXES = ("V", "beta", "epsilon")


def rng_for(master_seed: int, run_index: int, stream: int, extra: tuple = ()) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence((int(master_seed), int(run_index), int(stream)) + tuple(extra))
    )


def run_episode(
    scenario: Scenario,
    config: RunConfig,
    run_index: int = 0,
    engine: str = "auto",
    record_choices: bool = False,
) -> RunTrace:
    """Execute one seeded episode of the configured policy and return its trace."""
    topo = scenario.topology
    horizon = config.horizon
    s, c = topo.switch_count, topo.controller_count

    env = Environment(
        topo,
        scenario.costs,
        scenario.arrivals,
        scenario.services,
        rng_for(config.seed, run_index, STREAM_ENV),
    )
    ordinal = POLICY_IDS.index(config.policy)
    pol_rng = rng_for(config.seed, run_index, STREAM_POLICY, (ordinal,))

    policy_code, est_code = kernel.POLICY_CODES[config.policy]
    epsilon = config.epsilon if config.policy == "lasac-eps" else 0.0
    floor_mag = -scenario.costs.reward_floor()
    cand_counts = np.array([len(cand) + 1 for cand in topo.candidates], dtype=np.int64)
    advance = kernel.resolve_engine(engine)

    q_s = np.zeros(s, dtype=np.int64)
    q_c = np.zeros(c, dtype=np.int64)
    plays = np.zeros((s, c + 1), dtype=np.int64)
    rsum = np.zeros((s, c + 1))
    rsq = np.zeros((s, c + 1))
    node_sums = np.zeros(s + c, dtype=np.int64)
    inflow = np.zeros(c, dtype=np.int64)

    out_cost = np.empty(horizon)
    out_reward = np.empty(horizon)
    out_backlog = np.empty(horizon, dtype=np.int64)
    out_arrivals = np.empty(horizon, dtype=np.int64)
    choices = np.empty((horizon, s), dtype=np.int16) if record_choices else None

    t0 = 0
    while t0 < horizon:
        n = min(BLOCK, horizon - t0)
        block = env.sample_block(t0, n)
        gate_u = pol_rng.random((n, s))
        choice_u = pol_rng.random((n, s))
        logt1 = np.array([math.log(t + 1.0) for t in range(t0, t0 + n)])
        block_choices = np.empty((n, s), dtype=np.int16)
        advance(
            t0,
            block.avail,
            block.arrivals,
            block.w_field,
            block.m_field,
            block.mu_s,
            block.mu_c,
            gate_u,
            choice_u,
            logt1,
            q_s,
            q_c,
            plays,
            rsum,
            rsq,
            policy_code,
            est_code,
            float(config.v_weight),
            float(config.beta),
            float(epsilon),
            float(floor_mag),
            cand_counts,
            out_cost[t0 : t0 + n],
            out_reward[t0 : t0 + n],
            out_backlog[t0 : t0 + n],
            block_choices,
            node_sums,
            inflow,
        )
        out_arrivals[t0 : t0 + n] = block.arrivals.sum(axis=1)
        if record_choices:
            choices[t0 : t0 + n] = np.where(block_choices == c, LOCAL, block_choices)
        t0 += n

    stats = ArmStats(topo, scenario.costs.reward_floor())
    stats.plays = plays
    stats.reward_sum = rsum
    stats.reward_sq_sum = rsq
    variant = POLICY_VARIANTS.get(config.policy, "ucb1-tuned")
    stats.last_estimate = estimate_table(stats, horizon, variant, config.beta)

    return RunTrace(
        policy=config.policy,
        horizon=horizon,
        slot_cost=out_cost,
        slot_reward=out_reward,
        slot_backlog=out_backlog,
        slot_arrivals=out_arrivals,
        node_backlog_avg=node_sums / horizon if horizon else node_sums.astype(np.float64),
        final_queues=QueueState(q_s, q_c),
        stats=stats,
        choices=choices,
    )


# -- sweeps --------------------------------------------------------------------


@dataclass
class SweepRow:
    scenario_id: str
    policy: str
    axis_name: str
    axis_value: float
    run_count: int
    mean_cost: float
    mean_backlog: float
    backlog_variance: float
    regret_eq9: float
    regret_vs_gs: float
    wallclock_s: float

    def as_tuple(self):
        return tuple(getattr(self, f.name) for f in fields(self))


@dataclass
class CurveRow:
    scenario_id: str
    policy: str
    v: float
    beta: float
    run_count: int
    t: int
    regret_eq9: float
    regret_vs_gs: float

    def as_tuple(self):
        return tuple(getattr(self, f.name) for f in fields(self))


def _with_axis(config: RunConfig, axis: str, value: float, policy: str) -> RunConfig:
    kw = config.to_dict()
    kw["policy"] = policy
    if axis == "V":
        kw["v_weight"] = value
    elif axis == "beta":
        kw["beta"] = value
    elif axis == "epsilon":
        kw["epsilon"] = value
    else:
        raise ValidationError(f"unknown sweep axis {axis!r}; expected one of {AXES}")
    return RunConfig.from_dict(kw)


def scenario_reward_rate(scenario: Scenario):
    """Best stationary reward rate for the scenario, or None when the oracle is out of reach."""
    try:
        res = metrics.optimal_reward_rate(
            scenario.topology,
            scenario.costs.mean_rewards(scenario.topology),
            scenario.arrivals.mean_rates(),
            scenario.services.switch_means,
            scenario.services.controller_means,
        )
    except metrics.OracleUnavailable:
        return None
    return res.reward_rate


def _run_cell(args):
    """One (axis value, run) task: the clairvoyant reference plus every policy."""
    scenario, base, axis, value, policies, run_index, engine, checkpoints = args
    gs_config = _with_axis(base, axis, value, "gs")
    t_start = time.perf_counter()
    gs_trace = run_episode(scenario, gs_config, run_index, engine=engine)
    gs_wall = time.perf_counter() - t_start
    gs_cum = gs_trace.cumulative_reward()[checkpoints - 1] if checkpoints is not None else None

    out = {}
    for policy in policies:
        if policy == "gs":
            trace, wall = gs_trace, gs_wall
        else:
            cfg = _with_axis(base, axis, value, policy)
            t_start = time.perf_counter()
            trace = run_episode(scenario, cfg, run_index, engine=engine)
            wall = time.perf_counter() - t_start
        stats = metrics.backlog_stats_from_means(trace.node_backlog_avg)
        cum = trace.cumulative_reward()[checkpoints - 1] if checkpoints is not None else None
        out[policy] = {
            "cost": trace.time_avg_cost(),
            "backlog": stats.time_avg_total,
            "variance": stats.cross_node_variance,
            "reward_rate": trace.time_avg_reward(),
            "gs_reward_rate": gs_trace.time_avg_reward(),
            "wallclock": wall,
            "cum_reward": cum,
            "gs_cum_reward": gs_cum,
        }
    return out


def _run_tasks(tasks, jobs):
    if jobs <= 1:
        return [_run_cell(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_cell, tasks, chunksize=1))


def sweep(
    scenario: Scenario,
    base: RunConfig,
    axis: str,
    values,
    policies,
    run_count: int,
    jobs: int = 1,
    engine: str = "auto",
) -> list[SweepRow]:
    """Mean metrics per (axis value, policy) over ``run_count`` derived seeds."""
    values = list(values)
    policies = list(policies)
    if not values:
        raise ValidationError("sweep needs at least one axis value")
    if not policies:
        raise ValidationError("sweep needs at least one policy")
    for p in policies:
        if p not in POLICY_IDS:
            raise ValidationError(f"unknown policy {p!r}")
    if axis not in AXES:
        raise ValidationError(f"unknown sweep axis {axis!r}; expected one of {AXES}")

    r_star = scenario_reward_rate(scenario)
    tasks = [
        (scenario, base, axis, value, tuple(policies), run, engine, None)
        for value in values
        for run in range(run_count)
    ]
    results = _run_tasks(tasks, jobs)

    rows = []
    for vi, value in enumerate(values):
        cells = results[vi * run_count : (vi + 1) * run_count]
        for policy in policies:
            per_run = [c[policy] for c in cells]
            reward = float(np.mean([r["reward_rate"] for r in per_run]))
            gs_reward = float(np.mean([r["gs_reward_rate"] for r in per_run]))
            rows.append(
                SweepRow(
                    scenario_id=scenario.scenario_id,
                    policy=policy,
                    axis_name=axis,
                    axis_value=float(value),
                    run_count=run_count,
                    mean_cost=float(np.mean([r["cost"] for r in per_run])),
                    mean_backlog=float(np.mean([r["backlog"] for r in per_run])),
                    backlog_variance=float(np.mean([r["variance"] for r in per_run])),
                    regret_eq9=(r_star - reward) if r_star is not None else float("nan"),
                    regret_vs_gs=gs_reward - reward,
                    wallclock_s=float(np.sum([r["wallclock"] for r in per_run])),
                )
            )
    return rows


def default_checkpoints(horizon: int, points: int = 48) -> np.ndarray:
    """Log-spaced slot counts at which cumulative regret is reported."""
    if horizon < 1:
        raise ValidationError("curves need a positive horizon")
    grid = np.logspace(0.0, math.log10(horizon), points)
    return np.unique(np.clip(np.round(grid).astype(np.int64), 1, horizon))


def regret_curves(
    scenario: Scenario,
    base: RunConfig,
    v_values,
    beta_values,
    policies,
    run_count: int,
    checkpoints: np.ndarray | None = None,
    jobs: int = 1,
    engine: str = "auto",
) -> list[CurveRow]:
    """Time-averaged regret over time for every (v, beta) pair in the grid."""
    v_values, beta_values = list(v_values), list(beta_values)
    if not v_values or not beta_values:
        raise ValidationError("curve grids need at least one v and one beta value")
    if checkpoints is None:
        checkpoints = default_checkpoints(base.horizon)
    r_star = scenario_reward_rate(scenario)

    tasks = []
    for beta in beta_values:
        cfg = RunConfig.from_dict({**base.to_dict(), "beta": beta})
        for v in v_values:
            for run in range(run_count):
                tasks.append((scenario, cfg, "V", v, tuple(policies), run, engine, checkpoints))
    results = _run_tasks(tasks, jobs)

    rows = []
    idx = 0
    for beta in beta_values:
        for v in v_values:
            cells = results[idx : idx + run_count]
            idx += run_count
            for policy in policies:
                cum = np.mean([c[policy]["cum_reward"] for c in cells], axis=0)
                gs_cum = np.mean([c[policy]["gs_cum_reward"] for c in cells], axis=0)
                for ci, t in enumerate(checkpoints):
                    rate = float(cum[ci] / t)
                    gs_rate = float(gs_cum[ci] / t)
                    rows.append(
                        CurveRow(
                            scenario_id=scenario.scenario_id,
                            policy=policy,
                            v=float(v),
                            beta=float(beta),
                            run_count=run_count,
                            t=int(t),
                            regret_eq9=(r_star - rate) if r_star is not None else float("nan"),
                            regret_vs_gs=gs_rate - rate,
                        )
                    )
    return rows


# -- emission --------------------------------------------------------------------

LONG_METRICS = ("mean_cost", "mean_backlog", "backlog_variance", "regret_eq9", "regret_vs_gs")


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def emit_results(rows, fmt: str, path, metadata: dict | None = None) -> None:
    """Write sweep rows as wide CSV, tidy CSV, or JSON with metadata.

    ``csv`` uses the documented wide schema (one row per policy and axis
    value); ``csv-long`` one row per (policy, axis value, metric); ``json``
    carries the rows plus config echo and seed provenance.
    """
    columns = CURVE_COLUMNS if rows and isinstance(rows[0], CurveRow) else SWEEP_COLUMNS
    if fmt == "csv":
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(_fmt(v) for v in row.as_tuple()))
        _write_text(path, "\n".join(lines) + "\n")
    elif fmt == "csv-long":
        lines = ["scenario_id,policy,axis_name,axis_value,run_count,metric,value"]
        for row in rows:
            for metric in LONG_METRICS:
                lines.append(
                    ",".join(
                        (
                            row.scenario_id,
                            row.policy,
                            row.axis_name,
                            _fmt(row.axis_value),
                            _fmt(row.run_count),
                            metric,
                            _fmt(getattr(row, metric)),
                        )
                    )
                )
        _write_text(path, "\n".join(lines) + "\n")
    elif fmt == "json":
        import json

        payload = {
            "columns": list(columns),
            "rows": [dict(zip(columns, row.as_tuple())) for row in rows],
            "metadata": metadata or {},
        }
        _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        raise ValidationError(f"unknown results format {fmt!r}")


def _write_text(path, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def package_version() -> str:
    try:
        from importlib.metadata import version

        return version("sdnsched")
    except Exception:  # pragma: no cover
        return "0.1.0"


def run_metadata(scenario: Scenario, base: RunConfig, extra: dict | None = None) -> dict:
    meta = {
        "version": package_version(),
        "scenario": scenario.to_dict(),
        "run": base.to_dict(),
        "seed_streams": {
            "derivation": "SeedSequence((master_seed, run_index, stream[, policy_ordinal]))",
            "env_stream": STREAM_ENV,
            "policy_stream": STREAM_POLICY,
            "policy_ordinals": {p: i for i, p in enumerate(POLICY_IDS)},
        },
    }
    if extra:
        meta.update(extra)
    return meta

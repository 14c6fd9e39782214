"""Reward-rate oracle, regret and backlog metrics, and closed-form bound evaluators.

The oracle computes the best long-run reward rate any stationary policy can
achieve while keeping the mean inflow of every queue within its mean service
rate. Conditioning on each switch's reachability pattern decomposes the
program: because switches choose independently and both the objective and the
per-node load constraints are linear in each switch's conditional choice
probabilities, optimizing over joint randomized super-arm choices equals
optimizing over per-switch choice distributions, one per reachability pattern.
That keeps the LP at ``sum_i 2^(#candidates_i)`` rows instead of the product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import simplex
from .model import LOCAL, Topology

MAX_ORACLE_COLUMNS = 20_000


class OracleUnavailable(Exception):
    """The instance is too large for the exact stationary oracle."""


class InfeasibleInstance(Exception):
    """No stationary policy keeps every queue's mean inflow within its service rate."""


class SeriesDiverges(ValueError):
    """The exploration series only converges for beta > sqrt(2)."""


def _patterns(candidates, probs):
    """All reachability patterns of one switch with their probabilities (zero-prob skipped)."""
    out = []
    n = len(candidates)
    for size in range(n + 1):
        for chosen in combinations(range(n), size):
            p = 1.0
            for idx in range(n):
                p *= probs[idx] if idx in chosen else 1.0 - probs[idx]
            if p > 0.0:
                out.append((tuple(candidates[idx] for idx in chosen), p))
    return out


def _choice_lp_columns(topology: Topology, max_columns: int):
    """Column layout of the stationary-choice LP: one var per (switch, pattern, target)."""
    cols = []  # (switch, pattern_index, target)
    rows = []  # (switch, pattern_prob)
    per_switch_patterns = []
    for i in range(topology.switch_count):
        pats = _patterns(topology.candidates[i], topology.access_prob[i])
        per_switch_patterns.append(pats)
        for z, (pattern, prob) in enumerate(pats):
            rows.append((i, prob))
            for j in pattern:
                cols.append((i, z, j))
            cols.append((i, z, LOCAL))
            if len(cols) > max_columns:
                raise OracleUnavailable(
                    f"stationary LP needs more than {max_columns} columns; "
                    "instance too large for the exact oracle"
                )
    return cols, rows, per_switch_patterns


def _stationary_lp(
    topology: Topology,
    arrival_means,
    switch_service_means,
    controller_service_means,
    objective_rewards,
    slack_variable: bool,
    max_columns: int,
):
    """Build and solve the stationary-choice LP; optionally maximize a common slack."""
    s, c = topology.switch_count, topology.controller_count
    lam = np.asarray(arrival_means, dtype=np.float64)
    mu = np.concatenate(
        [np.asarray(switch_service_means, float), np.asarray(controller_service_means, float)]
    )
    cols, rows, per_switch = _choice_lp_columns(topology, max_columns)
    n = len(cols) + (1 if slack_variable else 0)

    row_index = {}
    ri = 0
    for i in range(s):
        for z in range(len(per_switch[i])):
            row_index[(i, z)] = ri
            ri += 1
    a_eq = np.zeros((ri, n))
    b_eq = np.zeros(ri)
    for (i, prob), r in zip(rows, range(ri)):
        b_eq[r] = prob
    a_ub = np.zeros((s + c, n))
    b_ub = mu.copy()
    obj = np.zeros(n)

    for col, (i, z, target) in enumerate(cols):
        a_eq[row_index[(i, z)], col] = 1.0
        if target == LOCAL:
            a_ub[i, col] = lam[i]
            if objective_rewards is not None:
                obj[col] = objective_rewards[i, c]
        else:
            a_ub[s + target, col] = lam[i]
            if objective_rewards is not None:
                obj[col] = objective_rewards[i, target]
    if slack_variable:
        a_ub[:, -1] = 1.0
        obj[-1] = 1.0

    res = simplex.solve_lp(obj, a_eq=a_eq, b_eq=b_eq, a_ub=a_ub, b_ub=b_ub)
    if res.status == simplex.INFEASIBLE:
        raise InfeasibleInstance("no stationary policy satisfies the queue load constraints")
    if res.status != simplex.OPTIMAL:
        raise RuntimeError(f"unexpected LP status {res.status}")
    loads = a_ub[:, : len(cols)] @ res.x[: len(cols)]
    return res, cols, loads, mu


@dataclass
class OracleResult:
    """Best stationary reward rate and the node loads achieving it."""

    reward_rate: float
    switch_loads: np.ndarray
    controller_loads: np.ndarray
    min_slack: float


def optimal_reward_rate(
    topology: Topology,
    mean_rewards: np.ndarray,
    arrival_means,
    switch_service_means,
    controller_service_means,
    max_columns: int = MAX_ORACLE_COLUMNS,
) -> OracleResult:
    """Exact best stationary reward rate subject to per-node mean-load limits.

    ``mean_rewards`` is the (S, C+1) table of mean per-pull rewards (local arm
    in the last column). Raises :class:`OracleUnavailable` when the LP would
    exceed ``max_columns`` columns and :class:`InfeasibleInstance` when no
    stationary policy can respect every node's mean service rate.
    """
    res, cols, loads, mu = _stationary_lp(
        topology,
        arrival_means,
        switch_service_means,
        controller_service_means,
        np.asarray(mean_rewards, dtype=np.float64),
        slack_variable=False,
        max_columns=max_columns,
    )
    s = topology.switch_count
    return OracleResult(
        reward_rate=float(res.objective),
        switch_loads=loads[:s],
        controller_loads=loads[s:],
        min_slack=float(np.min(mu - loads)),
    )


def stability_slack(
    topology: Topology,
    arrival_means,
    switch_service_means,
    controller_service_means,
    max_columns: int = MAX_ORACLE_COLUMNS,
) -> float:
    """Largest common slack any stationary policy can leave on every node.

    This is the natural empirical stand-in for the feasibility margin in the
    backlog bound: the best achievable value of
    ``min_k (service rate of k - mean inflow of k)``.
    """
    res, cols, loads, mu = _stationary_lp(
        topology,
        arrival_means,
        switch_service_means,
        controller_service_means,
        objective_rewards=None,
        slack_variable=True,
        max_columns=max_columns,
    )
    return float(res.objective)


def time_avg_regret(reward_traces, reward_rate_opt: float) -> float:
    """Gap between the oracle rate and the achieved time-average compound reward.

    Accepts one per-slot reward trace or a sequence of them (one per run);
    multiple runs are averaged. The sign is not clamped: a lucky sample path
    may come out ahead of the oracle's expectation.
    """
    traces = reward_traces
    if np.ndim(traces) == 1 or (hasattr(traces, "ndim") and traces.ndim == 1):
        traces = [traces]
    means = [np.mean(np.asarray(t, dtype=np.float64)) for t in traces if len(t) > 0]
    if not means:
        raise ValueError("regret needs at least one non-empty reward trace")
    return float(reward_rate_opt - np.mean(means))


@dataclass
class BacklogStats:
    time_avg_total: float
    per_node_avg: np.ndarray  # switches first, then controllers
    cross_node_variance: float


def backlog_stats(switch_traces: np.ndarray, controller_traces: np.ndarray) -> BacklogStats:
    """Time-average backlog metrics from per-slot per-node traces (T, S) and (T, C)."""
    sw = np.asarray(switch_traces, dtype=np.float64)
    ct = np.asarray(controller_traces, dtype=np.float64)
    if sw.shape[0] != ct.shape[0]:
        raise ValueError("switch and controller traces must cover the same slots")
    if sw.shape[0] == 0:
        raise ValueError("backlog stats need at least one slot")
    per_node = np.concatenate([sw.mean(axis=0), ct.mean(axis=0)])
    return backlog_stats_from_means(per_node)


def backlog_stats_from_means(per_node_avg: np.ndarray) -> BacklogStats:
    per_node_avg = np.asarray(per_node_avg, dtype=np.float64)
    return BacklogStats(
        time_avg_total=float(per_node_avg.sum()),
        per_node_avg=per_node_avg,
        cross_node_variance=float(per_node_avg.var()),
    )


def drift_constant(switch_count: int, controller_count: int, mu_max: float, lambda_max: float) -> float:
    """Worst-case per-slot quadratic backlog drift from bounded arrivals and services."""
    return 0.5 * (switch_count + controller_count) * mu_max**2 + 0.5 * switch_count * lambda_max**2


def backlog_bound(
    drift_const: float,
    slack: float,
    v_weight: float,
    switch_count: int,
    lambda_max: float,
    w_max: float,
    m_max: float,
) -> float:
    """Guaranteed cap on the long-run time-average total backlog, affine in the weight."""
    if slack <= 0:
        raise ValueError("the feasibility slack must be positive")
    if v_weight < 0:
        raise ValueError("v_weight must be non-negative")
    return drift_const / slack + v_weight * switch_count * lambda_max * max(w_max, m_max)


def exploration_series(beta: float, tol: float = 1e-9, max_terms: int = 20_000_000) -> float:
    """Sum of t^(-beta^2 / 2) over t >= 1, to within ``tol``.

    Partial sums are extended until the integral bracket around the remaining
    tail is tighter than ``tol``; the bracket midpoint is added back in.
    """
    if beta <= math.sqrt(2.0):
        raise SeriesDiverges(f"series diverges for beta = {beta} (needs beta > sqrt(2))")
    s = beta * beta / 2.0
    total = 0.0
    n = 0
    block = 1024
    while n < max_terms:
        ts = np.arange(n + 1, n + block + 1, dtype=np.float64)
        total += float(np.sum(ts**-s))
        n += block
        upper = n ** (1.0 - s) / (s - 1.0)
        lower = (n + 1.0) ** (1.0 - s) / (s - 1.0)
        if (upper - lower) / 2.0 <= tol:
            return total + (upper + lower) / 2.0
        block = min(block * 2, 4_000_000)
    raise RuntimeError(f"series did not reach tol={tol} within {max_terms} terms")


def regret_bound(
    scale_const: float,
    v_weight: float,
    beta: float,
    horizon: float,
    switch_count: int,
    controller_count: int,
    w_max: float,
    m_max: float,
    series_tol: float = 1e-9,
) -> float:
    """Sublinear cap on the time-averaged regret of the learning scheduler.

    ``scale_const`` plays the role of the instance constant in the leading
    ``1/v_weight`` term; a natural choice is ``drift_constant(...) / lambda_max``.
    Raises :class:`SeriesDiverges` when beta is too small for the series term.
    """
    if v_weight <= 0:
        raise ValueError("v_weight must be positive")
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    g = exploration_series(beta, tol=series_tol)
    cost_cap = max(w_max, m_max)
    breadth = 2.0 * switch_count * (controller_count + 1)
    return scale_const / v_weight + breadth * (
        beta * math.sqrt(math.log(horizon) / horizon) + (g + 0.5) * cost_cap / horizon
    )

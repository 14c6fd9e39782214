"""Confidence-adjusted reward estimates for the learning schedulers.

All estimates are clamped to be non-positive (costs are non-negative, so no
arm's mean reward can exceed zero) and an unexplored arm scores zero, the most
optimistic admissible value. Indices computed in slot ``t`` use pull counts
accumulated through slot ``t - 1`` and the natural log of ``t + 1``.
"""

from __future__ import annotations

import math

import numpy as np

from .model import Arm, ArmStats, ValidationError


def record_reward(stats: ArmStats, arm: Arm, reward: float) -> None:
    """Fold the observed reward of a pulled arm into its running sums."""
    stats.record(arm, reward)


def ucb1_tuned_estimate(stats: ArmStats, arm: Arm, t: float, beta: float) -> float:
    """Variance-aware optimistic estimate of the arm's mean reward.

    The exploration width scales with ``beta`` and with an optimistic variance
    estimate (empirical variance plus its own confidence margin), capped at
    1/4. Returns 0 for a never-pulled arm.
    """
    h = stats.plays_of(arm)
    if h == 0:
        return 0.0
    log_term = math.log(t + 1.0)
    mean = stats.sample_mean(arm)
    var_opt = stats.sample_sq_mean(arm) - mean * mean + math.sqrt(2.0 * log_term / h)
    u = mean + beta * math.sqrt((log_term / h) * min(0.25, var_opt))
    return min(u, 0.0)


def ucb1_estimate(stats: ArmStats, arm: Arm, t: float) -> float:
    """Classic optimistic index with the exploration width scaled to the reward range."""
    h = stats.plays_of(arm)
    if h == 0:
        return 0.0
    scale = -stats.reward_floor
    u = stats.sample_mean(arm) + scale * math.sqrt(2.0 * math.log(t + 1.0) / h)
    return min(u, 0.0)


def moss_estimate(stats: ArmStats, arm: Arm, t: float) -> float:
    """Anytime minimax index; the horizon surrogate is the current slot count.

    ``k`` is the number of arms the switch chooses among. As with the classic
    index, the [0,1]-form exploration width is scaled back to the reward range.
    """
    h = stats.plays_of(arm)
    if h == 0:
        return 0.0
    k = stats.candidate_count(arm.switch)
    scale = -stats.reward_floor
    width = math.sqrt(max(0.0, math.log((t + 1.0) / (k * h))) / h)
    return min(stats.sample_mean(arm) + scale * width, 0.0)


def bernoulli_kl(q: float, p: float) -> float:
    """KL divergence between Bernoulli(q) and Bernoulli(p)."""
    eps = 1e-15
    q = min(max(q, eps), 1.0 - eps)
    p = min(max(p, eps), 1.0 - eps)
    return q * math.log(q / p) + (1.0 - q) * math.log((1.0 - q) / (1.0 - p))


def klucb_index01(q: float, h: int, threshold: float, tol: float = 1e-9) -> float:
    """Largest ``p`` in ``[q, 1]`` with ``h * kl(q, p) <= threshold`` (bisection)."""
    if threshold <= 0.0:
        return q
    lo, hi = q, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if h * bernoulli_kl(q, mid) <= threshold:
            lo = mid
        else:
            hi = mid
    return lo


def klucb_estimate(stats: ArmStats, arm: Arm, t: float) -> float:
    """KL-based optimistic index on rewards rescaled to [0, 1] and mapped back."""
    h = stats.plays_of(arm)
    if h == 0:
        return 0.0
    scale = -stats.reward_floor
    q = (stats.sample_mean(arm) - stats.reward_floor) / scale
    q = min(max(q, 0.0), 1.0)
    p = klucb_index01(q, h, math.log(t + 1.0))
    return min(stats.reward_floor + scale * p, 0.0)


def variant_estimate(stats: ArmStats, arm: Arm, t: float, variant: str, beta: float = 2.0) -> float:
    """Dispatch on the configured index family; ``beta`` only affects the tuned one."""
    if variant == "ucb1-tuned":
        return ucb1_tuned_estimate(stats, arm, t, beta)
    if variant == "ucb1":
        return ucb1_estimate(stats, arm, t)
    if variant == "moss":
        return moss_estimate(stats, arm, t)
    if variant == "klucb":
        return klucb_estimate(stats, arm, t)
    raise ValidationError(f"unknown estimator variant {variant!r}")


def epsilon_gate(epsilon: float, rng: np.random.Generator) -> bool:
    """True (explore) with probability ``epsilon``."""
    if not (0.0 <= epsilon <= 1.0):
        raise ValidationError("epsilon must lie in [0, 1]")
    return bool(rng.random() < epsilon)


def estimate_table(stats: ArmStats, t: float, variant: str, beta: float) -> np.ndarray:
    """(S, C+1) table of estimates for every potential arm (local in column C)."""
    topo = stats.topology
    out = np.zeros((topo.switch_count, topo.controller_count + 1))
    for i in range(topo.switch_count):
        out[i, topo.controller_count] = variant_estimate(stats, Arm.local(i), t, variant, beta)
        for j in topo.candidates[i]:
            out[i, j] = variant_estimate(stats, Arm(i, j), t, variant, beta)
    return out

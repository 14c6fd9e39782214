"""Shared domain types for the switch-controller scheduling simulator.

Conventions used across the package:

* switches are numbered ``0..S-1`` and controllers ``0..C-1``;
* the sentinel target ``LOCAL = -1`` means "process on the switch itself";
* per-request rewards are the negated per-request costs, so every reward
  is non-positive and bounded below by ``-max(w_max, m_max)``;
* slots are numbered ``0..T-1`` and every confidence index evaluated in
  slot ``t`` uses the natural log of ``t + 1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

LOCAL = -1

POLICY_IDS = (
    "lasac",
    "gs",
    "random",
    "jsq",
    "lasac-eps",
    "lasac-ucb1",
    "lasac-moss",
    "lasac-klucb",
)

VARIANT_IDS = ("ucb1-tuned", "ucb1", "moss", "klucb")


class ValidationError(ValueError):
    """A config or decision violates a structural invariant."""


class Arm(NamedTuple):
    """One switch-target link: ``target`` is a controller id or ``LOCAL``."""

    switch: int
    target: int

    @property
    def is_local(self) -> bool:
        return self.target == LOCAL

    @classmethod
    def local(cls, switch: int) -> "Arm":
        return cls(switch, LOCAL)


@dataclass(frozen=True)
class Topology:
    """Static system shape: candidate controller sets and their access probabilities.

    ``candidates[i]`` is the sorted tuple of controllers switch ``i`` may ever
    associate with; ``access_prob[i][n]`` is the per-slot probability that
    ``candidates[i][n]`` is reachable. Reachability is sampled independently
    per (switch, controller) pair and per slot. The local target is always
    reachable.
    """

    switch_count: int
    controller_count: int
    candidates: tuple[tuple[int, ...], ...]
    access_prob: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if self.switch_count < 1 or self.controller_count < 1:
            raise ValidationError("need at least one switch and one controller")
        if len(self.candidates) != self.switch_count:
            raise ValidationError("candidates must list every switch")
        if len(self.access_prob) != self.switch_count:
            raise ValidationError("access_prob must list every switch")
        for i, (cand, probs) in enumerate(zip(self.candidates, self.access_prob)):
            if len(cand) == 0:
                raise ValidationError(f"switch {i} has an empty candidate set")
            if len(set(cand)) != len(cand) or tuple(sorted(cand)) != tuple(cand):
                raise ValidationError(f"switch {i} candidates must be sorted and unique")
            if any(j < 0 or j >= self.controller_count for j in cand):
                raise ValidationError(f"switch {i} references an unknown controller")
            if len(probs) != len(cand):
                raise ValidationError(f"switch {i} access_prob misaligned with candidates")
            if any(not (0.0 <= p <= 1.0) for p in probs):
                raise ValidationError(f"switch {i} access probability outside [0, 1]")

    @property
    def node_count(self) -> int:
        return self.switch_count + self.controller_count

    def candidate_mask(self) -> np.ndarray:
        """Dense bool (S, C) mask of potential associations."""
        mask = np.zeros((self.switch_count, self.controller_count), dtype=bool)
        for i, cand in enumerate(self.candidates):
            mask[i, list(cand)] = True
        return mask

    def access_prob_dense(self) -> np.ndarray:
        """Dense (S, C) access probabilities, zero outside the candidate sets."""
        probs = np.zeros((self.switch_count, self.controller_count))
        for i, (cand, p) in enumerate(zip(self.candidates, self.access_prob)):
            probs[i, list(cand)] = p
        return probs

    def arms(self) -> list[Arm]:
        out = [Arm.local(i) for i in range(self.switch_count)]
        for i, cand in enumerate(self.candidates):
            out.extend(Arm(i, j) for j in cand)
        return out

    def validate_arm(self, arm: Arm) -> None:
        if not (0 <= arm.switch < self.switch_count):
            raise ValidationError(f"unknown switch {arm.switch}")
        if arm.target != LOCAL and arm.target not in self.candidates[arm.switch]:
            raise ValidationError(f"{arm} is not a potential association")

    def to_dict(self) -> dict:
        return {
            "switch_count": self.switch_count,
            "controller_count": self.controller_count,
            "candidates": [list(c) for c in self.candidates],
            "access_prob": [list(p) for p in self.access_prob],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Topology":
        return cls(
            switch_count=int(d["switch_count"]),
            controller_count=int(d["controller_count"]),
            candidates=tuple(tuple(int(j) for j in c) for c in d["candidates"]),
            access_prob=tuple(tuple(float(p) for p in c) for c in d["access_prob"]),
        )


@dataclass(frozen=True)
class AvailabilitySet:
    """Reachable controllers per switch for one slot (the local target is implicit)."""

    mask: np.ndarray  # bool (S, C)

    def controllers(self, switch: int) -> tuple[int, ...]:
        return tuple(int(j) for j in np.flatnonzero(self.mask[switch]))

    def validate(self, topology: Topology) -> None:
        if self.mask.shape != (topology.switch_count, topology.controller_count):
            raise ValidationError("availability mask has wrong shape")
        if np.any(self.mask & ~topology.candidate_mask()):
            raise ValidationError("availability includes a non-candidate pair")

    @classmethod
    def full(cls, topology: Topology) -> "AvailabilitySet":
        return cls(topology.candidate_mask())

    @classmethod
    def none(cls, topology: Topology) -> "AvailabilitySet":
        return cls(np.zeros((topology.switch_count, topology.controller_count), dtype=bool))


@dataclass(frozen=True)
class Decision:
    """Per-slot association choices: ``choices[i]`` is a controller id or ``LOCAL``.

    By construction each switch picks exactly one target; validation against
    an :class:`AvailabilitySet` additionally rejects unreachable controllers.
    """

    choices: np.ndarray  # int64 (S,)

    def __post_init__(self):
        object.__setattr__(self, "choices", np.asarray(self.choices, dtype=np.int64))

    def validate(self, topology: Topology, availability: AvailabilitySet) -> None:
        if self.choices.shape != (topology.switch_count,):
            raise ValidationError("decision has wrong shape")
        for i, k in enumerate(self.choices):
            if k == LOCAL:
                continue
            if not (0 <= k < topology.controller_count):
                raise ValidationError(f"switch {i} chose unknown target {k}")
            if not availability.mask[i, k]:
                raise ValidationError(f"switch {i} chose unreachable controller {k}")

    def arm(self, switch: int) -> Arm:
        return Arm(switch, int(self.choices[switch]))

    def to_matrix(self, topology: Topology) -> np.ndarray:
        """Binary (S, C+1) matrix; column ``C`` is the local target."""
        m = np.zeros((topology.switch_count, topology.controller_count + 1), dtype=np.int64)
        for i, k in enumerate(self.choices):
            m[i, topology.controller_count if k == LOCAL else k] = 1
        return m

    @classmethod
    def from_matrix(
        cls,
        matrix: np.ndarray,
        topology: Topology,
        availability: AvailabilitySet | None = None,
    ) -> "Decision":
        """Parse and validate a binary (S, C+1) choice matrix.

        Rejects any row that does not select exactly one target, any selection
        outside the switch's candidate set, and (when ``availability`` is
        given) any unreachable controller.
        """
        matrix = np.asarray(matrix)
        s, c = topology.switch_count, topology.controller_count
        if matrix.shape != (s, c + 1):
            raise ValidationError("choice matrix has wrong shape")
        if not np.isin(matrix, (0, 1)).all():
            raise ValidationError("choice matrix must be binary")
        if not np.all(matrix.sum(axis=1) == 1):
            raise ValidationError("each switch must select exactly one target")
        choices = np.full(s, LOCAL, dtype=np.int64)
        for i in range(s):
            k = int(np.flatnonzero(matrix[i])[0])
            if k < c:
                if k not in topology.candidates[i]:
                    raise ValidationError(f"switch {i} selected non-candidate controller {k}")
                choices[i] = k
        decision = cls(choices)
        if availability is not None:
            decision.validate(topology, availability)
        return decision


@dataclass
class QueueState:
    """Backlogs in whole requests, one entry per switch and per controller."""

    switches: np.ndarray  # int64 (S,)
    controllers: np.ndarray  # int64 (C,)

    def __post_init__(self):
        self.switches = np.asarray(self.switches, dtype=np.int64)
        self.controllers = np.asarray(self.controllers, dtype=np.int64)
        if np.any(self.switches < 0) or np.any(self.controllers < 0):
            raise ValidationError("queue backlogs must be non-negative")

    @classmethod
    def zeros(cls, topology: Topology) -> "QueueState":
        return cls(
            np.zeros(topology.switch_count, dtype=np.int64),
            np.zeros(topology.controller_count, dtype=np.int64),
        )

    def total(self) -> int:
        return int(self.switches.sum() + self.controllers.sum())

    def copy(self) -> "QueueState":
        return QueueState(self.switches.copy(), self.controllers.copy())

    def of(self, arm: Arm) -> int:
        return int(self.switches[arm.switch] if arm.is_local else self.controllers[arm.target])


@dataclass(frozen=True)
class CostModel:
    """Per-request cost distributions.

    Upload and local costs are sampled uniformly from a window of half-width
    ``half_width`` around the configured mean, clipped into ``[0, bound]``;
    ``half_width = 0`` makes them deterministic. ``true_mean_*`` report the
    means of the clipped windows, which the reward oracle and the bound
    evaluators use; keep windows inside the bounds if the configured means
    are meant to be exact.
    """

    mean_upload: tuple[tuple[float, ...], ...]  # aligned with Topology.candidates
    mean_local: tuple[float, ...]
    w_max: float
    m_max: float
    half_width: float = 0.0

    def __post_init__(self):
        if self.w_max <= 0 or self.m_max <= 0 or self.half_width < 0:
            raise ValidationError("cost bounds must be positive and half_width >= 0")
        for row in self.mean_upload:
            if any(not (0 < w <= self.w_max) for w in row):
                raise ValidationError("mean upload costs must lie in (0, w_max]")
        if any(not (0 < m <= self.m_max) for m in self.mean_local):
            raise ValidationError("mean local costs must lie in (0, m_max]")

    def upload_window(self, i: int, n: int) -> tuple[float, float]:
        w = self.mean_upload[i][n]
        return max(0.0, w - self.half_width), min(self.w_max, w + self.half_width)

    def local_window(self, i: int) -> tuple[float, float]:
        m = self.mean_local[i]
        return max(0.0, m - self.half_width), min(self.m_max, m + self.half_width)

    def true_mean_upload(self, i: int, n: int) -> float:
        lo, hi = self.upload_window(i, n)
        return 0.5 * (lo + hi)

    def true_mean_local(self, i: int) -> float:
        lo, hi = self.local_window(i)
        return 0.5 * (lo + hi)

    def reward_floor(self) -> float:
        """Lower bound on every per-request reward (negated cost)."""
        return -max(self.w_max, self.m_max)

    def mean_rewards(self, topology: Topology) -> np.ndarray:
        """(S, C+1) mean rewards; column ``C`` is the local target, NaN off-candidate."""
        s, c = topology.switch_count, topology.controller_count
        out = np.full((s, c + 1), np.nan)
        for i in range(s):
            out[i, c] = -self.true_mean_local(i)
            for n, j in enumerate(topology.candidates[i]):
                out[i, j] = -self.true_mean_upload(i, n)
        return out

    def to_dict(self) -> dict:
        return {
            "mean_upload": [list(r) for r in self.mean_upload],
            "mean_local": list(self.mean_local),
            "w_max": self.w_max,
            "m_max": self.m_max,
            "half_width": self.half_width,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CostModel":
        return cls(
            mean_upload=tuple(tuple(float(w) for w in r) for r in d["mean_upload"]),
            mean_local=tuple(float(m) for m in d["mean_local"]),
            w_max=float(d["w_max"]),
            m_max=float(d["m_max"]),
            half_width=float(d.get("half_width", 0.0)),
        )


@dataclass(frozen=True)
class ArrivalModel:
    """Per-switch request arrival process, hard-capped at ``lambda_max`` requests per slot.

    Kinds:

    * ``constant``: exactly ``rate[i]`` requests per slot (must be integer);
    * ``poisson``: ``min(Poisson(rate[i]), lambda_max)``;
    * ``bursty``: a two-state (low/high) Markov-modulated Poisson process with
      per-state rates and stay probabilities, again capped at ``lambda_max``.
    """

    kind: str
    lambda_max: int
    rate: tuple[float, ...] = ()
    rate_low: tuple[float, ...] = ()
    rate_high: tuple[float, ...] = ()
    stay_low: float = 0.9
    stay_high: float = 0.9

    def __post_init__(self):
        if self.kind not in ("constant", "poisson", "bursty"):
            raise ValidationError(f"unknown arrival kind {self.kind!r}")
        if self.lambda_max < 0:
            raise ValidationError("lambda_max must be non-negative")
        if self.kind in ("constant", "poisson"):
            if not self.rate:
                raise ValidationError("rate is required")
            if any(r < 0 for r in self.rate):
                raise ValidationError("rates must be non-negative")
            if self.kind == "constant" and any(r != int(r) for r in self.rate):
                raise ValidationError("constant arrivals must be integer")
        else:
            if not self.rate_low or not self.rate_high:
                raise ValidationError("bursty arrivals need rate_low and rate_high")
            if len(self.rate_low) != len(self.rate_high):
                raise ValidationError("bursty rates misaligned")
            if not (0 < self.stay_low <= 1 and 0 < self.stay_high <= 1):
                raise ValidationError("stay probabilities must lie in (0, 1]")

    @property
    def switch_count(self) -> int:
        return len(self.rate) if self.kind in ("constant", "poisson") else len(self.rate_low)

    def _clipped_poisson_mean(self, lam: float) -> float:
        if lam == 0:
            return 0.0
        # E[min(X, cap)] accumulated directly; the pmf underflows long before
        # the sum stops changing, so 16*cap terms are plenty.
        import math

        cap = self.lambda_max
        mean = 0.0
        pmf = math.exp(-lam)
        cdf = 0.0
        for k in range(cap):
            mean += k * pmf
            cdf += pmf
            pmf *= lam / (k + 1)
        return mean + cap * (1.0 - cdf)

    def high_state_prob(self) -> float:
        flip_low, flip_high = 1.0 - self.stay_low, 1.0 - self.stay_high
        if flip_low == 0 and flip_high == 0:
            return 0.5  # degenerate chain: stay wherever it starts; split the mass
        return flip_low / (flip_low + flip_high)

    def mean_rates(self) -> np.ndarray:
        """Exact long-run mean arrivals per slot, accounting for the cap."""
        if self.kind == "constant":
            return np.array([min(r, self.lambda_max) for r in self.rate])
        if self.kind == "poisson":
            return np.array([self._clipped_poisson_mean(r) for r in self.rate])
        pi_high = self.high_state_prob()
        return np.array(
            [
                (1 - pi_high) * self._clipped_poisson_mean(lo)
                + pi_high * self._clipped_poisson_mean(hi)
                for lo, hi in zip(self.rate_low, self.rate_high)
            ]
        )

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "lambda_max": self.lambda_max}
        if self.kind in ("constant", "poisson"):
            d["rate"] = list(self.rate)
        else:
            d.update(
                rate_low=list(self.rate_low),
                rate_high=list(self.rate_high),
                stay_low=self.stay_low,
                stay_high=self.stay_high,
            )
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ArrivalModel":
        return cls(
            kind=str(d["kind"]),
            lambda_max=int(d["lambda_max"]),
            rate=tuple(float(r) for r in d.get("rate", ())),
            rate_low=tuple(float(r) for r in d.get("rate_low", ())),
            rate_high=tuple(float(r) for r in d.get("rate_high", ())),
            stay_low=float(d.get("stay_low", 0.9)),
            stay_high=float(d.get("stay_high", 0.9)),
        )


@dataclass(frozen=True)
class ServiceModel:
    """Per-slot service capacities in whole requests, bounded by ``mu_max``.

    By default every node serves exactly its mean every slot (means must then
    be integers). With ``jitter`` the per-slot capacity is
    ``Binomial(mu_max, mean / mu_max)``, which keeps the configured mean and
    the hard bound.
    """

    switch_means: tuple[float, ...]
    controller_means: tuple[float, ...]
    mu_max: int
    jitter: bool = False

    def __post_init__(self):
        if self.mu_max < 1:
            raise ValidationError("mu_max must be at least 1")
        for m in (*self.switch_means, *self.controller_means):
            if not (0 <= m <= self.mu_max):
                raise ValidationError("service means must lie in [0, mu_max]")
            if not self.jitter and m != int(m):
                raise ValidationError("deterministic service means must be integers")

    def to_dict(self) -> dict:
        return {
            "switch_means": list(self.switch_means),
            "controller_means": list(self.controller_means),
            "mu_max": self.mu_max,
            "jitter": self.jitter,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ServiceModel":
        return cls(
            switch_means=tuple(float(m) for m in d["switch_means"]),
            controller_means=tuple(float(m) for m in d["controller_means"]),
            mu_max=int(d["mu_max"]),
            jitter=bool(d.get("jitter", False)),
        )


class ArmStats:
    """Per-arm pull counts and reward sums; memory is O(#arms), not O(T).

    Arrays are indexed ``[switch, column]`` where column ``C`` holds the local
    arm and column ``j < C`` controller ``j``. ``last_estimate`` caches the
    most recent confidence-adjusted estimate written by the episode engines;
    it starts at zero, matching the optimistic value of an unexplored arm.
    """

    def __init__(self, topology: Topology, reward_floor: float):
        if reward_floor > 0:
            raise ValidationError("reward_floor must be <= 0")
        s, c = topology.switch_count, topology.controller_count
        self.topology = topology
        self.reward_floor = float(reward_floor)
        self.plays = np.zeros((s, c + 1), dtype=np.int64)
        self.reward_sum = np.zeros((s, c + 1))
        self.reward_sq_sum = np.zeros((s, c + 1))
        self.last_estimate = np.zeros((s, c + 1))

    def _col(self, arm: Arm) -> int:
        return self.topology.controller_count if arm.is_local else arm.target

    def record(self, arm: Arm, reward: float) -> None:
        """Fold one observed reward into the arm's sums.

        Rewards are negated costs, so positive values are rejected outright and
        values below the floor indicate a mis-specified cost model.
        """
        if reward > 0:
            raise ValidationError(f"reward must be non-positive, got {reward}")
        if reward < self.reward_floor - 1e-12:
            raise ValidationError(f"reward {reward} below floor {self.reward_floor}")
        self.topology.validate_arm(arm)
        i, k = arm.switch, self._col(arm)
        self.plays[i, k] += 1
        self.reward_sum[i, k] += reward
        self.reward_sq_sum[i, k] += reward * reward

    def plays_of(self, arm: Arm) -> int:
        return int(self.plays[arm.switch, self._col(arm)])

    def sample_mean(self, arm: Arm) -> float:
        """Empirical mean reward; zero for a never-pulled arm."""
        i, k = arm.switch, self._col(arm)
        h = self.plays[i, k]
        return float(self.reward_sum[i, k] / h) if h > 0 else 0.0

    def sample_sq_mean(self, arm: Arm) -> float:
        i, k = arm.switch, self._col(arm)
        h = self.plays[i, k]
        return float(self.reward_sq_sum[i, k] / h) if h > 0 else 0.0

    def candidate_count(self, switch: int) -> int:
        """Number of arms the switch can ever pull (candidates plus local)."""
        return len(self.topology.candidates[switch]) + 1

    def copy(self) -> "ArmStats":
        out = ArmStats(self.topology, self.reward_floor)
        out.plays = self.plays.copy()
        out.reward_sum = self.reward_sum.copy()
        out.reward_sq_sum = self.reward_sq_sum.copy()
        out.last_estimate = self.last_estimate.copy()
        return out


@dataclass(frozen=True)
class RunConfig:
    """How one experiment runs: policy, horizon, weights, seed and repetitions."""

    policy: str
    horizon: int
    v_weight: float
    beta: float = 2.0
    epsilon: float = 0.1
    seed: int = 0
    run_count: int = 1
    slot_ms: float = 10.0

    def __post_init__(self):
        if self.policy not in POLICY_IDS:
            raise ValidationError(f"unknown policy {self.policy!r}; expected one of {POLICY_IDS}")
        if self.horizon < 0:
            raise ValidationError("horizon must be non-negative")
        if self.v_weight < 0 or self.beta < 0:
            raise ValidationError("v_weight and beta must be non-negative")
        if not (0.0 <= self.epsilon <= 1.0):
            raise ValidationError("epsilon must lie in [0, 1]")
        if self.run_count < 1:
            raise ValidationError("run_count must be at least 1")

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "horizon": self.horizon,
            "v_weight": self.v_weight,
            "beta": self.beta,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "run_count": self.run_count,
            "slot_ms": self.slot_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        return cls(
            policy=str(d["policy"]),
            horizon=int(d["horizon"]),
            v_weight=float(d["v_weight"]),
            beta=float(d.get("beta", 2.0)),
            epsilon=float(d.get("epsilon", 0.1)),
            seed=int(d.get("seed", 0)),
            run_count=int(d.get("run_count", 1)),
            slot_ms=float(d.get("slot_ms", 10.0)),
        )


@dataclass
class RunTrace:
    """Everything one episode produced, one array entry per slot.

    ``slot_cost`` counts every forwarded or locally processed request at its
    realized per-request cost; ``slot_reward`` sums the chosen arms' negated
    per-request costs (one term per switch, not scaled by arrivals); and
    ``slot_backlog`` snapshots the total backlog at the beginning of the slot.
    ``choices`` is kept only when decision recording is on.
    """

    policy: str
    horizon: int
    slot_cost: np.ndarray
    slot_reward: np.ndarray
    slot_backlog: np.ndarray
    slot_arrivals: np.ndarray
    node_backlog_avg: np.ndarray  # per-node time averages, switches then controllers
    final_queues: QueueState
    stats: ArmStats
    choices: np.ndarray | None = None  # int16 (T, S), controller id or LOCAL

    def __post_init__(self):
        n = self.horizon
        for name in ("slot_cost", "slot_reward", "slot_backlog", "slot_arrivals"):
            if getattr(self, name).shape != (n,):
                raise ValidationError(f"{name} must have one entry per slot")

    def time_avg_cost(self) -> float:
        return float(self.slot_cost.mean()) if self.horizon else 0.0

    def time_avg_reward(self) -> float:
        return float(self.slot_reward.mean()) if self.horizon else 0.0

    def time_avg_backlog(self) -> float:
        return float(self.slot_backlog.mean()) if self.horizon else 0.0

    def cumulative_reward(self) -> np.ndarray:
        return np.cumsum(self.slot_reward)

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "horizon": self.horizon,
            "slot_cost": self.slot_cost.tolist(),
            "slot_reward": self.slot_reward.tolist(),
            "slot_backlog": self.slot_backlog.tolist(),
            "slot_arrivals": self.slot_arrivals.tolist(),
            "node_backlog_avg": self.node_backlog_avg.tolist(),
            "final_switch_queues": self.final_queues.switches.tolist(),
            "final_controller_queues": self.final_queues.controllers.tolist(),
            "choices": None if self.choices is None else self.choices.tolist(),
        }


def dumps_config(obj: dict) -> str:
    """Canonical JSON used for config echo and round-tripping (lossless floats)."""
    return json.dumps(obj, indent=2, sort_keys=True)

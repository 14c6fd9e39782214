"""Per-slot decision rules mapping (queues, reachability, scores) to choices.

Every rule decomposes into independent per-switch argmins over the reachable
targets, evaluated against beginning-of-slot backlogs. Ties break toward the
lowest controller id, and the local target loses ties to any controller; the
fixed rule keeps runs exactly reproducible.
"""

from __future__ import annotations

import numpy as np

from .model import (
    LOCAL,
    ArmStats,
    AvailabilitySet,
    Decision,
    QueueState,
    ValidationError,
)
from .estimators import estimate_table, variant_estimate
from .model import Arm

POLICY_VARIANTS = {
    "lasac": "ucb1-tuned",
    "lasac-eps": "ucb1-tuned",
    "lasac-ucb1": "ucb1",
    "lasac-moss": "moss",
    "lasac-klucb": "klucb",
}


def _argmin_switch(i, availability, ctrl_scores, local_score):
    """Index of the best target for one switch: controllers ascending, local last."""
    best_k = LOCAL
    best = local_score
    first = True
    for j in np.flatnonzero(availability.mask[i]):
        s = ctrl_scores[j]
        if first or s < best:
            best, best_k, first = s, int(j), False
    if not first and local_score < best:
        return LOCAL
    return best_k


def _score_argmin(queues, availability, per_arm_term, v_weight):
    """Per-switch argmin of backlog plus weighted per-arm term."""
    s = len(queues.switches)
    choices = np.empty(s, dtype=np.int64)
    qc = queues.controllers.astype(np.float64)
    for i in range(s):
        ctrl_scores = qc + v_weight * per_arm_term[i, : len(qc)]
        local_score = float(queues.switches[i]) + v_weight * per_arm_term[i, len(qc)]
        choices[i] = _argmin_switch(i, availability, ctrl_scores, local_score)
    return Decision(choices)


def lasac_decide(
    queues: QueueState,
    availability: AvailabilitySet,
    estimates: np.ndarray,
    v_weight: float,
) -> Decision:
    """Drift-plus-penalty choice: minimize backlog minus weighted reward estimate.

    ``estimates`` is the (S, C+1) table of non-positive reward estimates with
    the local arm in the last column. With ``v_weight = 0`` this reduces to
    joining the shortest reachable queue.
    """
    if v_weight < 0:
        raise ValidationError("v_weight must be non-negative")
    return _score_argmin(queues, availability, -np.asarray(estimates), v_weight)


def gs_decide(
    queues: QueueState,
    availability: AvailabilitySet,
    w_field: np.ndarray,
    m_field: np.ndarray,
    v_weight: float,
) -> Decision:
    """Clairvoyant greedy: the same rule fed this slot's realized per-request costs."""
    costs = np.concatenate([np.asarray(w_field), np.asarray(m_field)[:, None]], axis=1)
    return _score_argmin(queues, availability, costs, v_weight)


def jsq_decide(queues: QueueState, availability: AvailabilitySet) -> Decision:
    """Join the shortest reachable queue (the switch's own queue included)."""
    zeros = np.zeros((len(queues.switches), len(queues.controllers) + 1))
    return _score_argmin(queues, availability, zeros, 0.0)


def uniform_choice(i: int, availability: AvailabilitySet, u: float) -> int:
    """Map one uniform draw to a target, uniformly over reachable options."""
    reachable = np.flatnonzero(availability.mask[i])
    n = len(reachable) + 1
    idx = min(int(u * n), n - 1)
    return LOCAL if idx == len(reachable) else int(reachable[idx])


def random_decide(availability: AvailabilitySet, rng: np.random.Generator) -> Decision:
    """Each switch picks uniformly among its reachable targets."""
    s = availability.mask.shape[0]
    choices = np.empty(s, dtype=np.int64)
    for i in range(s):
        choices[i] = uniform_choice(i, availability, rng.random())
    return Decision(choices)


def lasac_variant_decide(
    queues: QueueState,
    availability: AvailabilitySet,
    stats: ArmStats,
    t: float,
    v_weight: float,
    beta: float,
    variant: str = "ucb1-tuned",
    epsilon: float = 0.0,
    rng: np.random.Generator | None = None,
) -> Decision:
    """Learning scheduler with a pluggable index family and an optional explore gate.

    With probability ``epsilon`` a switch picks a reachable target uniformly at
    random; otherwise it applies the drift-plus-penalty rule with the chosen
    index family. ``epsilon = 0`` is the plain learning scheduler.
    """
    if epsilon > 0 and rng is None:
        raise ValidationError("an rng is required when epsilon > 0")
    estimates = estimate_table(stats, t, variant, beta)
    decision = lasac_decide(queues, availability, estimates, v_weight)
    if epsilon <= 0:
        return decision
    choices = decision.choices.copy()
    for i in range(len(choices)):
        if rng.random() < epsilon:
            choices[i] = uniform_choice(i, availability, rng.random())
    return Decision(choices)


def arm_estimate(stats: ArmStats, arm: Arm, t: float, policy: str, beta: float) -> float:
    """Estimate used by the given learning policy for one arm."""
    return variant_estimate(stats, arm, t, POLICY_VARIANTS[policy], beta)

"""Episode engines: the per-slot loop, compiled and interpreted.

The loop is written once in ``_advance_impl``; ``advance_jit`` is its
numba-compiled form and ``advance_py`` the interpreted twin. Both consume the
same pre-sampled randomness blocks, so a compiled run can be cross-checked
bit-for-bit against the interpreted one on small horizons.

All floating-point expressions here mirror the reference formulas in
``estimators``/``policies`` operation for operation, so the engines and the
pure per-slot functions agree to the last bit.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

POL_LEARN = 0
POL_GS = 1
POL_RANDOM = 2
POL_JSQ = 3

EST_UCB1_TUNED = 0
EST_UCB1 = 1
EST_MOSS = 2
EST_KLUCB = 3

POLICY_CODES = {
    "lasac": (POL_LEARN, EST_UCB1_TUNED),
    "lasac-eps": (POL_LEARN, EST_UCB1_TUNED),
    "lasac-ucb1": (POL_LEARN, EST_UCB1),
    "lasac-moss": (POL_LEARN, EST_MOSS),
    "lasac-klucb": (POL_LEARN, EST_KLUCB),
    "gs": (POL_GS, EST_UCB1_TUNED),
    "random": (POL_RANDOM, EST_UCB1_TUNED),
    "jsq": (POL_JSQ, EST_UCB1_TUNED),
}


def _advance_impl(
    t0,
    avail,
    arrivals,
    w_field,
    m_field,
    mu_s,
    mu_c,
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
    v_weight,
    beta,
    epsilon,
    floor_mag,
    cand_counts,
    out_cost,
    out_reward,
    out_backlog,
    out_choices,
    node_sums,
    inflow,
):
    n = avail.shape[0]
    s_count = avail.shape[1]
    c_count = avail.shape[2]
    local_col = c_count

    def index_value(i, col, big_l, t_plus_1):
        # optimistic estimate of the arm's mean reward; 0 means "never pulled"
        h = plays[i, col]
        if h == 0:
            return 0.0
        mean = rsum[i, col] / h
        if est_code == EST_UCB1_TUNED:
            var_opt = rsq[i, col] / h - mean * mean + math.sqrt(2.0 * big_l / h)
            cap = var_opt if var_opt < 0.25 else 0.25
            u = mean + beta * math.sqrt((big_l / h) * cap)
        elif est_code == EST_UCB1:
            u = mean + floor_mag * math.sqrt(2.0 * big_l / h)
        elif est_code == EST_MOSS:
            gap = math.log(t_plus_1 / (cand_counts[i] * h))
            if gap < 0.0:
                gap = 0.0
            u = mean + floor_mag * math.sqrt(gap / h)
        else:
            q = (mean + floor_mag) / floor_mag
            if q < 0.0:
                q = 0.0
            elif q > 1.0:
                q = 1.0
            lo = q
            if big_l > 0.0:
                hi = 1.0
                while hi - lo > 1e-9:
                    mid = 0.5 * (lo + hi)
                    qq = q
                    if qq < 1e-15:
                        qq = 1e-15
                    elif qq > 1.0 - 1e-15:
                        qq = 1.0 - 1e-15
                    pp = mid
                    if pp < 1e-15:
                        pp = 1e-15
                    elif pp > 1.0 - 1e-15:
                        pp = 1.0 - 1e-15
                    kl = qq * math.log(qq / pp) + (1.0 - qq) * math.log((1.0 - qq) / (1.0 - pp))
                    if h * kl <= big_l:
                        lo = mid
                    else:
                        hi = mid
            u = -floor_mag + floor_mag * lo
        return u if u < 0.0 else 0.0

    def uniform_pick(s, i):
        # uniform over reachable targets; controllers ascending, local last
        count = 0
        for j in range(c_count):
            if avail[s, i, j]:
                count += 1
        nc = count + 1
        idx = int(choice_u[s, i] * nc)
        if idx > nc - 1:
            idx = nc - 1
        seen = 0
        for j in range(c_count):
            if avail[s, i, j]:
                if seen == idx:
                    return j
                seen += 1
        return local_col

    for s in range(n):
        big_l = logt1[s]
        t_plus_1 = float(t0 + s + 1)

        total = 0
        for i in range(s_count):
            node_sums[i] += q_s[i]
            total += q_s[i]
        for j in range(c_count):
            node_sums[s_count + j] += q_c[j]
            total += q_c[j]
        out_backlog[s] = total

        for i in range(s_count):
            if policy_code == POL_RANDOM or (policy_code == POL_LEARN and gate_u[s, i] < epsilon):
                k = uniform_pick(s, i)
            elif policy_code == POL_JSQ:
                best_k = -1
                best = 0.0
                for j in range(c_count):
                    if avail[s, i, j]:
                        score = float(q_c[j])
                        if best_k < 0 or score < best:
                            best = score
                            best_k = j
                local_score = float(q_s[i])
                if best_k < 0 or local_score < best:
                    best_k = local_col
                k = best_k
            elif policy_code == POL_GS:
                best_k = -1
                best = 0.0
                for j in range(c_count):
                    if avail[s, i, j]:
                        score = q_c[j] + v_weight * w_field[s, i, j]
                        if best_k < 0 or score < best:
                            best = score
                            best_k = j
                local_score = q_s[i] + v_weight * m_field[s, i]
                if best_k < 0 or local_score < best:
                    best_k = local_col
                k = best_k
            else:
                best_k = -1
                best = 0.0
                for j in range(c_count):
                    if avail[s, i, j]:
                        est = index_value(i, j, big_l, t_plus_1)
                        score = q_c[j] - v_weight * est
                        if best_k < 0 or score < best:
                            best = score
                            best_k = j
                est_l = index_value(i, local_col, big_l, t_plus_1)
                local_score = q_s[i] - v_weight * est_l
                if best_k < 0 or local_score < best:
                    best_k = local_col
                k = best_k
            out_choices[s, i] = k

        slot_cost = 0.0
        slot_reward = 0.0
        for i in range(s_count):
            k = out_choices[s, i]
            cost = m_field[s, i] if k == local_col else w_field[s, i, k]
            slot_reward += -cost
            slot_cost += arrivals[s, i] * cost
            plays[i, k] += 1
            rsum[i, k] += -cost
            rsq[i, k] += cost * cost
        out_cost[s] = slot_cost
        out_reward[s] = slot_reward

        for j in range(c_count):
            inflow[j] = 0
        for i in range(s_count):
            k = out_choices[s, i]
            if k == local_col:
                nq = q_s[i] + arrivals[s, i] - mu_s[s, i]
            else:
                nq = q_s[i] - mu_s[s, i]
                inflow[k] += arrivals[s, i]
            q_s[i] = nq if nq > 0 else 0
        for j in range(c_count):
            nq = q_c[j] + inflow[j] - mu_c[s, j]
            q_c[j] = nq if nq > 0 else 0


advance_py = _advance_impl
advance_jit = njit(cache=True)(_advance_impl) if njit is not None else None


def resolve_engine(engine: str):
    """Map an engine name to the callable per-slot loop."""
    if engine == "auto":
        engine = "numba" if advance_jit is not None else "python"
    if engine == "numba":
        if advance_jit is None:
            raise RuntimeError("numba is not available; use engine='python'")
        return advance_jit
    if engine == "python":
        return advance_py
    raise ValueError(f"unknown engine {engine!r}")

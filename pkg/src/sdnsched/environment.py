"""The per-slot stochastic world: reachability, arrivals, costs, services, queues.

An :class:`Environment` owns one run's random stream. Draw order per slot (or
per block of slots) is fixed -- reachability uniforms, arrival draws, upload
cost uniforms, local cost uniforms, service draws -- and never depends on the
policy under test, so paired policy comparisons see identical worlds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

from .model import (
    LOCAL,
    ArrivalModel,
    AvailabilitySet,
    CostModel,
    Decision,
    QueueState,
    ServiceModel,
    Topology,
    ValidationError,
)


def _evolve_chain_impl(flips, state, stay_low, stay_high):
    """Advance each switch's two-state chain through a block of flip uniforms."""
    n, s = flips.shape
    states = np.empty((n, s), dtype=np.int8)
    for t in range(n):
        for i in range(s):
            st = state[i]
            stay = stay_high if st == 1 else stay_low
            if flips[t, i] >= stay:
                st = 1 - st
            state[i] = st
            states[t, i] = st
    return states


_evolve_chain = njit(cache=True)(_evolve_chain_impl) if njit is not None else _evolve_chain_impl


@dataclass
class SlotBlock:
    """Pre-sampled world randomness for ``n`` consecutive slots starting at ``t0``."""

    t0: int
    n: int
    avail: np.ndarray  # bool (n, S, C)
    arrivals: np.ndarray  # int64 (n, S)
    w_field: np.ndarray  # float64 (n, S, C); zero outside candidate pairs
    m_field: np.ndarray  # float64 (n, S)
    mu_s: np.ndarray  # int64 (n, S)
    mu_c: np.ndarray  # int64 (n, C)


class Environment:
    """One run's world. All sampling goes through the generator handed in."""

    def __init__(
        self,
        topology: Topology,
        cost_model: CostModel,
        arrival_model: ArrivalModel,
        service_model: ServiceModel,
        rng: np.random.Generator,
    ):
        if arrival_model.switch_count != topology.switch_count:
            raise ValidationError("arrival model does not cover every switch")
        if len(cost_model.mean_local) != topology.switch_count:
            raise ValidationError("cost model does not cover every switch")
        if len(service_model.switch_means) != topology.switch_count:
            raise ValidationError("service model does not cover every switch")
        if len(service_model.controller_means) != topology.controller_count:
            raise ValidationError("service model does not cover every controller")
        self.topology = topology
        self.cost_model = cost_model
        self.arrival_model = arrival_model
        self.service_model = service_model
        self.rng = rng

        s, c = topology.switch_count, topology.controller_count
        self._cand_mask = topology.candidate_mask()
        self._access_p = topology.access_prob_dense()
        self._w_lo = np.zeros((s, c))
        self._w_hi = np.zeros((s, c))
        for i in range(s):
            for n, j in enumerate(topology.candidates[i]):
                self._w_lo[i, j], self._w_hi[i, j] = cost_model.upload_window(i, n)
        windows = [cost_model.local_window(i) for i in range(s)]
        self._m_lo = np.array([w[0] for w in windows])
        self._m_hi = np.array([w[1] for w in windows])
        self._mu_s_mean = np.array(service_model.switch_means)
        self._mu_c_mean = np.array(service_model.controller_means)

        if arrival_model.kind == "bursty":
            # start each switch's modulating chain from its stationary law
            pi_high = arrival_model.high_state_prob()
            self._burst_state = (rng.random(s) < pi_high).astype(np.int8)
        else:
            self._burst_state = None

    # -- single-slot sampling -------------------------------------------------

    def sample_availability(self) -> AvailabilitySet:
        """Each candidate pair is reachable independently with its access probability."""
        u = self.rng.random(self._access_p.shape)
        return AvailabilitySet((u < self._access_p) & self._cand_mask)

    def sample_arrivals(self) -> np.ndarray:
        """New requests per switch, independent across switches and slots."""
        return self._arrival_block(1)[0]

    def sample_cost_field(self) -> tuple[np.ndarray, np.ndarray]:
        """Realized per-request costs for every pair and every switch.

        The full field is always drawn so the stream advances identically for
        every policy; a decision then selects which entries are observed.
        """
        s, c = self._access_p.shape
        u = self.rng.random((s, c))
        w = self._w_lo + u * (self._w_hi - self._w_lo)
        w[~self._cand_mask] = 0.0
        v = self.rng.random(s)
        m = self._m_lo + v * (self._m_hi - self._m_lo)
        return w, m

    def sample_services(self) -> tuple[np.ndarray, np.ndarray]:
        return self._service_block(1)

    def sample_costs(self, decision: Decision) -> np.ndarray:
        """Per-switch realized cost of the chosen arm only (partial feedback)."""
        w, m = self.sample_cost_field()
        return observed_costs(w, m, decision)

    # -- block sampling (the engines' path) -----------------------------------

    def sample_block(self, t0: int, n: int) -> SlotBlock:
        s, c = self._access_p.shape
        u = self.rng.random((n, s, c))
        avail = (u < self._access_p) & self._cand_mask
        arrivals = self._arrival_block(n)
        uw = self.rng.random((n, s, c))
        w_field = self._w_lo + uw * (self._w_hi - self._w_lo)
        w_field[:, ~self._cand_mask] = 0.0
        um = self.rng.random((n, s))
        m_field = self._m_lo + um * (self._m_hi - self._m_lo)
        mu_s, mu_c = self._service_block(n)
        return SlotBlock(t0, n, avail, arrivals, w_field, m_field, mu_s, mu_c)

    def _arrival_block(self, n: int) -> np.ndarray:
        am = self.arrival_model
        s = self.topology.switch_count
        if am.kind == "constant":
            row = np.minimum(np.array(am.rate), am.lambda_max).astype(np.int64)
            return np.tile(row, (n, 1))
        if am.kind == "poisson":
            lam = np.broadcast_to(np.array(am.rate), (n, s))
            return np.minimum(self.rng.poisson(lam), am.lambda_max).astype(np.int64)
        # bursty: advance each switch's two-state chain, then draw at the state's rate
        flips = self.rng.random((n, s))
        states = _evolve_chain(flips, self._burst_state, am.stay_low, am.stay_high)
        lam = np.where(states == 1, np.array(am.rate_high), np.array(am.rate_low))
        return np.minimum(self.rng.poisson(lam), am.lambda_max).astype(np.int64)

    def _service_block(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        sm = self.service_model
        if not sm.jitter:
            mu_s = np.tile(self._mu_s_mean.astype(np.int64), (n, 1))
            mu_c = np.tile(self._mu_c_mean.astype(np.int64), (n, 1))
            return mu_s, mu_c
        mu_s = self.rng.binomial(sm.mu_max, self._mu_s_mean / sm.mu_max, (n, len(self._mu_s_mean)))
        mu_c = self.rng.binomial(sm.mu_max, self._mu_c_mean / sm.mu_max, (n, len(self._mu_c_mean)))
        return mu_s.astype(np.int64), mu_c.astype(np.int64)


def observed_costs(w_field: np.ndarray, m_field: np.ndarray, decision: Decision) -> np.ndarray:
    """Per-switch realized per-request cost of each chosen arm."""
    out = np.empty(len(decision.choices))
    for i, k in enumerate(decision.choices):
        out[i] = m_field[i] if k == LOCAL else w_field[i, k]
    return out


def step_queues(
    queues: QueueState,
    decision: Decision,
    arrivals: np.ndarray,
    mu_s: np.ndarray,
    mu_c: np.ndarray,
) -> QueueState:
    """Advance all backlogs by one slot.

    A switch keeps its new requests only when it chose the local target; a
    controller receives the new requests of every switch that chose it. Each
    node then serves up to its slot capacity, and backlogs never go negative.
    """
    arrivals = np.asarray(arrivals, dtype=np.int64)
    if np.any(arrivals < 0) or np.any(mu_s < 0) or np.any(mu_c < 0):
        raise ValidationError("arrivals and services must be non-negative")
    local = decision.choices == LOCAL
    new_s = np.maximum(queues.switches + np.where(local, arrivals, 0) - mu_s, 0)
    inflow = np.zeros_like(queues.controllers)
    for i, k in enumerate(decision.choices):
        if k != LOCAL:
            inflow[k] += arrivals[i]
    new_c = np.maximum(queues.controllers + inflow - mu_c, 0)
    return QueueState(new_s, new_c)


def slot_cost(decision: Decision, arrivals: np.ndarray, chosen_costs: np.ndarray) -> float:
    """Total cost of the slot: every new request at its chosen arm's per-request cost."""
    return float(np.dot(np.asarray(arrivals, dtype=np.float64), chosen_costs))


def compound_reward(chosen_costs: np.ndarray) -> float:
    """Sum of the chosen arms' rewards (negated per-request costs), one per switch."""
    return float(-np.sum(chosen_costs))

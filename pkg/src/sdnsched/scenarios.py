"""Scenario definitions: the world a run executes in, plus canned generators.

A scenario bundles the topology with the cost, arrival, and service models.
Generators draw every instance-level quantity (candidate sets, access
probabilities, per-pair costs) once at build time from their own seed; the
resulting scenario is then a plain value that serializes losslessly to JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .model import (
    ArrivalModel,
    CostModel,
    RunConfig,
    ServiceModel,
    Topology,
    ValidationError,
)


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    topology: Topology
    costs: CostModel
    arrivals: ArrivalModel
    services: ServiceModel

    def __post_init__(self):
        s = self.topology.switch_count
        if self.arrivals.switch_count != s:
            raise ValidationError("arrival model does not cover every switch")
        if len(self.costs.mean_local) != s:
            raise ValidationError("cost model does not cover every switch")
        for i, cand in enumerate(self.topology.candidates):
            if len(self.costs.mean_upload[i]) != len(cand):
                raise ValidationError(f"switch {i} upload costs misaligned with candidates")
        if len(self.services.switch_means) != s:
            raise ValidationError("service model does not cover every switch")
        if len(self.services.controller_means) != self.topology.controller_count:
            raise ValidationError("service model does not cover every controller")

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "topology": self.topology.to_dict(),
            "costs": self.costs.to_dict(),
            "arrivals": self.arrivals.to_dict(),
            "services": self.services.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        return cls(
            scenario_id=str(d["scenario_id"]),
            topology=Topology.from_dict(d["topology"]),
            costs=CostModel.from_dict(d["costs"]),
            arrivals=ArrivalModel.from_dict(d["arrivals"]),
            services=ServiceModel.from_dict(d["services"]),
        )


@dataclass(frozen=True)
class SweepSpec:
    """Sweep section of a config file: which axis, values, policies, repetitions."""

    axis: str
    values: tuple[float, ...] = ()
    policies: tuple[str, ...] = ("lasac", "gs", "random", "jsq")
    run_count: int = 20
    v_values: tuple[float, ...] = ()
    beta_values: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "values": list(self.values),
            "policies": list(self.policies),
            "run_count": self.run_count,
            "v_values": list(self.v_values),
            "beta_values": list(self.beta_values),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        return cls(
            axis=str(d["axis"]),
            values=tuple(float(v) for v in d.get("values", ())),
            policies=tuple(str(p) for p in d.get("policies", ("lasac", "gs", "random", "jsq"))),
            run_count=int(d.get("run_count", 20)),
            v_values=tuple(float(v) for v in d.get("v_values", ())),
            beta_values=tuple(float(v) for v in d.get("beta_values", ())),
        )


def load_config(path) -> tuple[Scenario, RunConfig, SweepSpec | None]:
    """Read one JSON config holding the scenario, run settings, and optional sweep."""
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from exc
    if "scenario" not in raw or "run" not in raw:
        raise ValidationError("config must contain 'scenario' and 'run' sections")
    try:
        scenario = Scenario.from_dict(raw["scenario"])
        run = RunConfig.from_dict(raw["run"])
        sweep = SweepSpec.from_dict(raw["sweep"]) if "sweep" in raw else None
    except ValidationError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed config: {exc!r}") from exc
    return scenario, run, sweep


def save_config(path, scenario: Scenario, run: RunConfig, sweep: SweepSpec | None = None) -> None:
    payload = {"scenario": scenario.to_dict(), "run": run.to_dict()}
    if sweep is not None:
        payload["sweep"] = sweep.to_dict()
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def build_paper_like(instance_seed: int = 2024) -> Scenario:
    """The benchmark setup: 10 switches, 4 controllers, 3 candidates per switch.

    Access probabilities are drawn once per pair from [0.8, 1]; upload costs
    are hop counts in 1..5, local costs are assigned core counts in 2..4, and
    arrivals follow the bursty two-state process sized to keep total load
    around 70% of total service capacity.
    """
    rng = np.random.default_rng(instance_seed)
    s, c = 10, 4
    candidates = []
    access = []
    for _ in range(s):
        cand = tuple(sorted(int(j) for j in rng.choice(c, size=3, replace=False)))
        candidates.append(cand)
        access.append(tuple(float(p) for p in rng.uniform(0.8, 1.0, size=3)))
    topo = Topology(s, c, tuple(candidates), tuple(access))

    hops = tuple(
        tuple(float(h) for h in rng.integers(1, 6, size=len(candidates[i]))) for i in range(s)
    )
    cores = tuple(float(m) for m in rng.integers(2, 5, size=s))
    costs = CostModel(
        mean_upload=hops,
        mean_local=cores,
        w_max=6.0,
        m_max=5.0,
        half_width=0.5,
    )
    arrivals = ArrivalModel(
        kind="bursty",
        lambda_max=12,
        rate_low=(3.0,) * s,
        rate_high=(7.0,) * s,
        stay_low=0.9,
        stay_high=0.9,
    )
    services = ServiceModel(
        switch_means=(2.0,) * s,
        controller_means=(12.0,) * c,
        mu_max=12,
    )
    return Scenario("paper_like", topo, costs, arrivals, services)


def random_enumerable(instance_seed: int, cost_noise: bool = False, headroom: float = 1.1) -> Scenario:
    """A small randomized instance sized for the exact stationary oracle.

    Every node's service rate covers its worst-case mean inflow with a factor
    ``headroom`` of slack, so any policy at all keeps the instance stable and
    no policy's long-run reward rate can exceed the stationary optimum. Costs
    are deterministic by default: with noisy costs the clairvoyant baseline
    sees realizations rather than means and may legitimately beat the oracle.
    """
    rng = np.random.default_rng(instance_seed)
    s = int(rng.integers(2, 4))
    c = int(rng.integers(2, 4))
    candidates = []
    access = []
    for _ in range(s):
        size = int(rng.integers(1, min(c, 2) + 1))
        cand = tuple(sorted(int(j) for j in rng.choice(c, size=size, replace=False)))
        candidates.append(cand)
        access.append(tuple(float(p) for p in rng.uniform(0.5, 1.0, size=size)))
    topo = Topology(s, c, tuple(candidates), tuple(access))

    half_width = float(rng.choice([0.25, 0.5])) if cost_noise else 0.0
    mean_upload = tuple(
        tuple(float(w) for w in rng.uniform(1.0, 3.5, size=len(candidates[i]))) for i in range(s)
    )
    mean_local = tuple(float(m) for m in rng.uniform(1.0, 3.5, size=s))
    costs = CostModel(mean_upload, mean_local, w_max=4.0, m_max=4.0, half_width=half_width)

    arrivals = ArrivalModel(
        kind="poisson",
        lambda_max=6,
        rate=tuple(float(r) for r in rng.uniform(0.5, 2.0, size=s)),
    )
    lam = arrivals.mean_rates()
    worst_ctrl = np.zeros(c)
    for i in range(s):
        for j in topo.candidates[i]:
            worst_ctrl[j] += lam[i]
    mu_s = tuple(float(int(np.ceil(lam[i] * headroom + 0.25))) for i in range(s))
    mu_c = tuple(float(max(1, int(np.ceil(load * headroom + 0.25)))) for load in worst_ctrl)
    services = ServiceModel(mu_s, mu_c, mu_max=int(max(max(mu_s), max(mu_c))))
    return Scenario(f"enumerable_{instance_seed}", topo, costs, arrivals, services)


def two_controller_learning(cheap: float = 1.0, dear: float = 3.0) -> Scenario:
    """One switch, two always-reachable controllers with deterministic costs.

    Arrivals are one request per slot and every node can serve two, so the
    best stationary policy always uploads to the cheap controller.
    """
    topo = Topology(1, 2, ((0, 1),), ((1.0, 1.0),))
    costs = CostModel(
        mean_upload=((cheap, dear),),
        mean_local=(4.0,),
        w_max=4.0,
        m_max=4.0,
        half_width=0.0,
    )
    arrivals = ArrivalModel(kind="constant", lambda_max=2, rate=(1.0,))
    services = ServiceModel((2.0,), (2.0, 2.0), mu_max=2)
    return Scenario("two_controller_learning", topo, costs, arrivals, services)

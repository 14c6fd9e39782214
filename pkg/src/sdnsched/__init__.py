"""Discrete-time simulator and schedulers for joint switch-controller
association and control devolution, with learning-aided and clairvoyant
baselines, an exact stationary reward-rate oracle, and evaluators for the
closed-form backlog and regret guarantees."""

from .model import (
    LOCAL,
    POLICY_IDS,
    Arm,
    ArmStats,
    ArrivalModel,
    AvailabilitySet,
    CostModel,
    Decision,
    QueueState,
    RunConfig,
    RunTrace,
    ServiceModel,
    Topology,
    ValidationError,
)
from .environment import Environment, compound_reward, observed_costs, slot_cost, step_queues
from .estimators import (
    epsilon_gate,
    estimate_table,
    record_reward,
    ucb1_tuned_estimate,
    variant_estimate,
)
from .policies import (
    gs_decide,
    jsq_decide,
    lasac_decide,
    lasac_variant_decide,
    random_decide,
)
from .metrics import (
    InfeasibleInstance,
    OracleUnavailable,
    SeriesDiverges,
    backlog_bound,
    backlog_stats,
    drift_constant,
    exploration_series,
    optimal_reward_rate,
    regret_bound,
    stability_slack,
    time_avg_regret,
)
from .harness import emit_results, regret_curves, run_episode, sweep
from .scenarios import (
    Scenario,
    SweepSpec,
    build_paper_like,
    load_config,
    random_enumerable,
    save_config,
    two_controller_learning,
)

__all__ = [name for name in dir() if not name.startswith("_")]

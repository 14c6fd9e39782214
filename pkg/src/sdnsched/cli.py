"""Command-line front end: run / sweep / bounds / oracle.

All subcommands read one JSON config (scenario + run [+ sweep]); validation
failures exit nonzero with a one-line JSON error on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import harness, metrics
from .model import POLICY_IDS, RunConfig, ValidationError
from .scenarios import load_config


def _error(kind: str, message: str, code: int = 2) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def _load(args):
    scenario, run, sweep_spec = load_config(args.config)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "policy", None):
        overrides["policy"] = args.policy
    if getattr(args, "run_count", None) is not None:
        overrides["run_count"] = args.run_count
    if overrides:
        run = RunConfig.from_dict({**run.to_dict(), **overrides})
    return scenario, run, sweep_spec


def _parse_values(text):
    return [float(v) for v in text.split(",") if v != ""]


def cmd_run(args) -> int:
    scenario, run, _ = _load(args)
    trace = harness.run_episode(
        scenario, run, run_index=args.run_index, engine=args.engine, record_choices=bool(args.trace)
    )
    summary = {
        "scenario_id": scenario.scenario_id,
        "policy": run.policy,
        "horizon": run.horizon,
        "run_index": args.run_index,
        "time_avg_cost": trace.time_avg_cost(),
        "time_avg_reward": trace.time_avg_reward(),
        "time_avg_backlog": trace.time_avg_backlog(),
        "final_backlog": trace.final_queues.total(),
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    if args.trace:
        lines = ["t,cost,reward,backlog,arrivals," + ",".join(f"choice_{i}" for i in range(scenario.topology.switch_count))]
        for t in range(trace.horizon):
            choice_cols = ",".join(str(int(k)) for k in trace.choices[t])
            lines.append(
                f"{t},{trace.slot_cost[t]!r},{trace.slot_reward[t]!r},"
                f"{int(trace.slot_backlog[t])},{int(trace.slot_arrivals[t])},{choice_cols}"
            )
        Path(args.trace).write_text("\n".join(lines) + "\n")
    return 0


def cmd_sweep(args) -> int:
    scenario, run, sweep_spec = _load(args)
    axis = args.axis or (sweep_spec.axis if sweep_spec else None)
    if axis is None:
        return _error("validation", "no sweep axis given (flag --axis or config sweep section)")
    run_count = args.run_count or (sweep_spec.run_count if sweep_spec else run.run_count)
    policies = (
        [p for p in args.policies.split(",") if p]
        if args.policies
        else list(sweep_spec.policies) if sweep_spec else ["lasac", "gs", "random", "jsq"]
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()

    if axis == "time":
        v_values = _parse_values(args.v_values) if args.v_values else list(sweep_spec.v_values if sweep_spec else ())
        beta_values = _parse_values(args.beta_values) if args.beta_values else list(sweep_spec.beta_values if sweep_spec else ())
        rows = harness.regret_curves(
            scenario, run, v_values, beta_values, policies, run_count, jobs=args.jobs, engine=args.engine
        )
        csv_path, json_path = out_dir / "curves.csv", out_dir / "curves.json"
    else:
        values = _parse_values(args.values) if args.values else list(sweep_spec.values if sweep_spec else ())
        rows = harness.sweep(
            scenario, run, axis, values, policies, run_count, jobs=args.jobs, engine=args.engine
        )
        csv_path, json_path = out_dir / "sweep.csv", out_dir / "sweep.json"

    harness.emit_results(rows, args.format, csv_path)
    meta = harness.run_metadata(
        scenario, run, {"axis": axis, "policies": policies, "run_count": run_count,
                        "wallclock_s": time.perf_counter() - started}
    )
    harness.emit_results(rows, "json", json_path, metadata=meta)
    print(json.dumps({"rows": len(rows), "csv": str(csv_path), "json": str(json_path)}))
    return 0


def cmd_bounds(args) -> int:
    scenario, run, _ = _load(args)
    topo = scenario.topology
    lam_max = scenario.arrivals.lambda_max
    w_max, m_max = scenario.costs.w_max, scenario.costs.m_max
    b = metrics.drift_constant(topo.switch_count, topo.controller_count, scenario.services.mu_max, lam_max)
    out = {"drift_constant": b, "v_weight": run.v_weight, "beta": run.beta, "horizon": run.horizon}

    slack = args.slack
    if slack is None:
        try:
            slack = metrics.stability_slack(
                topo,
                scenario.arrivals.mean_rates(),
                scenario.services.switch_means,
                scenario.services.controller_means,
            )
            out["slack_source"] = "stationary-lp"
        except metrics.OracleUnavailable:
            slack = None
            out["slack_source"] = "unavailable"
    else:
        out["slack_source"] = "flag"
    out["slack"] = slack
    if slack is not None and slack > 0:
        out["backlog_bound"] = metrics.backlog_bound(
            b, slack, run.v_weight, topo.switch_count, lam_max, w_max, m_max
        )
    else:
        out["backlog_bound"] = None

    scale = args.scale_const if args.scale_const is not None else b / lam_max
    out["regret_scale_const"] = scale
    try:
        out["regret_bound"] = metrics.regret_bound(
            scale, run.v_weight, run.beta, max(run.horizon, 1),
            topo.switch_count, topo.controller_count, w_max, m_max,
        )
        out["exploration_series"] = metrics.exploration_series(run.beta)
        out["series_diverges"] = False
    except metrics.SeriesDiverges:
        out["regret_bound"] = None
        out["exploration_series"] = None
        out["series_diverges"] = True
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_oracle(args) -> int:
    scenario, _, _ = _load(args)
    try:
        res = metrics.optimal_reward_rate(
            scenario.topology,
            scenario.costs.mean_rewards(scenario.topology),
            scenario.arrivals.mean_rates(),
            scenario.services.switch_means,
            scenario.services.controller_means,
        )
        slack = metrics.stability_slack(
            scenario.topology,
            scenario.arrivals.mean_rates(),
            scenario.services.switch_means,
            scenario.services.controller_means,
        )
    except metrics.OracleUnavailable as exc:
        return _error("oracle-unavailable", str(exc), code=3)
    except metrics.InfeasibleInstance as exc:
        return _error("infeasible", str(exc), code=4)
    print(
        json.dumps(
            {
                "scenario_id": scenario.scenario_id,
                "reward_rate": res.reward_rate,
                "min_slack_at_optimum": res.min_slack,
                "stability_slack": slack,
            },
            indent=2,
            sort_keys=True,
        )
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdnsched", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", required=True, help="JSON config path")
    common.add_argument("--seed", type=int, default=None, help="override the master seed")
    common.add_argument("--engine", default="auto", choices=["auto", "numba", "python"])

    p_run = sub.add_parser("run", parents=[common], help="execute a single episode")
    p_run.add_argument("--policy", default=None, choices=POLICY_IDS)
    p_run.add_argument("--run-index", type=int, default=0)
    p_run.add_argument("--trace", default=None, help="also write a per-slot trace CSV here")
    p_run.set_defaults(func=cmd_run, run_count=None)

    p_sweep = sub.add_parser("sweep", parents=[common], help="axis experiments")
    p_sweep.add_argument("--axis", default=None, choices=["V", "beta", "epsilon", "time"])
    p_sweep.add_argument("--values", default=None, help="comma-separated axis values")
    p_sweep.add_argument("--v-values", default=None, help="comma-separated v grid (axis=time)")
    p_sweep.add_argument("--beta-values", default=None, help="comma-separated beta grid (axis=time)")
    p_sweep.add_argument("--policies", default=None, help="comma-separated policy ids")
    p_sweep.add_argument("--run-count", type=int, default=None)
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--format", default="csv", choices=["csv", "csv-long"])
    p_sweep.add_argument("-o", "--out-dir", default="out")
    p_sweep.set_defaults(func=cmd_sweep, policy=None)

    p_bounds = sub.add_parser("bounds", parents=[common], help="evaluate the closed-form guarantees")
    p_bounds.add_argument("--slack", type=float, default=None, help="feasibility slack override")
    p_bounds.add_argument("--scale-const", type=float, default=None, help="regret scale constant override")
    p_bounds.set_defaults(func=cmd_bounds, policy=None, run_count=None)

    p_oracle = sub.add_parser("oracle", parents=[common], help="exact stationary reward-rate oracle")
    p_oracle.set_defaults(func=cmd_oracle, policy=None, run_count=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        return _error("validation", str(exc))
    except FileNotFoundError as exc:
        return _error("io", str(exc))
    except metrics.SeriesDiverges as exc:
        return _error("diverges", str(exc))


if __name__ == "__main__":
    sys.exit(main())

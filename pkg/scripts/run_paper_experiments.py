#!/usr/bin/env python3
"""Run the three benchmark experiment families and emit their CSVs.

Families (matching the figure pipeline's inputs):
  v-sweep     time-averaged cost / backlog / regret / variance versus V
  beta-sweep  the same metrics versus beta, including the beta=0 point
  regret-time time-averaged regret over time for a (V, beta) grid

``--scale desk`` (default) runs in minutes on a laptop; ``--scale paper``
uses the config's full horizon and repetition count and takes hours.
"""

import argparse
import time
from pathlib import Path

from sdnsched import RunConfig, harness, load_config

DESK = {"horizon": 200_000, "run_count": 5}


def scaled_run(run: RunConfig, scale: str) -> RunConfig:
    if scale == "paper":
        return run
    return RunConfig.from_dict({**run.to_dict(), **DESK})


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-c", "--config", default="configs/paper_like.json")
    parser.add_argument("-o", "--out-dir", default="out")
    parser.add_argument("--scale", choices=["desk", "paper"], default="desk")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument(
        "--families", default="v-sweep,beta-sweep,regret-time",
        help="comma-separated subset of: v-sweep, beta-sweep, regret-time",
    )
    args = parser.parse_args()

    scenario, run, sweep_spec = load_config(args.config)
    run = scaled_run(run, args.scale)
    run_count = sweep_spec.run_count if args.scale == "paper" else DESK["run_count"]
    out_root = Path(args.out_dir)
    families = [f.strip() for f in args.families.split(",") if f.strip()]

    for family in families:
        out_dir = out_root / family.replace("-", "_")
        out_dir.mkdir(parents=True, exist_ok=True)
        started = time.perf_counter()
        if family == "v-sweep":
            rows = harness.sweep(
                scenario, run, "V", list(sweep_spec.values), list(sweep_spec.policies),
                run_count, jobs=args.jobs,
            )
            csv_path = out_dir / "sweep.csv"
        elif family == "beta-sweep":
            rows = harness.sweep(
                scenario, run, "beta", [0.0, 2.0, 10.0, 100.0, 1000.0],
                ["lasac", "gs", "random", "jsq"], run_count, jobs=args.jobs,
            )
            csv_path = out_dir / "sweep.csv"
        elif family == "regret-time":
            rows = harness.regret_curves(
                scenario, run, list(sweep_spec.v_values), list(sweep_spec.beta_values),
                ["lasac"], run_count, jobs=args.jobs,
            )
            csv_path = out_dir / "curves.csv"
        else:
            raise SystemExit(f"unknown family {family!r}")
        harness.emit_results(rows, "csv", csv_path)
        meta = harness.run_metadata(scenario, run, {
            "family": family, "run_count": run_count, "scale": args.scale,
            "wallclock_s": time.perf_counter() - started,
        })
        harness.emit_results(rows, "json", csv_path.with_suffix(".json"), metadata=meta)
        print(f"{family}: {len(rows)} rows -> {csv_path} ({time.perf_counter() - started:.1f}s)")


if __name__ == "__main__":
    main()

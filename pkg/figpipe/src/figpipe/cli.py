"""Command-line front end: render figure families from result CSVs."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .plots import plot_beta_sweep, plot_regret_over_time, plot_v_sweep
from .schema import SchemaError

FAMILIES = {
    "v-sweep": (plot_v_sweep, "v_sweep"),
    "beta-sweep": (plot_beta_sweep, "beta_sweep"),
    "regret-time": (plot_regret_over_time, "regret_over_time"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="figpipe", description=__doc__)
    sub = parser.add_subparsers(dest="family", required=True)
    for name in FAMILIES:
        p = sub.add_parser(name, help=f"render the {name} figure")
        p.add_argument("csv", help="input CSV path")
        p.add_argument("-o", "--out-dir", default="figures")
        p.add_argument("--format", default="svg", choices=["svg", "png"])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    plot, stem = FAMILIES[args.family]
    out_path = Path(args.out_dir) / f"{stem}.{args.format}"
    try:
        written = plot(args.csv, out_path, fmt=args.format)
    except SchemaError as exc:
        print(json.dumps({"error": "schema", "message": str(exc)}), file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return 2
    print(written)
    return 0


if __name__ == "__main__":
    sys.exit(main())

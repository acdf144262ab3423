"""Command line interface: ``figgen <kind> --in <csv...> --out <path>``.

Kinds: state-ensemble, control-ensemble, pareto, bench.  Exit codes: 0 on
success, 2 on schema/usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import SchemaError, UsageError
from .plots import plot_bench, plot_control_ensemble, plot_pareto, plot_state_ensemble


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figgen", description="render figures from experiment CSV outputs"
    )
    parser.add_argument(
        "kind", choices=("state-ensemble", "control-ensemble", "pareto", "bench")
    )
    parser.add_argument(
        "--in", dest="inputs", nargs="+", required=True, type=Path,
        help="input CSV file(s); ensemble kinds accept one summary.csv per scenario",
    )
    parser.add_argument("--out", required=True, type=Path, help="output image path")
    parser.add_argument(
        "--variables", type=str, default=None,
        help="comma list of state variables for state-ensemble (default I,D)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.kind == "state-ensemble":
            variables = (
                tuple(args.variables.replace(",", " ").split())
                if args.variables
                else ("I", "D")
            )
            path, counts = plot_state_ensemble(args.inputs, args.out, variables)
        elif args.kind == "control-ensemble":
            path, counts = plot_control_ensemble(args.inputs, args.out)
        elif args.kind == "pareto":
            if len(args.inputs) != 1:
                raise UsageError("pareto takes exactly one pareto.csv")
            path, counts = plot_pareto(args.inputs[0], args.out)
        else:
            if len(args.inputs) != 1:
                raise UsageError("bench takes exactly one bench.csv")
            path, counts = plot_bench(args.inputs[0], args.out)
    except (SchemaError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{path} ({sum(counts.values())} plotted points in {len(counts)} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface.

Subcommands: ``simulate`` (one policy, N replications), ``sweep`` (eta sweep
plus homogeneous baseline -> pareto.csv and per-scenario subdirectories),
``bench`` (runtime vs rollout count) and ``validate-config``.  Exit codes:
0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import csvio, harness
from .config import ExperimentConfig, default_config, load_config
from .errors import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, ConfigurationError, NumericError


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, default=None, help="INI config file (built-in defaults if omitted)")
    sub.add_argument("--policy", choices=("multi-group-pic", "homogeneous-pic", "uncontrolled"), default=None)
    sub.add_argument("--eta", type=float, default=None, help="fairness penalty weight")
    sub.add_argument("--reps", type=int, default=None, help="number of replications")
    sub.add_argument("--seed", type=int, default=None, help="root seed")
    sub.add_argument("--out", type=Path, default=None, help="output directory")
    sub.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                     help="worker processes for replications (results are identical for any value)")


def _parse_int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        values = tuple(int(tok) for tok in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigurationError(f"could not parse {what}: {text!r}") from exc
    if not values:
        raise ConfigurationError(f"{what} must not be empty")
    return values


def _parse_float_list(text: str, what: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.replace(",", " ").split())
    except ValueError as exc:
        raise ConfigurationError(f"could not parse {what}: {text!r}") from exc
    if not values:
        raise ConfigurationError(f"{what} must not be empty")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairsir",
        description="Fairness-aware epidemic policies via sampling-based path integral control",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="closed-loop replications for one policy")
    _add_common(sim)

    sweep = subs.add_parser("sweep", help="eta sweep plus homogeneous baseline")
    _add_common(sweep)
    sweep.add_argument("--etas", type=str, default=None, help="comma list of eta values")

    bench = subs.add_parser("bench", help="runtime benchmark over rollout counts")
    _add_common(bench)
    bench.add_argument("--samples", type=str, default="250,500,1000,2000",
                       help="comma list of rollout counts M")
    bench.add_argument("--repeats", type=int, default=30, help="timing repetitions per M")
    bench.add_argument("--objective-sims", type=int, default=30,
                       help="closed-loop simulations per M for the objective column")

    val = subs.add_parser("validate-config", help="parse and validate a config file")
    val.add_argument("--config", type=Path, required=True)
    return parser


def _load(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else default_config()
    if args.policy is not None:
        cfg = cfg.with_policy(args.policy)
    if args.eta is not None:
        cfg = cfg.with_eta(args.eta)
    if args.reps is not None:
        cfg = replace(cfg, replications=args.reps)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, outdir=args.out)
    return cfg


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _load(args)
    summary = harness.run_replications(cfg, workers=args.workers)
    paths = csvio.write_run_outputs(cfg.outdir, summary)
    for path in paths:
        print(path)
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load(args)
    etas = _parse_float_list(args.etas, "etas") if args.etas else None
    rows, summaries = harness.eta_sweep(cfg, etas, workers=args.workers)
    print(csvio.write_pareto(Path(cfg.outdir) / "pareto.csv", rows))
    for label, summary in summaries.items():
        subdir = Path(cfg.outdir) / (
            label if label == "homogeneous" else f"eta_{label}"
        )
        for path in csvio.write_run_outputs(subdir, summary):
            print(path)
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    cfg = _load(args)
    counts = _parse_int_list(args.samples, "samples")
    rows = harness.bench(
        cfg,
        counts,
        runtime_repeats=args.repeats,
        objective_sims=args.objective_sims,
        workers=args.workers,
    )
    print(csvio.write_bench(Path(cfg.outdir) / "bench.csv", rows))
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    print(
        f"config OK: {cfg.params.num_groups} groups, policy={cfg.policy_kind}, "
        f"K={cfg.solver.grid.steps}, M={cfg.solver.samples}, "
        f"replications={cfg.replications}, seed={cfg.seed}"
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "sweep": _cmd_sweep,
        "bench": _cmd_bench,
        "validate-config": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

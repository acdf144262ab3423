#!/usr/bin/env python3
"""Full case-study pipeline: closed-loop sweep over fairness weights with the
homogeneous baseline, followed by the runtime benchmark.

At full scale (500 replications, 1000 rollouts per step) this is hours of
compute on a laptop; use --scale to shrink replication and rollout counts
proportionally for a desk-sized rehearsal, e.g.::

    python scripts/run_case_study.py --out results --scale 0.1
    python scripts/run_case_study.py --out results          # full scale
"""

import argparse
import dataclasses
import os
import sys
import time
from pathlib import Path

from fairsir import csvio
from fairsir.config import default_config, load_config
from fairsir.harness import bench, eta_sweep, format_eta


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", type=Path, default=None)
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--scale", type=float, default=1.0,
                        help="multiplier on replications and rollout counts")
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--skip-bench", action="store_true")
    args = parser.parse_args()

    cfg = load_config(args.config) if args.config else default_config()
    reps = max(2, int(round(cfg.replications * args.scale)))
    samples = max(16, int(round(cfg.solver.samples * args.scale)))
    cfg = dataclasses.replace(
        cfg,
        replications=reps,
        solver=dataclasses.replace(cfg.solver, samples=samples),
        outdir=args.out,
    )
    print(f"sweep: etas={cfg.eta_list}, N={reps}, M={samples}, workers={args.workers}")

    t0 = time.perf_counter()
    rows, summaries = eta_sweep(cfg, workers=args.workers)
    print(f"sweep finished in {time.perf_counter() - t0:.0f}s")
    print(csvio.write_pareto(args.out / "pareto.csv", rows))
    for label, summary in summaries.items():
        subdir = args.out / (label if label == "homogeneous" else f"eta_{label}")
        for path in csvio.write_run_outputs(subdir, summary):
            print(path)

    if not args.skip_bench:
        counts = tuple(
            max(16, int(round(m * args.scale))) for m in (250, 500, 1000, 2000)
        )
        bench_rows = bench(
            cfg,
            counts,
            runtime_repeats=30,
            objective_sims=max(2, int(round(30 * args.scale))),
            workers=args.workers,
        )
        print(csvio.write_bench(args.out / "bench.csv", bench_rows))

    print("figures: see the figgen package, e.g.")
    eta_dirs = " ".join(
        f"{args.out}/eta_{format_eta(e)}/summary.csv" for e in cfg.eta_list
    )
    print(f"  figgen state-ensemble --in {eta_dirs} --out {args.out}/states.svg")
    print(f"  figgen pareto --in {args.out}/pareto.csv --out {args.out}/pareto.svg")
    return 0


if __name__ == "__main__":
    sys.exit(main())

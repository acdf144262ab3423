"""CSV emission for all harness outputs.

Files are UTF-8 with a header row, '.' decimal separator and deterministic
row order; floats are written with shortest round-trip repr so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

from .harness import BenchRow, ParetoRow, ReplicationSummary, RunRecord


def _fmt(value) -> str:
    if isinstance(value, float):
        # plain-float repr: shortest exact round-trip, no numpy scalar wrapper
        return repr(float(value))
    return str(value)


def _write(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    return path


def write_states(path: str | Path, records: list[RunRecord]) -> Path:
    def rows():
        for rec in records:
            steps, groups, _ = rec.states.shape
            for t in range(steps):
                for g in range(groups):
                    s, i, r, d = rec.states[t, g]
                    yield (rec.replication, t, g, float(s), float(i), float(r), float(d))

    return _write(Path(path), ("replication", "t", "group", "S", "I", "R", "D"), rows())


def write_controls(path: str | Path, records: list[RunRecord]) -> Path:
    def rows():
        for rec in records:
            steps, groups, _ = rec.controls.shape
            for t in range(steps):
                for g in range(groups):
                    v, l = rec.controls[t, g]
                    yield (rec.replication, t, g, float(v), float(l))

    return _write(Path(path), ("replication", "t", "group", "V", "L"), rows())


def write_summary(path: str | Path, summary: ReplicationSummary) -> Path:
    return _write(
        Path(path),
        ("t", "group", "variable", "mean", "p10", "p90"),
        summary.table,
    )


def write_metrics(path: str | Path, records: list[RunRecord]) -> Path:
    return _write(
        Path(path),
        (
            "replication",
            "econ_loss",
            "control_cost",
            "unfairness_integral",
            "unfairness_terminal",
            "total_cost",
        ),
        (
            (
                rec.replication,
                rec.econ_loss,
                rec.control_cost,
                rec.unfairness_integral,
                rec.unfairness_terminal,
                rec.total_cost,
            )
            for rec in records
        ),
    )


def write_pareto(path: str | Path, rows: list[ParetoRow]) -> Path:
    return _write(
        Path(path),
        ("eta", "mean_cost", "mean_unfairness", "stderr_cost", "stderr_unfairness"),
        (
            (r.eta, r.mean_cost, r.mean_unfairness, r.stderr_cost, r.stderr_unfairness)
            for r in rows
        ),
    )


def write_bench(path: str | Path, rows: list[BenchRow]) -> Path:
    return _write(
        Path(path),
        ("samples", "mean_runtime_s", "mean_objective"),
        ((r.samples, r.mean_runtime_s, r.mean_objective) for r in rows),
    )


def write_run_outputs(outdir: str | Path, summary: ReplicationSummary) -> list[Path]:
    """Standard per-run bundle: states, controls, summary and metrics."""
    outdir = Path(outdir)
    return [
        write_states(outdir / "states.csv", summary.records),
        write_controls(outdir / "controls.csv", summary.records),
        write_summary(outdir / "summary.csv", summary),
        write_metrics(outdir / "metrics.csv", summary.records),
    ]

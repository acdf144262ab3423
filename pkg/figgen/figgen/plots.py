"""The four figure kinds: ensemble panels, Pareto frontier, benchmark.

Every plotted number is read straight from a harness CSV (no statistics are
recomputed here) and styles are fixed, so one input always renders to one
output.  Each function returns the output path plus per-series point counts,
which the tests check against the CSV row counts.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

from .core import (
    BENCH_COLUMNS,
    BENCH_NUMERIC,
    PARETO_COLUMNS,
    PARETO_NUMERIC,
    SUMMARY_COLUMNS,
    SUMMARY_NUMERIC,
    UsageError,
    group_color,
    load_csv,
    save,
    scenario_label,
)


def _ensemble_panels(
    summary_paths: list[str | Path], variables: tuple[str, ...], out: str | Path
) -> tuple[Path, dict[str, int]]:
    scenarios = [
        (scenario_label(p), load_csv(p, SUMMARY_COLUMNS, SUMMARY_NUMERIC))
        for p in summary_paths
    ]
    n_rows, n_cols = len(variables), len(scenarios)
    fig, axes = plt.subplots(
        n_rows,
        n_cols,
        figsize=(3.2 * n_cols, 2.6 * n_rows),
        sharex=True,
        sharey="row",
        squeeze=False,
    )
    counts: dict[str, int] = {}
    for col, (label, frame) in enumerate(scenarios):
        groups = sorted(frame["group"].unique())
        for row, variable in enumerate(variables):
            ax = axes[row][col]
            data = frame[frame["variable"] == variable]
            if data.empty:
                raise UsageError(f"no rows for variable '{variable}' in {label}")
            for group in groups:
                series = data[data["group"] == group].sort_values("t")
                color = group_color(int(group), len(groups))
                ax.plot(
                    series["t"], series["mean"], color=color, lw=1.2,
                    label=f"group {int(group)}",
                )
                ax.fill_between(
                    series["t"], series["p10"], series["p90"], color=color, alpha=0.2,
                    linewidth=0,
                )
                counts[f"{label}/{variable}/group{int(group)}"] = len(series)
            if row == 0:
                ax.set_title(label, fontsize=9)
            if row == n_rows - 1:
                ax.set_xlabel("day")
            if col == 0:
                ax.set_ylabel(variable)
    axes[0][0].legend(fontsize=7, loc="best")
    fig.tight_layout()
    return save(fig, out), counts


def plot_state_ensemble(
    summary_paths: list[str | Path],
    out: str | Path,
    variables: tuple[str, ...] = ("I", "D"),
) -> tuple[Path, dict[str, int]]:
    """Mean infected/deceased trajectories with 10th-90th percentile bands,
    one column per scenario file."""
    return _ensemble_panels(summary_paths, variables, out)


def plot_control_ensemble(
    summary_paths: list[str | Path], out: str | Path
) -> tuple[Path, dict[str, int]]:
    """Mean vaccination and lockdown controls with percentile bands."""
    return _ensemble_panels(summary_paths, ("V", "L"), out)


def plot_pareto(pareto_path: str | Path, out: str | Path) -> tuple[Path, dict[str, int]]:
    """Cost-versus-unfairness trade-off: the fairness-weight frontier as a
    connected scatter, the homogeneous baseline as a separate marker."""
    frame = load_csv(pareto_path, PARETO_COLUMNS, PARETO_NUMERIC)
    frame["eta"] = frame["eta"].astype(str)
    frontier = frame[frame["eta"] != "homogeneous"]
    baseline = frame[frame["eta"] == "homogeneous"]
    if len(frontier) < 2:
        raise UsageError(
            f"need at least two frontier rows to draw a trade-off, got {len(frontier)}"
        )
    fig, ax = plt.subplots(figsize=(4.2, 3.4))
    ax.errorbar(
        frontier["mean_unfairness"],
        frontier["mean_cost"],
        xerr=frontier["stderr_unfairness"],
        yerr=frontier["stderr_cost"],
        color="tab:blue",
        marker="o",
        ms=4,
        lw=1.2,
        capsize=2,
        label="group-specific policy",
    )
    for _, row in frontier.iterrows():
        ax.annotate(
            f"$\\eta$={row['eta']}",
            (row["mean_unfairness"], row["mean_cost"]),
            textcoords="offset points",
            xytext=(5, 4),
            fontsize=7,
        )
    counts = {"frontier": len(frontier)}
    if not baseline.empty:
        ax.errorbar(
            baseline["mean_unfairness"],
            baseline["mean_cost"],
            xerr=baseline["stderr_unfairness"],
            yerr=baseline["stderr_cost"],
            color="tab:purple",
            marker="*",
            ms=10,
            lw=0,
            capsize=2,
            label="homogeneous policy",
        )
        counts["homogeneous"] = len(baseline)
    ax.set_xlabel("mean integrated unfairness")
    ax.set_ylabel("mean economic loss + control cost")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return save(fig, out), counts


def plot_bench(bench_path: str | Path, out: str | Path) -> tuple[Path, dict[str, int]]:
    """Runtime (left axis, blue) and closed-loop objective (right axis, red)
    against the rollout count."""
    frame = load_csv(bench_path, BENCH_COLUMNS, BENCH_NUMERIC)
    if len(frame) < 2:
        raise UsageError(f"need at least two benchmark rows, got {len(frame)}")
    fig, ax_rt = plt.subplots(figsize=(4.6, 3.2))
    ax_obj = ax_rt.twinx()
    ax_rt.plot(
        frame["samples"], frame["mean_runtime_s"], color="tab:blue", marker="o", ms=4
    )
    ax_obj.plot(
        frame["samples"], frame["mean_objective"], color="tab:red", marker="s", ms=4
    )
    ax_rt.set_xlabel("sample trajectories M")
    ax_rt.set_ylabel("mean runtime (s)", color="tab:blue")
    ax_obj.set_ylabel("mean objective", color="tab:red")
    ax_rt.tick_params(axis="y", labelcolor="tab:blue")
    ax_obj.tick_params(axis="y", labelcolor="tab:red")
    fig.tight_layout()
    return save(fig, out), {"runtime": len(frame), "objective": len(frame)}

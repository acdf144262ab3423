"""CSV loading, schema validation and deterministic matplotlib setup."""

from __future__ import annotations

from pathlib import Path

import matplotlib
import pandas as pd

matplotlib.use("Agg")
# stable element ids in SVG output; figures must be byte-identical across runs
matplotlib.rcParams["svg.hashsalt"] = "figgen"


class SchemaError(ValueError):
    """Input CSV does not match the expected harness schema."""


class UsageError(ValueError):
    """Structurally valid input that cannot be plotted (e.g. too few rows)."""


#: required columns and, within them, the ones that must parse as numbers
SUMMARY_COLUMNS = ("t", "group", "variable", "mean", "p10", "p90")
SUMMARY_NUMERIC = ("t", "group", "mean", "p10", "p90")
PARETO_COLUMNS = ("eta", "mean_cost", "mean_unfairness", "stderr_cost", "stderr_unfairness")
PARETO_NUMERIC = ("mean_cost", "mean_unfairness", "stderr_cost", "stderr_unfairness")
BENCH_COLUMNS = ("samples", "mean_runtime_s", "mean_objective")
BENCH_NUMERIC = BENCH_COLUMNS

#: Fixed group palette: first three groups are the upper/middle/lower income
#: regions; a single-group file is the homogeneous/single model.
GROUP_COLORS = ("tab:green", "tab:red", "tab:blue", "tab:orange", "tab:brown")
SINGLE_GROUP_COLOR = "tab:purple"


def load_csv(
    path: str | Path,
    required: tuple[str, ...],
    numeric: tuple[str, ...] = (),
) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise UsageError(f"input file not found: {path}")
    frame = pd.read_csv(path)
    for column in required:
        if column not in frame.columns:
            raise SchemaError(f"missing column '{column}' in {path}")
    for column in numeric:
        if not pd.api.types.is_numeric_dtype(frame[column]):
            raise SchemaError(f"column '{column}' in {path} is not numeric")
    return frame


def scenario_label(path: str | Path) -> str:
    """Label for a summary CSV: its scenario directory, else the file stem."""
    path = Path(path)
    parent = path.parent.name
    return parent if parent not in ("", ".", "/") else path.stem


def group_color(group: int, n_groups: int) -> str:
    if n_groups == 1:
        return SINGLE_GROUP_COLOR
    return GROUP_COLORS[group % len(GROUP_COLORS)]


def savefig_metadata(path: Path) -> dict | None:
    """Strip per-run timestamps so identical inputs give identical bytes."""
    suffix = path.suffix.lower()
    if suffix == ".svg":
        return {"Date": None}
    if suffix == ".pdf":
        return {"CreationDate": None}
    return None


def save(fig, path: str | Path) -> Path:
    import matplotlib.pyplot as plt

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metadata = savefig_metadata(path)
    try:
        if metadata is None:
            fig.savefig(path)
        else:
            fig.savefig(path, metadata=metadata)
    finally:
        plt.close(fig)
    return path

"""Publication-style figures from the epidemic-policy harness CSV outputs."""

from .core import SchemaError, UsageError
from .plots import plot_bench, plot_control_ensemble, plot_pareto, plot_state_ensemble

__all__ = [
    "SchemaError",
    "UsageError",
    "plot_bench",
    "plot_control_ensemble",
    "plot_pareto",
    "plot_state_ensemble",
]

__version__ = "0.1.0"

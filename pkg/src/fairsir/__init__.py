"""Fairness-aware vaccination/lockdown policies for a stochastic multi-group
SIR model, solved by sampling-based path integral control."""

from .config import ExperimentConfig, default_config, load_config, write_config
from .costs import (
    CostConfig,
    control_cost,
    control_cost_matrix,
    economic_loss,
    state_cost,
    terminal_cost,
    trajectory_cost,
    unfairness_pairwise,
)
from .errors import ConfigurationError, NumericError
from .harness import (
    BenchRow,
    ParetoRow,
    ReplicationSummary,
    RunRecord,
    bench,
    closed_loop_simulate,
    eta_sweep,
    homogeneous_policy_control,
    run_replications,
)
from .model import (
    ModelParams,
    TimeGrid,
    actuated_control_matrix,
    control_matrix,
    euler_maruyama_step,
    make_state,
    normalize_state,
    passive_drift,
    rollout_uncontrolled,
    validate_state,
)
from .solver import (
    RolloutEnsemble,
    SolverConfig,
    gain_matrix,
    pic_control,
    sample_ensemble,
    softmin_weights,
)

__all__ = [
    "BenchRow",
    "ConfigurationError",
    "CostConfig",
    "ExperimentConfig",
    "ModelParams",
    "NumericError",
    "ParetoRow",
    "ReplicationSummary",
    "RolloutEnsemble",
    "RunRecord",
    "SolverConfig",
    "TimeGrid",
    "actuated_control_matrix",
    "bench",
    "closed_loop_simulate",
    "control_cost",
    "control_cost_matrix",
    "control_matrix",
    "default_config",
    "economic_loss",
    "eta_sweep",
    "euler_maruyama_step",
    "gain_matrix",
    "homogeneous_policy_control",
    "load_config",
    "make_state",
    "normalize_state",
    "passive_drift",
    "pic_control",
    "rollout_uncontrolled",
    "run_replications",
    "sample_ensemble",
    "softmin_weights",
    "state_cost",
    "terminal_cost",
    "trajectory_cost",
    "unfairness_pairwise",
    "validate_state",
    "write_config",
]

__version__ = "0.1.0"

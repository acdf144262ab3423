"""State, control and trajectory costs, including the disparity penalty.

The running state cost combines an unemployment-based economic loss
``sum_j w_j (I_j + D_j)`` with a tunable penalty ``eta * U(x)`` on the
unfairness measure ``U``; the shipped measure is the largest pairwise gap in
unemployment rates across groups.  The quadratic control cost uses the
diagonal matrix ``R = lam * Sigma^-1`` tied to the noise covariance, which is
the structural condition the sampling controller relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError
from .model import D, I, ModelParams, TimeGrid

#: Batch-aware unfairness evaluator: maps states (..., J, 4) -> (...).
UnfairnessMeasure = Callable[[np.ndarray], np.ndarray]


def unfairness_pairwise(state: np.ndarray) -> np.ndarray:
    """Largest pairwise gap in unemployment rates I_j + D_j (0 for J = 1)."""
    state = np.asarray(state, dtype=float)
    burden = state[..., I] + state[..., D]
    return burden.max(axis=-1) - burden.min(axis=-1)


@dataclass(frozen=True)
class CostConfig:
    """Cost weights plus the noise covariance the control cost derives from.

    ``sigma`` is the diagonal of the 2J x 2J noise covariance in channel
    order (V_1, L_1, ..., V_J, L_J).  ``unfairness`` may be swapped for any
    batch-aware evaluator; ``None`` selects the pairwise measure (which the
    fast rollout kernels hard-code).
    """

    weights: np.ndarray
    eta: float
    lam: float
    sigma: np.ndarray
    unfairness: Optional[UnfairnessMeasure] = field(default=None)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ConfigurationError(f"weights must be a 1-d vector, got shape {w.shape}")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ConfigurationError("weights must be finite and nonnegative")
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.shape != (2 * w.size,):
            raise ConfigurationError(
                f"sigma must be the 2J-diagonal of the noise covariance, got shape {sigma.shape}"
            )
        if np.any(sigma < 0) or not np.all(np.isfinite(sigma)):
            raise ConfigurationError("sigma must be finite and nonnegative")
        if self.eta < 0:
            raise ConfigurationError(f"eta must be nonnegative, got {self.eta}")
        if not self.lam > 0:
            raise ConfigurationError(f"lambda must be positive, got {self.lam}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def from_model(
        cls,
        weights,
        eta: float,
        lam: float,
        params: ModelParams,
        unfairness: Optional[UnfairnessMeasure] = None,
    ) -> "CostConfig":
        return cls(
            weights=weights,
            eta=eta,
            lam=lam,
            sigma=params.noise_variance_diagonal(),
            unfairness=unfairness,
        )

    @property
    def num_groups(self) -> int:
        return self.weights.size

    def control_cost_diagonal(self) -> np.ndarray:
        """Diagonal of R = lam * Sigma^-1 as a (2J,) vector."""
        if np.any(self.sigma == 0):
            raise ConfigurationError(
                "control cost is undefined for zero noise variance (R = lam/sigma^2)"
            )
        return self.lam / self.sigma

    def evaluate_unfairness(self, state: np.ndarray) -> np.ndarray:
        measure = self.unfairness if self.unfairness is not None else unfairness_pairwise
        return measure(np.asarray(state, dtype=float))


def control_cost_matrix(lam: float, sigma: np.ndarray) -> np.ndarray:
    """Control cost matrix R = lam * Sigma^-1 for a diagonal covariance.

    ``sigma`` is the (2J,) diagonal of Sigma; all entries must be strictly
    positive (zero-variance channels would make control infinitely costly).
    """
    sigma = np.asarray(sigma, dtype=float)
    if not lam > 0:
        raise ConfigurationError(f"lambda must be positive, got {lam}")
    if np.any(sigma <= 0) or not np.all(np.isfinite(sigma)):
        raise ConfigurationError("all noise variances must be strictly positive")
    return np.diag(lam / sigma)


def state_cost(state: np.ndarray, cfg: CostConfig) -> np.ndarray:
    """Running cost q(x) = sum_j w_j (I_j + D_j) + eta * U(x); batch-aware."""
    state = np.asarray(state, dtype=float)
    if state.shape[-2] != cfg.num_groups:
        raise ConfigurationError(
            f"state has {state.shape[-2]} groups, cost config has {cfg.num_groups}"
        )
    burden = state[..., I] + state[..., D]
    econ = np.sum(cfg.weights * burden, axis=-1)
    return econ + cfg.eta * cfg.evaluate_unfairness(state)


def economic_loss(state: np.ndarray, cfg: CostConfig) -> np.ndarray:
    """Economic term of the running cost alone, sum_j w_j (I_j + D_j)."""
    state = np.asarray(state, dtype=float)
    burden = state[..., I] + state[..., D]
    return np.sum(cfg.weights * burden, axis=-1)


def terminal_cost(state: np.ndarray, cfg: CostConfig) -> np.ndarray:
    """Terminal cost; identical to the running state cost at the final state."""
    return state_cost(state, cfg)


def control_cost(control: np.ndarray, cfg: CostConfig) -> float:
    """Quadratic control cost 0.5 * u^T R u with the derived diagonal R."""
    u = np.asarray(control, dtype=float).reshape(-1)
    if u.shape != (2 * cfg.num_groups,):
        raise ConfigurationError(
            f"control must have {2 * cfg.num_groups} channels, got {u.shape}"
        )
    if not np.any(u):
        # zero control costs nothing even when R is undefined (sigma = 0)
        return 0.0
    r_diag = cfg.control_cost_diagonal()
    return 0.5 * float(np.sum(r_diag * u * u))


def trajectory_cost(
    traj: np.ndarray, start_step: int, grid: TimeGrid, cfg: CostConfig
) -> float:
    """Discretized cost of an uncontrolled trajectory spanning steps
    ``start_step .. K``: running state costs weighted by dt plus the terminal
    cost (no control term; rollouts carry zero control)."""
    traj = np.asarray(traj, dtype=float)
    if traj.ndim != 3 or traj.shape[0] == 0:
        raise ConfigurationError("trajectory must be a non-empty (T, J, 4) array")
    expected = grid.steps - start_step + 1
    if traj.shape[0] != expected:
        raise ConfigurationError(
            f"trajectory must span steps {start_step}..{grid.steps} "
            f"({expected} states), got {traj.shape[0]}"
        )
    running = state_cost(traj[:-1], cfg) if traj.shape[0] > 1 else 0.0
    return float(np.sum(running) * grid.dt + state_cost(traj[-1], cfg))

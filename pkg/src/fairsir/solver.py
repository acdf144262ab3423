"""Sampling-based path integral controller.

At a given state and time step the controller rolls out M uncontrolled
trajectories of the stochastic dynamics to the horizon, scores each by its
accumulated state cost, and turns the exponentially reweighted first-step
noise draws into a control through the state-dependent gain matrix:

    u*(x) ~= Gain(x) . [ sum_m exp(-J_m / lam) G_c(x) eps_m / sqrt(dt) ]
                       / [ sum_m exp(-J_m / lam) ]

Low-cost rollouts dominate the average, so the control pushes the system
along the noise directions that cheap futures happened to take.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .costs import CostConfig, state_cost
from .errors import ConfigurationError, NumericError
from .model import (
    I,
    ModelParams,
    S,
    TimeGrid,
    actuated_control_matrix,
    euler_maruyama_step,
)
from .rng import RngRoot, generator


@dataclass(frozen=True)
class SolverConfig:
    """Monte Carlo controller settings.

    ``lam`` is the softmin temperature and must equal the cost model's
    ``lam`` (one condition ties control cost to noise covariance).
    ``epsilon_actuation`` is the compartment size below which a control
    channel is switched off instead of divided by a vanishing S or I.
    """

    samples: int
    lam: float
    grid: TimeGrid
    epsilon_actuation: float = 1e-6
    u_max: Optional[float] = None

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigurationError(f"samples must be >= 1, got {self.samples}")
        if not self.lam > 0:
            raise ConfigurationError(f"lambda must be positive, got {self.lam}")
        if not 0 < self.epsilon_actuation <= 1e-3:
            raise ConfigurationError(
                f"epsilon_actuation must be in (0, 1e-3], got {self.epsilon_actuation}"
            )
        if self.u_max is not None and not self.u_max > 0:
            raise ConfigurationError(f"u_max must be positive, got {self.u_max}")


@dataclass(frozen=True)
class RolloutEnsemble:
    """Per-trajectory cost and first-step noise draw of one Monte Carlo batch."""

    costs: np.ndarray  # (M,)
    first_noise: np.ndarray  # (M, J, 2), scaled draws

    def __post_init__(self):
        if self.costs.ndim != 1 or self.costs.shape[0] != self.first_noise.shape[0]:
            raise ConfigurationError("ensemble costs and noises disagree in size")
        if not np.all(np.isfinite(self.costs)):
            raise NumericError("ensemble contains non-finite trajectory costs")


def softmin_weights(trajectory_costs: np.ndarray, lam: float) -> np.ndarray:
    """Normalized exp(-cost/lam) weights, computed min-shifted.

    Subtracting the minimum cost before exponentiating cancels in the ratio
    but keeps the exponentials in range for realistically large costs.
    """
    c = np.asarray(trajectory_costs, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise ConfigurationError("costs must be a non-empty vector")
    if not np.all(np.isfinite(c)):
        raise NumericError("softmin received non-finite costs")
    if not lam > 0:
        raise ConfigurationError(f"lambda must be positive, got {lam}")
    shifted = np.exp(-(c - c.min()) / lam)
    return shifted / shifted.sum()


def gain_matrix(
    state: np.ndarray,
    control_cost_diag: Optional[np.ndarray] = None,
    epsilon_actuation: float = 1e-6,
) -> np.ndarray:
    """State-dependent gain mapping weighted noise averages to controls.

    With the square actuated matrix G_c = diag(-S_1, -I_1, ...) the general
    expression R^-1 G_c^T (G_c R^-1 G_c^T)^-1 collapses to G_c^-1 and the
    control cost matrix cancels entirely (``control_cost_diag`` is accepted
    for interface symmetry).  Rows whose compartment is below
    ``epsilon_actuation`` are zeroed: there is nobody left to vaccinate or
    lock down, and inverting a vanishing fraction would only amplify noise.
    """
    state = np.asarray(state, dtype=float)
    occupancy = state[:, (S, I)].reshape(-1)  # (S_1, I_1, S_2, I_2, ...)
    active = occupancy >= epsilon_actuation
    inv = np.where(active, -1.0 / np.where(active, occupancy, 1.0), 0.0)
    return np.diag(inv)


def sample_ensemble(
    state: np.ndarray,
    start_step: int,
    solver_cfg: SolverConfig,
    cost_cfg: CostConfig,
    params: ModelParams,
    rng_root: RngRoot,
) -> RolloutEnsemble:
    """Roll M independent uncontrolled trajectories from ``state`` at
    ``start_step`` to the horizon and score them.

    The noise tensor for the whole batch is drawn in one shot from a Philox
    generator keyed by ``rng_root``; trajectory m consumes slice ``[:, m]``,
    so the result does not depend on rollout scheduling.
    """
    k_total = solver_cfg.grid.steps
    if not 0 <= start_step <= k_total - 1:
        raise ConfigurationError(
            f"start_step must be in [0, {k_total - 1}], got {start_step}"
        )
    n_groups = params.num_groups
    if cost_cfg.num_groups != n_groups:
        raise ConfigurationError("cost config and model params disagree on group count")
    state = np.asarray(state, dtype=float)
    n_steps = k_total - start_step
    gen = generator(rng_root)
    raw = gen.standard_normal((n_steps, solver_cfg.samples, n_groups, 2))
    first_noise = raw[0] * params.sigma_channels()
    if cost_cfg.unfairness is None:
        trajectory_costs = _kernels.rollout_costs(
            state,
            raw,
            solver_cfg.grid.dt,
            params.beta,
            params.gamma,
            params.delta,
            params.sigma_v,
            params.sigma_l,
            cost_cfg.weights,
            cost_cfg.eta,
        )
    else:
        trajectory_costs = _rollout_costs_reference(
            state, raw, solver_cfg.grid.dt, params, cost_cfg
        )
    if not np.all(np.isfinite(trajectory_costs)):
        raise NumericError("rollout produced non-finite trajectory costs")
    return RolloutEnsemble(costs=trajectory_costs, first_noise=first_noise)


def _rollout_costs_reference(
    state: np.ndarray,
    raw_noise: np.ndarray,
    dt: float,
    params: ModelParams,
    cost_cfg: CostConfig,
) -> np.ndarray:
    """Plain-numpy twin of the compiled rollout kernel.

    Used when a custom unfairness measure is configured, and as the
    independent reference the kernel is tested against.
    """
    n_steps, n_traj, n_groups, _ = raw_noise.shape
    x = np.broadcast_to(state, (n_traj, n_groups, 4)).copy()
    trajectory_costs = np.zeros(n_traj)
    sigma = params.sigma_channels()
    zero_u = np.zeros((n_groups, 2))
    for k in range(n_steps):
        trajectory_costs += state_cost(x, cost_cfg) * dt
        x = euler_maruyama_step(x, zero_u, raw_noise[k] * sigma, dt, params)
    trajectory_costs += state_cost(x, cost_cfg)
    return trajectory_costs


def pic_control(
    state: np.ndarray,
    start_step: int,
    solver_cfg: SolverConfig,
    cost_cfg: CostConfig,
    params: ModelParams,
    rng_root: RngRoot,
) -> np.ndarray:
    """Path integral control at ``state`` / ``start_step``; returns (J, 2).

    Computes softmin weights over a fresh rollout ensemble, averages the
    first-step noises through the actuated matrix and applies the gain.  When
    no compartment is degenerate the gain inverts the actuated matrix
    exactly, so the result equals the weighted noise average over sqrt(dt).
    Optionally clamps both channels into [0, u_max].
    """
    ensemble = sample_ensemble(state, start_step, solver_cfg, cost_cfg, params, rng_root)
    weights = softmin_weights(ensemble.costs, solver_cfg.lam)
    eps_avg = np.einsum("m,mjc->jc", weights, ensemble.first_noise).reshape(-1)
    g_c = actuated_control_matrix(state)
    gain = gain_matrix(state, epsilon_actuation=solver_cfg.epsilon_actuation)
    u = (gain @ (g_c @ eps_avg)) / np.sqrt(solver_cfg.grid.dt)
    u = u.reshape(params.num_groups, 2)
    if solver_cfg.u_max is not None:
        u = np.clip(u, 0.0, solver_cfg.u_max)
    return u

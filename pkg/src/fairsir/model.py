"""Multi-group SIR(D) state space, drift, control structure and stochastic integrator.

Conventions used throughout the package:

* a state is a float array of shape ``(J, 4)`` whose columns are the
  compartment fractions ``(S, I, R, D)`` of each group; every group is
  normalized to total population 1,
* a control is an array of shape ``(J, 2)`` with channels ``(V, L)``
  (vaccination rate and lockdown intensity, both 1/day),
* a noise draw has the same ``(J, 2)`` layout and is already scaled by the
  per-channel standard deviations (i.e. it is a sample of the discrete-time
  Gaussian disturbance, not a standard normal).

State-valued operations broadcast over leading batch dimensions, so a whole
ensemble ``(M, J, 4)`` can be advanced in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericError

S, I, R, D = 0, 1, 2, 3
V, L = 0, 1

#: Compartment / channel names in column order, used by the CSV emitters.
COMPARTMENTS = ("S", "I", "R", "D")
CHANNELS = ("V", "L")


def _as_vector(x, n: int, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (n,):
        raise ConfigurationError(f"{name} must have shape ({n},), got {v.shape}")
    return v


@dataclass(frozen=True)
class ModelParams:
    """Epidemic parameters for ``J`` groups.

    ``beta`` is the symmetric nonnegative ``(J, J)`` matrix of infection
    rates (diagonal = within-group, off-diagonal = cross-group contact),
    ``gamma``/``delta`` are per-group recovery and mortality rates and
    ``sigma_v``/``sigma_l`` the noise standard deviations of the vaccination
    and lockdown channels (per sqrt-day).
    """

    beta: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray
    sigma_v: np.ndarray
    sigma_l: np.ndarray

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        if beta.ndim != 2 or beta.shape[0] != beta.shape[1]:
            raise ConfigurationError(f"beta must be a square matrix, got {beta.shape}")
        j = beta.shape[0]
        object.__setattr__(self, "beta", beta)
        for name in ("gamma", "delta", "sigma_v", "sigma_l"):
            object.__setattr__(self, name, _as_vector(getattr(self, name), j, name))
        if not np.allclose(beta, beta.T, atol=1e-12):
            raise ConfigurationError("beta must be symmetric")
        for name in ("beta", "gamma", "delta", "sigma_v", "sigma_l"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)):
                raise ConfigurationError(f"{name} contains non-finite entries")
            if np.any(arr < 0):
                raise ConfigurationError(f"{name} must be nonnegative")

    @property
    def num_groups(self) -> int:
        return self.beta.shape[0]

    def sigma_channels(self) -> np.ndarray:
        """Per-group noise standard deviations as a ``(J, 2)`` array."""
        return np.stack([self.sigma_v, self.sigma_l], axis=1)

    def noise_variance_diagonal(self) -> np.ndarray:
        """Diagonal of the ``2J x 2J`` noise covariance, channel order
        ``(V_1, L_1, ..., V_J, L_J)``."""
        return (self.sigma_channels() ** 2).reshape(-1)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid: ``horizon`` days split in steps of ``dt`` days."""

    horizon: float
    dt: float

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        k = self.horizon / self.dt
        if self.horizon <= 0 or abs(k - round(k)) > 1e-9 or round(k) < 1:
            raise ConfigurationError(
                f"horizon/dt must be a positive integer, got {self.horizon}/{self.dt}"
            )

    @property
    def steps(self) -> int:
        """Number of integration steps K (the grid has K+1 time points)."""
        return int(round(self.horizon / self.dt))


def make_state(s, i, r, d) -> np.ndarray:
    """Assemble a ``(J, 4)`` state from per-group compartment sequences."""
    state = np.stack(
        [np.atleast_1d(np.asarray(c, dtype=float)) for c in (s, i, r, d)], axis=1
    )
    validate_state(state)
    return state


def validate_state(state: np.ndarray, atol: float = 1e-9) -> np.ndarray:
    """Check the simplex invariants; returns the state for chaining."""
    state = np.asarray(state, dtype=float)
    if state.ndim < 2 or state.shape[-1] != 4:
        raise ConfigurationError(f"state must have shape (..., J, 4), got {state.shape}")
    if not np.all(np.isfinite(state)):
        raise NumericError("state contains non-finite entries")
    if np.any(state < -atol) or np.any(state > 1 + atol):
        raise ConfigurationError("state fractions must lie in [0, 1]")
    sums = state.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > atol):
        raise ConfigurationError("per-group fractions must sum to 1")
    return state


def passive_drift(state: np.ndarray, params: ModelParams) -> np.ndarray:
    """Uncontrolled time derivative of the state, shape ``(..., J, 4)``.

    Per group j: dS = -S_j * sum_k beta_jk I_k, dI = S_j * sum_k beta_jk I_k
    - (gamma_j + delta_j) I_j, dR = gamma_j I_j, dD = delta_j I_j.  The four
    components of each group sum to zero (mass conservation).
    """
    state = np.asarray(state, dtype=float)
    if state.shape[-2] != params.num_groups:
        raise ConfigurationError(
            f"state has {state.shape[-2]} groups, params have {params.num_groups}"
        )
    s = state[..., S]
    i = state[..., I]
    force = i @ params.beta.T  # sum_k beta_jk I_k per group j
    infection = s * force
    out = np.empty_like(state)
    out[..., S] = -infection
    out[..., I] = infection - (params.gamma + params.delta) * i
    out[..., R] = params.gamma * i
    out[..., D] = params.delta * i
    return out


def control_matrix(state: np.ndarray) -> np.ndarray:
    """Control transition matrix of shape ``(4J, 2J)``.

    Block-diagonal with per-group 4x2 blocks
    ``[[-S, 0], [0, -I], [S, I], [0, 0]]`` (rows S, I, R, D; columns V, L):
    vaccination moves mass S->R at rate S*V, lockdown moves I->R at rate I*L,
    so every column sums to zero within its group.
    """
    state = np.asarray(state, dtype=float)
    j = state.shape[0]
    g = np.zeros((4 * j, 2 * j))
    for k in range(j):
        s, i = state[k, S], state[k, I]
        g[4 * k + S, 2 * k + V] = -s
        g[4 * k + I, 2 * k + L] = -i
        g[4 * k + R, 2 * k + V] = s
        g[4 * k + R, 2 * k + L] = i
    return g


def actuated_control_matrix(state: np.ndarray) -> np.ndarray:
    """Directly-actuated submatrix of :func:`control_matrix`, shape ``(2J, 2J)``.

    Keeps only the S and I rows of each group block, giving a diagonal matrix
    ``diag(-S_1, -I_1, ..., -S_J, -I_J)``.  R is dropped because it is pinned
    by the per-group normalization, which makes this square form invertible
    whenever all S_j, I_j > 0.
    """
    state = np.asarray(state, dtype=float)
    return np.diag(-state[:, (S, I)].reshape(-1))


def normalize_state(raw: np.ndarray) -> np.ndarray:
    """Project a raw post-step state back onto the per-group simplex.

    S, I and D are clamped to [0, 1] and R is recomputed as the slack
    1 - S - I - D.  If that slack is negative (a large excursion pushed mass
    out of R), S and I are rescaled to fit in 1 - D and R is set to 0; D is
    never reduced, so recorded deaths stay monotone through the repair.
    """
    raw = np.asarray(raw, dtype=float)
    if not np.all(np.isfinite(raw)):
        raise NumericError("normalize_state received non-finite values")
    s = np.clip(raw[..., S], 0.0, 1.0)
    i = np.clip(raw[..., I], 0.0, 1.0)
    d = np.clip(raw[..., D], 0.0, 1.0)
    r = 1.0 - s - i - d
    bad = r < 0.0
    if np.any(bad):
        denom = np.where(bad, s + i, 1.0)
        scale = np.where(bad, (1.0 - d) / denom, 1.0)
        s = s * scale
        i = i * scale
        r = np.where(bad, 0.0, r)
    out = np.empty_like(raw)
    out[..., S] = s
    out[..., I] = i
    out[..., R] = r
    out[..., D] = d
    return out


def euler_maruyama_step(
    state: np.ndarray,
    control: np.ndarray,
    noise: np.ndarray,
    dt: float,
    params: ModelParams,
) -> np.ndarray:
    """One Euler-Maruyama step ``x + f(x) dt + G(x) (u dt + eps sqrt(dt))``,
    followed by :func:`normalize_state`.

    ``noise`` holds the scaled Gaussian draws (one per group and channel);
    pass zeros for the deterministic forward-Euler step.
    """
    state = np.asarray(state, dtype=float)
    control = np.asarray(control, dtype=float)
    noise = np.asarray(noise, dtype=float)
    raw = state + passive_drift(state, params) * dt
    eff = control * dt + noise * math.sqrt(dt)
    s = state[..., S]
    i = state[..., I]
    raw[..., S] = raw[..., S] - s * eff[..., V]
    raw[..., I] = raw[..., I] - i * eff[..., L]
    raw[..., R] = raw[..., R] + (s * eff[..., V] + i * eff[..., L])
    return normalize_state(raw)


def rollout_uncontrolled(
    start: np.ndarray,
    grid: TimeGrid,
    start_step: int,
    noise: np.ndarray,
    params: ModelParams,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate the zero-control dynamics from ``start_step`` to the horizon.

    ``noise`` must hold the scaled draws for the remaining steps, shape
    ``(K - start_step, J, 2)``.  Returns the trajectory (``K - start_step + 1``
    states) and the draw applied on the first step, which the sampling
    controller consumes.
    """
    k_total = grid.steps
    if not 0 <= start_step <= k_total - 1:
        raise ConfigurationError(
            f"start_step must be in [0, {k_total - 1}], got {start_step}"
        )
    n_steps = k_total - start_step
    noise = np.asarray(noise, dtype=float)
    if noise.shape != (n_steps, params.num_groups, 2):
        raise ConfigurationError(
            f"noise must have shape {(n_steps, params.num_groups, 2)}, got {noise.shape}"
        )
    zero_u = np.zeros((params.num_groups, 2))
    traj = np.empty((n_steps + 1, params.num_groups, 4))
    traj[0] = start
    x = np.asarray(start, dtype=float)
    for k in range(n_steps):
        x = euler_maruyama_step(x, zero_u, noise[k], grid.dt, params)
        traj[k + 1] = x
    return traj, noise[0].copy()

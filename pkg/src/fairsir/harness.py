"""Closed-loop experiments: receding-horizon simulation, replication
statistics, eta sweeps and the runtime benchmark.

Each simulated day the configured policy recomputes its control from the
currently observed state (fresh rollout ensemble, no reuse across steps), the
executed step adds independent execution noise from the same covariance used
for planning, and running cost terms are accumulated alongside the
trajectory.  All randomness is keyed by (seed, replication, step, purpose),
so any number of worker processes produces identical results.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import multiprocessing
import numpy as np

from .config import ExperimentConfig
from .costs import CostConfig, control_cost, economic_loss
from .errors import ConfigurationError
from .model import COMPARTMENTS, CHANNELS, ModelParams, euler_maruyama_step
from .rng import (
    EXECUTION_STREAM,
    PLANNING_STREAM,
    RngRoot,
    generator,
    stream_seed,
)
from .solver import SolverConfig, pic_control


@dataclass(frozen=True)
class RunRecord:
    """Everything one closed-loop replication produced."""

    replication: int
    states: np.ndarray  # (K+1, J, 4)
    controls: np.ndarray  # (K, J, 2)
    econ_loss: float  # sum_k econ(x_k) dt + econ(x_K)
    control_cost: float  # sum_k 0.5 u^T R u dt
    unfairness_integral: float  # sum_k U(x_k) dt + U(x_K)
    unfairness_terminal: float  # U(x_K)
    total_cost: float  # econ_loss + eta * unfairness_integral + control_cost


@dataclass(frozen=True)
class ReplicationSummary:
    """Per-(t, group, variable) ensemble statistics plus the raw records."""

    records: list[RunRecord]
    table: list[tuple[int, int, str, float, float, float]]  # t, group, var, mean, p10, p90


@dataclass(frozen=True)
class ParetoRow:
    eta: str  # numeric eta or "homogeneous"
    mean_cost: float
    mean_unfairness: float
    stderr_cost: float
    stderr_unfairness: float


@dataclass(frozen=True)
class BenchRow:
    samples: int
    mean_runtime_s: float
    mean_objective: float


def averaged_single_group(
    params: ModelParams, cost: CostConfig
) -> tuple[ModelParams, CostConfig]:
    """Single-group model a policymaker would fit: unweighted averages of the
    within-group infection rates and of all other per-group parameters."""
    p1 = ModelParams(
        beta=np.array([[float(np.mean(np.diag(params.beta)))]]),
        gamma=np.array([float(np.mean(params.gamma))]),
        delta=np.array([float(np.mean(params.delta))]),
        sigma_v=np.array([float(np.mean(params.sigma_v))]),
        sigma_l=np.array([float(np.mean(params.sigma_l))]),
    )
    c1 = CostConfig.from_model(
        weights=np.array([float(np.mean(cost.weights))]),
        eta=cost.eta,
        lam=cost.lam,
        params=p1,
    )
    return p1, c1


def homogeneous_policy_control(
    world_state: np.ndarray,
    start_step: int,
    solver_cfg: SolverConfig,
    cost_cfg: CostConfig,
    params: ModelParams,
    rng_root: RngRoot,
) -> np.ndarray:
    """One-size-fits-all policy: collapse the observed groups to their
    unweighted mean, solve the single-group problem and broadcast the
    resulting (V, L) to every group."""
    world_state = np.asarray(world_state, dtype=float)
    aggregated = world_state.mean(axis=0, keepdims=True)
    params1, cost1 = averaged_single_group(params, cost_cfg)
    u1 = pic_control(aggregated, start_step, solver_cfg, cost1, params1, rng_root)
    return np.tile(u1, (params.num_groups, 1))


def _homogeneous_blind_sequence(cfg: ExperimentConfig, replication: int) -> np.ndarray:
    """Control schedule of the single-group policymaker, shape (K, 1, 2).

    The schedule comes from a closed loop run inside the averaged
    single-group model itself (same keyed noise streams), not from feedback
    on the true multi-group state: a policymaker who believes the averaged
    model plans and acts in it, and the schedule is then applied to the real
    world as-is.  For J = 1 the averaged model IS the true world, so this
    reproduces the multi-group policy exactly.
    """
    params1, cost1 = averaged_single_group(cfg.params, cfg.cost)
    model_world = replace(
        cfg,
        params=params1,
        cost=cost1,
        initial_state=cfg.initial_state.mean(axis=0, keepdims=True),
        policy_kind="multi-group-pic",
    )
    record = closed_loop_simulate(model_world, replication)
    return record.controls


def _policy_control(
    cfg: ExperimentConfig, state: np.ndarray, step: int, replication: int
) -> np.ndarray:
    if cfg.policy_kind == "uncontrolled":
        return np.zeros((cfg.params.num_groups, 2))
    root = stream_seed(cfg.seed, replication, step, PLANNING_STREAM)
    return pic_control(state, step, cfg.solver, cfg.cost, cfg.params, root)


def closed_loop_simulate(cfg: ExperimentConfig, replication: int) -> RunRecord:
    """Run one receding-horizon replication and account its realized costs."""
    grid = cfg.solver.grid
    k_total = grid.steps
    j = cfg.params.num_groups
    sigma = cfg.params.sigma_channels()
    schedule = (
        _homogeneous_blind_sequence(cfg, replication)
        if cfg.policy_kind == "homogeneous-pic"
        else None
    )
    states = np.empty((k_total + 1, j, 4))
    controls = np.empty((k_total, j, 2))
    x = cfg.initial_state.copy()
    states[0] = x
    econ = 0.0
    unfair = 0.0
    ctrl = 0.0
    for k in range(k_total):
        if schedule is not None:
            u = np.tile(schedule[k], (j, 1))
        else:
            u = _policy_control(cfg, x, k, replication)
        controls[k] = u
        econ += float(economic_loss(x, cfg.cost)) * grid.dt
        unfair += float(cfg.cost.evaluate_unfairness(x)) * grid.dt
        ctrl += control_cost(u, cfg.cost) * grid.dt
        exec_gen = generator(stream_seed(cfg.seed, replication, k, EXECUTION_STREAM))
        eps = exec_gen.standard_normal((j, 2)) * sigma
        x = euler_maruyama_step(x, u, eps, grid.dt, cfg.params)
        states[k + 1] = x
    econ += float(economic_loss(x, cfg.cost))
    terminal_unfair = float(cfg.cost.evaluate_unfairness(x))
    unfair += terminal_unfair
    total = econ + cfg.cost.eta * unfair + ctrl
    return RunRecord(
        replication=replication,
        states=states,
        controls=controls,
        econ_loss=econ,
        control_cost=ctrl,
        unfairness_integral=unfair,
        unfairness_terminal=terminal_unfair,
        total_cost=total,
    )


def _simulate_star(args: tuple[ExperimentConfig, int]) -> RunRecord:
    return closed_loop_simulate(*args)


def run_replications(
    cfg: ExperimentConfig, n: int | None = None, workers: int = 1
) -> ReplicationSummary:
    """Run ``n`` replications (``cfg.replications`` by default) and summarize.

    Statistics are the mean and the linearly interpolated 10th/90th
    percentiles across replications, per time step, group and variable
    (compartments at t = 0..K, control channels at t = 0..K-1).
    """
    n = cfg.replications if n is None else n
    if n < 1:
        raise ConfigurationError(f"replication count must be >= 1, got {n}")
    jobs = [(cfg, r) for r in range(n)]
    if workers > 1 and n > 1:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            records = list(pool.map(_simulate_star, jobs, chunksize=1))
    else:
        records = [closed_loop_simulate(cfg, r) for r in range(n)]

    states = np.stack([rec.states for rec in records])  # (N, K+1, J, 4)
    controls = np.stack([rec.controls for rec in records])  # (N, K, J, 2)
    table: list[tuple[int, int, str, float, float, float]] = []

    def summarize(block: np.ndarray, names: tuple[str, ...]):
        mean = block.mean(axis=0)
        p10 = np.percentile(block, 10, axis=0)
        p90 = np.percentile(block, 90, axis=0)
        steps, groups, _ = mean.shape
        for t in range(steps):
            for g in range(groups):
                for v, name in enumerate(names):
                    table.append(
                        (
                            t,
                            g,
                            name,
                            float(mean[t, g, v]),
                            float(p10[t, g, v]),
                            float(p90[t, g, v]),
                        )
                    )

    summarize(states, COMPARTMENTS)
    summarize(controls, CHANNELS)
    table.sort(key=lambda row: (row[0], row[1], row[2]))
    return ReplicationSummary(records=records, table=table)


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))


def eta_sweep(
    cfg: ExperimentConfig,
    eta_list: tuple[float, ...] | None = None,
    n: int | None = None,
    workers: int = 1,
) -> tuple[list[ParetoRow], dict[str, ReplicationSummary]]:
    """Trade-off data: one multi-group run per eta plus the homogeneous
    baseline.  Cost is economic loss plus control cost (the fairness penalty
    is the knob, not part of the reported cost axis)."""
    etas = cfg.eta_list if eta_list is None else tuple(eta_list)
    if len(etas) == 0:
        raise ConfigurationError("eta sweep needs at least one eta")
    rows: list[ParetoRow] = []
    summaries: dict[str, ReplicationSummary] = {}

    def add_row(label: str, summary: ReplicationSummary):
        cost_vals = np.array(
            [rec.econ_loss + rec.control_cost for rec in summary.records]
        )
        unf_vals = np.array([rec.unfairness_integral for rec in summary.records])
        mc, sc = _mean_stderr(cost_vals)
        mu, su = _mean_stderr(unf_vals)
        rows.append(ParetoRow(label, mc, mu, sc, su))
        summaries[label] = summary

    for eta in etas:
        scenario = cfg.with_eta(eta).with_policy("multi-group-pic")
        add_row(format_eta(eta), run_replications(scenario, n, workers))
    baseline = cfg.with_policy("homogeneous-pic")
    add_row("homogeneous", run_replications(baseline, n, workers))
    return rows, summaries


def format_eta(eta: float) -> str:
    return format(float(eta), "g")


def bench(
    cfg: ExperimentConfig,
    sample_counts: tuple[int, ...],
    runtime_repeats: int = 30,
    objective_sims: int = 30,
    workers: int = 1,
) -> list[BenchRow]:
    """Runtime/performance trade-off versus the rollout count M.

    For each M: mean wall-clock time of one control evaluation at the initial
    state (full remaining horizon), and the mean realized objective of
    ``objective_sims`` closed-loop simulations using that M.
    """
    if len(sample_counts) == 0:
        raise ConfigurationError("bench needs at least one sample count")
    rows = []
    for m in sample_counts:
        scenario = replace(
            cfg, solver=replace(cfg.solver, samples=int(m)), policy_kind="multi-group-pic"
        )
        root = stream_seed(scenario.seed, 0, 0, PLANNING_STREAM)
        pic_control(
            scenario.initial_state, 0, scenario.solver, scenario.cost, scenario.params, root
        )  # warm-up (JIT/caches) outside the timed section
        elapsed = []
        for _ in range(runtime_repeats):
            t0 = time.perf_counter()
            pic_control(
                scenario.initial_state,
                0,
                scenario.solver,
                scenario.cost,
                scenario.params,
                root,
            )
            elapsed.append(time.perf_counter() - t0)
        summary = run_replications(scenario, objective_sims, workers)
        objective = float(np.mean([rec.total_cost for rec in summary.records]))
        rows.append(BenchRow(int(m), float(np.mean(elapsed)), objective))
    return rows

"""Experiment configuration: defaults, INI-file loading and validation.

Config files are flat INI documents with exactly four sections --
``[model]``, ``[cost]``, ``[solver]`` and ``[experiment]`` -- and exactly the
keys listed in ``_SCHEMA`` below.  Unknown sections or keys are rejected so a
typo cannot silently fall back to a default.  List values are whitespace- or
comma-separated; the ``beta`` matrix separates rows with ``|``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .costs import CostConfig
from .errors import ConfigurationError
from .model import ModelParams, TimeGrid, make_state, validate_state
from .solver import SolverConfig

POLICY_KINDS = ("multi-group-pic", "homogeneous-pic", "uncontrolled")

_SCHEMA = {
    "model": {
        "beta",
        "gamma",
        "delta",
        "sigma_v",
        "sigma_l",
        "initial_s",
        "initial_i",
        "initial_r",
        "initial_d",
    },
    "cost": {"weights", "eta", "lambda"},
    "solver": {"samples", "horizon", "dt", "epsilon_actuation", "u_max"},
    "experiment": {"policy", "replications", "seed", "etas", "outdir"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one run needs: model, costs, solver and experiment settings."""

    params: ModelParams
    initial_state: np.ndarray
    cost: CostConfig
    solver: SolverConfig
    policy_kind: str = "multi-group-pic"
    replications: int = 500
    seed: int = 42
    eta_list: tuple[float, ...] = (0.0, 0.01, 0.02, 0.05, 0.08)
    outdir: Path = Path("out")

    def __post_init__(self):
        object.__setattr__(
            self, "initial_state", np.asarray(self.initial_state, dtype=float)
        )
        object.__setattr__(self, "outdir", Path(self.outdir))
        object.__setattr__(self, "eta_list", tuple(float(e) for e in self.eta_list))
        self.validate()

    def validate(self) -> None:
        validate_state(self.initial_state)
        j = self.params.num_groups
        if self.initial_state.shape != (j, 4):
            raise ConfigurationError(
                f"initial state has shape {self.initial_state.shape}, expected ({j}, 4)"
            )
        if self.cost.num_groups != j:
            raise ConfigurationError("cost weights and model params disagree on group count")
        if abs(self.cost.lam - self.solver.lam) > 0:
            raise ConfigurationError(
                "cost and solver must share one lambda "
                f"(got {self.cost.lam} and {self.solver.lam})"
            )
        if self.policy_kind not in POLICY_KINDS:
            raise ConfigurationError(
                f"policy must be one of {POLICY_KINDS}, got {self.policy_kind!r}"
            )
        if self.replications < 1:
            raise ConfigurationError(f"replications must be >= 1, got {self.replications}")
        if len(self.eta_list) == 0:
            raise ConfigurationError("eta_list must not be empty")
        if any(e < 0 for e in self.eta_list):
            raise ConfigurationError("eta values must be nonnegative")

    def with_eta(self, eta: float) -> "ExperimentConfig":
        return replace(self, cost=replace(self.cost, eta=float(eta)))

    def with_policy(self, policy_kind: str) -> "ExperimentConfig":
        return replace(self, policy_kind=policy_kind)


def default_config() -> ExperimentConfig:
    """Three income groups (upper, middle, lower) over 180 days.

    The lower-income group carries a higher infection rate (0.3 vs 0.2) and
    mortality (0.05 vs 0.03) and one-third lower economic output than the
    middle group's baseline; cross-group infection rates default to zero.
    Channel noise variance is 0.01 (std 0.1 per sqrt-day) and the temperature
    defaults to 3, calibrated so the sampled controls partially suppress the
    epidemic and respond smoothly to the fairness weight.
    """
    j = 3
    params = ModelParams(
        beta=np.diag([0.2, 0.2, 0.3]),
        gamma=np.full(j, 0.1),
        delta=np.array([0.03, 0.03, 0.05]),
        sigma_v=np.full(j, 0.1),
        sigma_l=np.full(j, 0.1),
    )
    initial = make_state([0.99] * j, [0.01] * j, [0.0] * j, [0.0] * j)
    lam = 3.0
    cost = CostConfig.from_model(
        weights=np.array([2.0, 1.0, 2.0 / 3.0]), eta=0.0, lam=lam, params=params
    )
    solver = SolverConfig(samples=1000, lam=lam, grid=TimeGrid(horizon=180.0, dt=1.0))
    return ExperimentConfig(params=params, initial_state=initial, cost=cost, solver=solver)


def _tokens(text: str) -> list[str]:
    return text.replace(",", " ").split()


def _parse_floats(text: str, key: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in _tokens(text)])
    except ValueError as exc:
        raise ConfigurationError(f"could not parse {key!r} as numbers: {text!r}") from exc


def _parse_matrix(text: str, key: str) -> np.ndarray:
    rows = [r for r in text.split("|") if r.strip()]
    parsed = [_parse_floats(r, key) for r in rows]
    if len({p.size for p in parsed}) > 1:
        raise ConfigurationError(f"{key!r} rows have inconsistent lengths")
    return np.array(parsed)


def _parse_scalar(text: str, key: str) -> float:
    vals = _parse_floats(text, key)
    if vals.size != 1:
        raise ConfigurationError(f"{key!r} must be a single number, got {text!r}")
    return float(vals[0])


def _parse_int(text: str, key: str) -> int:
    value = _parse_scalar(text, key)
    if value != int(value):
        raise ConfigurationError(f"{key!r} must be an integer, got {text!r}")
    return int(value)


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate an INI experiment config."""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigurationError(f"could not parse {path}: {exc}") from exc

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigurationError(f"unknown config section [{section}]")
        unknown = set(parser[section]) - _SCHEMA[section]
        if unknown:
            raise ConfigurationError(
                f"unknown keys in [{section}]: {', '.join(sorted(unknown))}"
            )
    missing_sections = set(_SCHEMA) - set(parser.sections())
    if missing_sections:
        raise ConfigurationError(
            f"missing config sections: {', '.join(sorted(missing_sections))}"
        )

    def require(section: str, key: str) -> str:
        if key not in parser[section]:
            raise ConfigurationError(f"missing key {key!r} in section [{section}]")
        return parser[section][key]

    model = parser["model"]
    beta = _parse_matrix(require("model", "beta"), "beta")
    params = ModelParams(
        beta=beta,
        gamma=_parse_floats(require("model", "gamma"), "gamma"),
        delta=_parse_floats(require("model", "delta"), "delta"),
        sigma_v=_parse_floats(require("model", "sigma_v"), "sigma_v"),
        sigma_l=_parse_floats(require("model", "sigma_l"), "sigma_l"),
    )
    initial = make_state(
        _parse_floats(require("model", "initial_s"), "initial_s"),
        _parse_floats(require("model", "initial_i"), "initial_i"),
        _parse_floats(require("model", "initial_r"), "initial_r"),
        _parse_floats(require("model", "initial_d"), "initial_d"),
    )

    lam = _parse_scalar(require("cost", "lambda"), "lambda")
    cost = CostConfig.from_model(
        weights=_parse_floats(require("cost", "weights"), "weights"),
        eta=_parse_scalar(require("cost", "eta"), "eta"),
        lam=lam,
        params=params,
    )

    solver_section = parser["solver"]
    u_max_text = solver_section.get("u_max", "").strip()
    solver = SolverConfig(
        samples=_parse_int(require("solver", "samples"), "samples"),
        lam=lam,
        grid=TimeGrid(
            horizon=_parse_scalar(require("solver", "horizon"), "horizon"),
            dt=_parse_scalar(require("solver", "dt"), "dt"),
        ),
        epsilon_actuation=_parse_scalar(
            solver_section.get("epsilon_actuation", "1e-6"), "epsilon_actuation"
        ),
        u_max=_parse_scalar(u_max_text, "u_max") if u_max_text else None,
    )

    experiment = parser["experiment"]
    eta_text = experiment.get("etas", "").strip()
    eta_list = (
        tuple(float(v) for v in _parse_floats(eta_text, "etas"))
        if eta_text
        else (cost.eta,)
    )
    return ExperimentConfig(
        params=params,
        initial_state=initial,
        cost=cost,
        solver=solver,
        policy_kind=experiment.get("policy", "multi-group-pic").strip(),
        replications=_parse_int(experiment.get("replications", "500"), "replications"),
        seed=_parse_int(experiment.get("seed", "42"), "seed"),
        eta_list=eta_list,
        outdir=Path(experiment.get("outdir", "out").strip()),
    )


def write_config(cfg: ExperimentConfig, path: str | Path) -> Path:
    """Serialize a config back to the INI layout ``load_config`` accepts."""

    def fmt_vec(v: Sequence[float]) -> str:
        return " ".join(repr(float(x)) for x in v)

    beta_rows = " | ".join(fmt_vec(row) for row in cfg.params.beta)
    lines = [
        "[model]",
        f"beta = {beta_rows}",
        f"gamma = {fmt_vec(cfg.params.gamma)}",
        f"delta = {fmt_vec(cfg.params.delta)}",
        f"sigma_v = {fmt_vec(cfg.params.sigma_v)}",
        f"sigma_l = {fmt_vec(cfg.params.sigma_l)}",
        f"initial_s = {fmt_vec(cfg.initial_state[:, 0])}",
        f"initial_i = {fmt_vec(cfg.initial_state[:, 1])}",
        f"initial_r = {fmt_vec(cfg.initial_state[:, 2])}",
        f"initial_d = {fmt_vec(cfg.initial_state[:, 3])}",
        "",
        "[cost]",
        f"weights = {fmt_vec(cfg.cost.weights)}",
        f"eta = {cfg.cost.eta!r}",
        f"lambda = {cfg.cost.lam!r}",
        "",
        "[solver]",
        f"samples = {cfg.solver.samples}",
        f"horizon = {cfg.solver.grid.horizon!r}",
        f"dt = {cfg.solver.grid.dt!r}",
        f"epsilon_actuation = {cfg.solver.epsilon_actuation!r}",
    ]
    if cfg.solver.u_max is not None:
        lines.append(f"u_max = {cfg.solver.u_max!r}")
    lines += [
        "",
        "[experiment]",
        f"policy = {cfg.policy_kind}",
        f"replications = {cfg.replications}",
        f"seed = {cfg.seed}",
        f"etas = {fmt_vec(cfg.eta_list)}",
        f"outdir = {cfg.outdir}",
        "",
    ]
    path = Path(path)
    path.write_text("\n".join(lines), encoding="utf-8")
    return path

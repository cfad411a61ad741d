"""Flat experiment configuration and its YAML file format.

A config file is a single mapping whose keys are the field names of
:class:`ExperimentConfig`; nested network/optimizer settings are flattened
into it.  Unknown keys are an error so typos never silently fall back to a
default.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path

import yaml

from .. import agents, netmodel
from ..exceptions import ConfigError
from ..trpo import TrpoConfig

_NETWORK_FIELDS = tuple(f.name for f in fields(netmodel.NetworkConfig))
_TRPO_FIELDS = tuple(f.name for f in fields(TrpoConfig))
BASELINE_METHODS = ("max_power", "random", "wmmse", "fp")


@dataclass(frozen=True)
class ExperimentConfig:
    # scenario
    num_cells: int = 3
    users_per_cell: int = 2
    bandwidth: float = 20e6
    pmax_dbm: float = 43.0
    noise_psd_dbm_hz: float = -150.0
    noise_figure_db: float = 9.0
    ref_distance: float = 0.3920
    cell_radius: float = 1000.0
    pathloss_exponent: float = 3.76
    layout: str = "line3"
    # optimizer
    kl_bound: float = 0.01
    step_decay: float = 0.90
    discount: float = 0.99
    episodes_per_iter: int = 1000
    hidden_sizes: tuple[int, ...] = (256, 256, 256)
    cg_iters: int = 10
    cg_tol: float = 1e-8
    fisher_damping: float = 1e-2
    max_backtracks: int = 10
    critic_lr: float = 1e-3
    critic_epochs: int = 5
    critic_batch_size: int = 64
    a2c_step_size: float = 7e-4
    # experiment
    scheme: str = "centralized"
    algorithm: str = "trpo"
    iterations: int = 1000
    n_seeds: int = 1
    eval_realizations: int = 1000
    pmax_sweep_dbm: tuple[float, ...] = (20.0, 25.0, 30.0, 35.0, 40.0, 43.0, 45.0, 50.0)
    constraint_mode: str = "per_user"
    output_dir: str = "runs"
    master_seed: int = 0
    baselines: tuple[str, ...] = BASELINE_METHODS
    solver_max_iters: int = 500
    solver_tol: float = 1e-4
    timing_realizations: int = 100
    norm_samples: int = 10_000

    def __post_init__(self):
        for name in ("hidden_sizes", "pmax_sweep_dbm", "baselines"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        # nested configs validate themselves
        self.network()
        self.trpo()
        agents.check_scheme(self.scheme)
        if self.algorithm not in agents.ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.constraint_mode not in netmodel.POWER_MODES:
            raise ConfigError(f"unknown constraint_mode {self.constraint_mode!r}")
        if self.n_seeds < 1:
            raise ConfigError("n_seeds must be >= 1")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be >= 0")
        if self.iterations < 0:
            raise ConfigError("iterations must be >= 0")
        if self.eval_realizations < 1 or self.timing_realizations < 1:
            raise ConfigError("realization counts must be >= 1")
        if not self.pmax_sweep_dbm:
            raise ConfigError("pmax_sweep_dbm must list at least one value")
        for p in self.pmax_sweep_dbm:
            if not 0.0 <= p <= 60.0:
                raise ConfigError(f"sweep value {p} dBm outside [0, 60]")
        unknown = set(self.baselines) - set(BASELINE_METHODS)
        if unknown:
            raise ConfigError(f"unknown baselines {sorted(unknown)}; expected {BASELINE_METHODS}")
        if self.solver_max_iters < 1 or not self.solver_tol > 0:
            raise ConfigError("solver_max_iters must be >= 1 and solver_tol > 0")

    def network(self) -> netmodel.NetworkConfig:
        return netmodel.NetworkConfig(**{k: getattr(self, k) for k in _NETWORK_FIELDS})

    def trpo(self) -> TrpoConfig:
        return TrpoConfig(**{k: getattr(self, k) for k in _TRPO_FIELDS})

    def replace(self, **changes) -> "ExperimentConfig":
        params = self.to_dict()
        params.update(changes)
        return ExperimentConfig(**params)

    def to_dict(self) -> dict:
        out = asdict(self)
        for key, value in out.items():
            if isinstance(value, tuple):
                out[key] = list(value)
        return out

    def snapshot(self) -> dict:
        """``to_dict`` without ``output_dir``: what a run records about itself.

        The output location is not an experiment parameter, and leaving it
        out keeps artifacts identical wherever they are written.
        """
        out = self.to_dict()
        del out["output_dir"]
        return out


def config_from_mapping(mapping) -> ExperimentConfig:
    if mapping is None:
        mapping = {}
    if not isinstance(mapping, dict):
        raise ConfigError("config document must be a flat key-value mapping")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(mapping) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(map(str, unknown))}")
    for key, value in mapping.items():
        if isinstance(value, dict):
            raise ConfigError(f"config key {key!r} must not be nested")
    try:
        return ExperimentConfig(**mapping)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            mapping = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return config_from_mapping(mapping)


def dump_config(cfg: ExperimentConfig, path, include_output_dir: bool = True) -> Path:
    path = Path(path)
    doc = cfg.to_dict() if include_output_dir else cfg.snapshot()
    path.write_text(yaml.safe_dump(doc, sort_keys=True), encoding="utf-8")
    return path

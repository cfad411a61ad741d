"""Seeded experiment campaigns: training, evaluation, power sweeps, timing, traces.

Every random draw is keyed on ``(master_seed, stream, index)`` so a campaign
is fully determined by its config.  Files whose name contains
``wallclock`` hold measured times; they are the only outputs that differ
between reruns.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .. import __version__, agents, baselines, netmodel
from ..agents import PolicyModel
from ..curves import smooth_curve
from ..exceptions import ConfigError, NumericalError, TrainingError
from .config import ExperimentConfig, dump_config
from .io import load_checkpoint, save_checkpoint, write_csv, write_json

# stream tags, disjoint from the per-run tags used inside agents.train
EVAL_STREAM = 10
POLICY_NOISE_STREAM = 11
RANDOM_BASELINE_STREAM = 12
TIMING_STREAM = 13
TRACE_STREAM = 14

CURVE_COLUMNS = tuple(c for c in agents.LOG_FIELDS if c != "wall_ms")
TABLE_COLUMNS = ("method", "B", "K", "alpha", "pmax_dbm", "n_realizations", "mean_mbps",
                 "std_mbps", "p05_mbps", "p50_mbps", "p95_mbps")
RECORD_COLUMNS = ("realization", "method", "pmax_dbm", "sum_rate_bps")
TIMING_COLUMNS = ("method", "n_realizations", "median_ms", "mean_ms")

EXCHANGE_CLASSES = {
    "centralized": ("O(KB^2)", "O(KB^2)"),
    "partial": ("O(KB)", "O(KB)"),
    "full": ("0", "O(KB)"),
    "fp": ("O(KB^2)", "O(KB^2)"),
    "wmmse": ("O(KB^2)", "O(KB^2)"),
    "max_power": ("0", "0"),
    "random": ("0", "0"),
}


def _out_dir(cfg: ExperimentConfig, out_dir) -> Path:
    path = Path(cfg.output_dir if out_dir is None else out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def realization_rng(master_seed: int, stream: int, index: int) -> np.random.Generator:
    return np.random.default_rng([master_seed, stream, index])


def shared_realizations(cfg: ExperimentConfig, n: int | None = None, stream: int = EVAL_STREAM):
    """The common ``(n, B, B, K)`` channel set every method is scored on."""
    n = cfg.eval_realizations if n is None else n
    net = cfg.network()
    return np.stack([netmodel.sample_realization(net, realization_rng(cfg.master_seed, stream, r))
                     for r in range(n)])


# ---------------------------------------------------------------- training

@dataclass
class RunManifest:
    config: dict
    version: str
    checkpoints: dict = field(default_factory=dict)    # seed label -> relative path
    results: dict = field(default_factory=dict)        # seed label -> list of relative paths
    status: dict = field(default_factory=dict)         # seed label -> "ok" | "failed: ..."
    wallclock_s: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"config": self.config, "version": self.version, "checkpoints": self.checkpoints,
                "results": self.results, "status": self.status}

    def missing_files(self, root) -> list[str]:
        root = Path(root)
        names = list(self.checkpoints.values())
        for paths in self.results.values():
            names.extend(paths)
        return [n for n in names if not (root / n).exists()]


def run_seed_key(cfg: ExperimentConfig, index: int) -> tuple[int, int]:
    return (cfg.master_seed, index)


def run_training_campaign(cfg: ExperimentConfig, out_dir=None, progress=None) -> RunManifest:
    """``n_seeds`` independent trainings on a shared scenario.

    A run that aborts is marked failed in the manifest; the campaign goes on.
    """
    root = _out_dir(cfg, out_dir)
    dump_config(cfg, root / "config.yaml", include_output_dir=False)
    manifest = RunManifest(config=cfg.snapshot(), version=__version__)
    net, tcfg = cfg.network(), cfg.trpo()
    total = time.perf_counter()
    for i in range(cfg.n_seeds):
        label = f"seed{i:02d}"
        t0 = time.perf_counter()
        try:
            result = agents.train(cfg.scheme, net, tcfg, cfg.iterations, run_seed_key(cfg, i),
                                  algorithm=cfg.algorithm, constraint_mode=cfg.constraint_mode,
                                  norm_samples=cfg.norm_samples, callback=progress)
        except (TrainingError, NumericalError) as exc:
            manifest.status[label] = f"failed: {exc}"
            manifest.wallclock_s[label] = time.perf_counter() - t0
            checkpoint = getattr(exc, "checkpoint", None)
            if checkpoint is not None:
                name = f"{label}_checkpoint_aborted.json"
                write_json(root / name, checkpoint)
                manifest.results[label] = [name]
            continue
        curve, clock = f"{label}_curve.csv", f"{label}_wallclock.csv"
        ckpt = f"{label}_checkpoint.json"
        write_csv(root / curve, result.log, CURVE_COLUMNS)
        write_csv(root / clock, result.log, ("iteration", "wall_ms"))
        save_checkpoint(result.model, root / ckpt)
        manifest.checkpoints[label] = ckpt
        manifest.results[label] = [curve]
        manifest.status[label] = "ok"
        manifest.wallclock_s[label] = time.perf_counter() - t0
    manifest.wallclock_s["total"] = time.perf_counter() - total
    write_json(root / "manifest.json", manifest.to_dict())
    write_json(root / "manifest_wallclock.json", manifest.wallclock_s)
    return manifest


# ---------------------------------------------------------------- evaluation

def _as_model(checkpoint) -> PolicyModel:
    return checkpoint if isinstance(checkpoint, PolicyModel) else load_checkpoint(checkpoint)


def _check_compatible(model: PolicyModel, net: netmodel.NetworkConfig, ignore_pmax: bool = False):
    trained = model.task.cfg
    if ignore_pmax:
        trained = trained.replace(pmax_dbm=net.pmax_dbm)
    if trained != net:
        raise ConfigError(f"checkpoint scenario {model.task.cfg} does not match {net}")


def _labels(models) -> list[str]:
    base = [f"{m.algorithm}_{m.scheme}" for m in models]
    return [b if base.count(b) == 1 else f"{b}_{i}" for i, b in enumerate(base)]


def _solve(solver, H, net, cfg: ExperimentConfig) -> np.ndarray:
    try:
        return solver(H, net, cfg.solver_max_iters, cfg.solver_tol).final_powers
    except NumericalError as exc:
        # fall back to the last finite iterate
        return exc.partial.final_powers


def baseline_powers(method: str, H, net: netmodel.NetworkConfig, cfg: ExperimentConfig,
                    realization: int) -> np.ndarray:
    if method == "max_power":
        return baselines.max_power(net)
    if method == "random":
        return baselines.random_power(
            net, realization_rng(cfg.master_seed, RANDOM_BASELINE_STREAM, realization))
    if method == "wmmse":
        return _solve(baselines.wmmse, H, net, cfg)
    if method == "fp":
        return _solve(baselines.fp, H, net, cfg)
    raise ConfigError(f"unknown baseline {method!r}")


def _table_row(method, net, rates) -> dict:
    rates = np.asarray(rates) / 1e6
    return {
        "method": method, "B": net.num_cells, "K": net.users_per_cell,
        "alpha": net.pathloss_exponent, "pmax_dbm": net.pmax_dbm, "n_realizations": rates.size,
        "mean_mbps": round(float(rates.mean()), 2), "std_mbps": round(float(rates.std()), 2),
        "p05_mbps": round(float(np.percentile(rates, 5)), 2),
        "p50_mbps": round(float(np.percentile(rates, 50)), 2),
        "p95_mbps": round(float(np.percentile(rates, 95)), 2),
    }


@dataclass
class EvaluationReport:
    table: list[dict]
    records: list[dict]
    decision_ms: dict

    def rates(self, method: str, pmax_dbm: float | None = None) -> np.ndarray:
        return np.array([r["sum_rate_bps"] for r in self.records if r["method"] == method
                         and (pmax_dbm is None or r["pmax_dbm"] == pmax_dbm)])


def _evaluate_at(cfg, net, models, labels, methods, channels):
    """Score every method on ``channels`` at the power budget of ``net``."""
    z = netmodel.noise_power(net)
    rates = {name: np.empty(len(channels)) for name in list(labels) + list(methods)}
    times = {name: np.empty(len(channels)) for name in rates}
    for r, H in enumerate(channels):
        for model, label in zip(models, labels):
            rng = realization_rng(cfg.master_seed, POLICY_NOISE_STREAM, r)
            t0 = time.perf_counter()
            P = model.allocate(H, rng, cfg=net)
            times[label][r] = 1e3 * (time.perf_counter() - t0)
            rates[label][r] = netmodel.sum_rate(H, P, z, net.bandwidth)
        for method in methods:
            t0 = time.perf_counter()
            P = baseline_powers(method, H, net, cfg, r)
            times[method][r] = 1e3 * (time.perf_counter() - t0)
            rates[method][r] = netmodel.sum_rate(H, P, z, net.bandwidth)
    return rates, times


def run_evaluation(cfg: ExperimentConfig, checkpoints=(), methods=None, out_dir=None,
                   write: bool = True) -> EvaluationReport:
    """Trained policies and baselines on one shared realization set."""
    net = cfg.network()
    models = [_as_model(c) for c in checkpoints]
    for m in models:
        _check_compatible(m, net)
    labels = _labels(models)
    methods = tuple(cfg.baselines if methods is None else methods)
    channels = shared_realizations(cfg)
    rates, times = _evaluate_at(cfg, net, models, labels, methods, channels)
    report = EvaluationReport(
        table=[_table_row(name, net, rates[name]) for name in rates],
        records=[{"realization": r, "method": name, "pmax_dbm": net.pmax_dbm,
                  "sum_rate_bps": float(rates[name][r])}
                 for name in rates for r in range(len(channels))],
        decision_ms={name: float(np.mean(t)) for name, t in times.items()},
    )
    if write:
        root = _out_dir(cfg, out_dir)
        write_csv(root / "evaluation.csv", report.table, TABLE_COLUMNS)
        write_csv(root / "evaluation_records.csv", report.records, RECORD_COLUMNS)
        write_csv(root / "evaluation_wallclock.csv",
                  [{"method": k, "mean_decision_ms": v} for k, v in report.decision_ms.items()],
                  ("method", "mean_decision_ms"))
    return report


def rescale_factor(pmax_dbm: float, trained_dbm: float) -> float:
    """Multiplier applied to policy outputs trained at ``trained_dbm``."""
    return float(netmodel.dbm_to_watts(pmax_dbm) / netmodel.dbm_to_watts(trained_dbm))


def run_power_sweep(cfg: ExperimentConfig, checkpoints=(), methods=None, out_dir=None,
                    write: bool = True) -> EvaluationReport:
    """Evaluation at every ``pmax_sweep_dbm`` value.

    Policies keep their trained weights; outputs are multiplied by
    ``Pmax_new / Pmax_train`` before clamping.  Baselines run natively.
    """
    base = cfg.network()
    models = [_as_model(c) for c in checkpoints]
    for m in models:
        _check_compatible(m, base, ignore_pmax=True)
    labels = _labels(models)
    methods = tuple(cfg.baselines if methods is None else methods)
    channels = shared_realizations(cfg)
    table, records, decision = [], [], {}
    for p in cfg.pmax_sweep_dbm:
        net = base.replace(pmax_dbm=float(p))
        rates, times = _evaluate_at(cfg, net, models, labels, methods, channels)
        for name in rates:
            row = _table_row(name, net, rates[name])
            trained = [m for m, lab in zip(models, labels) if lab == name]
            row["rescale_factor"] = (rescale_factor(p, trained[0].task.cfg.pmax_dbm)
                                     if trained else 1.0)
            table.append(row)
            records.extend({"realization": r, "method": name, "pmax_dbm": float(p),
                            "sum_rate_bps": float(rates[name][r])} for r in range(len(channels)))
            decision[(name, float(p))] = float(np.mean(times[name]))
    report = EvaluationReport(table, records, decision)
    if write:
        root = _out_dir(cfg, out_dir)
        write_csv(root / "sweep.csv", table, TABLE_COLUMNS + ("rescale_factor",))
        write_csv(root / "sweep_records.csv", records, RECORD_COLUMNS)
        write_csv(root / "sweep_wallclock.csv",
                  [{"method": k[0], "pmax_dbm": k[1], "mean_decision_ms": v}
                   for k, v in decision.items()], ("method", "pmax_dbm", "mean_decision_ms"))
    return report


# ---------------------------------------------------------------- timing

def decision_function(model: PolicyModel):
    """Callable ``H -> P`` doing exactly the per-slot work of a deployed scheme.

    Partial runs all ``B`` agents one after another (each waits for the
    previous powers); full runs a single agent, since all BSs act in
    parallel and the slot latency is one agent's latency.
    """
    B = model.task.cfg.num_cells
    policy = model.deploy()
    if model.scheme == "centralized":
        return policy.central
    if model.scheme == "full":
        order0 = agents.cyclic_order(0, B)
        return lambda H: policy.bs(H[0], order0)
    order = np.arange(B)
    cell_orders = [agents.partial_cell_order(order, pos) for pos in range(B)]

    def partial(H):
        chosen = np.empty((B, model.task.cfg.users_per_cell))
        for pos in range(B):
            chosen[pos] = policy.bs(H[pos], cell_orders[pos], chosen[:pos])
        return chosen

    return partial


def time_call(fn, *args, repeats: int = 5) -> float:
    """Best-of-``repeats`` wall time (seconds) of ``fn(*args)``."""
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def measure_timing(cfg: ExperimentConfig, checkpoints=(), methods=None, repeats: int = 5):
    """Per-method decision times (seconds) over ``timing_realizations`` instances.

    Every method gets the same treatment: best of ``repeats`` calls per
    realization, realizations interleaved across methods, one BLAS thread.
    """
    net = cfg.network()
    models = [_as_model(c) for c in checkpoints]
    for m in models:
        _check_compatible(m, net)
    labels = _labels(models)
    methods = tuple(cfg.baselines if methods is None else methods)
    channels = shared_realizations(cfg, cfg.timing_realizations, TIMING_STREAM)
    fns = {label: decision_function(m) for m, label in zip(models, labels)}
    samples = {name: np.empty(len(channels)) for name in list(labels) + list(methods)}
    with threadpool_limits(limits=1):
        for r, H in enumerate(channels):
            for label, fn in fns.items():
                samples[label][r] = time_call(fn, H, repeats=repeats)
            for method in methods:
                if method in ("wmmse", "fp"):
                    solver = getattr(baselines, method)
                    samples[method][r] = time_call(solver, H, net, cfg.solver_max_iters,
                                                   cfg.solver_tol, repeats=repeats)
                elif method == "random":
                    rng = realization_rng(cfg.master_seed, RANDOM_BASELINE_STREAM, r)
                    samples[method][r] = time_call(baselines.random_power, net, rng,
                                                   repeats=repeats)
                else:
                    samples[method][r] = time_call(baselines.max_power, net, repeats=repeats)
    return samples


def run_timing(cfg: ExperimentConfig, checkpoints=(), methods=None, out_dir=None,
               write: bool = True) -> list[dict]:
    samples = measure_timing(cfg, checkpoints, methods)
    rows = [{"method": name, "n_realizations": s.size, "median_ms": 1e3 * float(np.median(s)),
             "mean_ms": 1e3 * float(np.mean(s))} for name, s in samples.items()]
    if write:
        root = _out_dir(cfg, out_dir)
        write_csv(root / "timing_wallclock.csv", rows, TIMING_COLUMNS)
        write_json(root / "timing_plan.json", {
            "methods": list(samples), "n_realizations": cfg.timing_realizations,
            "threads": 1, "master_seed": cfg.master_seed, "version": __version__,
        })
    return rows


# ---------------------------------------------------------------- accounting

def exchange_accounting(cfg: ExperimentConfig | netmodel.NetworkConfig, scheme: str) -> dict:
    """Scalars exchanged between BSs (or with a central processor) per time slot."""
    net = cfg.network() if isinstance(cfg, ExperimentConfig) else cfg
    B, K = net.shape
    if scheme not in EXCHANGE_CLASSES:
        raise ConfigError(f"unknown scheme {scheme!r}; expected one of {tuple(EXCHANGE_CLASSES)}")
    csi_in = powers_out = relayed = 0
    per_bs_csi = 0
    if scheme in ("centralized", "fp", "wmmse"):
        csi_in, powers_out, per_bs_csi = K * B * B, K * B, K * B * B
    elif scheme == "partial":
        relayed = sum((b - 1) * K for b in range(2, B + 1))
        per_bs_csi = K * B
    elif scheme == "full":
        per_bs_csi = K * B
    exchange_class, csi_class = EXCHANGE_CLASSES[scheme]
    return {
        "scheme": scheme, "B": B, "K": K, "csi_scalars_inbound": csi_in,
        "power_scalars_outbound": powers_out, "power_scalars_relayed": relayed,
        "total_scalars": csi_in + powers_out + relayed, "exchange_class": exchange_class,
        "per_bs_csi_scalars": per_bs_csi, "per_bs_csi_class": csi_class,
    }


ACCOUNTING_COLUMNS = ("scheme", "B", "K", "csi_scalars_inbound", "power_scalars_outbound",
                      "power_scalars_relayed", "total_scalars", "exchange_class",
                      "per_bs_csi_scalars", "per_bs_csi_class")


def run_accounting(cfg: ExperimentConfig, schemes=None, out_dir=None, write: bool = True):
    schemes = tuple(EXCHANGE_CLASSES) if schemes is None else tuple(schemes)
    rows = [exchange_accounting(cfg, s) for s in schemes]
    if write:
        write_csv(_out_dir(cfg, out_dir) / "accounting.csv", rows, ACCOUNTING_COLUMNS)
    return rows


# ---------------------------------------------------------------- solver traces

TRACE_COLUMNS = ("realization", "method", "iterate", "sum_rate_mbps", "converged")


def run_baseline_traces(cfg: ExperimentConfig, n_realizations: int = 1, out_dir=None,
                        write: bool = True) -> list[dict]:
    """Per-iterate sum-rate of WMMSE and FP, with max-power/random as flat references."""
    net = cfg.network()
    channels = shared_realizations(cfg, n_realizations, TRACE_STREAM)
    z = netmodel.noise_power(net)
    rows = []
    for r, H in enumerate(channels):
        for method in cfg.baselines:
            if method in ("wmmse", "fp"):
                try:
                    trace = getattr(baselines, method)(H, net, cfg.solver_max_iters, cfg.solver_tol)
                except NumericalError as exc:
                    trace = exc.partial
                rows.extend({"realization": r, "method": method, "converged": trace.converged, **row}
                            for row in trace.rows())
            else:
                P = baseline_powers(method, H, net, cfg, r)
                rows.append({"realization": r, "method": method, "iterate": 0, "converged": True,
                             "sum_rate_mbps": netmodel.sum_rate(H, P, z, net.bandwidth) / 1e6})
    if write:
        write_csv(_out_dir(cfg, out_dir) / "baseline_traces.csv", rows, TRACE_COLUMNS)
    return rows


__all__ = [
    "RunManifest", "EvaluationReport", "run_training_campaign", "smooth_curve", "run_evaluation",
    "run_power_sweep", "run_timing", "measure_timing", "exchange_accounting", "run_accounting",
    "run_baseline_traces", "shared_realizations", "rescale_factor", "decision_function",
]

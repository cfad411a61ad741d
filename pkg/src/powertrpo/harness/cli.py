"""Command-line entry point: ``powertrpo <subcommand> [options]``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from contextlib import nullcontext

from threadpoolctl import threadpool_limits

from ..exceptions import ConfigError
from . import campaigns
from .config import ExperimentConfig, load_config

THREADS_ENV = "POWERTRPO_THREADS"
log = logging.getLogger("powertrpo")


def thread_limit():
    """Context limiting BLAS threads to ``$POWERTRPO_THREADS`` (all cores when unset)."""
    value = os.environ.get(THREADS_ENV)
    if not value:
        return nullcontext()
    try:
        n = int(value)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {value!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {value!r}")
    return threadpool_limits(limits=n)


def _resolve(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.output_dir is not None:
        overrides["output_dir"] = args.output_dir
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "scheme", None) is not None:
        overrides["scheme"] = args.scheme
    if getattr(args, "iterations", None) is not None:
        overrides["iterations"] = args.iterations
    return cfg.replace(**overrides) if overrides else cfg


def _progress(row, model):
    log.info("iter %4d  reward %.3f Mbps  smoothed %.3f Mbps  kl %.2e  j %d",
             row["iteration"], row["mean_reward_bps"] / 1e6, row["smoothed_reward_bps"] / 1e6,
             row["mean_kl"], row["j_used"])


def cmd_train(cfg, args):
    manifest = campaigns.run_training_campaign(cfg, progress=_progress if args.verbose else None)
    for label, status in manifest.status.items():
        print(f"{label}: {status}")
    return 0 if all(s == "ok" for s in manifest.status.values()) else 1


def _methods(args, cfg):
    return cfg.baselines if args.methods is None else tuple(args.methods)


def cmd_evaluate(cfg, args):
    report = campaigns.run_evaluation(cfg, args.checkpoint, _methods(args, cfg))
    for row in report.table:
        print(f"{row['method']:>24s}  {row['mean_mbps']:8.2f} Mbps")
    return 0


def cmd_sweep(cfg, args):
    report = campaigns.run_power_sweep(cfg, args.checkpoint, _methods(args, cfg))
    for row in report.table:
        print(f"{row['pmax_dbm']:5.1f} dBm  {row['method']:>24s}  {row['mean_mbps']:8.2f} Mbps")
    return 0


def cmd_timing(cfg, args):
    for row in campaigns.run_timing(cfg, args.checkpoint, _methods(args, cfg)):
        print(f"{row['method']:>24s}  median {row['median_ms']:.4f} ms  mean {row['mean_ms']:.4f} ms")
    return 0


def cmd_baselines(cfg, args):
    rows = campaigns.run_baseline_traces(cfg, args.realizations)
    print(f"wrote {len(rows)} trace rows")
    return 0


def cmd_accounting(cfg, args):
    for row in campaigns.run_accounting(cfg):
        print(f"{row['scheme']:>12s}  exchange {row['total_scalars']:4d} scalars "
              f"({row['exchange_class']}), per-BS CSI {row['per_bs_csi_class']}")
    return 0


COMMANDS = {
    "train": cmd_train, "evaluate": cmd_evaluate, "sweep": cmd_sweep, "timing": cmd_timing,
    "baselines": cmd_baselines, "accounting": cmd_accounting,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="powertrpo",
                                     description="Trust-region power allocation experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", "-c", help="YAML config file (flat key-value mapping)")
        p.add_argument("--output-dir", "-o", help="directory for all artifacts")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--scheme", choices=("centralized", "partial", "full"))
        p.add_argument("--iterations", type=int, help="training iterations override")
        p.add_argument("--verbose", "-v", action="store_true")
        if name in ("evaluate", "sweep", "timing"):
            p.add_argument("--checkpoint", action="append", default=[],
                           help="trained checkpoint (repeatable)")
            p.add_argument("--methods", nargs="*", help="baseline subset (default: config)")
        if name == "baselines":
            p.add_argument("--realizations", type=int, default=1)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s")
    try:
        cfg = _resolve(args)
        with thread_limit():
            return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

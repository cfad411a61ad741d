"""Experiment orchestration, persistence and the command-line interface."""
from .campaigns import (EvaluationReport, RunManifest, exchange_accounting, measure_timing,
                        run_accounting, run_baseline_traces, run_evaluation, run_power_sweep,
                        run_timing, run_training_campaign, shared_realizations, smooth_curve)
from .config import ExperimentConfig, config_from_mapping, dump_config, load_config
from .io import load_checkpoint, read_csv, save_checkpoint, write_csv

__all__ = [
    "EvaluationReport", "ExperimentConfig", "RunManifest", "config_from_mapping", "dump_config",
    "exchange_accounting", "load_checkpoint", "load_config", "measure_timing", "read_csv",
    "run_accounting", "run_baseline_traces", "run_evaluation", "run_power_sweep", "run_timing",
    "run_training_campaign", "save_checkpoint", "shared_realizations", "smooth_curve", "write_csv",
]

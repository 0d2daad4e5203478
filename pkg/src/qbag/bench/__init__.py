"""Benchmark harness: experiment grids, CSV tables, SVG plots and the CLI."""
from .config import DEFAULT_B, DEFAULT_DELTAS, LEARNERS, TABLE2_LEARNERS, ConfigError, ExperimentConfig, ResultRow
from .report import emit_csv, emit_plot, read_csv, summarize
from .runner import ExperimentError, run_experiment, run_learners

__all__ = [
    "DEFAULT_B",
    "DEFAULT_DELTAS",
    "LEARNERS",
    "TABLE2_LEARNERS",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentError",
    "ResultRow",
    "emit_csv",
    "emit_plot",
    "read_csv",
    "run_experiment",
    "run_learners",
    "summarize",
]

"""Sweeps, persistence, plots, reports and the command-line interface."""

from .config import ConfigError, SweepConfig, load_config, parse_config
from .plots import emit_plots
from .report import parse_trailer, report
from .sweep import CSV_HEADER, RunRecord, read_csv, run_sweep, write_csv

__all__ = [
    "CSV_HEADER", "ConfigError", "RunRecord", "SweepConfig", "emit_plots", "load_config",
    "parse_config", "parse_trailer", "read_csv", "report", "run_sweep", "write_csv",
]

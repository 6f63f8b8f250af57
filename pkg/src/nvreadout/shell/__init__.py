"""File formats, configuration, reports and the command-line interface."""

from .cli import main
from .config import ConfigError, RunConfig, load_config, parse_config
from .csvio import (
    load_efficiency_table,
    load_saturation,
    load_spectrum,
    load_trace,
    save_efficiency_table,
    save_saturation,
    save_spectrum,
    save_trace,
)
from .pipeline import COMMANDS, run_pipeline
from .report import Report

__all__ = [
    "main",
    "ConfigError",
    "RunConfig",
    "load_config",
    "parse_config",
    "load_trace",
    "load_spectrum",
    "load_efficiency_table",
    "load_saturation",
    "save_trace",
    "save_spectrum",
    "save_efficiency_table",
    "save_saturation",
    "COMMANDS",
    "run_pipeline",
    "Report",
]

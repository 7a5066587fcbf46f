"""Experiment harness: config, runners, reports and the ``focklab`` CLI."""
from .config import EXPERIMENTS, ConfigError, ExperimentConfig, defaults, load_config, parse_config
from .experiments import RUNNERS, run, sum_symbol
from .report import Contract, Report, write_report

__all__ = ["EXPERIMENTS", "ConfigError", "ExperimentConfig", "defaults", "load_config", "parse_config",
           "RUNNERS", "run", "sum_symbol", "Contract", "Report", "write_report"]

"""Configuration, orchestration, reports and the command-line interface."""

from .config import ExperimentConfig, load_config, loads_config
from .experiments import run_bound, run_simulate, run_sweep, run_validate, run_verify

__all__ = ["ExperimentConfig", "load_config", "loads_config", "run_bound", "run_simulate",
           "run_sweep", "run_validate", "run_verify"]

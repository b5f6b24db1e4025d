"""Configuration, orchestration, oracles and the command-line interface."""

from .config import PRESETS, ExperimentConfig, load_config, load_preset
from .experiment import SweepResult, build_system, run_experiment, run_replicas
from .oracle import run_oracles

__all__ = ["ExperimentConfig", "PRESETS", "SweepResult", "build_system", "load_config", "load_preset",
           "run_experiment", "run_oracles", "run_replicas"]

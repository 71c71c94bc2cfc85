"""Experiment configuration, runners, result export and the CLI."""

from .config import ConfigError, ExperimentConfig, ProblemSpec, ScalarizationConfig, SmgdBaselineConfig, load_config
from .runner import (
    compare_methods,
    evals_to_reach,
    run_experiment,
    run_pc,
    run_scalarization_baseline,
    run_smgd_baseline,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ProblemSpec",
    "ScalarizationConfig",
    "SmgdBaselineConfig",
    "compare_methods",
    "evals_to_reach",
    "load_config",
    "run_experiment",
    "run_pc",
    "run_scalarization_baseline",
    "run_smgd_baseline",
]

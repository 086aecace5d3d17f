"""Configured Monte Carlo experiments and their command-line front end."""
from .config import ExperimentConfig, ExperimentKind, FunctionalSpec, load_config, parse_config
from .output import write_outputs
from .runners import (ExperimentResult, run, run_coefficients, run_reduction, run_simulate,
                      run_student_minkowski, run_variance_scan)

__all__ = [
    "ExperimentConfig", "ExperimentKind", "FunctionalSpec", "load_config", "parse_config",
    "ExperimentResult", "run", "run_coefficients", "run_reduction", "run_simulate",
    "run_student_minkowski", "run_variance_scan", "write_outputs",
]

"""Benchmark problems, error norms, experiment runners and the command line."""

from .config import ExperimentConfig, load_config
from .experiments import qoi_sweep, run_convergence, run_heat, run_wave, solve_steady
from .norms import error_norms, gradient_error

__all__ = [
    "ExperimentConfig",
    "error_norms",
    "gradient_error",
    "load_config",
    "qoi_sweep",
    "run_convergence",
    "run_heat",
    "run_wave",
    "solve_steady",
]

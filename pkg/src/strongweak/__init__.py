"""Simulation and asymptotics of integral functionals of vector random fields
mixing short-range and long-range dependent components."""
from . import asymptotics, covmodels, functionals, hermite, simulator, stats, window
from .asymptotics import ScalingPrediction, normalizer, predict_variance
from .covmodels import Cauchy, Constant, LogPower, PowerLawTail, classify, spectral_constant_c2
from .errors import *  # noqa: F401,F403  (exception classes)
from .functionals import centered_minkowski, decompose, integrate_G, minkowski, student_transform
from .hermite import HermiteExpansion, expand, hermite_rank, reduction_sets
from .simulator import GridSpec, simulate_component, simulate_vector
from .stats import SampleSet, ks_two_sample, loglog_slope, qq_points, skewness
from .window import WindowSpec, c1_coefficient

__version__ = "0.1.0"

__all__ = [
    "asymptotics", "covmodels", "functionals", "hermite", "simulator", "stats", "window",
    "ScalingPrediction", "normalizer", "predict_variance",
    "Cauchy", "Constant", "LogPower", "PowerLawTail", "classify", "spectral_constant_c2",
    "centered_minkowski", "decompose", "integrate_G", "minkowski", "student_transform",
    "HermiteExpansion", "expand", "hermite_rank", "reduction_sets",
    "GridSpec", "simulate_component", "simulate_vector",
    "SampleSet", "ks_two_sample", "loglog_slope", "qq_points", "skewness",
    "WindowSpec", "c1_coefficient",
]

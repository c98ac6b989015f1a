"""Calibrated zero-norm regularized least squares for error-in-variables
regression, with CoCoLasso and nonconvex-Lasso baselines and a simulation
harness."""

from .calibration import CalibratedPair, calibrate, default_eps_hat, psd_project
from .gep import FitResult, GepConfig, fit
from .surrogate import (
    AdditiveError,
    MissingError,
    MultiplicativeError,
    SurrogatePair,
    additive_surrogate,
    build_surrogate,
    missing_surrogate,
    multiplicative_surrogate,
)
from .wls import AlmParams, WeightedLassoProblem, WeightedLassoSolution
from .wls import solve as solve_weighted_lasso

__all__ = [
    "AdditiveError",
    "AlmParams",
    "CalibratedPair",
    "FitResult",
    "GepConfig",
    "MissingError",
    "MultiplicativeError",
    "SurrogatePair",
    "WeightedLassoProblem",
    "WeightedLassoSolution",
    "additive_surrogate",
    "build_surrogate",
    "calibrate",
    "default_eps_hat",
    "fit",
    "missing_surrogate",
    "multiplicative_surrogate",
    "psd_project",
    "solve_weighted_lasso",
]

__version__ = "0.1.0"

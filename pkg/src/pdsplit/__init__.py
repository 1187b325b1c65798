"""Primal-dual splitting solvers for structured monotone inclusions and
TV-regularized image restoration."""
from .core import (ConfigError, DimensionError, DivergenceError, DualBlock, LinearOp,
                   MatrixOp, PDSplitError, ProblemSpec, UnsupportedConfigurationError,
                   beta, inner, norm)
from .solvers import (ConvergenceLog, GapSpec, IterateState, SolveResult, SolverConfig,
                      ergodic_average, gamma_schedule_alg2, restricted_gap, solve)
from .estimators import TVDeblurrer, TVDenoiser, TVInpainter

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ConvergenceLog", "DimensionError", "DivergenceError", "DualBlock",
    "GapSpec", "IterateState", "LinearOp", "MatrixOp", "PDSplitError", "ProblemSpec",
    "SolveResult", "SolverConfig", "TVDeblurrer", "TVDenoiser", "TVInpainter",
    "UnsupportedConfigurationError", "beta", "ergodic_average", "gamma_schedule_alg2",
    "inner", "norm", "restricted_gap", "solve",
]

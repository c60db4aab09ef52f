"""Stationary states of a chemotaxis-consumption system with singular sensitivity.

The stationary problem reduces to ``Lap v = alpha v**(chi+1)`` with Dirichlet
data ``v*``, ``u = alpha v**chi``, and ``alpha`` fixed by the cell mass.
"""

from .config import Problem, RunConfig, SolverParams, load_config, parse_config_text
from .domain import GeometrySpec, Grid, build_grid, integrate
from .errors import (
    ChemosteadyError,
    ConfigError,
    InvariantViolation,
    MassUnreachableError,
    NonConvergenceError,
    StepRejected,
)
from .massmap import invert_mass, sample
from .steady import SteadyState, compute_steady_state, steady_state_for_alpha

__version__ = "0.1.0"

__all__ = [
    "ChemosteadyError", "ConfigError", "GeometrySpec", "Grid", "InvariantViolation",
    "MassUnreachableError", "NonConvergenceError", "Problem", "RunConfig", "SolverParams",
    "SteadyState", "StepRejected", "build_grid", "compute_steady_state", "integrate",
    "invert_mass", "load_config", "parse_config_text", "sample", "steady_state_for_alpha",
]

"""Stationary pairs ``(u, v)`` with ``u = alpha v**chi`` and prescribed mass."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import Problem, SolverParams
from .domain import Grid, gradient, integrate
from .errors import ConfigError, InvariantViolation
from .massmap import Inversion, invert_mass
from .semilinear import SemilinearProblem, SolveReport, chi_power, solve


@dataclass
class SteadyState:
    grid: Grid
    chi: float
    alpha: float
    v: np.ndarray
    u: np.ndarray
    mass: float
    target_mass: Optional[float]
    flux_interior: float
    flux_boundary: float
    report: SolveReport
    inversion: Optional[Inversion] = None


def flux_residual(grid: Grid, u: np.ndarray, v: np.ndarray, chi: float):
    """Max-norms ``(interior, boundary)`` of the cell flux ``F = grad u - chi u grad log v``.

    The interior norm is the conservative divergence built from edge fluxes
    ``kappa_e [(u_j - u_i) - chi (u_i + u_j)/2 (log v_j - log v_i)]`` divided by
    the node mass.  The boundary norm is ``|F . nu|`` with second-order
    one-sided nodal gradients; rectangle corners have no normal and are
    left out.
    """
    v = np.asarray(v, dtype=float)
    if not np.all(v > 0):
        raise ConfigError("flux residual needs v > 0 at every node")
    u = np.asarray(u, dtype=float)
    ell = np.log(v)
    i, j, kappa = grid.edges
    edge_flux = kappa * ((u[j] - u[i]) - chi * 0.5 * (u[i] + u[j]) * (ell[j] - ell[i]))
    div = np.zeros(grid.size)
    np.add.at(div, i, edge_flux)
    np.add.at(div, j, -edge_flux)
    div /= grid.weights
    interior = float(np.abs(div[grid.interior]).max(initial=0.0))

    F = gradient(grid, u) - chi * u[:, None] * gradient(grid, ell)
    keep = ~grid.corner_mask
    normal_flux = (F[grid.boundary] * grid.normals).sum(axis=1)[keep]
    boundary = float(np.abs(normal_flux).max(initial=0.0))
    return interior, boundary


def _assemble_state(problem, alpha, report, target, inversion):
    grid, chi = problem.grid, problem.chi
    v = report.solution
    u = alpha * chi_power(v, chi)
    if alpha > 0 and not (u.min() > 0 and v.min() > 0):
        raise InvariantViolation("stationary state is not positive")
    fi, fb = flux_residual(grid, u, v, chi)
    return SteadyState(grid, chi, alpha, v, u, integrate(grid, u), target, fi, fb, report, inversion)


def steady_state_for_alpha(
    problem: Problem, alpha: float, params: SolverParams = SolverParams(), initial=None
) -> SteadyState:
    report = solve(SemilinearProblem(problem.grid, alpha, problem.chi, problem.vstar), params, initial)
    return _assemble_state(problem, alpha, report, None, None)


def compute_steady_state(problem: Problem, params: SolverParams = SolverParams()) -> SteadyState:
    """Stationary state for ``problem.mass`` (or ``problem.alpha`` when given instead)."""
    if problem.alpha is not None:
        return steady_state_for_alpha(problem, problem.alpha, params)
    if problem.mass is None:
        raise ConfigError("problem needs a target mass or an alpha")
    inv = invert_mass(problem.mass, problem, params)
    state = _assemble_state(problem, inv.alpha, inv.sample.report, problem.mass, inv)
    if abs(state.mass - problem.mass) > params.mass_tol * problem.mass:
        raise InvariantViolation(
            f"achieved mass {state.mass!r} misses target {problem.mass!r}"
        )
    return state


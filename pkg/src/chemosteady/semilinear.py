"""Nonlinear Dirichlet problems ``Lap v = alpha v**(chi+1)``.

Both iterations are written as corrections ``v <- v + t * delta`` with

    (-Lap + a(v)) delta = Lap v - alpha v**(chi+1),   delta = 0 on the boundary,

where ``a = alpha v**chi`` gives the frozen-coefficient (Picard) map and
``a = alpha (chi+1) v**chi`` the Newton step.  The correction form keeps the
linear right-hand side proportional to the current defect, so CG tolerances
relative to it keep shrinking with the nonlinear residual.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import SolverParams
from .domain import Grid
from .errors import ConfigError, InvariantViolation, NonConvergenceError
from .linsolve import assemble, solve_spd

logger = logging.getLogger(__name__)

MIN_STEP = 2.0 ** -20


def chi_power(v: np.ndarray, chi: float) -> np.ndarray:
    """``v**chi`` through ``exp(chi log v)``; ``v`` must be positive."""
    return np.exp(chi * np.log(v))


@dataclass(frozen=True, eq=False)
class SemilinearProblem:
    grid: Grid
    alpha: float
    chi: float
    vstar: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vstar", self.grid.trace(self.vstar))
        if not self.alpha >= 0:
            raise ConfigError("alpha must be nonnegative")
        if not self.chi > 0:
            raise ConfigError("chi must be positive")
        if not self.vstar.min() > 0:
            raise ConfigError("boundary trace must be positive")
        if self.grid.kind == "radial" and np.ptp(self.vstar) != 0:
            raise ConfigError("radial geometry requires a constant boundary trace")

    @property
    def vmax(self) -> float:
        return float(self.vstar.max())

    def residual_scale(self) -> float:
        return 1.0 + self.alpha * self.vmax ** (self.chi + 1)


@dataclass
class SolveReport:
    solution: np.ndarray
    iterations: int
    update_norm: float
    residual_norm: float
    method: str
    history: list = field(default_factory=list)


def residual(p: SemilinearProblem, v: np.ndarray) -> np.ndarray:
    """``Lap v - alpha v**(chi+1)`` at every node, zero on the boundary."""
    F = p.grid.laplacian(v) - p.alpha * v * chi_power(v, p.chi)
    F[p.grid.boundary] = 0.0
    return F


def residual_norm(p: SemilinearProblem, v: np.ndarray) -> float:
    return float(np.abs(residual(p, v)[p.grid.interior]).max(initial=0.0))


def harmonic_extension(grid: Grid, vstar, tol: float = 1e-12) -> np.ndarray:
    op = assemble(grid, 0.0, vstar)
    return solve_spd(op, np.zeros(grid.size), tol)


def _correction(p, v, coeff, tol):
    op = assemble(p.grid, coeff, 0.0)
    return solve_spd(op, residual(p, v), tol)


def _check_positive(v, what):
    if not np.all(v > 0):
        raise InvariantViolation(
            f"{what} produced a nonpositive value (min {v.min():.3e}); "
            "the discrete maximum principle forbids this"
        )


def _picard_loop(p, params, v, stop_update, need_residual):
    theta = params.damping if params.damping is not None else 2.0 / (2.0 + p.chi)
    rtol = params.residual_tol * p.residual_scale()
    history = []
    res = residual_norm(p, v)
    for k in range(1, params.max_iter + 1):
        delta = _correction(p, v, p.alpha * chi_power(v, p.chi), params.linear_tol)
        v = v + theta * delta
        _check_positive(v, "Picard iteration")
        upd = theta * float(np.abs(delta).max())
        res = residual_norm(p, v)
        history.append(upd)
        if upd <= stop_update and (res <= rtol or not need_residual):
            return SolveReport(v, k, upd, res, "picard", history)
    raise NonConvergenceError(
        f"Picard iteration did not converge in {params.max_iter} steps "
        f"(update {history[-1]:.3e}, residual {res:.3e})",
        residual=res,
        last=v,
        iterations=params.max_iter,
    )


def picard_solve(
    p: SemilinearProblem, params: SolverParams = SolverParams(), initial: Optional[np.ndarray] = None
) -> SolveReport:
    """Frozen-coefficient fixed-point iteration.

    Each step solves ``Lap w = alpha v_k**chi w`` with ``w = v*`` on the
    boundary and relaxes ``v_{k+1} = (1 - t) v_k + t w``.  Starts from the
    harmonic extension of ``v*`` unless ``initial`` is given.
    """
    v = harmonic_extension(p.grid, p.vstar, params.linear_tol) if initial is None else _start(p, initial)
    return _picard_loop(p, params, v, params.tol, True)


def _start(p, initial):
    v = np.array(initial, dtype=float)
    if v.shape != (p.grid.size,):
        raise ConfigError(f"initial guess has shape {v.shape}, grid has {p.grid.size} nodes")
    v[p.grid.boundary] = p.vstar
    if not np.all(v > 0):
        raise ConfigError("initial guess must be positive")
    return v


def newton_solve(
    p: SemilinearProblem, params: SolverParams = SolverParams(), initial: Optional[np.ndarray] = None
) -> SolveReport:
    """Damped Newton iteration with step halving.

    A step is accepted once the trial iterate is positive and either lowers
    the residual max-norm or already meets the residual tolerance.
    """
    v = _start(p, p.vmax * np.ones(p.grid.size) if initial is None else initial)
    rtol = params.residual_tol * p.residual_scale()
    res = residual_norm(p, v)
    history = []
    for k in range(1, params.newton_max_iter + 1):
        coeff = p.alpha * (p.chi + 1.0) * chi_power(v, p.chi)
        delta = _correction(p, v, coeff, params.linear_tol)
        step = 1.0
        while True:
            trial = v + step * delta
            if np.all(trial > 0):
                trial_res = residual_norm(p, trial)
                if trial_res < res or trial_res <= rtol:
                    break
            step *= 0.5
            if step < MIN_STEP:
                raise NonConvergenceError(
                    f"Newton line search underflow at iteration {k} (residual {res:.3e})",
                    residual=res,
                    last=v,
                    iterations=k,
                )
        v, res = trial, trial_res
        upd = step * float(np.abs(delta).max())
        history.append(upd)
        if upd <= params.tol and res <= rtol:
            return SolveReport(v, k, upd, res, "newton", history)
    raise NonConvergenceError(
        f"Newton did not converge in {params.newton_max_iter} steps (residual {res:.3e})",
        residual=res,
        last=v,
        iterations=params.newton_max_iter,
    )


def solve(
    p: SemilinearProblem, params: SolverParams = SolverParams(), initial: Optional[np.ndarray] = None
) -> SolveReport:
    """Dispatch on ``params.method``; the hybrid runs Picard to ``switch_tol`` then Newton."""
    if params.method == "picard":
        return picard_solve(p, params, initial)
    if params.method == "newton":
        return newton_solve(p, params, initial)
    v = harmonic_extension(p.grid, p.vstar, params.linear_tol) if initial is None else _start(p, initial)
    pre = _picard_loop(p, params, v, max(params.switch_tol, params.tol), False)
    try:
        rep = newton_solve(p, params, pre.solution)
    except NonConvergenceError as exc:
        logger.info("Newton failed (%s); continuing with Picard", exc)
        rep = _picard_loop(p, params, pre.solution, params.tol, True)
        rep.iterations += pre.iterations
        rep.history = pre.history + rep.history
        rep.method = "hybrid"
        return rep
    rep.iterations += pre.iterations
    rep.history = pre.history + rep.history
    rep.method = "hybrid"
    return rep


def solve_vprime(p: SemilinearProblem, v_alpha: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Derivative of the solution in alpha.

    Solves ``Lap w = v**(chi+1) + alpha (chi+1) v**chi w`` with ``w = 0`` on
    the boundary.
    """
    vc = chi_power(v_alpha, p.chi)
    op = assemble(p.grid, p.alpha * (p.chi + 1.0) * vc, 0.0)
    return solve_spd(op, -v_alpha * vc, tol)


def lower_solution(
    grid: Grid,
    alpha: float,
    chi: float,
    vlow: float,
    params: SolverParams = SolverParams(),
    initial: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Solution with the constant boundary value ``vlow = min v*``."""
    return solve(SemilinearProblem(grid, alpha, chi, float(vlow)), params, initial).solution


def subsolution_params(alpha: float, chi: float, vlow: float, R: float):
    """Exponent and prefactor ``(beta, gamma)`` of the power-law subsolution."""
    beta = math.sqrt(alpha) * vlow ** (chi / 2) * R
    gamma = alpha ** (1.0 / chi) * vlow * R ** (-beta)
    return beta, gamma


def subsolution_field(grid: Grid, alpha: float, chi: float, vlow: float, R: float) -> np.ndarray:
    """Explicit radial subsolution ``gamma |x|**beta`` at the nodes.

    Evaluated as ``alpha**(1/chi) vlow (|x|/R)**beta`` so the value on
    ``|x| = R`` is exact and large ``beta`` does not overflow ``R**-beta``.
    """
    if not alpha > 0:
        raise ConfigError("subsolution needs alpha > 0")
    r = grid.radius
    if np.any(r > R * (1 + 1e-12)):
        raise ConfigError(f"grid reaches |x| = {r.max():.6g} outside the ball of radius {R}")
    beta, _ = subsolution_params(alpha, chi, vlow, R)
    return alpha ** (1.0 / chi) * vlow * np.minimum(r / R, 1.0) ** beta


def subsolution_defect(r, alpha, chi, vlow, R, d):
    """Continuum ``Lap zbar - zbar**(chi+1)`` for the radial power law (r > 0)."""
    beta, gamma = subsolution_params(alpha, chi, vlow, R)
    r = np.asarray(r, dtype=float)
    return gamma * beta * (d + beta - 2) * r ** (beta - 2) - (gamma * r ** beta) ** (chi + 1)

"""The mass map ``alpha -> integral of alpha v_alpha**chi`` and its inverse."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .config import Problem, SolverParams
from .domain import Grid, integrate, sphere_area
from .errors import ConfigError, InvariantViolation, MassUnreachableError, NonConvergenceError
from .semilinear import SemilinearProblem, SolveReport, chi_power, lower_solution, solve, solve_vprime

logger = logging.getLogger(__name__)


class SectorOverflowWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SectorSpec:
    """Shell sector ``{rho w : |w - w0| < delta, R - delta < rho < R}`` in R^d."""

    R: float
    delta: float
    d: int

    def __post_init__(self):
        if not self.R > 0:
            raise ConfigError("sector radius must be positive")
        if not 0 < self.delta <= self.R:
            raise ConfigError(f"sector needs 0 < delta <= R, got delta={self.delta}, R={self.R}")
        if self.d < 2:
            raise ConfigError("sector bound needs d >= 2")

    @property
    def sigma(self) -> float:
        return cap_measure(self.d, self.delta)


def cap_measure(d: int, delta: float) -> float:
    """Measure of ``{w in S^(d-1) : |w - w0| < delta}`` (chordal distance)."""
    if delta >= 2.0:
        return sphere_area(d)
    theta = 2.0 * math.asin(delta / 2.0)
    if d == 2:
        return 2.0 * theta
    if d == 3:
        return 2.0 * math.pi * (1.0 - math.cos(theta))
    val, _ = quad(lambda t: math.sin(t) ** (d - 2), 0.0, theta, epsabs=0.0, epsrel=1e-13)
    return sphere_area(d - 1) * val


@dataclass
class MassSample:
    alpha: float
    m: float
    m_prime: float
    m_lower: Optional[float] = None
    sector_bound: Optional[float] = None
    report: Optional[SolveReport] = field(default=None, repr=False)

    @property
    def v(self) -> Optional[np.ndarray]:
        return None if self.report is None else self.report.solution


def mass(grid: Grid, alpha: float, v_alpha: np.ndarray, chi: float) -> float:
    if alpha == 0:
        return 0.0
    return alpha * integrate(grid, chi_power(v_alpha, chi))


def mass_derivative(grid: Grid, alpha: float, v_alpha: np.ndarray, vprime: np.ndarray, chi: float) -> float:
    """``integral of v**(chi-1) (v + alpha chi v')``; must be positive."""
    val = integrate(grid, chi_power(v_alpha, chi - 1.0) * (v_alpha + alpha * chi * vprime))
    if not val > 0:
        raise InvariantViolation(f"mass derivative is nonpositive ({val:.3e}) at alpha={alpha}")
    return val


def lower_mass(
    grid: Grid,
    alpha: float,
    chi: float,
    vlow: float,
    params: SolverParams = SolverParams(),
    initial: Optional[np.ndarray] = None,
) -> float:
    if alpha == 0:
        return 0.0
    return mass(grid, alpha, lower_solution(grid, alpha, chi, vlow, params, initial), chi)


def sector_lower_bound(spec: SectorSpec, alpha: float, chi: float, vlow: float) -> float:
    """Closed-form lower bound on the lower mass from the shell sector.

    ``sigma alpha vlow**chi R**(-chi beta) R**(chi beta + d)
    (1 - (1 - delta/R)**(chi beta + d)) / (chi beta + d)`` with
    ``beta = sqrt(alpha) vlow**(chi/2) R``; the two powers of R are combined
    into ``R**d`` before evaluation.  Overflow returns ``inf`` with a
    :class:`SectorOverflowWarning`.
    """
    if not alpha > 0:
        raise ConfigError("sector bound needs alpha > 0")
    R, delta, d = spec.R, spec.delta, spec.d
    beta = math.sqrt(alpha) * vlow ** (chi / 2) * R
    expo = chi * beta + d
    try:
        shell = -math.expm1(expo * math.log1p(-delta / R)) if delta < R else 1.0
        val = spec.sigma * alpha * vlow ** chi * R ** d * shell / expo
    except OverflowError:
        val = math.inf
    if math.isinf(val):
        warnings.warn(f"sector bound overflows at alpha={alpha:g}", SectorOverflowWarning)
    return val


def default_sector(grid: Grid) -> Optional[SectorSpec]:
    """Largest admissible sector for a radial ball or annulus, else ``None``."""
    geo = grid.geometry
    if geo.kind != "radial" or geo.d < 2:
        return None
    return SectorSpec(R=geo.R, delta=geo.R - geo.r0, d=geo.d)


def _semilinear(problem: Problem, alpha: float) -> SemilinearProblem:
    return SemilinearProblem(problem.grid, alpha, problem.chi, problem.vstar)


def sample(
    problem: Problem,
    alpha: float,
    params: SolverParams = SolverParams(),
    initial: Optional[np.ndarray] = None,
    with_lower: bool = False,
    sector: Optional[SectorSpec] = None,
) -> MassSample:
    """Evaluate ``m``, ``m'`` and optionally the lower mass and sector bound at one alpha."""
    p = _semilinear(problem, alpha)
    report = solve(p, params, initial)
    v = report.solution
    vp = solve_vprime(p, v, params.linear_tol)
    grid, chi = problem.grid, problem.chi
    out = MassSample(alpha, mass(grid, alpha, v, chi), mass_derivative(grid, alpha, v, vp, chi), report=report)
    if with_lower:
        if np.ptp(problem.vstar) == 0:
            out.m_lower = out.m
        else:
            out.m_lower = lower_mass(grid, alpha, chi, problem.vmin, params)
    if sector is not None and alpha > 0:
        out.sector_bound = sector_lower_bound(sector, alpha, chi, problem.vmin)
    return out


@dataclass
class Inversion:
    alpha: float
    sample: MassSample
    bracket: tuple
    history: list


def _unreachable(problem, params, alpha, m, target_m):
    m_low = lower_mass(problem.grid, alpha, problem.chi, problem.vmin, params)
    raise MassUnreachableError(
        f"mass possibly unreachable: m({alpha:.6g}) = {m:.6g} < {target_m:.6g} "
        f"with alpha_cap = {params.alpha_cap:.3g} (lower mass {m_low:.6g})",
        alpha=alpha,
        mass=m,
        lower_mass=m_low,
    )


def invert_mass(target_m: float, problem: Problem, params: SolverParams = SolverParams()) -> Inversion:
    """Find ``alpha`` with ``|m(alpha) - target_m| <= mass_tol * target_m``.

    The bracket starts at ``alpha_lo = target / (max v**chi * |Omega|)``, for
    which ``m(alpha_lo) <= target``, and doubles ``alpha_hi`` until the
    target is passed.  A safeguarded Newton iteration on ``m`` follows, with
    the bisection midpoint replacing any step that leaves the bracket.
    Each solve is warm-started from the previous solution.
    """
    if not target_m > 0:
        raise ConfigError("target mass must be positive")
    tol = params.mass_tol * target_m
    history = []
    warm = None

    def evaluate(alpha):
        nonlocal warm
        s = sample(problem, alpha, params, warm)
        warm = s.v
        history.append((alpha, s.m))
        logger.debug("alpha=%.17g m=%.17g", alpha, s.m)
        return s

    lo = target_m / (problem.vmax ** problem.chi * problem.grid.volume)
    if lo >= params.alpha_cap:
        # m(alpha) < alpha max(v*)**chi |Omega| keeps the target out of reach below the cap
        _unreachable(problem, params, params.alpha_cap, evaluate(params.alpha_cap).m, target_m)
    s_lo = evaluate(lo)
    if abs(s_lo.m - target_m) <= tol:
        return Inversion(lo, s_lo, (lo, lo), history)
    hi = lo * params.growth
    s_hi = evaluate(hi)
    while s_hi.m < target_m:
        if abs(s_hi.m - target_m) <= tol:
            return Inversion(hi, s_hi, (lo, hi), history)
        lo, s_lo = hi, s_hi
        hi *= params.growth
        if hi > params.alpha_cap:
            _unreachable(problem, params, lo, s_lo.m, target_m)
        s_hi = evaluate(hi)
    if abs(s_hi.m - target_m) <= tol:
        return Inversion(hi, s_hi, (lo, hi), history)

    # start from the endpoint nearer the target
    cur = s_lo if target_m - s_lo.m < s_hi.m - target_m else s_hi
    for _ in range(params.root_max_iter):
        nxt = cur.alpha - (cur.m - target_m) / cur.m_prime
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        cur = evaluate(nxt)
        if abs(cur.m - target_m) <= tol:
            return Inversion(nxt, cur, (lo, hi), history)
        if cur.m < target_m:
            lo = nxt
        else:
            hi = nxt
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
    raise NonConvergenceError(
        f"root search stalled in [{lo:.17g}, {hi:.17g}] without meeting mass_tol",
        residual=abs(cur.m - target_m),
        last=cur.alpha,
    )

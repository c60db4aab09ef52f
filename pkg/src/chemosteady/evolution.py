"""Semi-implicit time stepping of the parabolic chemotaxis-consumption system.

The cell density uses a conservative edge flux of Scharfetter-Gummel type,

    F_ij = kappa_ij [B(x) u_j - B(-x) u_i],   x = chi (log v_j - log v_i),
    B(x) = x / (exp(x) - 1),

which vanishes identically on ``u = alpha v**chi``, so the stationary states
of the elliptic solver are exact fixed points of the stepper.  The linear
part ``kappa (u_j - u_i)`` is taken implicitly and the remainder
``F - kappa (u_j - u_i)`` explicitly.  The signal equation treats diffusion
implicitly and consumption explicitly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domain import Grid, integrate
from .errors import ConfigError, StepRejected
from .linsolve import assemble, assemble_neumann, factorize

logger = logging.getLogger(__name__)


@dataclass
class EvolutionState:
    t: float
    u: np.ndarray
    v: np.ndarray
    mass_drift: float = 0.0
    steps: int = 0


@dataclass(frozen=True)
class EvolutionParams:
    dt: float = 1e-3
    stall_tol: float = 1e-10
    max_steps: Optional[int] = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.stall_tol < 0:
            raise ConfigError("stall_tol must be nonnegative")


def bernoulli(x: np.ndarray) -> np.ndarray:
    """``x / (exp(x) - 1)`` with the removable value 1 at ``x = 0``."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    nz = np.abs(x) > 1e-10
    out[nz] = x[nz] / np.expm1(x[nz])
    # series for the tiny band keeps the function smooth through zero
    out[~nz] = 1.0 - 0.5 * x[~nz]
    return out


class Stepper:
    """Pre-factored IMEX stepper for one grid, ``dt``, ``chi`` and ``v*``."""

    def __init__(self, grid: Grid, dt: float, chi: float, vstar):
        if not dt > 0:
            raise ConfigError("dt must be positive")
        self.grid = grid
        self.dt = float(dt)
        self.chi = float(chi)
        self.vstar = grid.trace(vstar)
        if not self.vstar.min() > 0:
            raise ConfigError("boundary trace must be positive")
        inv_dt = np.full(grid.size, 1.0 / self.dt)
        self._solve_u = factorize(assemble_neumann(grid, inv_dt))
        self._solve_v = factorize(assemble(grid, inv_dt, self.vstar))

    def chemotactic_source(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Explicit part of the flux divergence, per unit mass."""
        i, j, kappa = self.grid.edges
        x = self.chi * (np.log(v[j]) - np.log(v[i]))
        rem = kappa * ((bernoulli(x) - 1.0) * u[j] - (bernoulli(-x) - 1.0) * u[i])
        acc = np.zeros(self.grid.size)
        np.add.at(acc, i, rem)
        np.add.at(acc, j, -rem)
        return acc / self.grid.weights

    def step(self, state: EvolutionState) -> EvolutionState:
        u, v = state.u, state.v
        if not np.all(v > 0):
            raise StepRejected("v is not positive; shrink dt")
        dt = self.dt
        # increment form: the rounding bias of the fixed matrix then scales
        # with the update, not with u, so mass stays flat near equilibrium
        u_new = u + self._solve_u(self.grid.laplacian(u) + self.chemotactic_source(u, v))
        v_new = self._solve_v(v * (1.0 - dt * u) / dt)
        if not np.all(v_new > 0):
            raise StepRejected(
                f"step at t={state.t:.6g} drives v to {v_new.min():.3e}; shrink dt",
                last=state,
            )
        m0 = integrate(self.grid, u)
        m1 = integrate(self.grid, u_new)
        return EvolutionState(state.t + dt, u_new, v_new, state.mass_drift + (m1 - m0), state.steps + 1)


def step(state: EvolutionState, dt: float, chi: float, vstar, grid: Grid) -> EvolutionState:
    """Single step; builds a fresh :class:`Stepper` (use that class for loops)."""
    return Stepper(grid, dt, chi, vstar).step(state)


@dataclass
class Trajectory:
    final: EvolutionState
    t: list = field(default_factory=list)
    dist_u: list = field(default_factory=list)
    dist_v: list = field(default_factory=list)
    mass_u: list = field(default_factory=list)
    stalled: bool = False


def evolve_to_steady(
    initial: EvolutionState,
    grid: Grid,
    chi: float,
    vstar,
    T: float,
    params: EvolutionParams = EvolutionParams(),
    reference: Optional[tuple] = None,
) -> Trajectory:
    """March until ``t >= T`` or the update rate drops to ``stall_tol``.

    The rate is ``max(|u_{k+1} - u_k|, |v_{k+1} - v_k|) / dt``; watching v as
    well keeps a flat start (uniform u, constant v) from stalling at once.
    ``stall_tol = 0`` disables the check.

    ``reference = (u_ref, v_ref)`` turns on the distance columns; the
    recorded series starts with the initial state.
    """
    if not T > 0:
        raise ConfigError("T must be positive")
    stepper = Stepper(grid, params.dt, chi, vstar)
    traj = Trajectory(initial)

    def record(s):
        traj.t.append(s.t)
        traj.mass_u.append(integrate(grid, s.u))
        if reference is not None:
            traj.dist_u.append(float(np.abs(s.u - reference[0]).max()))
            traj.dist_v.append(float(np.abs(s.v - reference[1]).max()))

    state = initial
    record(state)
    nsteps = int(np.ceil(T / params.dt - 1e-9))
    if params.max_steps is not None:
        nsteps = min(nsteps, params.max_steps)
    for k in range(1, nsteps + 1):
        new = stepper.step(state)
        new.t = initial.t + k * params.dt  # avoids summed rounding in t
        rate = max(np.abs(new.u - state.u).max(), np.abs(new.v - state.v).max()) / params.dt
        state = new
        record(state)
        if params.stall_tol > 0 and rate <= params.stall_tol:
            traj.stalled = True
            logger.info("stalled at t=%.6g (rate %.3e)", state.t, rate)
            break
    traj.final = state
    return traj

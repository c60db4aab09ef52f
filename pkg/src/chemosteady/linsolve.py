"""Assembly and solution of ``(-Lap + c) w = f`` on a grid.

The stored matrix is the mass-scaled form ``M (-Lap + c)`` restricted to the
unknown nodes.  It is symmetric with positive diagonal and nonpositive
off-diagonals (an M-matrix), and positive definite when ``c >= 0`` under
Dirichlet elimination or ``c > 0`` somewhere under Neumann closure.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .domain import Grid
from .errors import ConfigError, NonConvergenceError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LinearOperator:
    grid: Grid
    c: np.ndarray
    unknowns: np.ndarray
    matrix: sp.csr_matrix
    mass: np.ndarray
    lift: np.ndarray  # boundary contribution already moved to the right-hand side
    boundary_values: Optional[np.ndarray]

    @property
    def is_dirichlet(self) -> bool:
        return self.boundary_values is not None

    def apply(self, w: np.ndarray) -> np.ndarray:
        """Pointwise action ``(-Lap + c) w`` at the unknown nodes (full-length ``w``)."""
        lap = self.grid.laplacian(w)
        return (-lap + self.c * w)[self.unknowns]

    def banded(self) -> Optional[np.ndarray]:
        """Upper banded storage for ``scipy.linalg.solveh_banded`` (1D and radial only)."""
        if self.grid.kind == "rectangle":
            return None
        A = self.matrix
        ab = np.zeros((2, A.shape[0]))
        ab[1] = A.diagonal()
        ab[0, 1:] = A.diagonal(1)
        return ab


def _check_c(grid: Grid, c) -> np.ndarray:
    c = np.broadcast_to(np.asarray(c, dtype=float), (grid.size,)).copy()
    if not np.all(np.isfinite(c)):
        raise ConfigError("coefficient field must be finite")
    if np.any(c < 0):
        raise ConfigError("coefficient field must be nonnegative (maximum principle)")
    return c


def _scaled_matrix(grid: Grid, c: np.ndarray) -> sp.csr_matrix:
    i, j, kappa = grid.edges
    N = grid.size
    rows = np.concatenate([i, j, np.arange(N)])
    cols = np.concatenate([j, i, np.arange(N)])
    diag = grid.weights * c
    np.add.at(diag, i, kappa)
    np.add.at(diag, j, kappa)
    vals = np.concatenate([-kappa, -kappa, diag])
    return sp.csr_matrix((vals, (rows, cols)), shape=(N, N))


def assemble(grid: Grid, c, boundary_values) -> LinearOperator:
    """Dirichlet operator with the boundary rows eliminated."""
    c = _check_c(grid, c)
    g = grid.trace(boundary_values)
    full = _scaled_matrix(grid, c)
    I, B = grid.interior, grid.boundary
    A = full[I][:, I].tocsr()
    lift = -(full[I][:, B] @ g)
    return LinearOperator(grid, c, I, A, grid.weights[I], lift, g)


def assemble_neumann(grid: Grid, c) -> LinearOperator:
    """Operator with every node unknown and zero-flux closure at the boundary."""
    c = _check_c(grid, c)
    if not np.any(c > 0):
        raise ConfigError("Neumann operator needs c > 0 somewhere to be invertible")
    A = _scaled_matrix(grid, c)
    N = grid.size
    return LinearOperator(grid, c, np.arange(N), A, grid.weights.copy(), np.zeros(N), None)


def pcg(A, b, tol, maxiter, x0=None):
    """Jacobi-preconditioned conjugate gradients.

    Stops once ``||b - A x||_2 <= tol``.  Returns ``(x, iterations, residual)``.
    """
    dinv = 1.0 / A.diagonal()
    x = np.zeros_like(b) if x0 is None else x0.copy()
    r = b - A @ x
    rnorm = np.linalg.norm(r)
    if rnorm <= tol:
        return x, 0, rnorm
    z = dinv * r
    p = z.copy()
    rz = r @ z
    for k in range(1, maxiter + 1):
        Ap = A @ p
        step = rz / (p @ Ap)
        x += step * p
        r -= step * Ap
        rnorm = np.linalg.norm(r)
        if rnorm <= tol:
            return x, k, rnorm
        z = dinv * r
        rz_new = r @ z
        p *= rz_new / rz
        p += z
        rz = rz_new
    raise NonConvergenceError(
        f"CG did not converge in {maxiter} iterations (residual {rnorm:.3e})",
        residual=rnorm,
        last=x,
        iterations=maxiter,
    )


def solve_spd(
    op: LinearOperator,
    rhs: np.ndarray,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
    x0: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Solve ``(-Lap + c) w = rhs`` and return the full nodal field.

    ``rhs`` is a full-length nodal source (boundary entries ignored for
    Dirichlet operators).  With ``method="auto"`` 1D and radial operators use
    banded Cholesky; rectangles use Jacobi-PCG with relative tolerance
    ``tol * (||M rhs|| + ||lift||)``.  ``x0`` (full length) warm-starts CG.
    """
    if not tol > 0:
        raise ConfigError("tol must be positive")
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (op.grid.size,):
        raise ConfigError(f"rhs has shape {rhs.shape}, grid has {op.grid.size} nodes")
    src = op.mass * rhs[op.unknowns]
    b = src + op.lift
    if method == "auto":
        method = "cg" if op.grid.kind == "rectangle" else "banded"
    if method == "banded":
        ab = op.banded()
        if ab is None:
            raise ConfigError("banded solve is only available for 1D and radial grids")
        x = scipy.linalg.solveh_banded(ab, b, check_finite=False)
    elif method == "cg":
        scale = np.linalg.norm(src) + np.linalg.norm(op.lift)
        start = None if x0 is None else np.asarray(x0, dtype=float)[op.unknowns]
        x, its, res = pcg(op.matrix, b, tol * scale, 20 * op.grid.size, start)
        logger.debug("pcg: %d iterations, residual %.3e", its, res)
    else:
        raise ConfigError(f"unknown linear method {method!r}")
    if op.is_dirichlet:
        return op.grid.with_boundary(x, op.boundary_values)
    return x


def factorize(op: LinearOperator):
    """Pre-factor ``op`` for repeated solves with a fixed matrix.

    Returns ``solve(rhs) -> field`` with the same conventions as
    :func:`solve_spd`.  Banded Cholesky for 1D/radial, sparse LU otherwise.
    """
    ab = op.banded()
    if ab is not None:
        cb = scipy.linalg.cholesky_banded(ab, check_finite=False)

        def inner(b):
            return scipy.linalg.cho_solve_banded((cb, False), b, check_finite=False)

    else:
        inner = spla.splu(op.matrix.tocsc()).solve

    def solve(rhs):
        x = inner(op.mass * np.asarray(rhs, dtype=float)[op.unknowns] + op.lift)
        if op.is_dirichlet:
            return op.grid.with_boundary(x, op.boundary_values)
        return x

    return solve

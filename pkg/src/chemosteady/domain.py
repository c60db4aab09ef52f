"""Uniform grids on intervals, rectangles and radial balls/annuli.

Every grid carries the same finite-volume skeleton: a positive mass (dual
cell measure) per node and a symmetric list of edges with conductances.
The discrete Laplacian at node ``i`` is

    (Lap v)_i = sum_j kappa_ij (v_j - v_i) / mass_i

which reduces to the 3-point / 5-point stencils on Cartesian grids and to
the conservative radial stencil (with the ``2 d (v_1 - v_0) / h**2``
symmetry row at the origin) on radial grids.  The masses double as
quadrature weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import ConfigError

KINDS = ("interval", "rectangle", "radial")


@dataclass(frozen=True)
class GeometrySpec:
    kind: str
    a: float = 0.0
    b: float = 1.0
    Lx: float = 1.0
    Ly: float = 1.0
    d: int = 2
    R: float = 1.0
    r0: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown geometry kind {self.kind!r}")
        if self.kind == "interval" and not self.a < self.b:
            raise ConfigError(f"interval needs a < b, got ({self.a}, {self.b})")
        if self.kind == "rectangle" and not (self.Lx > 0 and self.Ly > 0):
            raise ConfigError(f"rectangle sides must be positive, got {self.Lx} x {self.Ly}")
        if self.kind == "radial":
            if int(self.d) != self.d or self.d < 1:
                raise ConfigError(f"radial dimension must be a positive integer, got {self.d}")
            if not self.R > 0:
                raise ConfigError(f"outer radius must be positive, got {self.R}")
            if not 0 <= self.r0 < self.R:
                raise ConfigError(f"inner radius must satisfy 0 <= r0 < R, got r0={self.r0}, R={self.R}")

    @classmethod
    def interval(cls, a=0.0, b=1.0):
        return cls("interval", a=float(a), b=float(b))

    @classmethod
    def rectangle(cls, Lx=1.0, Ly=1.0):
        return cls("rectangle", Lx=float(Lx), Ly=float(Ly))

    @classmethod
    def radial(cls, d, R=1.0, r0=0.0):
        return cls("radial", d=int(d), R=float(R), r0=float(r0))

    @property
    def full_ball(self) -> bool:
        return self.kind == "radial" and self.r0 == 0.0

    def exact_volume(self) -> float:
        if self.kind == "interval":
            return self.b - self.a
        if self.kind == "rectangle":
            return self.Lx * self.Ly
        return sphere_area(self.d) * (self.R ** self.d - self.r0 ** self.d) / self.d


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d (2 for d = 1)."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


@dataclass(frozen=True, eq=False)
class Grid:
    """Discretization of a domain; immutable once built.

    Nodes of a rectangle are ordered ``k = i * n + j`` with ``i`` along x and
    ``j`` along y.  Rectangles are centred at the origin; radial grids store
    the radius in ``coords[:, 0]``.
    """

    geometry: GeometrySpec
    n: int
    coords: np.ndarray
    h: tuple
    boundary: np.ndarray
    interior: np.ndarray
    weights: np.ndarray
    edges: tuple  # (i, j, kappa)
    normals: np.ndarray  # outward normal per boundary node, zero at corners

    @property
    def kind(self) -> str:
        return self.geometry.kind

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def shape(self) -> tuple:
        return (self.n, self.n) if self.kind == "rectangle" else (self.n,)

    @property
    def volume(self) -> float:
        return float(self.weights.sum())

    @property
    def radius(self) -> np.ndarray:
        """Euclidean distance of every node from the origin."""
        if self.kind == "radial":
            return self.coords[:, 0].copy()
        return np.sqrt((self.coords ** 2).sum(axis=1))

    @property
    def corner_mask(self) -> np.ndarray:
        """Boolean mask over ``boundary``: nodes without a defined normal."""
        return ~self.normals.any(axis=1)

    def trace(self, value: Union[float, np.ndarray, Callable]) -> np.ndarray:
        """Normalize a boundary trace to one float per boundary node."""
        if callable(value):
            out = np.asarray(value(self.coords[self.boundary]), dtype=float).reshape(-1)
        else:
            out = np.asarray(value, dtype=float)
            if out.ndim == 0:
                out = np.full(self.boundary.size, float(out))
        if out.shape != (self.boundary.size,):
            raise ConfigError(
                f"boundary trace needs {self.boundary.size} values, got shape {out.shape}"
            )
        if not np.all(np.isfinite(out)):
            raise ConfigError("boundary trace must be finite")
        return out

    def laplacian(self, v: np.ndarray) -> np.ndarray:
        """Discrete Laplacian at every node (Neumann-closed at boundary nodes).

        Only interior entries are meaningful for Dirichlet problems.
        """
        i, j, kappa = self.edges
        flux = kappa * (v[j] - v[i])
        acc = np.zeros(self.size)
        np.add.at(acc, i, flux)
        np.add.at(acc, j, -flux)
        return acc / self.weights

    def with_boundary(self, interior_values: np.ndarray, trace: np.ndarray) -> np.ndarray:
        out = np.empty(self.size)
        out[self.interior] = interior_values
        out[self.boundary] = trace
        return out


def _trapezoid_1d(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return w


def build_grid(spec: GeometrySpec, n: int) -> Grid:
    """Uniform grid with ``n`` nodes per axis (radial: along the radius)."""
    if int(n) != n or n < 3:
        raise ConfigError(f"resolution n must be an integer >= 3, got {n}")
    n = int(n)
    if spec.kind == "interval":
        return _interval_grid(spec, n)
    if spec.kind == "rectangle":
        return _rectangle_grid(spec, n)
    return _radial_grid(spec, n)


def _interval_grid(spec, n):
    x = np.linspace(spec.a, spec.b, n)
    h = (spec.b - spec.a) / (n - 1)
    i = np.arange(n - 1)
    edges = (i, i + 1, np.full(n - 1, 1.0 / h))
    boundary = np.array([0, n - 1])
    return Grid(
        geometry=spec,
        n=n,
        coords=x[:, None],
        h=(h,),
        boundary=boundary,
        interior=np.arange(1, n - 1),
        weights=_trapezoid_1d(n, h),
        edges=edges,
        normals=np.array([[-1.0], [1.0]]),
    )


def _rectangle_grid(spec, n):
    hx = spec.Lx / (n - 1)
    hy = spec.Ly / (n - 1)
    x = np.linspace(-spec.Lx / 2, spec.Lx / 2, n)
    y = np.linspace(-spec.Ly / 2, spec.Ly / 2, n)
    X, Y = np.meshgrid(x, y, indexing="ij")
    idx = np.arange(n * n).reshape(n, n)
    weights = np.outer(_trapezoid_1d(n, hx), _trapezoid_1d(n, hy)).reshape(-1)

    # x-edges (i, j) -- (i+1, j); edges lying on y = const boundary lines carry half a dual face
    kx = np.full((n - 1, n), hy / hx)
    kx[:, [0, -1]] *= 0.5
    ky = np.full((n, n - 1), hx / hy)
    ky[[0, -1], :] *= 0.5
    ei = np.concatenate([idx[:-1, :].ravel(), idx[:, :-1].ravel()])
    ej = np.concatenate([idx[1:, :].ravel(), idx[:, 1:].ravel()])
    ek = np.concatenate([kx.ravel(), ky.ravel()])

    on_edge = np.zeros((n, n), dtype=bool)
    on_edge[[0, -1], :] = True
    on_edge[:, [0, -1]] = True
    boundary = idx[on_edge]
    interior = idx[~on_edge]

    nrm = np.zeros((n, n, 2))
    nrm[0, :, 0] = -1.0
    nrm[-1, :, 0] = 1.0
    nrm[:, 0, 1] = -1.0
    nrm[:, -1, 1] = 1.0
    nrm[0, 0] = nrm[0, -1] = nrm[-1, 0] = nrm[-1, -1] = 0.0
    return Grid(
        geometry=spec,
        n=n,
        coords=np.column_stack([X.ravel(), Y.ravel()]),
        h=(hx, hy),
        boundary=boundary,
        interior=interior,
        weights=weights,
        edges=(ei, ej, ek),
        normals=nrm.reshape(-1, 2)[boundary],
    )


def _radial_grid(spec, n):
    d = spec.d
    r = np.linspace(spec.r0, spec.R, n)
    h = (spec.R - spec.r0) / (n - 1)
    sigma = sphere_area(d)
    faces = np.concatenate([[spec.r0], 0.5 * (r[1:] + r[:-1]), [spec.R]])
    # exact measure of each dual shell: sum telescopes to the true volume
    weights = sigma * np.diff(faces ** d) / d
    i = np.arange(n - 1)
    edges = (i, i + 1, sigma * faces[1:-1] ** (d - 1) / h)
    if spec.r0 == 0.0:
        boundary = np.array([n - 1])
        interior = np.arange(0, n - 1)
        normals = np.array([[1.0]])
    else:
        boundary = np.array([0, n - 1])
        interior = np.arange(1, n - 1)
        normals = np.array([[-1.0], [1.0]])
    return Grid(
        geometry=spec,
        n=n,
        coords=r[:, None],
        h=(h,),
        boundary=boundary,
        interior=interior,
        weights=weights,
        edges=edges,
        normals=normals,
    )


def integrate(grid: Grid, f: np.ndarray) -> float:
    """Quadrature sum of a nodal field."""
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.size,):
        raise ConfigError(f"field has shape {f.shape}, grid has {grid.size} nodes")
    if not np.all(np.isfinite(f)):
        raise ConfigError("cannot integrate a non-finite field")
    return float(grid.weights @ f)


def _diff_axis(f: np.ndarray, h: float, axis: int, origin: Optional[str] = None) -> np.ndarray:
    """Second-order derivative along ``axis``; one-sided at both ends.

    ``origin`` = "even" / "odd" replaces the left one-sided stencil by the
    reflected central difference about a radial symmetry node.
    """
    f = np.moveaxis(f, axis, 0)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2 * h)
    out[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
    out[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    if origin == "even":
        out[0] = 0.0
    elif origin == "odd":
        out[0] = f[1] / h
    return np.moveaxis(out, 0, axis)


def gradient(grid: Grid, f: np.ndarray) -> np.ndarray:
    """Nodal gradient, shape ``(size, ncomp)``; radial grids give d/dr."""
    f = np.asarray(f, dtype=float)
    if grid.kind == "rectangle":
        F = f.reshape(grid.n, grid.n)
        gx = _diff_axis(F, grid.h[0], 0)
        gy = _diff_axis(F, grid.h[1], 1)
        return np.column_stack([gx.ravel(), gy.ravel()])
    origin = "even" if grid.geometry.full_ball else None
    return _diff_axis(f, grid.h[0], 0, origin)[:, None]


def divergence(grid: Grid, F: np.ndarray) -> np.ndarray:
    """Nodal divergence of a vector field given as ``(size, ncomp)``.

    Radial fields use ``F' + (d - 1) F / r``, with ``d F'(0)`` at the origin.
    """
    F = np.asarray(F, dtype=float)
    if grid.kind == "rectangle":
        n = grid.n
        return (
            _diff_axis(F[:, 0].reshape(n, n), grid.h[0], 0)
            + _diff_axis(F[:, 1].reshape(n, n), grid.h[1], 1)
        ).ravel()
    if grid.kind == "interval":
        return _diff_axis(F[:, 0], grid.h[0], 0)
    d = grid.geometry.d
    r = grid.coords[:, 0]
    Fr = F[:, 0]
    if grid.geometry.full_ball:
        out = _diff_axis(Fr, grid.h[0], 0, "odd")
        out[1:] += (d - 1) * Fr[1:] / r[1:]
        out[0] *= d
        return out
    return _diff_axis(Fr, grid.h[0], 0) + (d - 1) * Fr / r

"""Parameter bundles shared across modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domain import Grid
from .errors import ConfigError


@dataclass(frozen=True)
class SolverParams:
    """Tolerances and iteration policy for the nonlinear and root solves.

    ``residual_tol`` is scaled by ``1 + alpha * max(v*)**(chi+1)`` before use.
    ``damping=None`` selects the Picard relaxation ``2 / (2 + chi)``, which
    keeps the frozen-coefficient map contractive for every alpha.
    """

    tol: float = 1e-10
    residual_tol: float = 1e-8
    max_iter: int = 500
    newton_max_iter: int = 50
    damping: Optional[float] = None
    method: str = "hybrid"
    switch_tol: float = 1e-3
    linear_tol: float = 1e-12
    mass_tol: float = 1e-8
    alpha_cap: float = 1e12
    growth: float = 2.0
    root_max_iter: int = 200

    def __post_init__(self):
        if self.tol <= 0 or self.residual_tol <= 0 or self.linear_tol <= 0:
            raise ConfigError("tolerances must be positive")
        if self.mass_tol <= 0:
            raise ConfigError("mass_tol must be positive")
        if self.method not in ("picard", "newton", "hybrid"):
            raise ConfigError(f"unknown method {self.method!r}")
        if self.damping is not None and not 0 < self.damping <= 1:
            raise ConfigError("damping must lie in (0, 1]")
        if self.growth <= 1:
            raise ConfigError("growth factor must exceed 1")
        if self.alpha_cap <= 0:
            raise ConfigError("alpha_cap must be positive")


@dataclass(frozen=True)
class Problem:
    """Continuous data of the stationary problem on a fixed grid.

    ``vstar`` holds the Dirichlet trace at ``grid.boundary`` (one value per
    boundary node).  Exactly one of ``mass`` / ``alpha`` may be set; both may
    be left unset when the problem is used as a template.
    """

    grid: Grid
    chi: float
    vstar: np.ndarray = field(repr=False)
    mass: Optional[float] = None
    alpha: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "vstar", self.grid.trace(self.vstar))
        if not self.chi > 0:
            raise ConfigError("chi must be positive")
        if self.mass is not None and self.alpha is not None:
            raise ConfigError("ambiguous parameterization: give mass or alpha, not both")
        if self.mass is not None and not self.mass > 0:
            raise ConfigError("mass must be positive")
        if self.alpha is not None and not self.alpha >= 0:
            raise ConfigError("alpha must be nonnegative")

    @property
    def vmax(self) -> float:
        return float(self.vstar.max())

    @property
    def vmin(self) -> float:
        return float(self.vstar.min())


_FLOAT_KEYS = (
    "a", "b", "Lx", "Ly", "R", "r0", "chi", "vstar", "vstar_left", "vstar_right",
    "vstar_top", "vstar_bottom", "mass", "alpha", "alpha_min", "alpha_max", "delta",
    "tol", "residual_tol", "mass_tol", "alpha_cap", "damping", "dt", "T", "stall_tol",
)
_INT_KEYS = ("n", "d", "alpha_count")
_STR_KEYS = ("domain", "method", "initial", "steady_input", "out_dir", "alpha_list")
_SIDES = ("left", "right", "bottom", "top")


@dataclass(frozen=True)
class RunConfig:
    """Flat ``key = value`` run description shared by all CLI subcommands."""

    domain: str = "interval"
    a: float = 0.0
    b: float = 1.0
    Lx: float = 1.0
    Ly: float = 1.0
    d: int = 2
    R: float = 1.0
    r0: float = 0.0
    n: int = 101
    chi: float = 1.0
    vstar: Optional[float] = None
    vstar_left: Optional[float] = None
    vstar_right: Optional[float] = None
    vstar_top: Optional[float] = None
    vstar_bottom: Optional[float] = None
    mass: Optional[float] = None
    alpha: Optional[float] = None
    alpha_list: Optional[tuple] = None
    alpha_min: Optional[float] = None
    alpha_max: Optional[float] = None
    alpha_count: Optional[int] = None
    delta: Optional[float] = None
    tol: float = 1e-10
    residual_tol: float = 1e-8
    mass_tol: float = 1e-8
    alpha_cap: float = 1e12
    method: str = "hybrid"
    damping: Optional[float] = None
    dt: float = 1e-3
    T: float = 10.0
    stall_tol: float = 1e-10
    initial: str = "uniform"
    steady_input: Optional[str] = None
    out_dir: str = "out"

    def __post_init__(self):
        if self.mass is not None and self.alpha is not None:
            raise ConfigError("ambiguous parameterization: give mass or alpha, not both")
        if self.n < 3:
            raise ConfigError("n must be at least 3")
        if not self.chi > 0:
            raise ConfigError("chi must be positive")
        if self.mass is not None and not self.mass > 0:
            raise ConfigError("mass must be positive")
        if self.alpha is not None and not self.alpha >= 0:
            raise ConfigError("alpha must be nonnegative")
        if self.initial not in ("uniform", "steady"):
            raise ConfigError("initial must be 'uniform' or 'steady'")
        if not (self.dt > 0 and self.T > 0):
            raise ConfigError("dt and T must be positive")
        for name in ("vstar", "vstar_left", "vstar_right", "vstar_top", "vstar_bottom"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ConfigError(f"{name} must be positive")
        if self.alpha_list is not None:
            arr = np.asarray(self.alpha_list, dtype=float)
            if arr.size == 0 or np.any(arr < 0) or np.any(np.diff(arr) <= 0):
                raise ConfigError("alpha_list must be a nonempty strictly increasing list of alpha >= 0")
        self.geometry()  # validates lengths
        self.solver_params()

    def geometry(self):
        from .domain import GeometrySpec

        if self.domain == "interval":
            return GeometrySpec.interval(self.a, self.b)
        if self.domain == "rectangle":
            return GeometrySpec.rectangle(self.Lx, self.Ly)
        if self.domain == "radial":
            return GeometrySpec.radial(self.d, self.R, self.r0)
        raise ConfigError(f"unknown domain {self.domain!r}")

    def grid(self) -> Grid:
        from .domain import build_grid

        return build_grid(self.geometry(), self.n)

    def trace(self, grid: Grid) -> np.ndarray:
        sides = {s: getattr(self, f"vstar_{s}") for s in _SIDES}
        if self.domain == "radial":
            if any(v is not None for v in sides.values()):
                raise ConfigError("radial geometry takes a single constant vstar")
            if self.vstar is None:
                raise ConfigError("missing key: vstar")
            return grid.trace(self.vstar)
        if self.domain == "interval":
            if sides["top"] is not None or sides["bottom"] is not None:
                raise ConfigError("interval takes vstar_left / vstar_right only")
            left = sides["left"] if sides["left"] is not None else self.vstar
            right = sides["right"] if sides["right"] is not None else self.vstar
            if left is None or right is None:
                raise ConfigError("missing key: vstar (or vstar_left and vstar_right)")
            return grid.trace([left, right])
        vals = {s: (v if v is not None else self.vstar) for s, v in sides.items()}
        missing = [s for s, v in vals.items() if v is None]
        if missing:
            raise ConfigError(f"missing boundary value for sides {missing}")
        x, y = grid.coords[grid.boundary].T
        hx, hy = grid.geometry.Lx / 2, grid.geometry.Ly / 2
        masks = {
            "left": np.isclose(x, -hx), "right": np.isclose(x, hx),
            "bottom": np.isclose(y, -hy), "top": np.isclose(y, hy),
        }
        total = np.zeros(grid.boundary.size)
        count = np.zeros(grid.boundary.size)
        for s in _SIDES:
            total[masks[s]] += vals[s]
            count[masks[s]] += 1
        # corners take the mean of the two adjoining sides
        return grid.trace(total / count)

    def problem(self, grid: Optional[Grid] = None) -> Problem:
        grid = self.grid() if grid is None else grid
        return Problem(grid, self.chi, self.trace(grid), mass=self.mass, alpha=self.alpha)

    def solver_params(self) -> SolverParams:
        return SolverParams(
            tol=self.tol,
            residual_tol=self.residual_tol,
            mass_tol=self.mass_tol,
            alpha_cap=self.alpha_cap,
            method=self.method,
            damping=self.damping,
        )

    def alphas(self) -> np.ndarray:
        if self.alpha_list is not None:
            return np.asarray(self.alpha_list, dtype=float)
        if None not in (self.alpha_min, self.alpha_max, self.alpha_count):
            if not 0 < self.alpha_min < self.alpha_max or self.alpha_count < 2:
                raise ConfigError("log range needs 0 < alpha_min < alpha_max and alpha_count >= 2")
            return np.logspace(np.log10(self.alpha_min), np.log10(self.alpha_max), self.alpha_count)
        raise ConfigError("sweep needs alpha_list or alpha_min / alpha_max / alpha_count")


def parse_config_text(text: str) -> RunConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _FLOAT_KEYS:
                values[key] = float(val)
            elif key in _INT_KEYS:
                values[key] = int(val)
            elif key == "alpha_list":
                values[key] = tuple(float(x) for x in val.replace(",", " ").split())
            elif key in _STR_KEYS:
                values[key] = val
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {val!r}") from exc
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text)

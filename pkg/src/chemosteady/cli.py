"""Command-line entry point: ``chemosteady {solve,sweep,validate,selftest}``.

Exit codes: 0 success, 1 unexpected package error, 2 config error,
3 solver nonconvergence, 4 mass unreachable, 5 selftest failure,
6 invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config
from .domain import Grid, integrate
from .errors import ChemosteadyError, ConfigError
from .evolution import EvolutionParams, EvolutionState, evolve_to_steady
from .massmap import SectorOverflowWarning, SectorSpec, default_sector, sample
from .semilinear import harmonic_extension
from .steady import SteadyState, compute_steady_state

logger = logging.getLogger("chemosteady")

EXIT_SELFTEST = 5
FAILURE_MARKER = "FAILED"


def fmt(x) -> str:
    """Round-trip float formatting; ``None`` becomes an empty field."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def _coord_columns(grid: Grid):
    if grid.kind == "interval":
        return ["x"], grid.coords[:, :1]
    if grid.kind == "rectangle":
        return ["x", "y"], grid.coords[:, :2]
    return ["r"], grid.radius[:, None]


def _writer(path: Path):
    fh = open(path, "w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def write_fields(path: Path, grid: Grid, u: np.ndarray, v: np.ndarray) -> None:
    names, coords = _coord_columns(grid)
    fh, w = _writer(path)
    with fh:
        w.writerow(names + ["u", "v"])
        for k in range(grid.size):
            w.writerow([fmt(c) for c in coords[k]] + [fmt(u[k]), fmt(v[k])])


def read_fields(path, grid: Grid):
    """Load ``(u, v)`` from a fields CSV written for the same grid."""
    names, coords = _coord_columns(grid)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read steady_input {path}: {exc}") from exc
    if not rows or rows[0] != names + ["u", "v"]:
        raise ConfigError(f"steady_input header must be {','.join(names + ['u', 'v'])}")
    try:
        data = np.array([[float(x) for x in r] for r in rows[1:]])
    except ValueError as exc:
        raise ConfigError(f"steady_input has a non-numeric entry: {exc}") from exc
    if data.shape != (grid.size, len(names) + 2):
        raise ConfigError(f"steady_input has {len(rows) - 1} rows, grid has {grid.size} nodes")
    if not np.allclose(data[:, : len(names)], coords, rtol=0, atol=1e-12):
        raise ConfigError("steady_input coordinates do not match the configured grid")
    return data[:, -2], data[:, -1]


def _summary_lines(cfg: RunConfig, st: SteadyState):
    rep = st.report
    lines = [
        ("domain", cfg.domain),
        ("n", str(st.grid.n)),
        ("nodes", str(st.grid.size)),
        ("chi", fmt(st.chi)),
        ("alpha", fmt(st.alpha)),
        ("mass", fmt(st.mass)),
        ("target_mass", fmt(st.target_mass)),
        ("mass_error", fmt(None if st.target_mass is None else abs(st.mass - st.target_mass))),
        ("residual_norm", fmt(rep.residual_norm)),
        ("update_norm", fmt(rep.update_norm)),
        ("flux_interior", fmt(st.flux_interior)),
        ("flux_boundary", fmt(st.flux_boundary)),
        ("method", rep.method),
        ("iterations", str(rep.iterations)),
        ("mass_evaluations", str(0 if st.inversion is None else len(st.inversion.history))),
    ]
    return [f"{k} = {v}" for k, v in lines]


def _out_dir(cfg: RunConfig, override) -> Path:
    out = Path(override if override is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve(cfg: RunConfig, out: Path) -> int:
    if cfg.mass is None and cfg.alpha is None:
        raise ConfigError("solve needs mass or alpha")
    st = compute_steady_state(cfg.problem(), cfg.solver_params())
    write_fields(out / "fields.csv", st.grid, st.u, st.v)
    (out / "summary.txt").write_text("\n".join(_summary_lines(cfg, st)) + "\n", encoding="utf-8")
    print(f"alpha = {fmt(st.alpha)}  mass = {fmt(st.mass)}")
    return 0


def _sector(cfg: RunConfig, grid: Grid):
    sec = default_sector(grid)
    if sec is None or cfg.delta is None:
        return sec
    return SectorSpec(sec.R, cfg.delta, sec.d)


def sweep_rows(cfg: RunConfig):
    """Rows ``(alpha, m, m', m_lower, sector_bound)``; a failed alpha yields a marker row."""
    grid = cfg.grid()
    problem = cfg.problem(grid)
    params = cfg.solver_params()
    sector = _sector(cfg, grid)
    warm = None
    rows = []
    for alpha in cfg.alphas():
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SectorOverflowWarning)
                s = sample(problem, float(alpha), params, warm, with_lower=True, sector=sector)
        except ChemosteadyError as exc:
            logger.warning("alpha=%s failed: %s: %s", fmt(alpha), type(exc).__name__, exc)
            rows.append([fmt(alpha), f"{FAILURE_MARKER}:{type(exc).__name__}", "", "", ""])
            continue
        warm = s.v
        rows.append([fmt(alpha), fmt(s.m), fmt(s.m_prime), fmt(s.m_lower), fmt(s.sector_bound)])
    return rows


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    if cfg.mass is not None or cfg.alpha is not None:
        raise ConfigError("sweep takes alpha_list or a log range, not mass or alpha")
    rows = sweep_rows(cfg)
    fh, w = _writer(out / "sweep.csv")
    with fh:
        w.writerow(["alpha", "m", "m_prime", "m_lower", "sector_bound"])
        w.writerows(rows)
    failed = sum(r[1].startswith(FAILURE_MARKER) for r in rows)
    print(f"{len(rows)} rows, {failed} failed")
    return 0


def _validate_setup(cfg: RunConfig):
    grid = cfg.grid()
    if cfg.steady_input is not None:
        if cfg.mass is not None or cfg.alpha is not None:
            raise ConfigError("give steady_input or mass/alpha, not both")
        u_ref, v_ref = read_fields(cfg.steady_input, grid)
    else:
        if cfg.mass is None and cfg.alpha is None:
            raise ConfigError("validate needs steady_input, mass or alpha")
        st = compute_steady_state(cfg.problem(grid), cfg.solver_params())
        u_ref, v_ref = st.u, st.v
    trace = cfg.trace(grid)
    if cfg.initial == "steady":
        u0, v0 = u_ref.copy(), v_ref.copy()
    else:
        # same mass spread evenly; signal starts from the harmonic extension
        u0 = np.full(grid.size, integrate(grid, u_ref) / grid.volume)
        v0 = harmonic_extension(grid, trace)
    return grid, trace, (u_ref, v_ref), EvolutionState(0.0, u0, v0)


def cmd_validate(cfg: RunConfig, out: Path) -> int:
    grid, trace, ref, init = _validate_setup(cfg)
    traj = evolve_to_steady(
        init, grid, cfg.chi, trace, cfg.T, EvolutionParams(cfg.dt, cfg.stall_tol), ref
    )
    fh, w = _writer(out / "timeseries.csv")
    with fh:
        w.writerow(["t", "dist_u", "dist_v", "mass_u"])
        for row in zip(traj.t, traj.dist_u, traj.dist_v, traj.mass_u):
            w.writerow([fmt(x) for x in row])
    print(f"t = {fmt(traj.t[-1])}  dist_u = {fmt(traj.dist_u[-1])}  stalled = {traj.stalled}")
    return 0


def cmd_selftest() -> int:
    from .selftest import run_selftest

    lines, failed = run_selftest()
    print("\n".join(lines))
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return EXIT_SELFTEST
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chemosteady", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("solve", "stationary state for a given mass or alpha"),
        ("sweep", "tabulate the mass map over a list of alpha"),
        ("validate", "evolve the parabolic system toward a stationary state"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="path to a key = value config file")
        p.add_argument("--out-dir", default=None, help="overrides out_dir from the config")
    sub.add_parser("selftest", help="run the built-in invariant checks")
    return parser


COMMANDS = {"solve": cmd_solve, "sweep": cmd_sweep, "validate": cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "selftest":
            return cmd_selftest()
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, _out_dir(cfg, args.out_dir))
    except ChemosteadyError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

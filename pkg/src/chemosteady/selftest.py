"""Built-in invariant checks on small configurations.

Each check returns ``True`` on success; an exception counts as failure.
The report lists only names and verdicts so repeated runs are identical.
"""

from __future__ import annotations

import logging

import numpy as np

from . import semilinear
from .config import Problem, SolverParams
from .domain import GeometrySpec, build_grid, integrate
from .evolution import EvolutionParams, EvolutionState, evolve_to_steady
from .linsolve import assemble, solve_spd
from .massmap import default_sector, invert_mass, sample
from .semilinear import SemilinearProblem, subsolution_defect, subsolution_field
from .steady import compute_steady_state, flux_residual

logger = logging.getLogger(__name__)

GEOMETRIES = (
    (GeometrySpec.interval(0.0, 1.0), 41),
    (GeometrySpec.rectangle(1.0, 1.0), 17),
    (GeometrySpec.radial(3, 1.0), 41),
)


def _v(grid, alpha, chi=1.0, vstar=1.0, params=SolverParams()):
    return semilinear.solve(SemilinearProblem(grid, alpha, chi, vstar), params).solution


def check_max_principle():
    rng = np.random.default_rng(7)
    for spec, n in GEOMETRIES:
        g = build_grid(spec, n)
        for _ in range(3):
            bv = rng.uniform(0.5, 2.0, g.boundary.size)
            harmonic = solve_spd(assemble(g, 0.0, bv), np.zeros(g.size))
            if not (harmonic.min() >= bv.min() - 1e-12 and harmonic.max() <= bv.max() + 1e-12):
                return False
            op = assemble(g, rng.uniform(0, 20, g.size), bv)
            w = solve_spd(op, np.zeros(g.size))
            if not (w.min() >= 0 and w.max() <= bv.max() + 1e-12):
                return False
            sink = solve_spd(op, -rng.uniform(0, 5, g.size))
            if np.any(sink > w + 1e-12):
                return False
    return True


def check_upper_bound():
    rng = np.random.default_rng(11)
    for spec, n in GEOMETRIES:
        g = build_grid(spec, n)
        for _ in range(2):
            alpha = rng.uniform(0, 16)
            chi = float(rng.choice([0.5, 1.0, 2.0]))
            vs = 1.5 if spec.kind == "radial" else rng.uniform(0.5, 2.0, g.boundary.size)
            v = _v(g, alpha, chi, vs)
            if not (v.min() > 0 and v.max() <= np.max(vs) + 1e-12):
                return False
    return True


def check_monotone_in_alpha():
    for spec, n in GEOMETRIES:
        g = build_grid(spec, n)
        prev = None
        for alpha in (0.5, 1.0, 2.0, 4.0, 8.0):
            v = _v(g, alpha)
            if prev is not None and np.any(v > prev + 1e-9):
                return False
            prev = v
    return True


def check_uniform_floor():
    g = build_grid(GeometrySpec.interval(), 41)
    floor = _v(g, 8.0).min()
    return all(_v(g, a).min() >= floor - 1e-9 for a in (0.0, 1.0, 4.0, 8.0))


def check_alpha_derivative():
    g = build_grid(GeometrySpec.interval(), 41)
    alpha, h = 2.0, 2e-3
    p = SemilinearProblem(g, alpha, 1.0, 1.0)
    v = _v(g, alpha)
    vp = semilinear.solve_vprime(p, v)
    fd = (_v(g, alpha + h) - _v(g, alpha - h)) / (2 * h)
    return np.abs(vp - fd).max() <= 1e-4 and vp.max() <= 1e-14


def check_mass_integrand_sign():
    for spec, n in GEOMETRIES:
        g = build_grid(spec, n)
        for alpha in (1.0, 8.0):
            p = SemilinearProblem(g, alpha, 1.0, 1.0)
            v = _v(g, alpha)
            s = v + alpha * p.chi * semilinear.solve_vprime(p, v)
            if s.min() < -1e-9:
                return False
            # identity Lap s = alpha (chi+1) v**chi s on the interior
            eq = g.laplacian(s) - alpha * (p.chi + 1) * v ** p.chi * s
            if np.abs(eq[g.interior]).max() > 1e-8:
                return False
    return True


def check_mass_injective():
    for spec, n in GEOMETRIES:
        g = build_grid(spec, n)
        P = Problem(g, 1.0, 1.0)
        ms = []
        for alpha in (0.0, 0.5, 2.0, 8.0, 32.0):
            s = sample(P, alpha)
            if not (s.m_prime > 0 and s.m <= alpha * g.volume + 1e-12):
                return False
            ms.append(s.m)
        if ms[0] != 0.0 or np.any(np.diff(ms) <= 0):
            return False
    return True


def check_lower_solution():
    g = build_grid(GeometrySpec.interval(), 41)
    trace = g.trace([1.0, 2.0])
    prev = None
    for alpha in (0.5, 1.0, 2.0, 4.0):
        v = _v(g, alpha, 1.0, trace)
        vl = semilinear.lower_solution(g, alpha, 1.0, 1.0)
        if np.any(vl > v + 1e-9):
            return False
        z = alpha * vl
        if prev is not None and np.any(prev > z + 1e-9):
            return False
        prev = z
    return True


def check_subsolution_defect():
    for d in (2, 3):
        for alpha in (1.0, 4.0, 16.0):
            r = np.linspace(1e-3, 1.0, 200)
            if subsolution_defect(r, alpha, 1.0, 1.0, 1.0, d).min() < -1e-9 * alpha ** 2:
                return False
            g = build_grid(GeometrySpec.radial(d), 11)
            if subsolution_field(g, alpha, 1.0, 1.0, 1.0)[-1] != alpha:
                return False
    return True


def check_subsolution_comparison():
    for d in (2, 3):
        g = build_grid(GeometrySpec.radial(d), 41)
        for alpha in (1.0, 4.0, 16.0):
            z = alpha * semilinear.lower_solution(g, alpha, 1.0, 1.0)
            if np.any(z < subsolution_field(g, alpha, 1.0, 1.0, 1.0) - 1e-8):
                return False
    return True


def check_sector_chain():
    for d in (2, 3):
        g = build_grid(GeometrySpec.radial(d), 81)
        P = Problem(g, 1.0, 1.0)
        sec = default_sector(g)
        rows = []
        for alpha in (1.0, 10.0, 100.0):
            s = sample(P, alpha, with_lower=True, sector=sec)
            if not s.m >= s.m_lower >= s.sector_bound - 1e-8:
                return False
            rows.append((s.m, s.m_lower, s.sector_bound))
        if np.any(np.diff(np.array(rows), axis=0) <= 0):
            return False
    return True


def check_flux_order():
    spec = GeometrySpec.interval()
    norms = []
    for n in (21, 41, 81):
        st = compute_steady_state(Problem(build_grid(spec, n), 1.0, 1.0, mass=0.7))
        norms.append(flux_residual(st.grid, st.u, st.v, 1.0))
    norms = np.array(norms)
    return bool(np.all(np.log2(norms[:-1] / norms[1:]) >= 1.7))


def check_mass_roundtrip():
    for spec, n in GEOMETRIES:
        g = build_grid(spec, n)
        for m in (0.1, 5.0):
            st = compute_steady_state(Problem(g, 1.0, 1.0, mass=m))
            if abs(integrate(g, st.u) - m) > 1e-8 * m or st.u.min() <= 0 or st.v.min() <= 0:
                return False
    return True


def check_uniqueness():
    g = build_grid(GeometrySpec.interval(), 41)
    p = SemilinearProblem(g, 3.0, 1.0, 1.0)
    a = semilinear.picard_solve(p).solution
    b = semilinear.solve(p).solution
    c = semilinear.newton_solve(p, initial=np.full(g.size, 0.5)).solution
    return np.abs(a - b).max() <= 1e-9 and np.abs(a - c).max() <= 1e-9


def check_evolution():
    g = build_grid(GeometrySpec.interval(), 41)
    st = compute_steady_state(Problem(g, 1.0, 1.0, mass=0.7))
    tr = evolve_to_steady(
        EvolutionState(0.0, st.u.copy(), st.v.copy()), g, 1.0, 1.0, 1.0,
        EvolutionParams(1e-3, 0.0), (st.u, st.v),
    )
    m = np.array(tr.mass_u)
    return tr.dist_u[-1] <= 1e-6 and np.abs(m - m[0]).max() <= 1e-10 * m[0]


CHECKS = (
    ("maximum-principle", check_max_principle),
    ("lemma1-flux-residual", check_flux_order),
    ("lemma3-bound", check_upper_bound),
    ("lemma4-monotonicity", check_monotone_in_alpha),
    ("lemma6-lower-bound", check_uniform_floor),
    ("lemma8-derivative", check_alpha_derivative),
    ("lemma9-sign", check_mass_integrand_sign),
    ("lemma10-injectivity", check_mass_injective),
    ("lemma11-lower-solution", check_lower_solution),
    ("lemma13-subsolution", check_subsolution_defect),
    ("lemma14-comparison", check_subsolution_comparison),
    ("lemma15-sector-bound", check_sector_chain),
    ("theorem1-roundtrip", check_mass_roundtrip),
    ("uniqueness", check_uniqueness),
    ("evolution-persistence", check_evolution),
)


def run_selftest():
    """Run every check; returns ``(report_lines, failed_names)``."""
    lines, failed = [], []
    for name, fn in CHECKS:
        try:
            ok = bool(fn())
        except Exception as exc:  # any error is a failed check
            logger.info("%s raised %s: %s", name, type(exc).__name__, exc)
            ok = False
        lines.append(f"{name}: {'PASS' if ok else 'FAIL'}")
        if not ok:
            failed.append(name)
    return lines, failed

import math

import numpy as np
import pytest

from chemosteady.config import Problem, SolverParams
from chemosteady.domain import GeometrySpec, build_grid, integrate
from chemosteady.errors import ConfigError, MassUnreachableError
from chemosteady.massmap import (
    SectorOverflowWarning,
    SectorSpec,
    cap_measure,
    default_sector,
    invert_mass,
    lower_mass,
    mass,
    sample,
    sector_lower_bound,
)

INTERVAL = build_grid(GeometrySpec.interval(), 201)
SQUARE = build_grid(GeometrySpec.rectangle(), 41)
BALL2 = build_grid(GeometrySpec.radial(2), 81)
BALL3 = build_grid(GeometrySpec.radial(3), 81)


def test_mass_at_zero_and_derivative_at_zero():
    s = sample(Problem(INTERVAL, 1.0, 2.0), 0.0)
    assert s.m == 0.0
    # m'(0) = integral of v_0**chi with v_0 = 2
    assert s.m_prime == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("grid", [INTERVAL, SQUARE, BALL3], ids=["interval", "square", "ball3"])
def test_derivative_matches_central_difference(grid):
    P = Problem(grid, 1.0, 1.0)
    for alpha in (0.5, 1.0, 4.0):
        h = 1e-4 * alpha
        fd = (sample(P, alpha + h).m - sample(P, alpha - h).m) / (2 * h)
        assert sample(P, alpha).m_prime == pytest.approx(fd, rel=1e-6)


def test_mass_strictly_increasing_and_below_linear_bound():
    trace = INTERVAL.trace([0.5, 2.0])
    P = Problem(INTERVAL, 1.5, trace)
    ms = [sample(P, a).m for a in np.geomspace(0.01, 1e4, 25)]
    assert np.all(np.diff(ms) > 0)
    for a, m in zip(np.geomspace(0.01, 1e4, 25), ms):
        assert m <= a * 2.0 ** 1.5 * INTERVAL.volume


def test_lower_mass_below_mass_for_varying_trace():
    trace = INTERVAL.trace([1.0, 3.0])
    P = Problem(INTERVAL, 1.0, trace)
    for alpha in (0.5, 5.0, 50.0):
        s = sample(P, alpha, with_lower=True)
        assert s.m_lower <= s.m
        assert s.m_lower == pytest.approx(lower_mass(INTERVAL, alpha, 1.0, 1.0))


def test_mass_helper_uses_quadrature():
    v = np.full(SQUARE.size, 2.0)
    assert mass(SQUARE, 3.0, v, 2.0) == pytest.approx(12.0 * SQUARE.volume)
    assert integrate(SQUARE, v) == pytest.approx(2.0)


def test_cap_measure_closed_forms():
    assert cap_measure(2, 2.0) == pytest.approx(2 * math.pi)
    assert cap_measure(3, 2.0) == pytest.approx(4 * math.pi)
    assert cap_measure(3, math.sqrt(2)) == pytest.approx(2 * math.pi)  # hemisphere
    for delta in (0.3, 1.0, 1.7):
        theta = 2 * math.asin(delta / 2)
        assert cap_measure(4, delta) == pytest.approx(2 * math.pi * (theta - math.sin(theta) * math.cos(theta)))
    # small caps approach the flat disc measure
    assert cap_measure(3, 1e-3) == pytest.approx(math.pi * 1e-6, rel=1e-5)


def test_sector_spec_validation():
    with pytest.raises(ConfigError):
        SectorSpec(1.0, 1.5, 2)
    with pytest.raises(ConfigError):
        SectorSpec(1.0, 0.5, 1)
    assert default_sector(INTERVAL) is None and default_sector(SQUARE) is None
    assert default_sector(build_grid(GeometrySpec.radial(2, 2.0, 0.5), 11)) == SectorSpec(2.0, 1.5, 2)


def test_sector_bound_matches_direct_formula():
    spec = SectorSpec(2.0, 0.7, 3)
    alpha, chi, vl = 3.0, 1.5, 0.8
    beta = math.sqrt(alpha) * vl ** (chi / 2) * spec.R
    e = chi * beta + 3
    direct = (spec.sigma * alpha * vl ** chi * spec.R ** (-chi * beta)
              * (spec.R ** e - (spec.R - spec.delta) ** e) / e)
    assert sector_lower_bound(spec, alpha, chi, vl) == pytest.approx(direct, rel=1e-12)


def test_sector_bound_overflow_warns():
    with pytest.warns(SectorOverflowWarning):
        assert sector_lower_bound(SectorSpec(1e3, 1.0, 3), 1e300, 1.0, 1.0) == math.inf


@pytest.mark.parametrize("grid", [BALL2, BALL3], ids=["d2", "d3"])
def test_chain_mass_lower_sector(grid):
    P = Problem(grid, 1.0, 1.0)
    sec = default_sector(grid)
    rows = []
    for alpha in (1.0, 10.0, 100.0, 1000.0):
        s = sample(P, alpha, with_lower=True, sector=sec)
        assert s.m >= s.m_lower >= s.sector_bound - 1e-8
        rows.append((s.m, s.m_lower, s.sector_bound))
    assert np.all(np.diff(np.array(rows), axis=0) > 0)


@pytest.mark.parametrize(
    "grid,target",
    [(INTERVAL, 0.7), (INTERVAL, 40.0), (SQUARE, 5.0), (BALL3, 5.0), (BALL2, 1e-4)],
)
def test_inversion_hits_target(grid, target):
    inv = invert_mass(target, Problem(grid, 1.0, 1.0))
    assert abs(inv.sample.m - target) <= 1e-8 * target
    lo, hi = inv.bracket
    assert lo <= inv.alpha <= hi
    assert len(inv.history) < 40


def test_inversion_reference_value():
    inv = invert_mass(0.7, Problem(INTERVAL, 1.0, 1.0))
    assert inv.alpha == pytest.approx(0.7399280337936135, rel=1e-8)


def test_inversion_unreachable_below_cap():
    with pytest.raises(MassUnreachableError) as info:
        invert_mass(1e4, Problem(INTERVAL, 1.0, 1.0), SolverParams(alpha_cap=1e3))
    assert info.value.mass < 1e4 and info.value.lower_mass <= info.value.mass


def test_inversion_rejects_nonpositive_target():
    with pytest.raises(ConfigError):
        invert_mass(0.0, Problem(INTERVAL, 1.0, 1.0))

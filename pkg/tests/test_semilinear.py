import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemosteady import semilinear
from chemosteady.config import SolverParams
from chemosteady.domain import GeometrySpec, build_grid
from chemosteady.errors import ConfigError, NonConvergenceError
from chemosteady.semilinear import (
    SemilinearProblem,
    chi_power,
    harmonic_extension,
    lower_solution,
    newton_solve,
    picard_solve,
    residual_norm,
    solve,
    solve_vprime,
    subsolution_defect,
    subsolution_field,
    subsolution_params,
)
from oracles import FROZEN_V_MID

INTERVAL = build_grid(GeometrySpec.interval(), 101)
SQUARE = build_grid(GeometrySpec.rectangle(), 33)
BALL3 = build_grid(GeometrySpec.radial(3), 101)


def test_chi_power_matches_power():
    v = np.linspace(0.1, 3, 7)
    assert np.allclose(chi_power(v, 1.7), v ** 1.7, rtol=1e-14)


def test_alpha_zero_gives_harmonic_extension():
    trace = INTERVAL.trace([1.0, 3.0])
    rep = solve(SemilinearProblem(INTERVAL, 0.0, 1.0, trace))
    assert np.allclose(rep.solution, 1 + 2 * INTERVAL.coords[:, 0], atol=1e-12)


@pytest.mark.parametrize("grid", [INTERVAL, SQUARE, BALL3], ids=["interval", "square", "ball3"])
@pytest.mark.parametrize("chi", [0.5, 1.0, 2.0])
def test_methods_agree_and_meet_residual(grid, chi):
    p = SemilinearProblem(grid, 6.0, chi, 1.0)
    params = SolverParams()
    reps = [picard_solve(p, params), newton_solve(p, params), solve(p, params)]
    for rep in reps:
        assert rep.residual_norm <= params.residual_tol * p.residual_scale()
        assert rep.update_norm <= params.tol
    for rep in reps[1:]:
        assert np.abs(rep.solution - reps[0].solution).max() <= 1e-9
    assert reps[2].method == "hybrid"


def test_newton_is_quadratic_near_solution():
    p = SemilinearProblem(INTERVAL, 4.0, 1.0, 1.0)
    hist = newton_solve(p).history
    # updates square off once in the basin
    assert hist[-2] <= 1e-3 * math.sqrt(hist[-3]) or hist[-2] <= 1e-10


def test_second_order_against_oracle():
    errs = []
    for n in (41, 81, 161):
        g = build_grid(GeometrySpec.interval(), n)
        v = solve(SemilinearProblem(g, 1.0, 1.0, 1.0)).solution
        errs.append(abs(v[n // 2] - FROZEN_V_MID))
    assert math.log2(errs[0] / errs[1]) > 1.9 and math.log2(errs[1] / errs[2]) > 1.9


def test_uniqueness_from_different_starts():
    p = SemilinearProblem(SQUARE, 10.0, 1.0, 1.0)
    a = solve(p).solution
    b = newton_solve(p, initial=np.full(SQUARE.size, 0.2)).solution
    c = picard_solve(p, initial=np.full(SQUARE.size, 5.0)).solution
    assert np.abs(a - b).max() <= 1e-9 and np.abs(a - c).max() <= 1e-9


@settings(max_examples=20, deadline=None)
@given(
    alpha=st.floats(0.0, 16.0),
    chi=st.sampled_from([0.5, 1.0, 2.0]),
    left=st.floats(0.3, 3.0),
    right=st.floats(0.3, 3.0),
)
def test_bound_and_positivity_property(alpha, chi, left, right):
    g = build_grid(GeometrySpec.interval(), 41)
    v = solve(SemilinearProblem(g, alpha, chi, g.trace([left, right]))).solution
    assert v.min() > 0 and v.max() <= max(left, right) + 1e-12


@settings(max_examples=15, deadline=None)
@given(a1=st.floats(0.0, 10.0), factor=st.floats(1.01, 4.0))
def test_monotone_in_alpha_property(a1, factor):
    g = build_grid(GeometrySpec.radial(2), 41)
    v1 = solve(SemilinearProblem(g, a1, 1.0, 1.0)).solution
    v2 = solve(SemilinearProblem(g, a1 * factor, 1.0, 1.0)).solution
    assert np.all(v2 <= v1 + 1e-9)


def test_vprime_matches_finite_difference():
    alpha, h = 3.0, 1e-4
    for g in (INTERVAL, SQUARE, BALL3):
        p = SemilinearProblem(g, alpha, 1.0, 1.0)
        v = solve(p).solution
        vp = solve_vprime(p, v)
        fd = (solve(SemilinearProblem(g, alpha + h, 1.0, 1.0)).solution
              - solve(SemilinearProblem(g, alpha - h, 1.0, 1.0)).solution) / (2 * h)
        assert np.abs(vp - fd).max() <= 1e-6
        assert vp.max() <= 0.0


def test_nonconvergence_carries_last_iterate():
    p = SemilinearProblem(INTERVAL, 50.0, 1.0, 1.0)
    with pytest.raises(NonConvergenceError) as info:
        picard_solve(p, SolverParams(max_iter=2))
    assert info.value.last.shape == (INTERVAL.size,)
    assert info.value.iterations == 2


def test_lower_solution_below_solution():
    trace = INTERVAL.trace([1.0, 2.5])
    v = solve(SemilinearProblem(INTERVAL, 2.0, 1.0, trace)).solution
    vl = lower_solution(INTERVAL, 2.0, 1.0, 1.0)
    assert np.all(vl <= v + 1e-12)


def test_subsolution_closed_form():
    beta, gamma = subsolution_params(4.0, 1.0, 1.0, 1.0)
    assert (beta, gamma) == (2.0, 4.0)
    z = subsolution_field(BALL3, 4.0, 1.0, 1.0, 1.0)
    assert np.allclose(z, 4 * BALL3.radius ** 2, rtol=1e-14, atol=0)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("chi", [0.5, 1.0, 2.0])
def test_subsolution_defect_nonnegative(d, chi):
    r = np.linspace(1e-3, 1.0, 400)
    for alpha in (0.5, 4.0, 64.0):
        defect = subsolution_defect(r, alpha, chi, 1.3, 1.0, d)
        assert defect.min() >= -1e-9 * max(1.0, np.abs(defect).max())


def test_subsolution_comparison_on_grid():
    for d in (2, 3):
        g = build_grid(GeometrySpec.radial(d), 101)
        for alpha in (1.0, 4.0, 16.0):
            z = alpha * lower_solution(g, alpha, 1.0, 1.0)
            assert np.all(z >= subsolution_field(g, alpha, 1.0, 1.0, 1.0) - 1e-8)


def test_subsolution_rejects_nodes_outside_ball():
    with pytest.raises(ConfigError):
        subsolution_field(build_grid(GeometrySpec.rectangle(2.0, 2.0), 5), 1.0, 1.0, 1.0, 1.0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(alpha=-1.0), dict(chi=0.0), dict(vstar=0.0)],
)
def test_problem_validation(kwargs):
    args = dict(grid=INTERVAL, alpha=1.0, chi=1.0, vstar=1.0) | kwargs
    with pytest.raises(ConfigError):
        SemilinearProblem(**args)


def test_radial_needs_constant_trace():
    g = build_grid(GeometrySpec.radial(2, 1.0, 0.5), 11)
    with pytest.raises(ConfigError):
        SemilinearProblem(g, 1.0, 1.0, np.array([1.0, 2.0]))


def test_residual_norm_of_harmonic_extension_at_alpha_zero():
    p = SemilinearProblem(SQUARE, 0.0, 1.0, SQUARE.trace(lambda xy: 1 + xy[:, 0] ** 2 - xy[:, 1] ** 2))
    assert residual_norm(p, harmonic_extension(SQUARE, p.vstar)) <= 1e-9


def test_mutation_hook_is_module_global(monkeypatch):
    monkeypatch.setattr(semilinear, "chi_power", lambda v, chi: np.ones_like(v))
    v = solve(SemilinearProblem(INTERVAL, 2.0, 1.0, 1.0)).solution
    x = INTERVAL.coords[:, 0]
    # with chi_power == 1 the equation is linear, Lap v = 2 v
    exact = np.cosh(math.sqrt(2) * (x - 0.5)) / math.cosh(math.sqrt(2) / 2)
    assert np.abs(v - exact).max() <= 1e-5

import math

import numpy as np
import pytest

from chemosteady.config import Problem
from chemosteady.domain import GeometrySpec, build_grid, integrate
from chemosteady.errors import ConfigError
from chemosteady.steady import compute_steady_state, flux_residual, steady_state_for_alpha


def test_alpha_zero_is_trivial_state():
    g = build_grid(GeometrySpec.interval(), 51)
    st = compute_steady_state(Problem(g, 1.0, g.trace([1.0, 2.0]), alpha=0.0))
    assert np.all(st.u == 0) and st.mass == 0
    assert np.allclose(st.v, 1 + g.coords[:, 0], atol=1e-12)


@pytest.mark.parametrize(
    "spec,n",
    [(GeometrySpec.interval(), 101), (GeometrySpec.rectangle(2.0, 1.0), 33),
     (GeometrySpec.radial(2, 1.0, 0.4), 81)],
)
def test_round_trip_with_varied_traces(spec, n):
    g = build_grid(spec, n)
    trace = 2.0 if spec.kind == "radial" else g.trace(lambda c: 1.0 + 0.5 * c[:, 0] ** 2)
    st = compute_steady_state(Problem(g, 0.7, trace, mass=3.0))
    assert abs(integrate(g, st.u) - 3.0) <= 3e-8
    assert np.allclose(st.u, st.alpha * st.v ** 0.7, rtol=1e-13)
    assert st.u.min() > 0 and st.v.min() > 0
    assert st.inversion is not None and st.report is st.inversion.sample.report


def test_steady_state_for_alpha_reports_mass():
    g = build_grid(GeometrySpec.radial(3), 41)
    st = steady_state_for_alpha(Problem(g, 1.0, 1.0), 2.0)
    assert st.mass == pytest.approx(integrate(g, st.u))
    assert st.target_mass is None


def test_flux_residual_small_for_stationary_and_large_otherwise():
    g = build_grid(GeometrySpec.interval(), 201)
    st = compute_steady_state(Problem(g, 1.0, 1.0, mass=0.7))
    fi, fb = flux_residual(g, st.u, st.v, 1.0)
    assert fi <= 1e-5 and fb <= 1e-4
    bad = flux_residual(g, np.full(g.size, 0.7), st.v, 1.0)
    assert bad[0] > 1e-2 and bad[1] > 1e-2


def test_flux_residual_of_exact_pair_on_line():
    # the continuum flux vanishes for u = c v**chi whatever v is, so the
    # discrete residual is pure truncation error and must shrink
    g = build_grid(GeometrySpec.interval(), 101)
    x = g.coords[:, 0]
    v = 1.0 + 0.3 * np.sin(math.pi * x)
    errs = [flux_residual(g, 2.0 * v, v, 1.0)]
    g2 = build_grid(GeometrySpec.interval(), 201)
    x2 = g2.coords[:, 0]
    v2 = 1.0 + 0.3 * np.sin(math.pi * x2)
    errs.append(flux_residual(g2, 2.0 * v2, v2, 1.0))
    assert errs[1][0] < errs[0][0] / 3 and errs[1][1] < errs[0][1] / 3


@pytest.mark.parametrize(
    "spec,ns",
    [(GeometrySpec.interval(), (41, 81, 161)), (GeometrySpec.rectangle(), (33, 65, 129)),
     (GeometrySpec.radial(3), (41, 81, 161)), (GeometrySpec.radial(2, 1.0, 0.5), (41, 81, 161))],
    ids=["interval", "square", "ball3", "annulus2"],
)
def test_flux_residual_second_order(spec, ns):
    norms = []
    for n in ns:
        st = compute_steady_state(Problem(build_grid(spec, n), 1.0, 1.0, mass=0.7))
        norms.append((st.flux_interior, st.flux_boundary))
    order = np.log2(np.array(norms[:-1]) / np.array(norms[1:]))
    assert order.min() >= 1.7


def test_flux_residual_needs_positive_v():
    g = build_grid(GeometrySpec.interval(), 11)
    with pytest.raises(ConfigError):
        flux_residual(g, np.ones(11), np.zeros(11), 1.0)


def test_problem_rejects_both_mass_and_alpha():
    g = build_grid(GeometrySpec.interval(), 11)
    with pytest.raises(ConfigError, match="ambiguous"):
        Problem(g, 1.0, 1.0, mass=1.0, alpha=1.0)
    with pytest.raises(ConfigError):
        compute_steady_state(Problem(g, 1.0, 1.0))

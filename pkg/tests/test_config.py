import numpy as np
import pytest

from chemosteady.config import RunConfig, SolverParams, load_config, parse_config_text
from chemosteady.errors import ConfigError


def test_parse_minimal_config():
    cfg = parse_config_text(
        "# steady run\ndomain = interval\na = 0\nb = 1\nn = 201\nchi = 1\nvstar = 1\nmass = 0.7  # target\n"
    )
    assert cfg.n == 201 and cfg.mass == 0.7 and cfg.alpha is None
    assert cfg.grid().size == 201
    assert np.array_equal(cfg.trace(cfg.grid()), [1.0, 1.0])


def test_alpha_list_and_log_range():
    cfg = parse_config_text("vstar = 1\nalpha_list = 0, 1 2,4\n")
    assert cfg.alphas().tolist() == [0.0, 1.0, 2.0, 4.0]
    cfg = parse_config_text("vstar = 1\nalpha_min = 0.1\nalpha_max = 10\nalpha_count = 3\n")
    assert np.allclose(cfg.alphas(), [0.1, 1.0, 10.0])
    with pytest.raises(ConfigError):
        parse_config_text("vstar = 1\n").alphas()


def test_rectangle_sides_and_corners():
    cfg = parse_config_text(
        "domain = rectangle\nn = 5\nvstar_left = 1\nvstar_right = 3\nvstar_top = 2\nvstar_bottom = 2\n"
    )
    g = cfg.grid()
    t = cfg.trace(g)
    x, y = g.coords[g.boundary].T
    assert np.all(t[(x == -0.5) & (np.abs(y) < 0.5)] == 1.0)
    assert np.all(t[(x == 0.5) & (np.abs(y) < 0.5)] == 3.0)
    assert t[(x == -0.5) & (y == 0.5)][0] == 1.5


def test_interval_endpoint_values():
    cfg = parse_config_text("vstar_left = 1\nvstar_right = 2\n")
    assert cfg.trace(cfg.grid()).tolist() == [1.0, 2.0]


@pytest.mark.parametrize(
    "text",
    [
        "vstar = 1\nmass = 1\nalpha = 1\n",
        "vstar = 1\nbogus = 3\n",
        "vstar = 1\nvstar = 2\n",
        "vstar = one\n",
        "n = 2\n",
        "domain = torus\n",
        "chi = 0\n",
        "vstar = -1\n",
        "alpha_list = 2, 1\n",
        "initial = random\n",
        "method = sor\n",
        "no equals sign\n",
        "tol = 0\n",
    ],
)
def test_invalid_configs_raise(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_radial_rejects_side_values():
    cfg = parse_config_text("domain = radial\nd = 3\nvstar_left = 1\n")
    with pytest.raises(ConfigError):
        cfg.trace(cfg.grid())


def test_missing_boundary_value():
    cfg = parse_config_text("domain = rectangle\nvstar_left = 1\n")
    with pytest.raises(ConfigError):
        cfg.problem()


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.cfg")


def test_solver_params_from_config():
    sp = RunConfig(vstar=1.0, tol=1e-9, method="picard", damping=0.5).solver_params()
    assert sp == SolverParams(tol=1e-9, method="picard", damping=0.5)

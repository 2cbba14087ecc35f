import math

import numpy as np
import pytest

import layerlab


def test_mobility_constant():
    assert layerlab.mobility_constant() == pytest.approx(3 / (2 * math.sqrt(2)), abs=1e-12)


def test_profile_is_tanh():
    z, u = layerlab.profile(10.0, 4000)
    assert z.shape == u.shape == (4000,)
    inner = np.abs(z) <= 8
    assert np.max(np.abs(u[inner] - np.tanh(z[inner] / math.sqrt(2)))) <= 1e-6


def test_t_eps():
    assert layerlab.t_eps(0.1) == pytest.approx(0.01 * math.log(10.0))


def test_radial_limit():
    tr = layerlab.evolve_radial(0.5, N=2, t_end=0.05)
    assert tr[0, 0] == 0.0 and tr[-1, 0] == pytest.approx(0.05)
    assert tr[-1, 1] == pytest.approx(math.sqrt(0.25 - 0.1), rel=1e-8)
    forced = layerlab.evolve_radial(0.5, N=2, forcing=0.3 / math.sqrt(2), t_end=0.05)
    assert forced[-1, 1] > tr[-1, 1]


def test_curve_flow_shrinks_circle():
    c = layerlab.circle(0.0, 0.0, 0.5, 256)
    out = layerlab.evolve_curve(c, 0.05, 1e-5)
    r = np.hypot(out[:, 0], out[:, 1])
    assert np.max(np.abs(r - math.sqrt(0.15))) <= 1e-3


def test_level_set_and_hausdorff():
    h = 0.02
    x = -1 + h * np.arange(101)
    X, Y = np.meshgrid(x, x)
    f = np.hypot(X, Y) - 0.5
    curves = layerlab.extract_level_set(f, h, (-1.0, -1.0), 0.0)
    assert len(curves) == 1
    pts, closed = curves[0]
    assert closed
    ref = layerlab.circle(0.0, 0.0, 0.5, 400)
    assert layerlab.hausdorff(pts, ref) <= 5 * h * h
    assert layerlab.hausdorff(pts, ref) == layerlab.hausdorff(ref, pts)


def test_simulate_respects_bounds():
    res = layerlab.simulate("eps = 0.1\nt_end = 0.005\nR0 = 0.5\n")
    u = res["u"]
    assert u.ndim == 2 and u.shape[0] == u.shape[1]
    assert np.all(np.abs(u) <= 1.0)
    assert res["t"] == pytest.approx(0.005)


def test_config_errors_are_value_errors():
    with pytest.raises(ValueError):
        layerlab.config_hash("colour = blue\n")
    text = "eps_list = 0.2, 0.15\nT = 0.16\nR0 = 0.8\ndomain = -1.5, 1.5, -1.5, 1.5\n"
    assert layerlab.config_hash(text) == layerlab.config_hash(layerlab.serialize_config(text))


def test_small_sweep(tmp_path):
    text = ("eps_list = 0.2, 0.15\nT = 0.16\nR0 = 0.8\ndomain = -1.5, 1.5, -1.5, 1.5\n"
            "observers = 4\nwrite_fields = 0\n")
    rep = layerlab.run("sweep", text, str(tmp_path))
    assert rep["kind"] == "validity"
    assert [r["ok"] for r in rep["records"]] == [True, True]
    assert (tmp_path / "report.csv").read_text() == rep["csv"]
    assert "hausdorff_max" in rep["fits"]

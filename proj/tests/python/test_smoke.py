import json
import os

import numpy as np
import pytest

moyal_scatter = pytest.importorskip("moyal_scatter")

REPO = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
CONFIG = os.path.join(REPO, "configs", "commutative-1d.json")


def test_version():
    assert moyal_scatter.__version__ == "0.1.0"


def test_star_product_theta_zero_is_pointwise():
    n = 32
    x = np.linspace(-4.0, 4.0, n, endpoint=False)
    f = np.exp(-(x**2)).astype(complex)
    g = np.exp(-((x - 0.5) ** 2) / 2.0).astype(complex)
    fg = moyal_scatter.star_product(f, g, q=2, p=0, theta=0.0, mass=1.0,
                                    box_length=8.0, points_per_dim=n)
    assert np.allclose(fg, f * g, atol=1e-12)


def test_star_product_moyal_plane_is_noncommutative():
    n = 32
    xs = np.linspace(-5.0, 5.0, n, endpoint=False)
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    f = np.exp(-(xx**2 + yy**2)).astype(complex).ravel()
    g = (xx * np.exp(-(xx**2 + yy**2) / 2.0)).astype(complex).ravel()
    kwargs = dict(q=1, p=2, theta=0.5, mass=1.0, box_length=10.0, points_per_dim=n)
    fg = moyal_scatter.star_product(f, g, **kwargs)
    gf = moyal_scatter.star_product(g, f, **kwargs)
    assert np.linalg.norm(fg - gf) > 1e-3 * np.linalg.norm(fg)
    # involution: conj(f * g) = conj(g) * conj(f)
    rhs = moyal_scatter.star_product(np.conj(g), np.conj(f), **kwargs)
    assert np.allclose(np.conj(fg), rhs, atol=1e-7)


def test_load_config_echo():
    cfg = moyal_scatter.load_config(CONFIG)
    assert cfg["model"]["q"] == 2
    assert cfg["grid"]["points_per_dim"] == 256
    with pytest.raises(Exception):
        moyal_scatter.load_config("/nonexistent/config.json")


def test_run_writes_report(tmp_path):
    status = moyal_scatter.run("lm-probe", CONFIG, out_dir=str(tmp_path))
    assert status == 0
    report = json.loads((tmp_path / "report.json").read_text())
    names = [c["name"] for c in report["checks"]]
    assert "lm.bound_holds" in names
    assert all(c["passed"] for c in report["checks"])


def test_bad_input_raises():
    with pytest.raises(ValueError):
        moyal_scatter.star_product(
            np.zeros(5, complex), np.zeros(5, complex),
            q=2, p=0, theta=0.0, mass=1.0, box_length=8.0, points_per_dim=32)

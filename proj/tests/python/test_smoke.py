import math
from pathlib import Path

import numpy as np
import pytest

import cnnac

PRESETS = Path(__file__).resolve().parents[2] / "presets"


def test_weight_counts():
    assert cnnac.preset("cnn1").network.weight_count() == 238
    assert cnnac.preset("dnn").network.weight_count() == 246
    assert set(cnnac.preset_names()) >= {"cnn1", "cnn5", "dnn", "sudden_change_cnn1"}


def test_cnn_operator_is_full_width_cross_correlation():
    x = np.arange(6.0).reshape(3, 2)
    f = np.array([[1.0, 0.0], [0.0, 1.0]])
    out = cnnac.cnn_operator(x, [f], [0.5])
    assert out.shape == (2, 1)
    np.testing.assert_allclose(out[:, 0], [0 + 3 + 0.5, 2 + 5 + 0.5])


def test_forward_and_jacobian_match_finite_differences():
    spec = cnnac.preset("cnn1").network
    rng = np.random.default_rng(0)
    theta = rng.uniform(-0.5, 0.5, spec.weight_count())
    x = rng.uniform(-1, 1, (spec.input_rows, spec.input_cols)) * spec.alpha2
    y = cnnac.forward(spec, theta, x)
    jac = cnnac.jacobian(spec, theta, x)
    assert y.shape == (2,)
    assert jac.shape == (2, 238)
    h = 1e-6
    for k in rng.choice(238, 12, replace=False):
        tp, tm = theta.copy(), theta.copy()
        tp[k] += h
        tm[k] -= h
        numeric = (cnnac.forward(spec, tp, x) - cnnac.forward(spec, tm, x)) / (2 * h)
        np.testing.assert_allclose(jac[:, k], numeric, rtol=1e-6, atol=1e-6)


def test_gradcheck_passes():
    report = cnnac.gradcheck("cnn1", trials=3)
    assert report["passed"]
    assert report["max_rel_err"] < 1e-6


def test_short_simulation():
    sc = cnnac.preset("cnn1")
    sc.t_end = 0.2
    r = cnnac.simulate(sc)
    assert r.x.shape == (201, 2)
    assert r.t[-1] == pytest.approx(0.2)
    assert len(r.rmse) == 2 and all(math.isfinite(v) for v in r.rmse)
    assert r.max_theta_norm <= sc.theta_bar * (1 + 1e-3)


def test_oracle_reaches_small_error():
    sc = cnnac.preset("cnn1")
    sc.oracle = True
    sc.t_end = 2.0
    r = cnnac.simulate(sc)
    assert np.linalg.norm(r.e[-1]) < 1e-2


def test_scenario_files_and_errors():
    sc = cnnac.load_scenario(PRESETS / "cnn3.toml")
    assert sc.rho == 0.0
    again = cnnac.parse_scenario(cnnac.emit_scenario(sc))
    assert again.name == "cnn3"
    with pytest.raises(cnnac.ConfigError, match="unknown key"):
        cnnac.parse_scenario('preset = "cnn1"\nfoo = 1\n')
    with pytest.raises(ValueError):
        cnnac.preset("nope")


def test_divergence_is_reported():
    sc = cnnac.preset("cnn1")
    sc.x0 = [1e200, 1e200]
    sc.t_end = 0.1
    with pytest.raises(cnnac.DivergenceError):
        cnnac.simulate(sc)

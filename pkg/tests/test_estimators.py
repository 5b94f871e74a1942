import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from floqlie.estimators import RabiFitter, ResonanceScanner
from floqlie.models import build_semiclassical_rabi


def test_rabi_fitter_params_roundtrip():
    est = RabiFitter(min_periods=3.0)
    assert est.get_params() == {"min_periods": 3.0}
    assert est.set_params(min_periods=5.0).min_periods == 5.0
    assert clone(est).min_periods == 5.0


def test_rabi_fitter_fit_predict_score():
    t = np.linspace(0, 200, 1000)
    y = 0.5 + 0.4 * np.cos(0.3 * t + 0.2)
    est = RabiFitter().fit(t, y)
    assert est.omega_rabi_ == pytest.approx(0.3, abs=2e-3)
    assert est.amplitude_ == pytest.approx(0.4, abs=1e-2)
    assert est.covered_periods_ == pytest.approx(200 * 0.3 / (2 * np.pi), rel=1e-2)
    assert est.score(t, y) > 0.99
    assert est.predict(t).shape == t.shape


def test_rabi_fitter_not_fitted():
    with pytest.raises(NotFittedError):
        RabiFitter().predict(np.arange(3.0))


def builder(nu):
    return build_semiclassical_rabi(0.5, 1.0, nu, 0.01)


def test_scanner_params():
    est = ResonanceScanner(builder, 1, 0, t_final=300.0)
    params = est.get_params()
    assert params["builder"] is builder and params["t_final"] == 300.0
    assert clone(est).get_params()["initial"] == 1


def test_scanner_fit_predict():
    grid = np.linspace(0.97, 1.03, 25)
    est = ResonanceScanner(builder, 1, 0, t_final=2 * np.pi / 0.01, predicted_nu=1.0).fit(grid)
    assert est.peak_nu_ == pytest.approx(1.0, abs=2 * (grid[1] - grid[0]))
    np.testing.assert_allclose(est.predict(grid), est.result_.p_avg)
    assert est.predict(1.0) > est.predict(0.97)


def test_docstring_example():
    import doctest
    import floqlie.estimators
    assert doctest.testmod(floqlie.estimators).failed == 0

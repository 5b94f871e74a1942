"""scikit-learn style wrappers around the resonance tools.

Both classes inherit ``get_params``/``set_params`` from
:class:`sklearn.base.BaseEstimator`; constructor arguments are stored
unchanged and fitted quantities carry a trailing underscore.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .dynamics import PropagatorConfig
from .resonance import extract_rabi, scan_nu

__all__ = ["RabiFitter", "ResonanceScanner"]


class RabiFitter(BaseEstimator):
    """Fit ``A cos(Omega t + phi) + C`` to a uniformly sampled signal.

    Examples
    --------
    >>> import numpy as np
    >>> t = np.linspace(0, 200, 1000)
    >>> RabiFitter().fit(t, np.cos(0.3 * t)).omega_rabi_  # doctest: +ELLIPSIS
    0.30...
    """

    def __init__(self, min_periods=2.0):
        self.min_periods = min_periods

    def fit(self, t, y):
        t = np.asarray(t, dtype=float)
        fit = extract_rabi(t, y)
        span = t[-1] - t[0]
        self.covered_periods_ = span * fit.omega_rabi / (2 * np.pi)
        self.fit_ = fit
        self.omega_rabi_ = fit.omega_rabi
        self.amplitude_ = fit.amplitude
        self.residual_ = fit.residual
        return self

    def predict(self, t):
        check_is_fitted(self, "fit_")
        return self.fit_(t)

    def score(self, t, y):
        """Coefficient of determination of the fitted cosine."""
        y = np.asarray(y, dtype=float)
        resid = y - self.predict(t)
        return 1.0 - np.sum(resid ** 2) / np.sum((y - y.mean()) ** 2)


class ResonanceScanner(BaseEstimator):
    """Locate a resonance in the modulation frequency.

    Parameters
    ----------
    builder : callable
        ``builder(nu) -> ModelSpec``.
    initial, final : int
        Flat basis indices of the probed transition.
    t_final : float
        Averaging window.
    steps_per_period : int
    leakage_tol : float
    predicted_nu : float, optional
    n_jobs : int, optional
    """

    def __init__(self, builder=None, initial=0, final=0, t_final=100.0, steps_per_period=64,
                 leakage_tol=1e-3, predicted_nu=None, n_jobs=None):
        self.builder = builder
        self.initial = initial
        self.final = final
        self.t_final = t_final
        self.steps_per_period = steps_per_period
        self.leakage_tol = leakage_tol
        self.predicted_nu = predicted_nu
        self.n_jobs = n_jobs

    def fit(self, nu_grid, y=None):
        cfg = PropagatorConfig(self.t_final, self.steps_per_period, leakage_tol=self.leakage_tol)
        self.result_ = scan_nu(self.builder, nu_grid, (self.initial, self.final), cfg,
                               predicted_nu=self.predicted_nu, n_jobs=self.n_jobs)
        self.peak_nu_ = self.result_.peak_nu
        self.peak_value_ = self.result_.peak_value
        return self

    def predict(self, nu):
        """Linear interpolation of the scanned time-averaged probability."""
        check_is_fitted(self, "result_")
        return np.interp(nu, self.result_.nu_grid, self.result_.p_avg)

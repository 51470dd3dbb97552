"""Exponential and power-law fits of MI-versus-lag curves.

Both models are fitted by unweighted least squares in log space:

* exponential  ln I = ln I0 - tau / xi        (correlation length xi)
* power law    ln I = ln A - gamma ln tau

Only points with I above ``threshold`` (and I > 0) are used. Confidence
intervals are 95% Student-t half-widths from the OLS standard errors,
carried to xi, I0 and A by the delta method.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_xy_curve
from .estimation import MICurve
from .exceptions import DomainError, InsufficientDataError

__all__ = [
    "DEFAULT_THRESHOLD",
    "AUDIT_THRESHOLD",
    "FitResult",
    "ExponentialDecay",
    "PowerLawDecay",
    "fit_exponential",
    "fit_powerlaw",
    "compare_models",
]

DEFAULT_THRESHOLD = 1e-3
AUDIT_THRESHOLD = 2e-3
MODEL_GAP = 0.05


@dataclass(frozen=True)
class FitResult:
    """Fitted decay law.

    ``params`` holds ``{"I0", "xi"}`` for the exponential model and
    ``{"A", "gamma"}`` for the power law; ``ci95`` has the matching 95%
    half-widths.
    """

    model: str
    params: dict
    ci95: dict
    points_used: int
    r_squared: float
    slope: float
    intercept: float
    tau_range: tuple
    warning: str | None = field(default=None, compare=False)

    def covers(self, name: str, value: float) -> bool:
        """True when ``value`` lies inside the 95% interval of ``name``."""
        return abs(self.params[name] - value) <= self.ci95[name]

    def predict(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        x = tau if self.model == "exponential" else np.log(tau)
        return np.exp(self.intercept + self.slope * x)


def _select(tau, mi, threshold, tau_min, tau_max):
    keep = (mi > threshold) & (mi > 0) & (tau >= 1)
    if tau_min is not None:
        keep &= tau >= tau_min
    if tau_max is not None:
        keep &= tau <= tau_max
    return keep


def _ols(x, y):
    n = x.size
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise InsufficientDataError("retained points share a single lag")
    slope = float(dx @ dy) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    ssr = float(resid @ resid)
    sst = float(dy @ dy)
    s2 = ssr / (n - 2) if n > 2 else 0.0
    se_slope = math.sqrt(s2 / sxx)
    se_int = math.sqrt(s2 * (1.0 / n + xm * xm / sxx))
    if sst > 0:
        r2 = min(1.0, max(0.0, 1.0 - ssr / sst))
    else:
        r2 = 1.0 if ssr == 0 else 0.0
    return slope, intercept, se_slope, se_int, r2


def _fit(model, tau, mi, threshold, tau_min=None, tau_max=None) -> FitResult:
    tau, mi = check_xy_curve(tau, mi)
    if threshold is None or not np.isfinite(threshold):
        raise DomainError("threshold must be a finite number")
    keep = _select(tau, mi, threshold, tau_min, tau_max)
    n = int(keep.sum())
    if n < 3:
        raise InsufficientDataError(
            f"{model} fit needs >= 3 points above threshold {threshold:g}, got {n}"
        )
    t, y = tau[keep], np.log(mi[keep])
    x = t if model == "exponential" else np.log(t)
    slope, intercept, se_slope, se_int, r2 = _ols(x, y)
    q = float(stats.t.ppf(0.975, n - 2))
    amp = math.exp(intercept)
    amp_hw = amp * q * se_int
    note = None
    if model == "exponential":
        if slope >= 0:
            note = "non-negative slope: MI does not decay, correlation length is infinite"
            warnings.warn(note, RuntimeWarning, stacklevel=3)
            xi, xi_hw = math.inf, math.inf
        else:
            xi = -1.0 / slope
            xi_hw = q * se_slope / slope**2
        params = {"I0": amp, "xi": xi}
        ci = {"I0": amp_hw, "xi": xi_hw}
    else:
        params = {"A": amp, "gamma": -slope}
        ci = {"A": amp_hw, "gamma": q * se_slope}
    return FitResult(
        model, params, ci, n, r2, slope, intercept, (int(t.min()), int(t.max())), note
    )


def _curve_xy(curve: MICurve):
    return curve.tau.astype(float), curve.mi


def fit_exponential(curve: MICurve, threshold=DEFAULT_THRESHOLD, tau_min=None, tau_max=None) -> FitResult:
    """Fit I(tau) = I0 exp(-tau / xi) to the points of ``curve`` above
    ``threshold`` within ``[tau_min, tau_max]``."""
    return _fit("exponential", *_curve_xy(curve), threshold, tau_min, tau_max)


def fit_powerlaw(curve: MICurve, threshold=DEFAULT_THRESHOLD, tau_min=None, tau_max=None) -> FitResult:
    """Fit I(tau) = A tau^-gamma to the points of ``curve`` above
    ``threshold`` within ``[tau_min, tau_max]``."""
    return _fit("powerlaw", *_curve_xy(curve), threshold, tau_min, tau_max)


def compare_models(curve: MICurve, threshold=DEFAULT_THRESHOLD, tau_min=None, tau_max=None):
    """Pick the better decay law by log-space r^2.

    Returns ``(choice, exponential_fit, powerlaw_fit)`` where ``choice`` is
    ``"indeterminate"`` unless the r^2 gap exceeds 0.05.
    """
    exp_fit = fit_exponential(curve, threshold, tau_min, tau_max)
    pow_fit = fit_powerlaw(curve, threshold, tau_min, tau_max)
    gap = exp_fit.r_squared - pow_fit.r_squared
    if gap > MODEL_GAP:
        choice = "exponential"
    elif gap < -MODEL_GAP:
        choice = "powerlaw"
    else:
        choice = "indeterminate"
    return choice, exp_fit, pow_fit


class _DecayRegressor(RegressorMixin, BaseEstimator):
    _model = None

    def __init__(self, threshold=DEFAULT_THRESHOLD, tau_min=None, tau_max=None):
        self.threshold = threshold
        self.tau_min = tau_min
        self.tau_max = tau_max

    def fit(self, X, y):
        """Fit on lags ``X`` (1-d or a single column) and MI values ``y``."""
        self.result_ = _fit(self._model, X, y, self.threshold, self.tau_min, self.tau_max)
        self.ci95_ = dict(self.result_.ci95)
        self.r_squared_ = self.result_.r_squared
        self.n_points_ = self.result_.points_used
        return self

    def predict(self, X):
        check_is_fitted(self, "result_")
        tau, _ = check_xy_curve(X, np.zeros(np.shape(X)[0]))
        return self.result_.predict(tau)

    def score(self, X, y, sample_weight=None):
        """r^2 of ln y on the points the fit would retain."""
        check_is_fitted(self, "result_")
        tau, mi = check_xy_curve(X, y)
        keep = _select(tau, mi, self.threshold, self.tau_min, self.tau_max)
        if keep.sum() < 2:
            raise InsufficientDataError("too few points above threshold to score")
        ly = np.log(mi[keep])
        pred = np.log(self.result_.predict(tau[keep]))
        sst = float(((ly - ly.mean()) ** 2).sum())
        ssr = float(((ly - pred) ** 2).sum())
        return 1.0 - ssr / sst if sst > 0 else float(ssr == 0)


class ExponentialDecay(_DecayRegressor):
    """Exponential decay I(tau) = I0 exp(-tau / xi) fitted in log space.

    Attributes
    ----------
    amplitude_ : float
        I0.
    correlation_length_ : float
        xi; ``inf`` if the fitted slope is not negative.
    ci95_ : dict
    result_ : FitResult
    """

    _model = "exponential"

    def fit(self, X, y):
        super().fit(X, y)
        self.amplitude_ = self.result_.params["I0"]
        self.correlation_length_ = self.result_.params["xi"]
        return self


class PowerLawDecay(_DecayRegressor):
    """Power-law decay I(tau) = A tau^-gamma fitted in log-log space.

    Attributes
    ----------
    amplitude_ : float
    exponent_ : float
        gamma.
    ci95_ : dict
    result_ : FitResult
    """

    _model = "powerlaw"

    def fit(self, X, y):
        super().fit(X, y)
        self.amplitude_ = self.result_.params["A"]
        self.exponent_ = self.result_.params["gamma"]
        return self

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats
from sklearn.base import clone

import miscaling as ms
from miscaling.exceptions import DomainError, InsufficientDataError


def _curve(tau, mi):
    tau = np.asarray(tau)
    return ms.MICurve(tau, mi, np.ones_like(tau), "plugin")


def test_noiseless_examples():
    tau = np.arange(1, 201)
    fit = ms.fit_exponential(_curve(tau, 2.0 * np.exp(-tau / 50.0)), 0.0)
    assert fit.params["I0"] == pytest.approx(2.0, abs=1e-9)
    assert fit.params["xi"] == pytest.approx(50.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.points_used == 200 and fit.tau_range == (1, 200)
    tau = np.arange(1, 513)
    fit = ms.fit_powerlaw(_curve(tau, 0.1 * tau**-0.4), 0.0)
    assert fit.params["A"] == pytest.approx(0.1, abs=1e-9)
    assert fit.params["gamma"] == pytest.approx(0.4, abs=1e-9)


def test_threshold_filter_keeps_points_above():
    tau = np.arange(1, 101)
    fit = ms.fit_exponential(_curve(tau, np.exp(-tau / 10.0)), 1e-3)
    # exp(-tau/10) > 1e-3  <=>  tau < 10 ln 1000 = 69.08
    assert fit.points_used == 69
    assert fit.tau_range == (1, 69)
    assert fit.params["xi"] == pytest.approx(10.0, abs=1e-9)


def test_window_restricts_points():
    tau = np.arange(1, 101)
    fit = ms.fit_powerlaw(_curve(tau, tau**-1.0), 0.0, tau_min=10, tau_max=20)
    assert fit.points_used == 11 and fit.tau_range == (10, 20)


def test_matches_independent_regression():
    rng = np.random.default_rng(4)
    tau = np.arange(2, 300, 3)
    mi = 0.3 * tau**-0.7 * np.exp(rng.normal(0, 0.1, tau.size))
    fit = ms.fit_powerlaw(_curve(tau, mi), 0.0)
    ref = stats.linregress(np.log(tau), np.log(mi))
    q = stats.t.ppf(0.975, tau.size - 2)
    assert fit.params["gamma"] == pytest.approx(-ref.slope, rel=1e-12)
    assert fit.params["A"] == pytest.approx(math.exp(ref.intercept), rel=1e-12)
    assert fit.ci95["gamma"] == pytest.approx(q * ref.stderr, rel=1e-10)
    assert fit.ci95["A"] == pytest.approx(math.exp(ref.intercept) * q * ref.intercept_stderr, rel=1e-10)
    assert fit.r_squared == pytest.approx(ref.rvalue**2, rel=1e-12)


@settings(max_examples=60)
@given(st.floats(1e-3, 1e3), st.integers(0, 2**32 - 1))
def test_scale_equivariance(c, seed):
    rng = np.random.default_rng(seed)
    tau = np.arange(1, 60)
    mi = 0.5 * np.exp(-tau / 15.0) * np.exp(rng.normal(0, 0.2, tau.size))
    a = ms.fit_exponential(_curve(tau, mi), 0.0)
    b = ms.fit_exponential(_curve(tau, c * mi), 0.0)
    assert b.params["xi"] == pytest.approx(a.params["xi"], rel=1e-9)
    assert b.params["I0"] == pytest.approx(c * a.params["I0"], rel=1e-9)
    assert b.ci95["xi"] == pytest.approx(a.ci95["xi"], rel=1e-6)


@settings(max_examples=60)
@given(st.lists(st.floats(1e-6, 1.0), min_size=5, max_size=40),
       st.floats(0.0, 0.5), st.floats(0.0, 0.5))
def test_points_used_monotone_in_threshold(mi, t1, t2):
    lo, hi = sorted((t1, t2))
    tau = np.arange(1, len(mi) + 1)
    counts = []
    for th in (lo, hi):
        try:
            counts.append(ms.fit_powerlaw(_curve(tau, mi), th).points_used)
        except InsufficientDataError:
            counts.append(int(np.sum(np.asarray(mi) > th)))
    assert counts[0] >= counts[1]


def test_ci_coverage_on_noisy_exponentials():
    rng = np.random.default_rng(2718)
    tau = np.arange(1, 41)
    hits = {"xi": 0, "I0": 0}
    for _ in range(200):
        mi = 0.8 * np.exp(-tau / 12.0) * np.exp(rng.normal(0, 0.05, tau.size))
        fit = ms.fit_exponential(_curve(tau, mi), 0.0)
        hits["xi"] += fit.covers("xi", 12.0)
        hits["I0"] += fit.covers("I0", 0.8)
    assert hits["xi"] >= 170 and hits["I0"] >= 170


def test_compare_models_decisions():
    tau = np.arange(1, 200)
    choice, e, p = ms.compare_models(_curve(tau, 0.5 * np.exp(-tau / 20.0)), 1e-4)
    assert choice == "exponential" and e.r_squared > p.r_squared + 0.05
    choice, _, _ = ms.compare_models(_curve(tau, 0.2 * tau**-0.6), 0.0)
    assert choice == "powerlaw"
    rng = np.random.default_rng(0)
    flat = 0.01 * np.exp(rng.normal(0, 0.3, tau.size))
    choice, e, p = ms.compare_models(_curve(tau, flat), 0.0)
    assert choice == "indeterminate"
    assert e.r_squared < 0.1 and p.r_squared < 0.1


def test_non_decaying_curve_warns_infinite_length():
    tau = np.arange(1, 20)
    with pytest.warns(RuntimeWarning, match="infinite"):
        fit = ms.fit_exponential(_curve(tau, 0.01 * np.exp(tau / 50.0)), 0.0)
    assert fit.params["xi"] == math.inf and fit.warning


def test_insufficient_data():
    tau = np.arange(1, 10)
    with pytest.raises(InsufficientDataError):
        ms.fit_powerlaw(_curve(tau, np.exp(-tau)), 0.05)
    with pytest.raises(InsufficientDataError):
        ms.fit_powerlaw(_curve([1, 2], [0.5, 0.25]), 0.0)
    with pytest.raises(DomainError):
        ms.fit_powerlaw(_curve(tau, np.exp(-tau)), float("nan"))


def test_nonpositive_values_are_skipped():
    tau = np.arange(1, 11)
    mi = np.exp(-tau / 3.0)
    mi[[2, 5]] = [0.0, -1e-4]
    fit = ms.fit_exponential(_curve(tau, mi), 0.0)
    assert fit.points_used == 8
    assert fit.params["xi"] == pytest.approx(3.0, rel=1e-12)


def test_prediction_reproduces_curve():
    tau = np.arange(1, 50)
    fit = ms.fit_powerlaw(_curve(tau, 0.1 * tau**-0.4), 0.0)
    np.testing.assert_allclose(fit.predict(tau), 0.1 * tau**-0.4, rtol=1e-12)


def test_sklearn_regressors():
    tau = np.arange(1, 101, dtype=float)
    y = 0.3 * tau**-0.5
    est = ms.PowerLawDecay(threshold=0.0)
    assert clone(est).get_params() == est.get_params()
    est.fit(tau[:, None], y)
    assert est.exponent_ == pytest.approx(0.5, rel=1e-12)
    assert est.amplitude_ == pytest.approx(0.3, rel=1e-12)
    assert est.n_points_ == 100
    assert est.score(tau, y) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(est.predict(tau), y, rtol=1e-12)
    exp = ms.ExponentialDecay(threshold=1e-3).set_params(tau_max=50).fit(tau, np.exp(-tau / 5.0))
    assert exp.correlation_length_ == pytest.approx(5.0, rel=1e-12)
    assert exp.result_.tau_range[1] <= 50
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        ms.ExponentialDecay().predict(tau)

import datetime as dt

import numpy as np
import pytest

from gvrisk.arcal import VAR_FLOOR
from gvrisk.arcal import ARCoefficients
from gvrisk.arcal import ARFit
from gvrisk.arcal import Forecast
from gvrisk.arcal import calibrate
from gvrisk.arcal import fit_ar1
from gvrisk.arcal import forecast_one_step
from gvrisk.errors import DomainError
from gvrisk.errors import InsufficientHistory
from gvrisk.errors import SingularFit
from gvrisk.gnormal import GNormalParams
from gvrisk.windows import LocalEstimates

DAY = dt.date(2020, 3, 2)


def _recursion(intercept, slope, start, n):
    values = [start]
    for _ in range(n - 1):
        values.append(intercept + slope * values[-1])
    return np.array(values)


def _fit(intercept, slope):
    return ARFit(intercept, slope, np.empty(0), 0)


def _normal_equations(y):
    # Independent closed-form solve of the 2x2 system.
    x, target = y[:-1], y[1:]
    n = x.shape[0]
    sx, sy = x.sum(), target.sum()
    sxx, sxy = (x * x).sum(), (x * target).sum()
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
    return (sy - slope * sx) / n, slope


def test_fit_recovers_noiseless_recursion():
    fit = fit_ar1(_recursion(0.2, 0.9, 1.0, 50))
    assert fit.intercept == pytest.approx(0.2, abs=1e-10)
    assert fit.slope == pytest.approx(0.9, abs=1e-10)
    assert fit.n_pairs == 49
    assert np.max(np.abs(fit.residuals)) < 1e-10


def test_fit_three_points():
    fit = fit_ar1([1.0, 2.0, 3.0])
    assert fit.slope == pytest.approx(1.0, abs=1e-12)
    assert fit.intercept == pytest.approx(1.0, abs=1e-12)
    assert fit.predict(3.0) == pytest.approx(4.0)


def test_fit_noisy_series_matches_normal_equations():
    rng = np.random.default_rng(5)
    y = [0.0]
    for eps in rng.standard_normal(499):
        y.append(0.3 + 0.6 * y[-1] + eps)
    y = np.array(y)

    fit = fit_ar1(y)
    intercept, slope = _normal_equations(y)
    assert fit.intercept == pytest.approx(intercept, abs=1e-10)
    assert fit.slope == pytest.approx(slope, abs=1e-10)

    # Standard errors at n = 500 are roughly 0.05 and 0.04.
    assert abs(fit.intercept - 0.3) < 0.15
    assert abs(fit.slope - 0.6) < 0.12


@pytest.mark.parametrize("seed", range(5))
def test_residuals_are_orthogonal(seed):
    y = np.random.default_rng(seed).normal(2.0, 3.0, size=100)
    fit = fit_ar1(y)
    scale = np.max(np.abs(y))

    assert abs(fit.residuals.sum()) < 1e-8 * scale
    assert abs((fit.residuals * y[:-1]).sum()) < 1e-8 * scale * scale


def test_fit_affine_equivariance():
    y = np.random.default_rng(9).normal(size=80)
    base = fit_ar1(y)
    moved = fit_ar1(-1.5 * y + 4.0)

    assert moved.slope == pytest.approx(base.slope, abs=1e-9)
    assert moved.intercept == pytest.approx(
        -1.5 * base.intercept + 4.0 * (1.0 - base.slope), abs=1e-9
    )


def test_fit_rejects_short_series():
    with pytest.raises(InsufficientHistory):
        fit_ar1([1.0, 2.0])


def test_fit_rejects_constant_lags():
    with pytest.raises(SingularFit) as info:
        fit_ar1([1.0, 1.0, 1.0, 5.0], series="var_hi_hat")
    assert list(info.value.series) == ["var_hi_hat"]


def test_fit_rejects_non_finite():
    with pytest.raises(DomainError):
        fit_ar1([1.0, np.inf, 2.0])


def _history(r, var_hi, var_lo):
    return [
        LocalEstimates(DAY + dt.timedelta(days=i), a, c, b)
        for i, (a, b, c) in enumerate(zip(r, var_hi, var_lo))
    ]


def test_calibrate_recovers_three_recursions():
    history = _history(
        _recursion(0.01, 0.8, 0.5, 100),
        _recursion(0.19, 0.95, 1.0, 100),
        _recursion(0.2, 0.7, 0.4, 100),
    )
    coeffs = calibrate(history)

    assert coeffs.mean_fit.intercept == pytest.approx(0.01, abs=1e-10)
    assert coeffs.mean_fit.slope == pytest.approx(0.8, abs=1e-10)
    assert coeffs.var_hi_fit.intercept == pytest.approx(0.19, abs=1e-10)
    assert coeffs.var_hi_fit.slope == pytest.approx(0.95, abs=1e-10)
    assert coeffs.var_lo_fit.intercept == pytest.approx(0.2, abs=1e-10)
    assert coeffs.var_lo_fit.slope == pytest.approx(0.7, abs=1e-10)


def test_calibrate_names_every_singular_series():
    history = _history([0.1] * 10, [2.0] * 10, [1.0] * 10)
    with pytest.raises(SingularFit) as info:
        calibrate(history)
    assert list(info.value.series) == ["r_hat", "var_hi_hat", "var_lo_hat"]


def test_forecast_zero_slope_returns_intercepts():
    coeffs = ARCoefficients(_fit(0.1, 0.0), _fit(2.0, 0.0), _fit(0.5, 0.0))
    forecast = forecast_one_step(coeffs, LocalEstimates(DAY, 9.0, 9.0, 9.0))
    assert forecast == Forecast(DAY, 0.1, 2.0, 0.5)


def test_forecast_identity_returns_latest():
    latest = LocalEstimates(DAY, -0.2, 0.3, 1.7)
    next_day = DAY + dt.timedelta(days=1)
    forecast = forecast_one_step(ARCoefficients.identity(), latest, next_day)

    assert forecast.date == next_day
    assert forecast.r_tilde == -0.2
    assert forecast.var_lo_tilde == 0.3
    assert forecast.var_hi_tilde == 1.7


def test_forecast_clamps_ordering():
    coeffs = ARCoefficients(_fit(0.0, 0.0), _fit(1.5, 0.0), _fit(2.0, 0.0))
    forecast = forecast_one_step(coeffs, LocalEstimates(DAY, 0.0, 0.0, 0.0))
    assert forecast.var_hi_tilde == 1.5
    assert forecast.var_lo_tilde == 1.5


def test_forecast_floors_variances():
    coeffs = ARCoefficients(_fit(0.0, 0.0), _fit(-3.0, 0.0), _fit(-1.0, 0.0))
    forecast = forecast_one_step(coeffs, LocalEstimates(DAY, 0.0, 0.0, 0.0))
    assert forecast.var_hi_tilde == VAR_FLOOR
    assert forecast.var_lo_tilde == VAR_FLOOR


def test_forecast_ordering_on_adversarial_fits():
    rng = np.random.default_rng(21)
    for a, b, c, d, e, f in rng.normal(scale=3.0, size=(200, 6)):
        coeffs = ARCoefficients(_fit(a, b), _fit(c, d), _fit(e, f))
        latest = LocalEstimates(DAY, *rng.normal(size=3))
        forecast = forecast_one_step(coeffs, latest)
        assert 0.0 < forecast.var_lo_tilde <= forecast.var_hi_tilde


def test_forecast_params():
    forecast = Forecast(DAY, 0.05, 4.0, 0.25)
    assert forecast.sigma_hi == 2.0
    assert forecast.sigma_lo == 0.5
    assert forecast.params() == GNormalParams(0.05, 0.5, 2.0)

    with pytest.raises(DomainError):
        Forecast(DAY, 0.0, 1.0, 2.0)

"""Tests on forecasts and prediction intervals"""
import math
import numpy as np
import pytest
from measlescast import arima, forecast
from measlescast.arima import ArimaFit, ArimaOrder, ArimaParams
from measlescast.errors import (
    DomainError,
    HorizonError,
    NotConvergedError,
    StabilityError,
)
from measlescast.series import TimeSeries
import conftest


def _long_division(phi, theta, h):
    """Coefficients of (1 - theta(z)) / (1 - phi(z)) by series division."""
    numerator = [1.0] + [-_ for _ in theta] + [0.0] * h
    denominator = [1.0] + [-_ for _ in phi]
    quotient = []
    remainder = numerator[:]
    for j in range(h):
        coef = remainder[j]
        quotient.append(coef)
        for i, value in enumerate(denominator):
            if j + i < len(remainder):
                remainder[j + i] -= coef * value
    return quotient


@pytest.mark.forecast
@pytest.mark.parametrize(
    "phi,theta,expected",
    [
        ([0.5], [], [1.0, 0.5, 0.25, 0.125]),
        ([0.5], [0.2], [1.0, 0.3, 0.15, 0.075]),
        ([], [0.2], [1.0, -0.2, 0.0, 0.0]),
    ],
)
def test_psi_weights(phi, theta, expected):
    order = ArimaOrder(len(phi), 0, len(theta))
    psi = forecast.psi_weights(ArimaParams(phi=phi, theta=theta), order, 4)
    np.testing.assert_allclose(psi, expected, atol=1e-12)
    assert psi[0] == 1.0


@pytest.mark.forecast
@pytest.mark.parametrize(
    "phi,theta",
    [
        ([0.5, 0.3], [0.4, -0.2]),
        ([-0.7], [0.9]),
        ([1.2, -0.5], []),
        ([], [-0.5, 0.3]),
        ([0.1, 0.1], [0.1]),
    ],
)
def test_psi_weights_long_division(phi, theta):
    order = ArimaOrder(len(phi), 0, len(theta))
    psi = forecast.psi_weights(ArimaParams(phi=phi, theta=theta), order, 20)
    np.testing.assert_allclose(psi, _long_division(phi, theta, 20), atol=1e-10)


@pytest.mark.forecast
def test_psi_weights_errors():
    with pytest.raises(StabilityError):
        forecast.psi_weights(ArimaParams(phi=[1.0]), ArimaOrder(1, 0, 0), 3)
    with pytest.raises(HorizonError):
        forecast.psi_weights(ArimaParams(), ArimaOrder(), 0)


@pytest.mark.forecast
def test_integrated_psi_weights():
    assert forecast.integrated_psi_weights([1.0, 0.0, 0.0], 1) == [1.0, 1.0, 1.0]
    assert forecast.integrated_psi_weights([1.0, 0.0, 0.0], 2) == [1.0, 2.0, 3.0]
    assert forecast.integrated_psi_weights([1.0, 0.5], 0) == [1.0, 0.5]


@pytest.mark.forecast
@pytest.mark.parametrize("prob", [0.001, 0.01, 0.02, 0.1, 0.3, 0.5, 0.7, 0.975, 0.999])
def test_z_quantile_inverts_cdf(prob):
    assert forecast.normal_cdf(forecast.z_quantile(prob)) == pytest.approx(
        prob, abs=1e-8
    )
    assert forecast.z_quantile(prob) == pytest.approx(
        -forecast.z_quantile(1.0 - prob), abs=1e-8
    )


@pytest.mark.forecast
def test_z_quantile_values():
    assert forecast.z_quantile(0.5) == 0.0
    assert forecast.z_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)


@pytest.mark.forecast
@pytest.mark.parametrize("prob", [0.0, 1.0, -0.5, 1.5])
def test_z_quantile_domain(prob):
    with pytest.raises(DomainError):
        forecast.z_quantile(prob)


@pytest.mark.forecast
def test_forecast_mean_only(demo_series):
    fit = arima.fit(demo_series, ArimaOrder(0, 0, 0))
    fc = forecast.forecast(fit, demo_series, 3, 0.95, floor=None)
    mean = float(np.mean(conftest.DEMO_TOTALS))
    sigma = math.sqrt(fit.params.sigma2)
    np.testing.assert_allclose(fc.point, [mean] * 3, rtol=1e-12)
    np.testing.assert_allclose(
        np.array(fc.upper) - np.array(fc.point),
        [forecast.z_quantile(0.975) * sigma] * 3,
        rtol=1e-12,
    )
    assert fc.horizon_labels == (2020, 2021, 2022)


@pytest.mark.forecast
def test_forecast_random_walk():
    y = TimeSeries([2700, 1500, 2400, 18000], start_label=2015)
    fit = arima.fit(y, ArimaOrder(0, 1, 0), include_constant=False)
    fc = forecast.forecast(fit, y, 5)
    assert fc.point == (18000.0,) * 5
    half = np.array(fc.raw_upper) - np.array(fc.raw_point)
    np.testing.assert_allclose(half / half[0], np.sqrt(np.arange(1, 6)), atol=1e-9)
    assert fc.psi == (1.0, 0.0, 0.0, 0.0, 0.0)
    assert fc.horizon_labels == (2019, 2020, 2021, 2022, 2023)


@pytest.mark.forecast
def test_forecast_white_noise_constant():
    params = ArimaParams(constant=250.0, sigma2=4.0)
    y = TimeSeries([249.0, 251.0, 250.0, 248.0, 252.0])
    residuals = arima.css_residuals(params, y)
    fit = ArimaFit(
        order=ArimaOrder(),
        params=params,
        residuals=residuals,
        log_likelihood=-1.0,
        n_effective=5,
        converged=True,
        iterations=0,
    )
    fc = forecast.forecast(fit, y, 4)
    assert fc.point == (250.0,) * 4


@pytest.mark.forecast
def test_forecast_intervals():
    y = conftest.simulate([0.6], [0.3], n=120, seed=21, constant=10.0)
    fit = arima.fit(y, ArimaOrder(1, 0, 1))
    fc = forecast.forecast(fit, y, 10, 0.9)
    point = np.array(fc.raw_point)
    lower, upper = np.array(fc.raw_lower), np.array(fc.raw_upper)
    np.testing.assert_allclose(upper - point, point - lower, atol=1e-10)
    assert np.all(np.diff(fc.stderr) >= -1e-12)
    assert np.all(np.array(fc.lower) <= np.array(fc.point))
    assert np.all(np.array(fc.point) <= np.array(fc.upper))
    assert fc.level == 0.9
    assert len(fc) == 10


@pytest.mark.forecast
def test_forecast_shift_equivariance():
    y = conftest.simulate([0.5], n=60, seed=2, constant=1.0, d=1)
    y = y.with_values(np.round(y.values))
    order = ArimaOrder(1, 1, 0)
    shifted = y.with_values(y.values + 1000.0)
    a = forecast.forecast(arima.fit(y, order), y, 4, floor=None)
    b = forecast.forecast(arima.fit(shifted, order), shifted, 4, floor=None)
    np.testing.assert_allclose(np.array(b.point) - np.array(a.point), 1000.0, atol=1e-6)


@pytest.mark.forecast
def test_forecast_clamps_at_zero():
    y = TimeSeries([50.0, 41.0, 30.0, 22.0, 10.0], start_label=2015)
    fit = arima.fit(y, ArimaOrder(0, 1, 0))
    fc = forecast.forecast(fit, y, 3)
    assert fc.raw_point[-1] < 0
    assert min(fc.point) == 0.0
    assert min(fc.lower) == 0.0
    assert all(fc.clamped)
    assert all(lo <= p <= up for lo, p, up in zip(fc.lower, fc.point, fc.upper))


@pytest.mark.forecast
def test_forecast_errors(demo_series):
    fit = arima.fit(demo_series, ArimaOrder(0, 0, 0))
    with pytest.raises(HorizonError):
        forecast.forecast(fit, demo_series, 0)
    with pytest.raises(DomainError):
        forecast.forecast(fit, demo_series, 5, 1.0)

    stalled = ArimaFit(
        order=fit.order,
        params=fit.params,
        residuals=fit.residuals,
        log_likelihood=fit.log_likelihood,
        n_effective=fit.n_effective,
        converged=False,
        iterations=2000,
    )
    with pytest.raises(NotConvergedError):
        forecast.forecast(stalled, demo_series, 5)


@pytest.mark.forecast
def test_demo_forecast_exceeds_fifteen_thousand(demo_series):
    fit = arima.fit(demo_series, ArimaOrder(1, 0, 1))
    assert fit.converged
    fc = forecast.forecast(fit, demo_series, 5, 0.95)
    assert all(_ > 15000 for _ in fc.point)
    assert fc.horizon_labels == (2020, 2021, 2022, 2023, 2024)


@pytest.mark.forecast
@pytest.mark.slow
def test_one_step_coverage():
    order = ArimaOrder(1, 0, 1)
    covered = 0
    replicates = 500
    for seed in range(replicates):
        y = conftest.simulate([0.5], [0.3], n=201, seed=seed)
        history = TimeSeries(y.values[:-1])
        fit = arima.fit(history, order)
        fc = forecast.forecast(fit, history, 1, 0.95, floor=None)
        covered += fc.lower[0] <= y.values[-1] <= fc.upper[0]

    assert 0.90 <= covered / replicates <= 0.985

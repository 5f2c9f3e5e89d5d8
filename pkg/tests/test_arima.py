"""Tests on ARIMA estimation and simulation"""
import math
import numpy as np
import pytest
from measlescast import arima
from measlescast.arima import ArimaOrder, ArimaParams
from measlescast.errors import (
    DegenerateError,
    DomainError,
    LengthError,
    OrderError,
    StabilityError,
)
from measlescast.series import TimeSeries
import conftest


@pytest.mark.arima
def test_order_ceiling():
    ArimaOrder(2, 2, 2)
    with pytest.raises(OrderError):
        ArimaOrder(3, 0, 0)
    with pytest.raises(OrderError):
        ArimaOrder(0, -1, 0)


@pytest.mark.arima
def test_order_text():
    order = ArimaOrder.parse(" 1, 0 ,1")
    assert order == ArimaOrder(1, 0, 1)
    assert str(order) == "ARIMA(1,0,1)"
    assert order.as_text() == "1,0,1"
    assert order.n_arma == 2


@pytest.mark.arima
@pytest.mark.parametrize(
    "text", ["x,y", "1,0", "1,0,1,1", "", "a,b,c", "-1,0,0", "1,+1,0"]
)
def test_order_parse_invalid(text):
    with pytest.raises(ValueError):
        ArimaOrder.parse(text)


@pytest.mark.arima
def test_params_validation():
    with pytest.raises(DomainError):
        ArimaParams(sigma2=0.0)
    with pytest.raises(ValueError):
        ArimaParams(phi=[0.5]).check(ArimaOrder(0, 0, 1))
    with pytest.raises(StabilityError):
        ArimaParams(theta=[1.5]).check(ArimaOrder(0, 0, 1))


@pytest.mark.arima
@pytest.mark.parametrize(
    "coeffs,expected",
    [([], True), ([0.5], True), ([1.0], False), ([-0.99], True), ([0.5, 0.6], False)],
)
def test_check_roots(coeffs, expected):
    assert arima.check_roots(coeffs) is expected


@pytest.mark.arima
def test_check_roots_matches_quadratic_formula():
    grid = np.linspace(-2.1, 2.1, 29)
    for c1 in grid:
        for c2 in np.linspace(-1.1, 1.1, 23):
            # roots of 1 - c1 z - c2 z^2
            roots = np.roots([-c2, -c1, 1.0]) if c2 != 0 else np.roots([-c1, 1.0])
            outside = bool(np.all(np.abs(roots) > 1.0 + 1e-9))
            inside = bool(np.any(np.abs(roots) < 1.0 - 1e-9))
            if outside:
                assert arima.check_roots([c1, c2]), (c1, c2)
            elif inside:
                assert not arima.check_roots([c1, c2]), (c1, c2)


@pytest.mark.arima
def test_check_roots_ceiling():
    with pytest.raises(OrderError):
        arima.check_roots([0.1, 0.1, 0.1])


@pytest.mark.arima
@pytest.mark.parametrize("partials", [[0.3], [0.9, -0.5], [-0.99, 0.99]])
def test_partials(partials):
    coeffs = arima.from_partials(partials)
    assert arima.check_roots(coeffs)
    np.testing.assert_allclose(arima.to_partials(coeffs), partials, atol=1e-12)


@pytest.mark.arima
def test_to_partials_unstable():
    with pytest.raises(StabilityError):
        arima.to_partials([0.5, 0.6])


@pytest.mark.arima
@pytest.mark.parametrize(
    "params,values,expected",
    [
        (ArimaParams(), [3, 1, 4], [3.0, 1.0, 4.0]),
        (ArimaParams(phi=[0.5], theta=[0.2]), [1, 2, 3], [1.5, 2.3]),
        (ArimaParams(phi=[0.5], constant=1.0), [2, 2, 2], [0.0, 0.0]),
    ],
)
def test_css_residuals(params, values, expected):
    residuals = arima.css_residuals(params, TimeSeries(values))
    np.testing.assert_allclose(residuals.values, expected, atol=1e-12)
    assert residuals.conditioning_dropped == len(params.phi)


@pytest.mark.arima
def test_css_residuals_too_short():
    with pytest.raises(LengthError):
        arima.css_residuals(ArimaParams(phi=[0.5], theta=[0.2]), TimeSeries([1, 2]))


@pytest.mark.arima
def test_css_residuals_constant_shift():
    w = conftest.simulate([0.6, -0.2], n=30, seed=3)
    base = arima.css_residuals(ArimaParams(phi=[0.6, -0.2], constant=1.0), w)
    shifted = arima.css_residuals(ArimaParams(phi=[0.6, -0.2], constant=3.5), w)
    np.testing.assert_allclose(shifted.values, base.values - 2.5, atol=1e-12)


@pytest.mark.arima
def test_log_likelihood_example():
    params = ArimaParams(phi=[0.5], theta=[0.2])
    expected = -(math.log(2 * math.pi * 3.77) + 1)
    assert arima.log_likelihood(params, TimeSeries([1, 2, 3])) == pytest.approx(
        expected, abs=1e-12
    )


@pytest.mark.arima
def test_log_likelihood_equal_residuals():
    k, m = 2.0, 6
    w = TimeSeries([k] * m)
    expected = -(m / 2) * (math.log(2 * math.pi * k * k) + 1)
    assert arima.log_likelihood(ArimaParams(), w) == pytest.approx(expected)


@pytest.mark.arima
def test_log_likelihood_given_variance():
    w = TimeSeries([1.0, -1.0, 2.0])
    params = ArimaParams(sigma2=2.0)
    expected = -1.5 * math.log(4 * math.pi) - 6.0 / 4.0
    assert arima.log_likelihood(params, w, concentrated=False) == pytest.approx(
        expected
    )


@pytest.mark.arima
def test_log_likelihood_perfect_fit():
    with pytest.raises(DegenerateError):
        arima.log_likelihood(ArimaParams(phi=[0.5], constant=1.0), TimeSeries([2, 2, 2]))


@pytest.mark.arima
def test_fit_mean_only(demo_series):
    res = arima.fit(demo_series, ArimaOrder(0, 0, 0))
    values = np.array(conftest.DEMO_TOTALS)
    assert res.converged
    assert res.params.constant == pytest.approx(values.mean(), rel=1e-8)
    assert res.params.sigma2 == pytest.approx(values.var(), rel=1e-8)
    assert res.n_effective == 5
    assert res.n_params == 2


@pytest.mark.arima
def test_fit_too_short():
    with pytest.raises(LengthError):
        arima.fit(TimeSeries([1, 2, 3]), ArimaOrder(1, 0, 1))


@pytest.mark.arima
def test_fit_recovers_arma():
    order = ArimaOrder(1, 0, 1)
    y = conftest.simulate([0.7], [0.3], n=500, seed=42)
    res = arima.fit(y, order)
    assert res.converged
    assert abs(res.params.phi[0] - 0.7) < 0.15
    assert abs(res.params.theta[0] - 0.3) < 0.20
    assert res.params.is_stable()
    assert res.n_effective == 499
    assert len(res.residuals) == res.n_effective
    assert res.log_likelihood >= res.initial_log_likelihood - 1e-9


@pytest.mark.arima
def test_fit_without_constant():
    y = conftest.simulate([0.5], n=100, seed=8, constant=2.0)
    res = arima.fit(y, ArimaOrder(1, 0, 0), include_constant=False)
    assert res.params.constant == 0.0
    assert res.n_params == 2


@pytest.mark.arima
def test_fit_differenced():
    y = conftest.simulate([0.4], n=200, seed=4, constant=1.0, d=1)
    res = arima.fit(y, ArimaOrder(1, 1, 0))
    assert res.converged
    assert abs(res.params.phi[0] - 0.4) < 0.15
    assert res.n_effective == 198


@pytest.mark.arima
@pytest.mark.parametrize("p,q", [(2, 0), (0, 2), (2, 2), (1, 1)])
def test_fit_is_stable(p, q):
    y = conftest.simulate([0.5, 0.2][:p], [0.4, -0.2][:q], n=150, seed=p + 10 * q)
    res = arima.fit(y, ArimaOrder(p, 0, q))
    assert arima.check_roots(res.params.phi)
    assert arima.check_roots(res.params.theta)
    assert res.log_likelihood >= res.initial_log_likelihood - 1e-9


@pytest.mark.arima
def test_simulate_constant():
    params = ArimaParams(constant=3.0, sigma2=1e-30)
    y = arima.simulate(params, ArimaOrder(), 4, 1)
    np.testing.assert_allclose(y.values, [3, 3, 3, 3], atol=1e-10)


@pytest.mark.arima
def test_simulate_deterministic():
    a = conftest.simulate([0.7], [0.3], n=50, seed=42)
    b = conftest.simulate([0.7], [0.3], n=50, seed=42)
    assert a.values.tobytes() == b.values.tobytes()


@pytest.mark.arima
def test_simulate_integrates():
    w = conftest.simulate([0.5], n=20, seed=6, start_label=2000)
    y = conftest.simulate([0.5], n=20, seed=6, d=2, start_label=2000)
    np.testing.assert_allclose(y.values, np.cumsum(np.cumsum(w.values)))
    assert y.start_label == 2000


@pytest.mark.arima
def test_simulate_unit_root():
    with pytest.raises(StabilityError):
        conftest.simulate([1.0], n=10, seed=1)


@pytest.mark.arima
@pytest.mark.slow
def test_recovery_over_seeds():
    errors_phi, errors_theta = [], []
    for seed in range(20):
        y = conftest.simulate([0.7], [0.3], n=500, seed=seed)
        res = arima.fit(y, ArimaOrder(1, 0, 1))
        if res.converged:
            assert res.params.is_stable()
        errors_phi.append(abs(res.params.phi[0] - 0.7))
        errors_theta.append(abs(res.params.theta[0] - 0.3))

    assert np.mean(errors_phi) < 0.08
    assert np.mean(errors_theta) < 0.12

"""Point forecasts and prediction intervals for fitted ARIMA models."""
from __future__ import annotations

__all__ = [
    "DEFAULT_HORIZON",
    "DEFAULT_LEVEL",
    "ForecastResult",
    "psi_weights",
    "integrated_psi_weights",
    "normal_cdf",
    "z_quantile",
    "forecast",
]
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING
import numpy as np

from measlescast._log import logger
from measlescast.arima import ArimaFit, ArimaOrder, ArimaParams, css_residuals
from measlescast.errors import DomainError, HorizonError, NotConvergedError
from measlescast.series import TimeSeries, anchors_of, difference, integrate

if TYPE_CHECKING:
    from typing import Optional, Sequence

DEFAULT_HORIZON = 5
DEFAULT_LEVEL = 0.95

# rational approximation of the normal quantile, relative error 1.15e-9
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)
_P_LOW = 0.02425


@dataclass(frozen=True)
class ForecastResult:
    """Forecasts on the case-count scale.

    **point**, **lower** and **upper** are floored at the configured minimum
    (zero for case counts); the ``raw_`` fields keep the values before
    flooring.

    :param horizon_labels: forecast periods
    :param point: point forecasts
    :param lower: lower interval bounds
    :param upper: upper interval bounds
    :param level: interval coverage
    :param psi: psi-weights of the differenced process, ``psi[0] == 1``
    :param stderr: forecast standard errors on the case-count scale
    :param raw_point: point forecasts before flooring
    :param raw_lower: lower bounds before flooring
    :param raw_upper: upper bounds before flooring
    :param clamped: whether any value of the period was floored
    """

    horizon_labels: tuple[int, ...]
    point: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    level: float
    psi: tuple[float, ...]
    stderr: tuple[float, ...]
    raw_point: tuple[float, ...]
    raw_lower: tuple[float, ...]
    raw_upper: tuple[float, ...]
    clamped: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.horizon_labels)


def psi_weights(params: ArimaParams, order: ArimaOrder, h: int, /) -> list[float]:
    r"""Moving-average weights of the differenced process.

    .. code-block:: python

        >>> from measlescast.arima import ArimaOrder, ArimaParams
        >>>
        >>> params = ArimaParams(phi=[0.5], theta=[0.2])
        >>> [round(_, 12) for _ in psi_weights(params, ArimaOrder(1, 0, 1), 3)]
        [1.0, 0.3, 0.15]
        >>>

    ``psi_0 = 1`` and ``psi_j = sum_i phi_i psi_{j-i} - theta_j``.

    Will raise **StabilityError** for non-stationary or non-invertible
    coefficients.

    :param params: model coefficients
    :param order: model order
    :param h: number of weights
    :return: ``psi_0 .. psi_{h-1}``
    """
    params.check(order)
    if h < 1:
        raise HorizonError(h)

    psi = [1.0]
    for j in range(1, h):
        value = -params.theta[j - 1] if j <= order.q else 0.0
        for i in range(1, min(j, order.p) + 1):
            value += params.phi[i - 1] * psi[j - i]
        psi.append(value)

    return psi


def integrated_psi_weights(psi: Sequence[float], d: int, /) -> list[float]:
    """Weights of the series integrated **d** times.

    Each integration convolves the weights with ``1 / (1 - z)``, a running
    sum.
    """
    weights = np.array(psi, dtype=np.float64)
    for _ in range(d):
        weights = np.cumsum(weights)

    return weights.tolist()


def normal_cdf(x: float, /) -> float:
    """Standard normal distribution function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def z_quantile(prob: float, /) -> float:
    r"""Standard normal quantile.

    .. code-block:: python

        >>> round(z_quantile(0.975), 6)
        1.959964
        >>>

    A rational approximation refined by one Halley step against
    :func:`math.erfc`.

    Will raise **DomainError** outside ``(0, 1)``.

    :param prob: probability
    :return: ``z`` with ``P(Z <= z) = prob``
    """
    if not 0.0 < prob < 1.0:
        raise DomainError(f"probability must be in (0, 1), got {prob}")
    if prob == 0.5:
        return 0.0

    if prob < _P_LOW:
        r = math.sqrt(-2.0 * math.log(prob))
        x = _tail(r)
    elif prob > 1.0 - _P_LOW:
        r = math.sqrt(-2.0 * math.log(1.0 - prob))
        x = -_tail(r)
    else:
        q = prob - 0.5
        r = q * q
        x = (
            (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5])
            * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
        )

    e = normal_cdf(x) - prob
    u = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def _tail(r: float) -> float:
    num = ((((_C[0] * r + _C[1]) * r + _C[2]) * r + _C[3]) * r + _C[4]) * r + _C[5]
    return num / ((((_D[0] * r + _D[1]) * r + _D[2]) * r + _D[3]) * r + 1.0)


def forecast(
    fit: ArimaFit,
    original: TimeSeries,
    h: int = DEFAULT_HORIZON,
    level: float = DEFAULT_LEVEL,
    /,
    *,
    floor: Optional[float] = 0.0,
) -> ForecastResult:
    r"""Forecast **h** periods past the end of **original**.

    .. code-block:: python

        >>> from measlescast import arima
        >>> from measlescast.series import TimeSeries
        >>>
        >>> y = TimeSeries([2700, 1500, 2400, 18000, 48000], start_label=2015)
        >>> res = arima.fit(y, arima.ArimaOrder(0, 1, 0), include_constant=False)
        >>> forecast(res, y, 2).point
        (48000.0, 48000.0)
        >>>

    Future innovations are zero and past ones are the fit residuals. The
    ``j``-step error variance is ``sigma2 * sum_{i<j} psi_i^2`` with the
    weights of the integrated process, and the bounds are the point forecast
    plus or minus ``z_{(1+level)/2}`` standard errors. Forecasts of the
    differenced series are integrated back to the original scale. When
    **floor** is not **None**, points and bounds are raised to it afterwards.

    Will raise **NotConvergedError** for a fit that did not converge,
    **HorizonError** for ``h < 1`` and **DomainError** for a level outside
    ``(0, 1)``.

    :param fit: converged fit of **original**
    :param original: raw series the fit came from
    :param h: horizon
    :param level: interval coverage
    :param floor: smallest reported value, **None** to keep values as is
    :return: forecasts labelled with the periods following **original**
    """
    if not fit.converged:
        raise NotConvergedError(str(fit.order))
    if h < 1:
        raise HorizonError(h)
    if not 0.0 < level < 1.0:
        raise DomainError(f"interval level must be in (0, 1), got {level}")

    order, params = fit.order, fit.params
    w = difference(original, order.d)
    residuals = css_residuals(params, w)

    n = len(w)
    # innovations before the conditioning window are taken as zero
    past = np.concatenate((np.zeros(residuals.conditioning_dropped), residuals.values))
    history = w.values.tolist()
    innovations = past.tolist() + [0.0] * h
    for step in range(h):
        t = n + step
        value = params.constant
        for i, coef in enumerate(params.phi, start=1):
            value += coef * history[t - i]
        for j, coef in enumerate(params.theta, start=1):
            value -= coef * innovations[t - j]
        history.append(value)

    if order.d:
        full = w.with_values(history)
        point = integrate(full, anchors_of(original, order.d)).values[-h:]
    else:
        point = np.array(history[-h:])

    psi = psi_weights(params, order, h)
    weights = np.array(integrated_psi_weights(psi, order.d))
    stderr = np.sqrt(params.sigma2 * np.cumsum(weights**2))
    half = z_quantile(0.5 * (1.0 + level)) * stderr
    raw_lower, raw_upper = point - half, point + half

    if floor is not None:
        lower = np.maximum(raw_lower, floor)
        upper = np.maximum(raw_upper, floor)
        clipped = np.maximum(point, floor)
        clamped = (raw_lower < floor) | (point < floor) | (raw_upper < floor)
    else:
        lower, upper, clipped = raw_lower, raw_upper, point
        clamped = np.zeros(h, dtype=bool)

    if clamped.any():
        logger.warning(
            f"{int(clamped.sum())} forecast period(s) floored at {floor}"
        )

    def as_tuple(values: np.ndarray) -> tuple[float, ...]:
        return tuple(float(_) for _ in values)

    return ForecastResult(
        horizon_labels=tuple(range(original.end_label + 1, original.end_label + h + 1)),
        point=as_tuple(clipped),
        lower=as_tuple(lower),
        upper=as_tuple(upper),
        level=float(level),
        psi=tuple(psi),
        stderr=as_tuple(stderr),
        raw_point=as_tuple(point),
        raw_lower=as_tuple(raw_lower),
        raw_upper=as_tuple(raw_upper),
        clamped=tuple(bool(_) for _ in clamped),
    )

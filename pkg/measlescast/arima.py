"""ARIMA(p,d,q) model: parameters, conditional likelihood, fitting, simulation.

The process follows the Box-Jenkins form with **subtractive** moving-average
terms::

    w_t = c + phi_1 w_{t-1} + ... + phi_p w_{t-p} + a_t - theta_1 a_{t-1} - ... - theta_q a_{t-q}

where ``w`` is the series differenced ``d`` times and ``a_t`` are Gaussian
innovations with variance ``sigma2``. Libraries using the additive
convention (``+ theta_j a_{t-j}``) report MA coefficients with the opposite
sign.
"""
from __future__ import annotations

__all__ = [
    "MAX_ORDER",
    "ArimaOrder",
    "ArimaParams",
    "ResidualSeries",
    "ArimaFit",
    "check_roots",
    "to_partials",
    "from_partials",
    "css_residuals",
    "log_likelihood",
    "fit",
    "simulate",
]
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING
import numpy as np

from measlescast import optimize
from measlescast._log import logger
from measlescast.errors import (
    DegenerateError,
    DomainError,
    LengthError,
    OrderError,
    StabilityError,
)
from measlescast.rng import Rng
from measlescast.series import TimeSeries, difference

if TYPE_CHECKING:
    from typing import Iterable, Sequence

MAX_ORDER = 2
"""Largest p, d and q the engine accepts."""

BURN_IN = 100
"""Simulated observations discarded before the returned sample."""

# tanh(7) keeps partials far enough from 1 for the root tests to hold in floats
_PARTIAL_BOUND = 7.0


@dataclass(frozen=True)
class ArimaOrder:
    r"""Orders of an ARIMA(p,d,q) model.

    .. code-block:: python

        >>> from measlescast.arima import ArimaOrder
        >>>
        >>> str(ArimaOrder.parse("1,0,1"))
        'ARIMA(1,0,1)'
        >>>

    Will raise **OrderError** for negative orders or orders above
    :data:`MAX_ORDER`.

    :param p: autoregressive order
    :param d: differencing order
    :param q: moving-average order
    """

    p: int = 0
    d: int = 0
    q: int = 0

    def __post_init__(self) -> None:
        for name in ("p", "d", "q"):
            value = getattr(self, name)
            if value < 0:
                raise OrderError(f"{name} must be non-negative, got {value}")
            if value > MAX_ORDER:
                raise OrderError(
                    f"{name}={value} exceeds the engine limit of {MAX_ORDER}"
                )

    def __str__(self) -> str:
        return f"ARIMA({self.p},{self.d},{self.q})"

    @property
    def n_arma(self) -> int:
        """Number of AR and MA coefficients"""
        return self.p + self.q

    def as_text(self) -> str:
        """Order as ``"p,d,q"``."""
        return f"{self.p},{self.d},{self.q}"

    @staticmethod
    def parse(text: str, /) -> ArimaOrder:
        """Parse ``"p,d,q"``.

        Will raise **ValueError** if the text is not three non-negative integers
        and **OrderError** if they are above the engine limits.

        :param text: comma separated orders
        :return: parsed order
        """
        parts = [_.strip() for _ in text.split(",")]
        if len(parts) != 3 or not all(_.isdigit() for _ in parts):
            raise ValueError(
                f"expected order as three non-negative integers 'p,d,q', got {text!r}"
            )

        return ArimaOrder(*(int(_) for _ in parts))


@dataclass(frozen=True)
class ArimaParams:
    """Coefficients of the differenced process.

    :param phi: AR coefficients
    :param theta: MA coefficients, subtractive sign convention
    :param constant: intercept of the differenced series
    :param sigma2: innovation variance
    """

    phi: tuple[float, ...] = ()
    theta: tuple[float, ...] = ()
    constant: float = 0.0
    sigma2: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi", tuple(float(_) for _ in self.phi))
        object.__setattr__(self, "theta", tuple(float(_) for _ in self.theta))
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "sigma2", float(self.sigma2))
        if not self.sigma2 > 0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def mean(self) -> float:
        """Mean of the differenced process, ``c / (1 - sum(phi))``"""
        return self.constant / (1.0 - sum(self.phi))

    def is_stable(self) -> bool:
        """Both polynomials have their roots outside the unit circle."""
        return check_roots(self.phi) and check_roots(self.theta)

    def check(self, order: ArimaOrder, /) -> None:
        """Validate against **order**.

        Will raise **ValueError** on a coefficient count mismatch and
        **StabilityError** on non-stationary or non-invertible coefficients.
        """
        if len(self.phi) != order.p or len(self.theta) != order.q:
            raise ValueError(
                f"{order} needs {order.p} phi and {order.q} theta coefficients, "
                f"got {len(self.phi)} and {len(self.theta)}"
            )
        if not check_roots(self.phi):
            raise StabilityError(f"AR coefficients {list(self.phi)} are not stationary")
        if not check_roots(self.theta):
            raise StabilityError(
                f"MA coefficients {list(self.theta)} are not invertible"
            )


@dataclass(frozen=True, eq=False)
class ResidualSeries:
    """Innovations recovered from a series.

    :param values: residuals ``a_t`` for ``t > conditioning_dropped``
    :param conditioning_dropped: leading observations used only as lags
    """

    values: np.ndarray
    conditioning_dropped: int

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def sse(self) -> float:
        """Sum of squared residuals"""
        return float(np.dot(self.values, self.values))


@dataclass(frozen=True, eq=False)
class ArimaFit:
    """Result of :func:`fit`.

    :param order: fitted order
    :param params: estimated coefficients, ``sigma2`` at its conditional maximum
    :param residuals: residuals at the estimate
    :param log_likelihood: conditional Gaussian log-likelihood at the estimate
    :param n_effective: number of residuals in the likelihood
    :param converged: whether the optimizer met its tolerance
    :param iterations: optimizer iterations
    :param include_constant: whether the constant was estimated
    :param initial_log_likelihood: log-likelihood at the starting point
    """

    order: ArimaOrder
    params: ArimaParams
    residuals: ResidualSeries
    log_likelihood: float
    n_effective: int
    converged: bool
    iterations: int
    include_constant: bool = True
    initial_log_likelihood: float = field(default=float("nan"))

    @property
    def n_params(self) -> int:
        """Estimated parameters, innovation variance included"""
        return self.order.n_arma + int(self.include_constant) + 1


def check_roots(coeffs: Sequence[float], /) -> bool:
    r"""Check that ``1 - c_1 z - c_2 z^2`` has all roots outside the unit circle.

    .. code-block:: python

        >>> check_roots([0.5]), check_roots([1.0]), check_roots([0.5, 0.6])
        (True, False, False)
        >>>

    Will raise **OrderError** for more than two coefficients.

    :param coeffs: AR coefficients, or MA coefficients in subtractive form
    :return: if the polynomial is stationary (invertible)
    """
    if len(coeffs) > MAX_ORDER:
        raise OrderError(f"at most {MAX_ORDER} coefficients supported")
    if len(coeffs) == 0:
        return True
    if len(coeffs) == 1:
        return abs(coeffs[0]) < 1.0

    c1, c2 = coeffs
    return abs(c2) < 1.0 and c2 + c1 < 1.0 and c2 - c1 < 1.0


def from_partials(partials: Iterable[float], /) -> np.ndarray:
    """Expand partial autocorrelations into polynomial coefficients.

    Partials in ``(-1, 1)`` always give stationary coefficients.
    """
    coeffs = np.zeros(0)
    for r in partials:
        coeffs = np.concatenate((coeffs - r * coeffs[::-1], [r]))

    return coeffs


def to_partials(coeffs: Sequence[float], /) -> np.ndarray:
    """Inverse of :func:`from_partials`.

    Will raise **StabilityError** if the coefficients are not stationary.
    """
    coeffs = np.array(coeffs, dtype=np.float64)
    partials = np.zeros(len(coeffs))
    for k in range(len(coeffs) - 1, -1, -1):
        r = coeffs[k]
        if abs(r) >= 1.0:
            raise StabilityError(f"coefficients {coeffs.tolist()} are not stationary")

        partials[k] = r
        head = coeffs[:k]
        coeffs = (head + r * head[::-1]) / (1.0 - r * r)

    return partials


def css_residuals(params: ArimaParams, w: TimeSeries, /) -> ResidualSeries:
    r"""Residuals of the conditional sum of squares.

    .. code-block:: python

        >>> params = ArimaParams(phi=[0.5], theta=[0.2])
        >>> css_residuals(params, TimeSeries([1, 2, 3])).values.tolist()
        [1.5, 2.3]
        >>>

    The first ``p`` observations only serve as lags and innovations before
    them are zero.

    Will raise **LengthError** if the series has no more than ``p + q``
    observations.

    :param params: model coefficients
    :param w: differenced series
    :return: residuals ``a_{p+1} .. a_n``
    """
    p, q = len(params.phi), len(params.theta)
    x = w.values
    n = len(x)
    if n <= p + q:
        raise LengthError(n, p + q + 1)

    e = x[p:] - params.constant
    for i, coef in enumerate(params.phi, start=1):
        e = e - coef * x[p - i : n - i]

    if q:
        a = e.tolist()
        for t in range(len(a)):
            for j, coef in enumerate(params.theta, start=1):
                if t >= j:
                    a[t] += coef * a[t - j]
        e = np.array(a)

    return ResidualSeries(e, conditioning_dropped=p)


def _gaussian_log_likelihood(sse: float, m: int, sigma2: float) -> float:
    return -0.5 * m * math.log(2.0 * math.pi * sigma2) - sse / (2.0 * sigma2)


def log_likelihood(
    params: ArimaParams, w: TimeSeries, /, *, concentrated: bool = True
) -> float:
    """Conditional Gaussian log-likelihood of **w**.

    With **concentrated** (the default) the innovation variance is replaced
    by its conditional maximum ``SSE / m``, otherwise ``params.sigma2`` is
    used.

    Will raise **DegenerateError** on a perfect fit, where the likelihood is
    unbounded.

    :param params: model coefficients
    :param w: differenced series
    :return: log-likelihood
    """
    residuals = css_residuals(params, w)
    sse, m = residuals.sse, len(residuals)
    if sse == 0:
        raise DegenerateError("residuals are all zero, likelihood is unbounded")

    sigma2 = sse / m if concentrated else params.sigma2
    return _gaussian_log_likelihood(sse, m, sigma2)


class _Parameterization:
    """Unconstrained vector <-> stationary and invertible coefficients."""

    def __init__(
        self, order: ArimaOrder, w: TimeSeries, include_constant: bool
    ) -> None:
        self.order = order
        self.include_constant = include_constant
        self.location = float(w.values.mean())
        scale = float(w.values.std())
        self.scale = scale if scale > 0 else 1.0

    @property
    def size(self) -> int:
        return self.order.n_arma + int(self.include_constant)

    def params(self, x: np.ndarray, sigma2: float = 1.0) -> ArimaParams:
        p, q = self.order.p, self.order.q
        u = np.clip(x[: p + q], -_PARTIAL_BOUND, _PARTIAL_BOUND)
        phi = from_partials(np.tanh(u[:p]))
        theta = from_partials(np.tanh(u[p:]))
        if self.include_constant:
            mu = self.location + self.scale * x[p + q]
            constant = mu * (1.0 - float(phi.sum()))
        else:
            constant = 0.0

        return ArimaParams(phi=phi, theta=theta, constant=constant, sigma2=sigma2)


def _fit_closed_form(
    w: TimeSeries, order: ArimaOrder, include_constant: bool
) -> ArimaFit:
    constant = float(w.values.mean()) if include_constant else 0.0
    residuals = css_residuals(ArimaParams(constant=constant), w)
    if residuals.sse == 0:
        raise DegenerateError("series is constant, likelihood is unbounded")

    params = ArimaParams(constant=constant, sigma2=residuals.sse / len(residuals))
    loglike = log_likelihood(params, w)
    return ArimaFit(
        order=order,
        params=params,
        residuals=residuals,
        log_likelihood=loglike,
        n_effective=len(residuals),
        converged=True,
        iterations=0,
        include_constant=include_constant,
        initial_log_likelihood=loglike,
    )


def fit(
    series: TimeSeries,
    order: ArimaOrder,
    /,
    *,
    include_constant: bool = True,
    max_iter: int = 2000,
) -> ArimaFit:
    r"""Fit an ARIMA model by conditional maximum likelihood.

    .. code-block:: python

        >>> from measlescast import arima
        >>>
        >>> order = arima.ArimaOrder(1, 0, 1)
        >>> params = arima.ArimaParams(phi=[0.7], theta=[0.3])
        >>> y = arima.simulate(params, order, 500, 42)
        >>> res = arima.fit(y, order)
        >>> res.converged
        True
        >>>

    The series is differenced ``d`` times, then the conditional Gaussian
    likelihood is maximized over the coefficients and the constant by
    simplex descent, with the innovation variance concentrated out. AR and
    MA coefficients are searched through their partial autocorrelations so
    every candidate is stationary and invertible. The search starts from
    zero coefficients and the sample mean. Reaching **max_iter** gives
    ``converged=False`` instead of an error.

    Will raise **LengthError** if the series is shorter than
    ``p + d + q + 3`` and **DegenerateError** if it is fitted perfectly.

    :param series: raw (undifferenced) series
    :param order: model order
    :param include_constant: estimate a constant, otherwise it is fixed at 0
    :param max_iter: simplex iteration cap
    :return: fitted model
    """
    required = order.p + order.d + order.q + 3
    if len(series) < required:
        raise LengthError(len(series), required, what=f"series for {order}")

    w = difference(series, order.d)
    if order.n_arma == 0:
        logger.debug(f"{order}: closed-form estimate")
        return _fit_closed_form(w, order, include_constant)

    space = _Parameterization(order, w, include_constant)

    def objective(x: np.ndarray) -> float:
        residuals = css_residuals(space.params(x), w)
        m = len(residuals)
        # the concentrated negative log-likelihood, floored to stay finite
        sse = max(residuals.sse, 1e-300)
        return 0.5 * m * (math.log(2.0 * math.pi * sse / m) + 1.0)

    result = optimize.nelder_mead(
        objective, np.zeros(space.size), max_iter=max_iter
    )
    residuals = css_residuals(space.params(result.x), w)
    if residuals.sse == 0:
        raise DegenerateError(f"{order} fits the series perfectly")

    params = space.params(result.x, sigma2=residuals.sse / len(residuals))
    loglike = log_likelihood(params, w)
    if not result.converged:
        logger.warning(f"{order} did not converge after {result.iterations} iterations")

    logger.debug(
        f"{order}: phi={list(params.phi)} theta={list(params.theta)} "
        f"c={params.constant} loglike={loglike}"
    )
    return ArimaFit(
        order=order,
        params=params,
        residuals=residuals,
        log_likelihood=loglike,
        n_effective=len(residuals),
        converged=result.converged,
        iterations=result.iterations,
        include_constant=include_constant,
        initial_log_likelihood=-result.initial_fun,
    )


def simulate(
    params: ArimaParams,
    order: ArimaOrder,
    n: int,
    seed: int,
    /,
    *,
    start_label: int = 0,
) -> TimeSeries:
    r"""Simulate an ARIMA series.

    .. code-block:: python

        >>> params = ArimaParams(constant=3.0, sigma2=1e-30)
        >>> simulate(params, ArimaOrder(), 4, 1).values.round(10).tolist()
        [3.0, 3.0, 3.0, 3.0]
        >>>

    Innovations come from :class:`measlescast.rng.Rng` seeded with **seed**.
    The recursion starts at the process mean, runs :data:`BURN_IN`
    observations that are discarded, then the sample is integrated ``d``
    times. Identical arguments give identical output.

    Will raise **StabilityError** if the coefficients are not stationary and
    invertible.

    :param params: model coefficients
    :param order: model order, must match the coefficient counts
    :param n: number of observations
    :param seed: generator seed
    :param start_label: label of the first observation
    :return: simulated series
    """
    params.check(order)
    if n < 1:
        raise LengthError(n, 1, what="simulation")

    p, q = order.p, order.q
    total = BURN_IN + n
    a = Rng(seed).normals(total, sigma=math.sqrt(params.sigma2)).tolist()
    mu = params.mean
    w = [0.0] * total
    for t in range(total):
        value = params.constant + a[t]
        for i in range(1, p + 1):
            value += params.phi[i - 1] * (w[t - i] if t >= i else mu)
        for j in range(1, q + 1):
            if t >= j:
                value -= params.theta[j - 1] * a[t - j]
        w[t] = value

    values = np.array(w[BURN_IN:])
    for _ in range(order.d):
        values = np.cumsum(values)

    return TimeSeries(values, start_label=start_label)

"""Residual checks, information criteria and automatic order selection."""
from __future__ import annotations

__all__ = [
    "LjungBoxReport",
    "InformationCriteria",
    "Candidate",
    "ModelRanking",
    "default_lags",
    "ljung_box",
    "chi_square_sf",
    "chi_square_cdf",
    "aic",
    "bic",
    "information_criteria",
    "grid_search",
]
import itertools
import math
import os
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple
import numpy as np
from joblib import Parallel, delayed

from measlescast import arima
from measlescast._log import logger
from measlescast.arima import ArimaFit, ArimaOrder, ResidualSeries
from measlescast.errors import (
    DegenerateError,
    DofError,
    DomainError,
    LagError,
    NoModelError,
    NotConvergedError,
    NumericalError,
    OrderError,
)
from measlescast.series import TimeSeries, sample_acf

if TYPE_CHECKING:
    from typing import Optional, Sequence, Union

NO_PARALLEL_ENV = "MEASLESCAST_NO_PARALLEL"
"""Set to ``1`` to fit grid-search candidates one after another."""

_GAMMA_EPS = 1e-15
_GAMMA_MAX_ITER = 10000
_TINY = 1e-300


@dataclass(frozen=True)
class LjungBoxReport:
    """Outcome of the Ljung-Box portmanteau test.

    :param q_statistic: Q statistic
    :param dof: chi-square degrees of freedom
    :param p_value: probability of a larger Q under white noise
    :param lags_used: number of autocorrelations summed
    """

    q_statistic: float
    dof: int
    p_value: float
    lags_used: int


class InformationCriteria(NamedTuple):
    aic: float
    bic: float


@dataclass(frozen=True)
class Candidate:
    """One model tried by :func:`grid_search`.

    :param order: candidate order
    :param aic: Akaike criterion, **None** unless converged
    :param bic: Bayesian criterion, **None** unless converged
    :param converged: whether the fit converged
    :param log_likelihood: log-likelihood of the fit, if any
    :param skipped: reason the candidate was not fitted or failed, if any
    """

    order: ArimaOrder
    aic: Optional[float]
    bic: Optional[float]
    converged: bool
    log_likelihood: Optional[float] = None
    skipped: Optional[str] = None


@dataclass(frozen=True)
class ModelRanking:
    """Every candidate of a grid search and the selected order.

    :param candidates: candidates in ``(p, d, q)`` order
    :param winner: converged candidate with the lowest BIC
    """

    candidates: tuple[Candidate, ...]
    winner: ArimaOrder

    def ranked(self) -> list[Candidate]:
        """Converged candidates, best first."""
        return sorted((_ for _ in self.candidates if _.converged), key=_rank_key)


def default_lags(n: int, fitted_param_count: int = 0, /) -> int:
    """Lags used by :func:`ljung_box` when none are given: ``min(10, n/2)``.

    Raised to ``fitted_param_count + 1`` when that leaves no degree of
    freedom.
    """
    return max(min(10, n // 2), fitted_param_count + 1)


def ljung_box(
    residuals: Union[ResidualSeries, TimeSeries, Sequence[float]],
    lags: Optional[int] = None,
    fitted_param_count: int = 0,
    /,
) -> LjungBoxReport:
    r"""Ljung-Box test of residual autocorrelation.

    .. code-block:: python

        >>> from measlescast.diagnostics import ljung_box
        >>>
        >>> ljung_box([1, -1, 1, -1], 1).q_statistic
        4.5
        >>>

    ``Q = n(n+2) sum_k r_k^2 / (n-k)`` over the first **lags** sample
    autocorrelations, compared to a chi-square with
    ``lags - fitted_param_count`` degrees of freedom.

    Will raise **DofError** if no degree of freedom is left, **LagError** if
    the series is not longer than **lags** and **DegenerateError** for
    constant residuals.

    :param residuals: model residuals
    :param lags: autocorrelations to sum, defaults to :func:`default_lags`
    :param fitted_param_count: ARMA coefficients estimated (p + q)
    :return: test report
    """
    if isinstance(residuals, (ResidualSeries, TimeSeries)):
        values = residuals.values
    else:
        values = np.array(residuals, dtype=np.float64)

    n = len(values)
    if lags is None:
        lags = default_lags(n, fitted_param_count)
    if lags <= fitted_param_count:
        raise DofError(
            f"{lags} lags leave no degree of freedom for {fitted_param_count} "
            "fitted parameters"
        )
    if n <= lags:
        raise LagError(f"{n} residuals are too few for {lags} lags")
    if n == 0 or np.ptp(values) == 0:
        raise DegenerateError("residuals are constant")

    acf = np.array(sample_acf(TimeSeries(values), lags).coefficients[1:])
    k = np.arange(1, lags + 1)
    q = float(n * (n + 2) * np.sum(acf**2 / (n - k)))
    dof = lags - fitted_param_count
    return LjungBoxReport(
        q_statistic=q, dof=dof, p_value=chi_square_sf(q, dof), lags_used=lags
    )


def _lower_gamma_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by its power series."""
    term = total = 1.0 / a
    ap = a
    for _ in range(_GAMMA_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            break
    else:
        raise NumericalError(f"incomplete gamma series failed for a={a}, x={x}")

    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_gamma_fraction(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by modified Lentz."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            break
    else:
        raise NumericalError(f"incomplete gamma fraction failed for a={a}, x={x}")

    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def chi_square_sf(x: float, k: int, /) -> float:
    r"""Upper tail probability of a chi-square with **k** degrees of freedom.

    .. code-block:: python

        >>> round(chi_square_sf(4.5, 2), 6)
        0.105399
        >>>

    Uses the series for the incomplete gamma below ``a + 1`` and the
    continued fraction above.

    Will raise **DomainError** for ``x < 0`` or ``k < 1``.

    :param x: statistic
    :param k: degrees of freedom
    :return: ``P(X > x)``
    """
    if k < 1:
        raise DomainError(f"degrees of freedom must be at least 1, got {k}")
    if not x >= 0:
        raise DomainError(f"chi-square statistic must be non-negative, got {x}")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0

    a, half = 0.5 * k, 0.5 * x
    if half < a + 1.0:
        sf = 1.0 - _lower_gamma_series(a, half)
    else:
        sf = _upper_gamma_fraction(a, half)

    return min(1.0, max(0.0, sf))


def chi_square_cdf(x: float, k: int, /) -> float:
    """Lower tail probability, ``1 - chi_square_sf(x, k)``."""
    if k < 1:
        raise DomainError(f"degrees of freedom must be at least 1, got {k}")
    if not x >= 0:
        raise DomainError(f"chi-square statistic must be non-negative, got {x}")
    if x == 0:
        return 0.0

    a, half = 0.5 * k, 0.5 * x
    if half < a + 1.0:
        return min(1.0, _lower_gamma_series(a, half))

    return 1.0 - chi_square_sf(x, k)


def aic(log_likelihood: float, n_parameters: int, /) -> float:
    """Akaike criterion ``-2 l + 2 k``."""
    return -2.0 * log_likelihood + 2.0 * n_parameters


def bic(log_likelihood: float, n_parameters: int, n_observations: float, /) -> float:
    """Bayesian criterion ``-2 l + k ln(n)``."""
    return -2.0 * log_likelihood + n_parameters * math.log(n_observations)


def information_criteria(fit: ArimaFit, /) -> InformationCriteria:
    """AIC and BIC of a converged fit.

    The parameter count is ``p + q``, plus one for an estimated constant,
    plus one for the innovation variance.

    Will raise **NotConvergedError** if the fit did not converge.

    :param fit: fitted model
    :return: ``(aic, bic)``
    """
    if not fit.converged:
        raise NotConvergedError(str(fit.order))

    k = fit.n_params
    return InformationCriteria(
        aic=aic(fit.log_likelihood, k),
        bic=bic(fit.log_likelihood, k, fit.n_effective),
    )


def _rank_key(candidate: Candidate) -> tuple:
    order = candidate.order
    return (candidate.bic, order.n_arma, order.q, order.p, order.d)


def _evaluate(
    series: TimeSeries, order: ArimaOrder, include_constant: bool
) -> Candidate:
    try:
        result = arima.fit(series, order, include_constant=include_constant)
    except (DegenerateError, NumericalError) as e:
        logger.info(f"{order} failed: {e}")
        return Candidate(order, None, None, converged=False, skipped=str(e))

    if not result.converged:
        return Candidate(
            order, None, None, converged=False, log_likelihood=result.log_likelihood
        )

    criteria = information_criteria(result)
    return Candidate(
        order,
        criteria.aic,
        criteria.bic,
        converged=True,
        log_likelihood=result.log_likelihood,
    )


def _parallel_default() -> bool:
    return os.environ.get(NO_PARALLEL_ENV, "") != "1"


def grid_search(
    series: TimeSeries,
    max_p: int = arima.MAX_ORDER,
    max_d: int = arima.MAX_ORDER,
    max_q: int = arima.MAX_ORDER,
    /,
    *,
    include_constant: bool = True,
    parallel: Optional[bool] = None,
    n_jobs: Optional[int] = None,
) -> ModelRanking:
    """Fit every order up to the given maxima and pick the lowest BIC.

    Orders needing more than ``len(series)`` observations
    (``p + d + q + 3``) are listed as skipped. Ties on BIC go to fewer
    coefficients, then lower q, then lower p. The result does not depend on
    the order in which candidates are fitted.

    Will raise **OrderError** for maxima above the engine limit and
    **NoModelError** when no candidate converges.

    :param series: raw series
    :param max_p: largest AR order
    :param max_d: largest differencing order
    :param max_q: largest MA order
    :param include_constant: estimate a constant in every candidate
    :param parallel: fit candidates on joblib worker threads, defaults to true
        unless ``MEASLESCAST_NO_PARALLEL=1``
    :param n_jobs: number of workers, all cores when **None**
    :return: ranking of all candidates
    """
    for name, value in (("max_p", max_p), ("max_d", max_d), ("max_q", max_q)):
        if value < 0 or value > arima.MAX_ORDER:
            raise OrderError(
                f"{name}={value} outside the engine range 0..{arima.MAX_ORDER}"
            )

    orders = [
        ArimaOrder(p, d, q)
        for p, d, q in itertools.product(
            range(max_p + 1), range(max_d + 1), range(max_q + 1)
        )
    ]
    feasible = [_ for _ in orders if len(series) >= _.p + _.d + _.q + 3]
    results: dict[ArimaOrder, Candidate] = {
        order: Candidate(
            order,
            None,
            None,
            converged=False,
            skipped=f"needs {order.p + order.d + order.q + 3} observations, "
            f"series has {len(series)}",
        )
        for order in orders
        if order not in feasible
    }

    if parallel is None:
        parallel = _parallel_default()

    logger.info(
        f"grid search over {len(feasible)} candidates "
        f"({len(orders) - len(feasible)} skipped), parallel={parallel}"
    )
    if parallel and len(feasible) > 1:
        pool = Parallel(n_jobs=n_jobs if n_jobs is not None else -1, prefer="threads")
        fitted = pool(
            delayed(_evaluate)(series, order, include_constant) for order in feasible
        )
        results.update(zip(feasible, fitted))
    else:
        for order in feasible:
            results[order] = _evaluate(series, order, include_constant)

    candidates = tuple(results[_] for _ in orders)
    converged = [_ for _ in candidates if _.converged]
    if not converged:
        raise NoModelError(len(feasible))

    winner = min(converged, key=_rank_key).order
    logger.info(f"selected {winner}")
    return ModelRanking(candidates=candidates, winner=winner)



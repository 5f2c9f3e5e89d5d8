"""Annual time series and the stationarity toolkit.

Differencing, integration, sample autocorrelation, partial autocorrelation
and year-over-year trend summaries. Everything here is a pure function over
immutable values.
"""
from __future__ import annotations

__all__ = [
    "TimeSeries",
    "Correlogram",
    "Trend",
    "TrendStep",
    "difference",
    "anchors_of",
    "integrate",
    "default_max_lag",
    "sample_acf",
    "sample_pacf",
    "trend_summary",
]
import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple
import numpy as np

from measlescast.errors import (
    ArityError,
    DegenerateError,
    LagError,
    LengthError,
    NumericalError,
)

if TYPE_CHECKING:
    from typing import Iterable, Optional, Sequence

# Durbin-Levinson denominators below this are treated as a loss of precision
_DL_EPSILON = 1e-14


def _frozen_array(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("values must be one-dimensional")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries(object):
    r"""Ordered annual observations.

    .. code-block:: python

        >>> from measlescast.series import TimeSeries
        >>>
        >>> s = TimeSeries([2400, 18000], start_label=2017)
        >>> s.labels
        (2017, 2018)
        >>> len(s)
        2
        >>>

    :param values: observations
    :param start_label: calendar year of the first observation
    :param differencing_applied: times differenced relative to the raw data
    """

    values: np.ndarray
    start_label: int
    differencing_applied: int

    def __init__(
        self,
        values: Iterable[float],
        /,
        start_label: int = 0,
        differencing_applied: int = 0,
    ) -> None:
        if differencing_applied < 0:
            raise ValueError("differencing_applied must be non-negative")

        object.__setattr__(self, "values", _frozen_array(values))
        object.__setattr__(self, "start_label", int(start_label))
        object.__setattr__(self, "differencing_applied", int(differencing_applied))

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}({self.values.tolist()!r}, "
            f"start_label={self.start_label}, "
            f"differencing_applied={self.differencing_applied})"
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented

        return (
            self.start_label == other.start_label
            and self.differencing_applied == other.differencing_applied
            and np.array_equal(self.values, other.values)
        )

    @property
    def labels(self) -> tuple[int, ...]:
        """Period label of each observation"""
        return tuple(range(self.start_label, self.start_label + len(self)))

    @property
    def end_label(self) -> int:
        """Label of the last observation"""
        return self.start_label + len(self) - 1

    def with_values(self, values: Iterable[float], /) -> TimeSeries:
        """Same labels and differencing depth, other values."""
        return TimeSeries(
            values,
            start_label=self.start_label,
            differencing_applied=self.differencing_applied,
        )


@dataclass(frozen=True, eq=False)
class Correlogram(object):
    """Autocorrelation or partial autocorrelation coefficients by lag.

    :param kind: ``"acf"`` or ``"pacf"``
    :param lags: lags of the coefficients
    :param coefficients: one coefficient per lag
    :param confidence_band: half-width of the approximate 95% white-noise band
    """

    kind: str
    lags: tuple[int, ...]
    coefficients: tuple[float, ...]
    confidence_band: float

    def __len__(self) -> int:
        return len(self.lags)

    def __getitem__(self, lag: int) -> float:
        """Coefficient at **lag**."""
        try:
            return self.coefficients[self.lags.index(lag)]
        except ValueError:
            raise LagError(f"lag {lag} not in {self.kind} correlogram") from None

    def significant_lags(self) -> list[int]:
        """Lags whose coefficient falls outside the white-noise band."""
        return [
            lag
            for lag, value in zip(self.lags, self.coefficients)
            if lag > 0 and abs(value) > self.confidence_band
        ]


class Trend(str, enum.Enum):
    INCREASE = "increase"
    DECREASE = "decrease"
    FLAT = "flat"


class TrendStep(NamedTuple):
    """Change between a period and the one before it."""

    label: int
    delta: float
    sign: Trend


def difference(series: TimeSeries, d: int = 1, /) -> TimeSeries:
    r"""Apply first differences **d** times.

    .. code-block:: python

        >>> difference(TimeSeries([1, 2, 4, 7, 11]), 2).values.tolist()
        [1.0, 1.0, 1.0]
        >>>

    Will raise **LengthError** if the series has no more than **d**
    observations.

    :param series: series to difference
    :param d: number of differencing passes
    :return: differenced series, **d** observations shorter
    """
    if d < 0:
        raise ValueError(f"differencing order must be non-negative, got {d}")
    if len(series) <= d:
        raise LengthError(len(series), d + 1)

    return TimeSeries(
        np.diff(series.values, n=d) if d else series.values,
        start_label=series.start_label + d,
        differencing_applied=series.differencing_applied + d,
    )


def anchors_of(series: TimeSeries, d: int, /) -> list[float]:
    """Values :func:`integrate` needs to undo **d** differencing passes.

    ``anchors_of(x, d)[k]`` is the first value of ``x`` differenced ``k``
    times.

    :param series: undifferenced series
    :param d: differencing depth
    :return: one anchor per differencing level
    """
    if len(series) <= d:
        raise LengthError(len(series), d + 1)

    anchors = []
    values = series.values
    for _ in range(d):
        anchors.append(float(values[0]))
        values = np.diff(values)

    return anchors


def integrate(
    diffs: TimeSeries, initials: Sequence[float], /, d: Optional[int] = None
) -> TimeSeries:
    r"""Invert :func:`difference`.

    .. code-block:: python

        >>> s = TimeSeries([1, 2, 3, 4], differencing_applied=1)
        >>> integrate(s, [1]).values.tolist()
        [1.0, 2.0, 4.0, 7.0, 11.0]
        >>>

    ``integrate(difference(x, d), anchors_of(x, d))`` reproduces ``x``.

    Will raise **ArityError** if **initials** does not hold one anchor per
    level being undone.

    :param diffs: differenced series
    :param initials: anchors as returned by :func:`anchors_of`
    :param d: levels to undo, defaults to ``diffs.differencing_applied``
    :return: integrated series
    """
    depth = diffs.differencing_applied if d is None else d
    if depth < 0 or depth > diffs.differencing_applied:
        raise ArityError(
            f"cannot undo {depth} differencing levels of a series "
            f"differenced {diffs.differencing_applied} times"
        )
    if len(initials) != depth:
        raise ArityError(
            f"expected {depth} initial values, got {len(initials)}"
        )

    values = diffs.values
    for anchor in reversed(initials):
        values = np.cumsum(np.concatenate(([float(anchor)], values)))

    return TimeSeries(
        values,
        start_label=diffs.start_label - depth,
        differencing_applied=diffs.differencing_applied - depth,
    )


def default_max_lag(n: int, /) -> int:
    """Correlogram lag used when callers give none: ``min(n-1, 10*log10(n))``."""
    if n < 2:
        raise LengthError(n, 2)

    return max(1, min(n - 1, int(math.floor(10 * math.log10(n)))))


def _autocorrelations(values: np.ndarray, max_lag: int) -> np.ndarray:
    n = len(values)
    if n < 2:
        raise LengthError(n, 2)
    if max_lag < 0 or max_lag >= n:
        raise LagError(f"max_lag must be in [0, {n - 1}], got {max_lag}")
    if np.ptp(values) == 0:
        raise DegenerateError("series is constant, autocorrelation undefined")

    x = values - values.mean()
    c0 = float(np.dot(x, x)) / n
    if c0 <= 0:
        raise DegenerateError("series has zero sample variance")

    acf = np.empty(max_lag + 1)
    acf[0] = 1.0
    for k in range(1, max_lag + 1):
        acf[k] = float(np.dot(x[: n - k], x[k:])) / n / c0

    return acf


def sample_acf(series: TimeSeries, max_lag: Optional[int] = None, /) -> Correlogram:
    r"""Sample autocorrelation with the biased (divide by n) covariance.

    .. code-block:: python

        >>> acf = sample_acf(TimeSeries([1, 2, 3, 4, 5]), 2)
        >>> acf[0], round(acf[1], 12)
        (1.0, 0.4)
        >>>

    :param series: non-constant series of at least 2 observations
    :param max_lag: last lag, defaults to :func:`default_max_lag`
    :return: coefficients for lags ``0..max_lag``
    """
    n = len(series)
    if max_lag is None:
        max_lag = default_max_lag(n)

    acf = _autocorrelations(series.values, max_lag)
    return Correlogram(
        kind="acf",
        lags=tuple(range(max_lag + 1)),
        coefficients=tuple(float(_) for _ in acf),
        confidence_band=1.96 / math.sqrt(n),
    )


def _durbin_levinson(acf: np.ndarray) -> np.ndarray:
    """Partial autocorrelations for lags ``1..len(acf)-1``."""
    max_lag = len(acf) - 1
    pacf = np.empty(max_lag)
    phi = np.zeros(0)
    for k in range(1, max_lag + 1):
        denominator = 1.0 - float(np.dot(phi, acf[1:k]))
        if abs(denominator) < _DL_EPSILON:
            raise NumericalError(
                f"Durbin-Levinson denominator vanished at lag {k}"
            )

        phi_kk = (acf[k] - float(np.dot(phi, acf[k - 1 : 0 : -1]))) / denominator
        phi = np.concatenate((phi - phi_kk * phi[::-1], [phi_kk]))
        pacf[k - 1] = phi_kk

    return pacf


def sample_pacf(
    series: TimeSeries, max_lag: Optional[int] = None, /
) -> Correlogram:
    """Sample partial autocorrelation by Durbin-Levinson recursion.

    :param series: non-constant series of at least 2 observations
    :param max_lag: last lag, defaults to :func:`default_max_lag`
    :return: coefficients for lags ``1..max_lag``
    """
    n = len(series)
    if max_lag is None:
        max_lag = default_max_lag(n)
    if max_lag < 1:
        raise LagError(f"max_lag must be at least 1, got {max_lag}")

    pacf = _durbin_levinson(_autocorrelations(series.values, max_lag))
    return Correlogram(
        kind="pacf",
        lags=tuple(range(1, max_lag + 1)),
        coefficients=tuple(float(_) for _ in pacf),
        confidence_band=1.96 / math.sqrt(n),
    )


def trend_summary(series: TimeSeries, /) -> list[TrendStep]:
    r"""Year-over-year changes.

    .. code-block:: python

        >>> trend_summary(TimeSeries([2400, 18000], start_label=2017))
        [TrendStep(label=2018, delta=15600.0, sign=<Trend.INCREASE: 'increase'>)]
        >>>

    :param series: series of at least 2 observations
    :return: one step per consecutive pair, labelled with the later period
    """
    if len(series) < 2:
        raise LengthError(len(series), 2)

    steps = []
    for i, delta in enumerate(np.diff(series.values), start=1):
        delta = float(delta)
        if delta > 0:
            sign = Trend.INCREASE
        elif delta < 0:
            sign = Trend.DECREASE
        else:
            sign = Trend.FLAT
        steps.append(TrendStep(series.start_label + i, delta, sign))

    return steps

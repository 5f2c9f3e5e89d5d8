"""SVG rendering of a case-count history and its forecasts.

The layout is fixed so renderings are portable and byte-stable: an
``800x500`` view box, plot margins of 60 (top), 20 (right), 40 (bottom) and
60 (left), and linear scales over the data extents padded by 5% on each
side. Coordinates are written with two decimals. See ``docs/plotting.md``.
"""
from __future__ import annotations

__all__ = ["WIDTH", "HEIGHT", "MARGINS", "render_svg"]
import html
import math
from typing import TYPE_CHECKING

from measlescast.errors import EmptyError

if TYPE_CHECKING:
    from typing import Callable, Optional, Sequence

    from measlescast.forecast import ForecastResult
    from measlescast.series import TimeSeries

WIDTH = 800
HEIGHT = 500
MARGINS = (60, 20, 40, 60)
"""Top, right, bottom and left margins."""

PADDING = 0.05
Y_TICKS = 5
MAX_X_TICKS = 12

HISTORY_COLOR = "#1f77b4"
FORECAST_COLOR = "#d62728"
BAND_COLOR = "#d62728"


def _extent(values: Sequence[float], flat: float) -> tuple[float, float]:
    low, high = min(values), max(values)
    if high == low:
        span = flat or max(abs(high), 1.0)
        low, high = low - span / 2, high + span / 2
    pad = PADDING * (high - low)
    return low - pad, high + pad


def _scale(
    domain: tuple[float, float], start: float, stop: float
) -> Callable[[float], float]:
    low, high = domain
    factor = (stop - start) / (high - low)
    return lambda v: start + (v - low) * factor


def _points(xs: Sequence[float], ys: Sequence[float]) -> str:
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))


def _label(value: float) -> str:
    if abs(value) >= 1000 or value == 0:
        return f"{value:.0f}"
    return format(value, ".4g")


def render_svg(
    history: TimeSeries,
    fc: Optional[ForecastResult] = None,
    /,
    title: str = "",
) -> str:
    r"""Render a history with optional forecasts as an SVG document.

    .. code-block:: python

        >>> from measlescast.series import TimeSeries
        >>>
        >>> svg = render_svg(TimeSeries([2400, 18000], start_label=2017))
        >>> svg.count("<polyline"), svg.count("<polygon")
        (1, 0)
        >>>

    The history is drawn as one polyline. With forecasts, a second polyline
    continues from the last observation through the point forecasts and a
    polygon shades the prediction interval.

    Will raise **EmptyError** for an empty history.

    :param history: observed series
    :param fc: forecasts following **history**
    :param title: title drawn above the plot
    :return: SVG document
    """
    if not len(history):
        raise EmptyError("history")

    top, right, bottom, left = MARGINS
    labels = list(history.labels)
    values = [float(_) for _ in history.values]
    ys = list(values)
    last_label = history.end_label
    if fc is not None:
        last_label = fc.horizon_labels[-1]
        ys.extend(fc.point)
        ys.extend(fc.lower)
        ys.extend(fc.upper)

    ys = [_ for _ in ys if math.isfinite(_)]
    x_domain = _extent([history.start_label, last_label], 1.0)
    y_domain = _extent(ys, 0.0)
    sx = _scale(x_domain, left, WIDTH - right)
    sy = _scale(y_domain, HEIGHT - bottom, top)

    elements = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" role="img">',
        f"<title>{html.escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="{top / 2:.2f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{html.escape(title)}</text>',
    ]

    # axes
    x0, x1 = float(left), float(WIDTH - right)
    y0, y1 = float(HEIGHT - bottom), float(top)
    elements.append(
        f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y0:.2f}" stroke="black"/>'
    )
    elements.append(
        f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x0:.2f}" y2="{y1:.2f}" stroke="black"/>'
    )

    years = range(history.start_label, last_label + 1)
    step = max(1, math.ceil(len(years) / MAX_X_TICKS))
    for year in years[::step]:
        x = sx(year)
        elements.append(
            f'<line x1="{x:.2f}" y1="{y0:.2f}" x2="{x:.2f}" y2="{y0 + 5:.2f}" '
            'stroke="black"/>'
        )
        elements.append(
            f'<text x="{x:.2f}" y="{y0 + 20:.2f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{year}</text>'
        )

    low, high = y_domain
    for i in range(Y_TICKS):
        value = low + (high - low) * i / (Y_TICKS - 1)
        y = sy(value)
        elements.append(
            f'<line x1="{x0 - 5:.2f}" y1="{y:.2f}" x2="{x0:.2f}" y2="{y:.2f}" '
            'stroke="black"/>'
        )
        elements.append(
            f'<text x="{x0 - 8:.2f}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_label(value)}</text>'
        )

    if fc is not None:
        band_x = [sx(_) for _ in fc.horizon_labels]
        band = _points(
            band_x + band_x[::-1],
            [sy(_) for _ in fc.upper] + [sy(_) for _ in fc.lower[::-1]],
        )
        elements.append(
            f'<polygon points="{band}" fill="{BAND_COLOR}" fill-opacity="0.2" '
            'stroke="none"/>'
        )

    history_points = _points([sx(_) for _ in labels], [sy(_) for _ in values])
    elements.append(
        f'<polyline points="{history_points}" '
        f'fill="none" stroke="{HISTORY_COLOR}" stroke-width="2"/>'
    )

    if fc is not None:
        fx = [sx(history.end_label)] + [sx(_) for _ in fc.horizon_labels]
        fy = [sy(values[-1])] + [sy(_) for _ in fc.point]
        elements.append(
            f'<polyline points="{_points(fx, fy)}" fill="none" '
            f'stroke="{FORECAST_COLOR}" stroke-width="2" stroke-dasharray="6 4"/>'
        )

    elements.append("</svg>")
    return "\n".join(elements) + "\n"

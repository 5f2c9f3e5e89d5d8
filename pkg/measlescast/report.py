"""Machine-readable reports written by the command line.

Reports are JSON objects carrying ``schema_version``, the tool version, the
fully resolved command that produced them and the digest of the input file.
They are validated against ``report.schema`` before being written.

Serialization is deterministic: keys are sorted, floats are written with 17
significant digits and non-finite floats become ``null``.
"""
from __future__ import annotations

__all__ = [
    "SCHEMA_VERSION",
    "load_schema",
    "validate",
    "dumps",
    "write",
    "order_dict",
    "acf_report",
    "forecast_report",
    "select_report",
    "trend_report",
]
import json
import math
import sys
from pathlib import Path
from typing import TYPE_CHECKING
import numpy as np
import yaml
import jsonschema

from measlescast.__version__ import __version__
from measlescast.diagnostics import information_criteria

if TYPE_CHECKING:
    from typing import Any, Iterable, Optional, TextIO

    from measlescast.arima import ArimaFit, ArimaOrder
    from measlescast.diagnostics import LjungBoxReport, ModelRanking
    from measlescast.forecast import ForecastResult
    from measlescast.series import Correlogram, TimeSeries, TrendStep

SCHEMA_VERSION = 1


def load_schema() -> dict[str, Any]:
    """Load the JSON schema of reports."""
    with open(Path(__file__).parent / "report.schema", encoding="utf-8") as f:
        return yaml.safe_load(f)


def validate(report: dict, /) -> None:
    """Check a report against the schema.

    Will raise **jsonschema.ValidationError** for a malformed report.
    """
    jsonschema.validate(report, load_schema())


def _encode(value: Any, indent: int) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return format(value, ".17g") if math.isfinite(value) else "null"
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = (
            f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent + 1)}"
            for k, v in sorted(value.items())
        )
        return "{\n" + ",\n".join(items) + f"\n{end}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        return (
            "[\n"
            + ",\n".join(f"{pad}{_encode(_, indent + 1)}" for _ in value)
            + f"\n{end}]"
        )

    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(report: dict, /) -> str:
    r"""Serialize a report.

    .. code-block:: python

        >>> print(dumps({"b": 0.1, "a": [1, float("nan")]}), end="")
        {
          "a": [
            1,
            null
          ],
          "b": 0.10000000000000001
        }
        >>>

    :param report: JSON-compatible dict
    :return: JSON text ending with a newline
    """
    return _encode(report, 0) + "\n"


def write(text: str, path: str, /, *, stdout: Optional[TextIO] = None) -> None:
    """Write output to **path**, or to **stdout** when **path** is ``-``."""
    if path == "-":
        (stdout or sys.stdout).write(text)
        return

    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def order_dict(order: ArimaOrder, /) -> dict[str, int]:
    return {"p": order.p, "d": order.d, "q": order.q}


def _header(kind: str, command: str, input_digest: Optional[str]) -> dict:
    header: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "tool_version": __version__,
        "command": command,
    }
    if input_digest is not None:
        header["input_digest"] = input_digest
    return header


def _trend(steps: Iterable[TrendStep]) -> list[dict]:
    return [
        {"label": _.label, "delta": _.delta, "sign": _.sign.value} for _ in steps
    ]


def _correlogram(c: Correlogram) -> dict:
    return {
        "lags": list(c.lags),
        "coefficients": list(c.coefficients),
        "confidence_band": c.confidence_band,
    }


def acf_report(
    acf: Correlogram,
    pacf: Correlogram,
    series: TimeSeries,
    /,
    *,
    command: str,
    input_digest: str,
) -> dict:
    """Correlograms of a (possibly differenced) series."""
    report = _header("acf", command, input_digest)
    report.update(
        difference=series.differencing_applied,
        n=len(series),
        acf=_correlogram(acf),
        pacf=_correlogram(pacf),
    )
    return report


def forecast_report(
    fit: ArimaFit,
    fc: Optional[ForecastResult],
    ljung_box: Optional[LjungBoxReport],
    /,
    *,
    command: str,
    input_digest: str,
    diagnostics_reason: Optional[str] = None,
    trend: Iterable[TrendStep] = (),
    warnings: Iterable[str] = (),
) -> dict:
    """Full record of a fit and its forecasts.

    A fit that did not converge is reported with ``converged: false`` and
    neither criteria nor forecasts.

    :param fit: model fit
    :param fc: forecasts, **None** when not computed
    :param ljung_box: residual test, **None** when not computed
    :param command: resolved command line
    :param input_digest: digest of the input file
    :param diagnostics_reason: why **ljung_box** is missing
    :param trend: trend summary of the history
    :param warnings: data warnings raised while ingesting
    :return: report
    """
    params = fit.params
    report = _header("forecast", command, input_digest)
    report.update(
        order=order_dict(fit.order),
        include_constant=fit.include_constant,
        params={
            "phi": list(params.phi),
            "theta": list(params.theta),
            "constant": params.constant,
            "mean": params.mean,
            "sigma2": params.sigma2,
        },
        converged=fit.converged,
        iterations=fit.iterations,
        n_effective=fit.n_effective,
        log_likelihood=fit.log_likelihood,
        criteria=information_criteria(fit)._asdict() if fit.converged else None,
        diagnostics={
            "ljung_box": None
            if ljung_box is None
            else {
                "q_statistic": ljung_box.q_statistic,
                "dof": ljung_box.dof,
                "p_value": ljung_box.p_value,
                "lags_used": ljung_box.lags_used,
            },
            "reason": diagnostics_reason,
        },
        forecast=None
        if fc is None
        else {
            "level": fc.level,
            "psi": list(fc.psi),
            "periods": [
                {
                    "label": fc.horizon_labels[i],
                    "point": fc.point[i],
                    "lower": fc.lower[i],
                    "upper": fc.upper[i],
                    "stderr": fc.stderr[i],
                    "raw_point": fc.raw_point[i],
                    "raw_lower": fc.raw_lower[i],
                    "raw_upper": fc.raw_upper[i],
                    "clamped": fc.clamped[i],
                }
                for i in range(len(fc))
            ],
        },
        trend=_trend(trend),
        warnings=list(warnings),
    )
    return report


def select_report(
    ranking: ModelRanking,
    max_order: ArimaOrder,
    /,
    *,
    command: str,
    input_digest: str,
    include_constant: bool = True,
) -> dict:
    """Every grid-search candidate and the winner."""
    report = _header("select", command, input_digest)
    report.update(
        max_order=order_dict(max_order),
        include_constant=include_constant,
        winner=order_dict(ranking.winner),
        candidates=[
            {
                "order": order_dict(_.order),
                "converged": _.converged,
                "aic": _.aic,
                "bic": _.bic,
                "log_likelihood": _.log_likelihood,
                "skipped": _.skipped,
            }
            for _ in ranking.candidates
        ],
    )
    return report


def trend_report(
    series: TimeSeries,
    steps: Iterable[TrendStep],
    /,
    *,
    command: str,
    input_digest: str,
    warnings: Iterable[str] = (),
) -> dict:
    """National series with its year-over-year changes."""
    report = _header("trend", command, input_digest)
    report.update(
        series=[
            {"label": label, "value": float(value)}
            for label, value in zip(series.labels, series.values)
        ],
        trend=_trend(steps),
        warnings=list(warnings),
    )
    return report

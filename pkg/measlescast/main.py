"""Command-line interface.

Every subcommand reads a surveillance CSV (``--input``, ``-`` for stdin),
writes its machine-readable output to the requested paths (``-`` for stdout)
and logs human messages to stderr. Exit codes:

=====  =============================================================
0      success
1      usage or configuration error
2      data error, including a series too short for the requested lags
3      degenerate series or lost numerical precision
4      fit did not converge
5      model order above the supported ceiling
6      no grid-search candidate converged
7      non-stationary or non-invertible coefficients
=====  =============================================================
"""
from __future__ import annotations

__all__ = [
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_DATA",
    "EXIT_DEGENERATE",
    "EXIT_NOT_CONVERGED",
    "EXIT_ORDER",
    "EXIT_NO_MODEL",
    "EXIT_STABILITY",
    "exit_code",
    "cmd_acf",
    "cmd_forecast",
    "cmd_select",
    "cmd_simulate",
    "cmd_export",
    "cmd_trend",
    "main",
]
import argparse
import functools
import logging
import shlex
import sys
from typing import TYPE_CHECKING, NamedTuple
import numpy as np
import yaml

from measlescast import arima, diagnostics, ingest, plot, report, settings
from measlescast._log import logger
from measlescast.errors import (
    ConfigError,
    DataError,
    DegenerateError,
    DofError,
    DomainError,
    HorizonError,
    LagError,
    LengthError,
    MeaslescastError,
    NoModelError,
    NotConvergedError,
    NumericalError,
    OrderError,
    StabilityError,
    UsageError,
)
from measlescast.forecast import forecast
from measlescast.series import (
    difference,
    sample_acf,
    sample_pacf,
    trend_summary,
)

if TYPE_CHECKING:
    from typing import IO, Any, NoReturn, Optional, TextIO

    from measlescast.settings import Settings
    from measlescast.series import TimeSeries

PROG = "measlescast"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DEGENERATE = 3
EXIT_NOT_CONVERGED = 4
EXIT_ORDER = 5
EXIT_NO_MODEL = 6
EXIT_STABILITY = 7

# first match wins, subclasses before their bases
_EXIT_CODES: tuple[tuple[type[BaseException], int], ...] = (
    (UsageError, EXIT_USAGE),
    (ConfigError, EXIT_USAGE),
    (LagError, EXIT_USAGE),
    (HorizonError, EXIT_USAGE),
    (DomainError, EXIT_USAGE),
    (DataError, EXIT_DATA),
    (LengthError, EXIT_DATA),
    (DofError, EXIT_DATA),
    (DegenerateError, EXIT_DEGENERATE),
    (NumericalError, EXIT_DEGENERATE),
    (NotConvergedError, EXIT_NOT_CONVERGED),
    (OrderError, EXIT_ORDER),
    (NoModelError, EXIT_NO_MODEL),
    (StabilityError, EXIT_STABILITY),
)

_LOG_FORMAT = "%(name)s [%(levelname)s] %(message)s"


def exit_code(error: BaseException, /) -> Optional[int]:
    """Exit code for an error, **None** if it is not a known failure."""
    for cls, code in _EXIT_CODES:
        if isinstance(error, cls):
            return code

    return None


class Streams(NamedTuple):
    stdin: TextIO
    stdout: TextIO


class _ArgumentParser(argparse.ArgumentParser):
    """Parser writing to the given streams and raising on errors."""

    def __init__(
        self,
        *args: Any,
        stdout: Optional[TextIO] = None,
        stderr: Optional[TextIO] = None,
        **kwargs: Any,
    ) -> None:
        super().__init__(*args, **kwargs)
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr

    def _print_message(self, message: str, file: Optional[IO[str]] = None) -> None:
        if message:
            (self.stderr if file is sys.stderr else self.stdout).write(message)

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _command(*parts: object) -> str:
    """Resolved command line recorded in reports."""
    return shlex.join([PROG] + [str(_) for _ in parts])


def _parse_order(text: str, flag: str) -> arima.ArimaOrder:
    try:
        return arima.ArimaOrder.parse(text)
    except OrderError:
        raise
    except ValueError as e:
        raise UsageError(f"{flag}: {e}") from None


def _read_input(path: str, stdin: TextIO) -> tuple[ingest.Dataset, str]:
    if path != "-":
        return ingest.load(path)

    data = stdin.buffer.read() if hasattr(stdin, "buffer") else stdin.read()
    if isinstance(data, str):
        data = data.encode("utf-8")
    return ingest.parse_csv(data, source_note="<stdin>"), ingest.digest(data)


def _national(
    path: str, config: Settings, streams: Streams
) -> tuple[TimeSeries, str, list[str]]:
    """Read a dataset and aggregate it to the national annual series."""
    ds, digest = _read_input(path, streams.stdin)
    warnings = ingest.validate_regions(ds, config["ingest"]["expected_regions"])
    series = ingest.aggregate_annual(ds)
    logger.info(
        f"{ds.source_note}: {len(ds)} records, "
        f"{series.start_label}-{series.end_label}"
    )
    return series, digest, warnings


def _check_outputs(*paths: Optional[str]) -> None:
    if sum(1 for _ in paths if _ == "-") > 1:
        raise UsageError("only one output can go to stdout")


def cmd_acf(args: argparse.Namespace, config: Settings, streams: Streams) -> int:
    """Write ACF and PACF correlograms of the national series."""
    if args.difference < 0:
        raise UsageError(f"--difference must be non-negative, got {args.difference}")
    if args.max_lag is not None and args.max_lag < 1:
        raise UsageError(f"--max-lag must be at least 1, got {args.max_lag}")

    series, digest, _ = _national(args.input, config, streams)
    w = difference(series, args.difference) if args.difference else series
    if args.max_lag is not None and args.max_lag >= len(w):
        # the series is too short for the requested lags
        raise LengthError(len(w), args.max_lag + 1, what="series for --max-lag")
    acf = sample_acf(w, args.max_lag)
    pacf = sample_pacf(w, args.max_lag)
    max_lag = acf.lags[-1]

    significant = acf.significant_lags()
    if significant:
        logger.info(f"significant autocorrelation at lags {significant}")

    command = _command(
        "acf",
        "--input",
        args.input,
        "--max-lag",
        max_lag,
        "--difference",
        args.difference,
        "--out-json",
        args.out_json,
    )
    document = report.acf_report(acf, pacf, w, command=command, input_digest=digest)
    report.validate(document)
    report.write(report.dumps(document), args.out_json, stdout=streams.stdout)
    return EXIT_OK


def cmd_forecast(args: argparse.Namespace, config: Settings, streams: Streams) -> int:
    """Fit a model, test its residuals and forecast.

    The report is written even when the fit does not converge, in which case
    it carries no forecast and the exit code is :data:`EXIT_NOT_CONVERGED`.
    """
    defaults = config["forecast"]
    order_text = args.order if args.order is not None else defaults["order"]
    horizon = args.horizon if args.horizon is not None else defaults["horizon"]
    level = args.level if args.level is not None else defaults["level"]
    constant = args.constant if args.constant is not None else defaults["constant"]
    lags = config["diagnostics"]["lags"]

    order = _parse_order(order_text, "--order")
    if horizon < 1:
        raise UsageError(f"--horizon must be at least 1, got {horizon}")
    if not 0.0 < level < 1.0:
        raise UsageError(f"--level must be in (0, 1), got {level}")
    _check_outputs(args.out_json, args.out_svg)

    series, digest, warnings = _national(args.input, config, streams)
    fit = arima.fit(series, order, include_constant=constant)
    trend = trend_summary(series) if len(series) > 1 else []

    fc = None
    lb = None
    reason: Optional[str] = None
    if fit.converged:
        try:
            lb = diagnostics.ljung_box(fit.residuals, lags, order.n_arma)
        except (DofError, LagError, DegenerateError) as e:
            reason = str(e)
            logger.warning(f"Ljung-Box test skipped: {e}")
        fc = forecast(fit, series, horizon, level)
    else:
        reason = str(NotConvergedError(str(order)))

    parts: list[object] = [
        "forecast",
        "--input",
        args.input,
        "--order",
        order.as_text(),
        "--horizon",
        horizon,
        "--level",
        level,
    ]
    if not constant:
        parts.append("--no-constant")
    parts += ["--out-json", args.out_json]
    if args.out_svg is not None:
        parts += ["--out-svg", args.out_svg, "--title", args.title]

    document = report.forecast_report(
        fit,
        fc,
        lb,
        command=_command(*parts),
        input_digest=digest,
        diagnostics_reason=reason,
        trend=trend,
        warnings=warnings,
    )
    report.validate(document)
    report.write(report.dumps(document), args.out_json, stdout=streams.stdout)
    if args.out_svg is not None:
        report.write(
            plot.render_svg(series, fc, title=args.title),
            args.out_svg,
            stdout=streams.stdout,
        )

    if not fit.converged:
        logger.error(f"{order} did not converge, no forecast written")
        return EXIT_NOT_CONVERGED

    return EXIT_OK


def cmd_select(args: argparse.Namespace, config: Settings, streams: Streams) -> int:
    """Grid search over orders up to ``--max-order``."""
    text = args.max_order
    if text is None:
        text = config["select"]["max_order"]
    constant = (
        args.constant if args.constant is not None else config["forecast"]["constant"]
    )
    max_order = _parse_order(text, "--max-order")

    series, digest, _ = _national(args.input, config, streams)
    ranking = diagnostics.grid_search(
        series, max_order.p, max_order.d, max_order.q, include_constant=constant
    )

    parts: list[object] = ["select", "--input", args.input]
    parts += ["--max-order", max_order.as_text()]
    if not constant:
        parts.append("--no-constant")
    parts += ["--out-json", args.out_json]
    document = report.select_report(
        ranking,
        max_order,
        command=_command(*parts),
        input_digest=digest,
        include_constant=constant,
    )
    report.validate(document)
    report.write(report.dumps(document), args.out_json, stdout=streams.stdout)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, config: Settings, streams: Streams) -> int:
    """Write a simulated single-region dataset."""
    if args.n < 1:
        raise UsageError(f"--n must be at least 1, got {args.n}")
    last_year = args.start_year + args.n - 1
    if args.start_year < ingest.MIN_YEAR or last_year > ingest.MAX_YEAR:
        raise UsageError(
            f"years {args.start_year}-{last_year} outside "
            f"{ingest.MIN_YEAR}-{ingest.MAX_YEAR}"
        )

    order = arima.ArimaOrder(len(args.phi), args.d, len(args.theta))
    params = arima.ArimaParams(
        phi=args.phi, theta=args.theta, constant=args.constant, sigma2=args.sigma2
    )
    series = arima.simulate(
        params, order, args.n, args.seed, start_label=args.start_year
    )
    if np.any(np.round(series.values) < 0):
        raise DataError(
            "simulated series has negative values, raise --constant or lower --sigma2"
        )

    ds = ingest.national_dataset(series, region=args.region)
    report.write(ingest.export_csv(ds), args.out_csv, stdout=streams.stdout)
    logger.info(f"simulated {args.n} periods of {order} with seed {args.seed}")
    return EXIT_OK


def cmd_export(args: argparse.Namespace, config: Settings, streams: Streams) -> int:
    """Write a dataset back in canonical form."""
    ds, _ = _read_input(args.input, streams.stdin)
    if args.national:
        ingest.validate_regions(ds, config["ingest"]["expected_regions"])
        ds = ingest.national_dataset(
            ingest.aggregate_annual(ds), source_note=ds.source_note
        )

    report.write(ingest.export_csv(ds), args.out_csv, stdout=streams.stdout)
    return EXIT_OK


def cmd_trend(args: argparse.Namespace, config: Settings, streams: Streams) -> int:
    """Year-over-year changes of the national series and a history plot."""
    _check_outputs(args.out_json, args.out_svg)
    series, digest, warnings = _national(args.input, config, streams)
    steps = trend_summary(series)

    parts: list[object] = ["trend", "--input", args.input, "--out-json", args.out_json]
    if args.out_svg is not None:
        parts += ["--out-svg", args.out_svg, "--title", args.title]

    document = report.trend_report(
        series,
        steps,
        command=_command(*parts),
        input_digest=digest,
        warnings=warnings,
    )
    report.validate(document)
    report.write(report.dumps(document), args.out_json, stdout=streams.stdout)
    if args.out_svg is not None:
        report.write(
            plot.render_svg(series, title=args.title),
            args.out_svg,
            stdout=streams.stdout,
        )

    return EXIT_OK


def _load_settings(path: Optional[str]) -> Settings:
    if path is None:
        return settings.load()

    try:
        with open(path, encoding="utf-8") as f:
            config = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot read {path}: {e}") from e

    if not isinstance(config, dict):
        raise ConfigError(f"{path} is not a mapping")

    return settings.load(config)


def _build_parser(stdout: TextIO, stderr: TextIO) -> argparse.ArgumentParser:
    parser_class = functools.partial(_ArgumentParser, stdout=stdout, stderr=stderr)
    parser = parser_class(
        prog=PROG, description="ARIMA forecasting of annual case counts"
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="verbosity level"
    )
    parser.add_argument(
        "--config", type=str, default=None, help="configuration file to use"
    )
    subparsers = parser.add_subparsers(
        dest="command", parser_class=parser_class, help="sub-command help"
    )
    subparsers.required = True

    def add_input(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", required=True, help="surveillance CSV, - for stdin")

    def add_constant(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--no-constant",
            dest="constant",
            action="store_const",
            const=False,
            default=None,
            help="fix the constant at zero",
        )

    def add_title(p: argparse.ArgumentParser) -> None:
        p.add_argument("--title", default="Confirmed measles cases", help="plot title")

    acf_parser = subparsers.add_parser("acf", help="autocorrelation analysis")
    add_input(acf_parser)
    acf_parser.add_argument("--max-lag", type=int, default=None, help="last lag")
    acf_parser.add_argument(
        "--difference", type=int, default=0, help="difference the series first"
    )
    acf_parser.add_argument("--out-json", default="-", help="JSON output")
    acf_parser.set_defaults(func=cmd_acf)

    forecast_parser = subparsers.add_parser("forecast", help="fit and forecast")
    add_input(forecast_parser)
    forecast_parser.add_argument("--order", default=None, help="model order as p,d,q")
    forecast_parser.add_argument("--horizon", type=int, default=None, help="periods")
    forecast_parser.add_argument(
        "--level", type=float, default=None, help="interval coverage"
    )
    add_constant(forecast_parser)
    forecast_parser.add_argument("--out-json", default="-", help="JSON report")
    forecast_parser.add_argument("--out-svg", default=None, help="SVG plot")
    add_title(forecast_parser)
    forecast_parser.set_defaults(func=cmd_forecast)

    select_parser = subparsers.add_parser("select", help="grid search by BIC")
    add_input(select_parser)
    select_parser.add_argument(
        "--max-order", default=None, help="largest orders as p,d,q"
    )
    add_constant(select_parser)
    select_parser.add_argument("--out-json", default="-", help="JSON ranking")
    select_parser.set_defaults(func=cmd_select)

    simulate_parser = subparsers.add_parser("simulate", help="simulate a dataset")
    simulate_parser.add_argument(
        "--phi", type=float, nargs="*", default=[], help="AR coefficients"
    )
    simulate_parser.add_argument(
        "--theta", type=float, nargs="*", default=[], help="MA coefficients"
    )
    simulate_parser.add_argument(
        "--constant", type=float, default=10000.0, help="process constant"
    )
    simulate_parser.add_argument(
        "--sigma2", type=float, default=1e6, help="innovation variance"
    )
    simulate_parser.add_argument("--d", type=int, default=0, help="integration order")
    simulate_parser.add_argument("--n", type=int, default=20, help="periods")
    simulate_parser.add_argument("--seed", type=int, default=0, help="generator seed")
    simulate_parser.add_argument(
        "--start-year", type=int, default=1900, help="first year"
    )
    simulate_parser.add_argument("--region", default="Simulated", help="region name")
    simulate_parser.add_argument("--out-csv", default="-", help="CSV output")
    simulate_parser.set_defaults(func=cmd_simulate)

    export_parser = subparsers.add_parser("export", help="normalize a dataset")
    add_input(export_parser)
    export_parser.add_argument(
        "--national", action="store_true", help="write the national series"
    )
    export_parser.add_argument("--out-csv", default="-", help="CSV output")
    export_parser.set_defaults(func=cmd_export)

    trend_parser = subparsers.add_parser("trend", help="year-over-year changes")
    add_input(trend_parser)
    trend_parser.add_argument("--out-json", default="-", help="JSON output")
    trend_parser.add_argument("--out-svg", default=None, help="SVG plot")
    add_title(trend_parser)
    trend_parser.set_defaults(func=cmd_trend)

    return parser


def main(
    argv: Optional[list[str]] = None,
    *,
    stdin: Optional[TextIO] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    """measlescast main.

    :param argv: command line arguments, without the program name
    :param stdin: input stream
    :param stdout: output stream
    :param stderr: error stream
    :return: exit code
    """
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr

    handler = logging.StreamHandler(stderr)
    handler.setFormatter(logging.Formatter(_LOG_FORMAT))
    previous_level = logger.level
    logger.addHandler(handler)
    logger.setLevel(logging.WARNING)
    try:
        parser = _build_parser(stdout, stderr)
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return int(e.code or 0)

        logger.setLevel(
            {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
        )
        config = _load_settings(args.config)
        return args.func(args, config, Streams(stdin, stdout))
    except MeaslescastError as e:
        code = exit_code(e)
        if code is None:
            raise
        logger.error(str(e))
        return code
    finally:
        logger.removeHandler(handler)
        logger.setLevel(previous_level)


if __name__ == "__main__":
    sys.exit(main())

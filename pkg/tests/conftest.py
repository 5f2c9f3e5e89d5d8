from __future__ import annotations
import os
import functools
from pathlib import Path
from typing import Optional, Sequence
import pytest
from measlescast import arima, datadir, diagnostics, test_utils
from measlescast.series import TimeSeries

DEMO_PATH: Path = Path(test_utils.demo_dataset_path())
"""Absolute path to ``data/philippines_measles_demo.csv``"""

DEMO_YEARS = (2015, 2016, 2017, 2018, 2019)
DEMO_TOTALS = (2700.0, 1500.0, 2400.0, 18000.0, 48000.0)
"""National cases of the demonstration dataset"""

REGIONS = (
    "NCR",
    "CAR",
    "Region I",
    "Region II",
    "Region III",
    "Region IV-A",
    "MIMAROPA",
    "Region V",
    "Region VI",
    "Region VII",
    "Region VIII",
    "Region IX",
    "Region X",
    "Region XI",
    "Region XII",
    "Caraga",
    "BARMM",
)

HEADER = "region,year,cases,deaths\n"


@pytest.fixture(autouse=True)
def isolated_datadir(tmp_path, monkeypatch):
    """Point the data directory to an empty temporary directory."""
    monkeypatch.setenv(datadir.ENV_VAR, str(tmp_path / "datadir"))
    monkeypatch.delenv(diagnostics.NO_PARALLEL_ENV, raising=False)
    return tmp_path / "datadir"


@pytest.fixture
def demo_series() -> TimeSeries:
    return TimeSeries(DEMO_TOTALS, start_label=DEMO_YEARS[0])


def with_config(_fun=None, config: dict = None):
    """Write ``{datadir}/config.yml`` before running the test."""

    def decorator(fun):
        @functools.wraps(fun)
        def wrapper(*args, **kwargs):
            datadir.write_config({} if config is None else config)
            return fun(*args, **kwargs)

        return wrapper

    return decorator if _fun is None else decorator(_fun)


def simulate(
    phi: Sequence[float] = (),
    theta: Sequence[float] = (),
    n: int = 200,
    seed: int = 0,
    *,
    constant: float = 0.0,
    sigma2: float = 1.0,
    d: int = 0,
    start_label: int = 0,
) -> TimeSeries:
    """Simulated series of an ARIMA process."""
    order = arima.ArimaOrder(len(phi), d, len(theta))
    params = arima.ArimaParams(
        phi=phi, theta=theta, constant=constant, sigma2=sigma2
    )
    return arima.simulate(params, order, n, seed, start_label=start_label)


def write_dataset(path: Path, totals: dict[int, Sequence[int]]) -> str:
    """Write a CSV with one row per region and year.

    :param path: destination file
    :param totals: cases of each region, by year
    :return: path as text
    """
    rows = []
    for year, cases in totals.items():
        for region, value in zip(REGIONS, cases):
            rows.append((region, year, value, 0))
    return test_utils.write_csv(str(path), rows)


def main(
    argv: list[str] = None,
    *,
    exit_code: int = 0,
    has_stdout: bool = None,
    has_stderr: bool = None,
    stdin: str = "",
) -> tuple[str, str]:
    # Run measlescast
    code, stdout, stderr = test_utils.run(
        [str(_) for _ in (argv or [])], stdin=stdin
    )

    # Check outputs
    assert code == exit_code, f"exit code {code}, expected {exit_code}: {stderr}"
    if has_stderr is False:
        assert stderr == "", "stderr should be empty"
    elif has_stderr is True:
        assert stderr != "", "stderr should not be empty"
    if has_stdout is False:
        assert stdout == "", "stdout should be empty"
    elif has_stdout is True:
        assert stdout != "", "stdout should not be empty"

    # Return outputs
    return stdout, stderr


def read(path: os.PathLike, encoding: Optional[str] = "utf-8") -> str:
    with open(path, encoding=encoding) as f:
        return f.read()

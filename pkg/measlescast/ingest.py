"""Surveillance data: CSV parsing, validation and national aggregation.

The input format is UTF-8 text with the header ``region,year,cases,deaths``,
one region-year per row, comma separated and without quoting (region names
cannot contain commas). See ``docs/data-format.md``.
"""
from __future__ import annotations

__all__ = [
    "HEADER",
    "EXPECTED_REGIONS",
    "SurveillanceRecord",
    "Dataset",
    "digest",
    "load",
    "parse_csv",
    "export_csv",
    "aggregate_annual",
    "validate_regions",
    "national_dataset",
    "records_from",
]
import hashlib
import re
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

from measlescast._log import logger
from measlescast.errors import (
    DuplicateError,
    EmptyError,
    GapError,
    HeaderError,
    InputError,
    RowError,
)
from measlescast.series import TimeSeries

if TYPE_CHECKING:
    from typing import Iterable, Union

HEADER = ("region", "year", "cases", "deaths")
EXPECTED_REGIONS = 17
"""Number of administrative regions reporting in the Philippines."""

MIN_YEAR = 1900
MAX_YEAR = 2100

_INTEGER_REGEX = re.compile(r"^[+-]?\d+$")


@dataclass(frozen=True)
class SurveillanceRecord:
    """Confirmed cases and deaths of one region in one year.

    :param region: region name
    :param year: calendar year
    :param cases: confirmed cases
    :param deaths: reported deaths
    """

    region: str
    year: int
    cases: int
    deaths: int

    def __post_init__(self) -> None:
        if not self.region.strip():
            raise ValueError("region is empty")
        if "," in self.region:
            raise ValueError(f"region {self.region!r} contains a comma")
        if not MIN_YEAR <= self.year <= MAX_YEAR:
            raise ValueError(f"year {self.year} outside {MIN_YEAR}-{MAX_YEAR}")
        if self.cases < 0:
            raise ValueError(f"negative cases {self.cases}")
        if self.deaths < 0:
            raise ValueError(f"negative deaths {self.deaths}")
        if self.deaths > self.cases:
            raise ValueError(f"deaths {self.deaths} exceed cases {self.cases}")

    @property
    def key(self) -> tuple[str, int]:
        """``(region, year)``"""
        return (self.region, self.year)


@dataclass(frozen=True)
class Dataset:
    """Surveillance records with their provenance.

    :param records: records, no two with the same region and year
    :param source_note: where the records come from
    """

    records: tuple[SurveillanceRecord, ...]
    source_note: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        seen = set()
        for record in self.records:
            if record.key in seen:
                raise ValueError(f"duplicate record for {record.key}")
            seen.add(record.key)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def years(self) -> list[int]:
        """Distinct years, ascending"""
        return sorted({_.year for _ in self.records})

    def regions_by_year(self) -> dict[int, set[str]]:
        """Regions reporting in each year."""
        regions: dict[int, set[str]] = defaultdict(set)
        for record in self.records:
            regions[record.year].add(record.region)

        return dict(regions)


def digest(data: bytes, /) -> str:
    """Content hash identifying an input file, ``sha256:<hex>``."""
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _parse_int(value: str, field: str, lineno: int) -> int:
    if not _INTEGER_REGEX.match(value):
        raise RowError(lineno, f"{field} {value!r} is not an integer")

    return int(value)


def parse_csv(data: Union[bytes, str], /, source_note: str = "") -> Dataset:
    r"""Parse surveillance CSV content.

    .. code-block:: python

        >>> from measlescast import ingest
        >>>
        >>> ds = ingest.parse_csv(b"region,year,cases,deaths\nRegion X,2018,5000,12\n")
        >>> ds.records[0]
        SurveillanceRecord(region='Region X', year=2018, cases=5000, deaths=12)
        >>>

    Fields are trimmed and blank lines skipped.

    Will raise **HeaderError** for a missing or wrong header, **RowError**
    (with the line number) for malformed rows and **DuplicateError** when a
    region appears twice in the same year.

    :param data: file content
    :param source_note: provenance kept on the dataset
    :return: parsed dataset
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise InputError(source_note or "input", f"not UTF-8 ({e.reason})") from e
    else:
        text = data

    lines = text.lstrip("\ufeff").splitlines()
    header_index = next((i for i, line in enumerate(lines) if line.strip()), None)
    if header_index is None:
        raise HeaderError("", ",".join(HEADER))

    header = tuple(_.strip() for _ in lines[header_index].split(","))
    if header != HEADER:
        raise HeaderError(lines[header_index], ",".join(HEADER))

    records = []
    seen: dict[tuple[str, int], int] = {}
    for lineno, line in enumerate(lines[header_index + 1 :], start=header_index + 2):
        if not line.strip():
            continue

        fields = [_.strip() for _ in line.split(",")]
        if len(fields) != len(HEADER):
            raise RowError(lineno, f"expected {len(HEADER)} fields, got {len(fields)}")

        region = fields[0]
        year = _parse_int(fields[1], "year", lineno)
        cases = _parse_int(fields[2], "cases", lineno)
        deaths = _parse_int(fields[3], "deaths", lineno)
        try:
            record = SurveillanceRecord(region, year, cases, deaths)
        except ValueError as e:
            raise RowError(lineno, str(e)) from None

        if record.key in seen:
            raise DuplicateError(record.key, lineno)
        seen[record.key] = lineno
        records.append(record)

    logger.debug(f"parsed {len(records)} records from {source_note or 'input'}")
    return Dataset(records=tuple(records), source_note=source_note)


def load(path: Union[str, Path], /) -> tuple[Dataset, str]:
    """Read and parse a surveillance file.

    Will raise **InputError** if the file cannot be read.

    :param path: CSV file
    :return: ``(dataset, digest)``
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise InputError(str(path), e.strerror or str(e)) from e

    return parse_csv(data, source_note=path.name), digest(data)


def export_csv(ds: Dataset, /) -> str:
    """Serialize a dataset in the format read by :func:`parse_csv`.

    Records keep their order.
    """
    lines = [",".join(HEADER)]
    lines.extend(f"{r.region},{r.year},{r.cases},{r.deaths}" for r in ds.records)
    return "\n".join(lines) + "\n"


def aggregate_annual(ds: Dataset, /) -> TimeSeries:
    r"""National annual series: cases summed over regions.

    .. code-block:: python

        >>> ds = parse_csv("region,year,cases,deaths\nA,2017,2400,3\n")
        >>> aggregate_annual(ds)
        TimeSeries([2400.0], start_label=2017, differencing_applied=0)
        >>>

    Will raise **EmptyError** for a dataset without records and **GapError**
    when years are missing between the first and the last.

    :param ds: dataset
    :return: series starting at the earliest year
    """
    if not ds.records:
        raise EmptyError()

    totals: dict[int, int] = defaultdict(int)
    for record in ds.records:
        totals[record.year] += record.cases

    first, last = min(totals), max(totals)
    missing = [_ for _ in range(first, last + 1) if _ not in totals]
    if missing:
        raise GapError(missing)

    return TimeSeries(
        [totals[_] for _ in range(first, last + 1)], start_label=first
    )


def validate_regions(
    ds: Dataset, /, expected: int = EXPECTED_REGIONS
) -> list[str]:
    """Warn about years where the number of reporting regions is unexpected.

    Never fails: datasets for other countries are legal.

    :param ds: dataset
    :param expected: regions expected each year
    :return: one message per offending year
    """
    warnings = []
    for year, regions in sorted(ds.regions_by_year().items()):
        if len(regions) != expected:
            message = f"{year}: {len(regions)} regions reported, expected {expected}"
            logger.warning(message)
            warnings.append(message)

    return warnings


def national_dataset(
    series: TimeSeries, /, region: str = "National", source_note: str = ""
) -> Dataset:
    """Wrap a case-count series as a single-region dataset.

    Values are rounded to integers; deaths are unknown and set to zero.

    :param series: annual case counts
    :param region: region name of every row
    :param source_note: provenance kept on the dataset
    :return: dataset with one record per period
    """
    return Dataset(
        records=tuple(
            SurveillanceRecord(region, year, int(round(value)), 0)
            for year, value in zip(series.labels, series.values)
        ),
        source_note=source_note,
    )


def records_from(rows: Iterable[tuple[str, int, int, int]], /) -> Dataset:
    """Build a dataset from ``(region, year, cases, deaths)`` tuples."""
    return Dataset(records=tuple(SurveillanceRecord(*_) for _ in rows))

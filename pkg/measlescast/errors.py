"""Exceptions raised by measlescast.

Every error derives from :class:`MeaslescastError`. The command line maps the
intermediate categories to its exit codes (see :mod:`measlescast.main`).
"""
from __future__ import annotations

__all__ = [
    "MeaslescastError",
    "UsageError",
    "ConfigError",
    "DataError",
    "InputError",
    "HeaderError",
    "RowError",
    "DuplicateError",
    "GapError",
    "EmptyError",
    "DegenerateError",
    "NumericalError",
    "NotConvergedError",
    "OrderError",
    "NoModelError",
    "StabilityError",
    "LengthError",
    "ArityError",
    "LagError",
    "DofError",
    "DomainError",
    "HorizonError",
]
from typing import Iterable


class MeaslescastError(Exception):
    """Base for all measlescast errors"""


class UsageError(MeaslescastError):
    """Invalid command-line arguments"""


class ConfigError(MeaslescastError):
    """User configuration is invalid"""


class DataError(MeaslescastError):
    """Input data cannot be used"""


class InputError(DataError):
    def __init__(self, source: str, reason: str):
        super().__init__(f"cannot read {source}: {reason}")
        self.source = source


class HeaderError(DataError):
    def __init__(self, found: str, expected: str):
        super().__init__(f"invalid header {found!r}, expected {expected!r}")
        self.found = found


class RowError(DataError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


class DuplicateError(DataError):
    def __init__(self, key: tuple[str, int], lineno: int):
        super().__init__(
            f"line {lineno}: duplicate record for region {key[0]!r} in {key[1]}"
        )
        self.key = key
        self.lineno = lineno


class GapError(DataError):
    def __init__(self, missing: Iterable[int]):
        self.missing = sorted(missing)
        super().__init__(
            "missing years: {}".format(", ".join(map(str, self.missing)))
        )


class EmptyError(DataError):
    def __init__(self, what: str = "dataset"):
        super().__init__(f"{what} is empty")


class DegenerateError(MeaslescastError, ValueError):
    """The input has no variability to work with"""


class NumericalError(MeaslescastError, ArithmeticError):
    """A computation lost all precision"""


class NotConvergedError(MeaslescastError):
    def __init__(self, what: str = "fit"):
        super().__init__(f"{what} did not converge")


class OrderError(MeaslescastError, ValueError):
    """Model order outside what the engine supports"""


class NoModelError(MeaslescastError):
    def __init__(self, tried: int):
        super().__init__(f"none of the {tried} candidate models converged")
        self.tried = tried


class StabilityError(MeaslescastError, ValueError):
    """Coefficients violate the stationarity or invertibility conditions"""


class LengthError(MeaslescastError, ValueError):
    def __init__(self, length: int, required: int, what: str = "series"):
        super().__init__(
            f"{what} has {length} observations, at least {required} required"
        )
        self.length = length
        self.required = required


class ArityError(MeaslescastError, ValueError):
    """Wrong number of values for the differencing depth"""


class LagError(MeaslescastError, ValueError):
    """Lag outside the usable range"""


class DofError(MeaslescastError, ValueError):
    """No degrees of freedom left for a test"""


class DomainError(MeaslescastError, ValueError):
    """Argument outside the function domain"""


class HorizonError(MeaslescastError, ValueError):
    def __init__(self, horizon: int):
        super().__init__(f"forecast horizon must be at least 1, got {horizon}")
        self.horizon = horizon

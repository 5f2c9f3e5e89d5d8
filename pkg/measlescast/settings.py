"""Defaults, user configuration and their validation."""
from __future__ import annotations

__all__ = ["DEFAULTS", "load_schema", "validate", "load"]
import copy
from typing import TYPE_CHECKING
from pathlib import Path
import yaml
import jsonschema

from measlescast import datadir
from measlescast.errors import ConfigError

if TYPE_CHECKING:
    from typing import Any, Optional, TypedDict

    class ForecastConfig(TypedDict, total=False):
        """Defaults of the ``forecast`` command."""

        order: str
        """Model order as ``p,d,q``."""
        horizon: int
        """Periods to forecast."""
        level: float
        """Prediction interval coverage."""
        constant: bool
        """Estimate a constant."""

    class SelectConfig(TypedDict, total=False):
        """Defaults of the ``select`` command."""

        max_order: str
        """Largest orders as ``p,d,q``."""

    class DiagnosticsConfig(TypedDict, total=False):
        """Residual diagnostics."""

        lags: Optional[int]
        """Ljung-Box lags, automatic when **None**."""

    class IngestConfig(TypedDict, total=False):
        """Input validation."""

        expected_regions: int
        """Regions expected to report each year."""

    class Settings(TypedDict):
        """Configuration from config.yml merged over the defaults."""

        forecast: ForecastConfig
        select: SelectConfig
        diagnostics: DiagnosticsConfig
        ingest: IngestConfig


DEFAULTS: Settings = {
    "forecast": {"order": "1,0,1", "horizon": 5, "level": 0.95, "constant": True},
    "select": {"max_order": "2,2,2"},
    "diagnostics": {"lags": None},
    "ingest": {"expected_regions": 17},
}


def load_schema() -> dict[str, Any]:
    """Load the JSON schema for config.yml files."""
    with open(Path(__file__).parent / "config.yml.schema", encoding="utf-8") as f:
        return yaml.safe_load(f)


def validate(config: dict, /) -> None:
    """Check a configuration against the schema.

    Will raise **ConfigError** with the first violation found.

    :param config: configuration as loaded from ``config.yml``
    """
    try:
        jsonschema.validate(config, load_schema())
    except jsonschema.ValidationError as e:
        location = ".".join(str(_) for _ in e.absolute_path) or "<root>"
        raise ConfigError(f"invalid configuration at {location}: {e.message}") from e


def load(config: Optional[dict] = None, /) -> Settings:
    r"""Merge a configuration over :data:`DEFAULTS`.

    .. code-block:: python

        >>> from measlescast import settings
        >>>
        >>> settings.load({"forecast": {"horizon": 14}})["forecast"]
        {'order': '1,0,1', 'horizon': 14, 'level': 0.95, 'constant': True}
        >>>

    :param config: configuration, defaults to ``{datadir}/config.yml``
    :return: validated settings
    """
    if config is None:
        config = datadir.load_config()

    validate(config)
    merged = copy.deepcopy(DEFAULTS)
    for section, values in config.items():
        merged[section].update(values)

    return merged

"""measlescast has a special directory for storing user configuration."""
from __future__ import annotations

__all__ = ["ENV_VAR", "path", "load_config", "write_config"]
import os
import sys
import pathlib
from typing import Optional
import yaml

from measlescast._log import logger

ENV_VAR = "MEASLESCAST_DATADIR"
"""Environment variable overriding the data directory."""

CONFIG_FILENAME = "config.yml"


def path() -> pathlib.Path:
    """Get absolute path to the data directory.

    * Windows: ``AppData/Roaming/Measlescast``
    * Linux: ``.local/share/measlescast``
    * Mac: ``Library/Application Support/Measlescast``

    ``MEASLESCAST_DATADIR`` takes precedence when set.

    Will raise **NotImplementedError** on unsupported platforms.

    :return: path to data directory
    """
    override = os.environ.get(ENV_VAR)
    if override:
        return pathlib.Path(override).absolute()

    home = pathlib.Path.home().absolute()

    if sys.platform == "win32":
        return home / "AppData" / "Roaming" / "Measlescast"
    elif sys.platform.startswith("linux"):
        return home / ".local" / "share" / "measlescast"
    elif sys.platform == "darwin":
        return home / "Library" / "Application Support" / "Measlescast"

    raise NotImplementedError()


def load_config() -> dict:
    """Load ``{datadir}/config.yml``.

    An empty configuration will be returned if the file is missing or
    cannot be parsed.

    :return: configuration
    """
    try:
        with open(path() / CONFIG_FILENAME, "r", encoding="utf-8") as f:
            config = yaml.safe_load(f.read())
    except FileNotFoundError:
        return {}
    except (OSError, NotImplementedError, yaml.YAMLError) as e:
        logger.warning(f"ignoring unreadable configuration: {e}")
        return {}

    return config if config is not None else {}


def write_config(config: Optional[dict] = None) -> None:
    """Override ``{datadir}/config.yml``.

    :param config: new configuration
    """
    data_dir = path()
    os.makedirs(data_dir, exist_ok=True)

    with open(data_dir / CONFIG_FILENAME, "w", encoding="utf-8") as f:
        f.write(yaml.safe_dump(config if config is not None else {}))

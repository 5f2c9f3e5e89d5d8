"""Tests on configuration and the data directory"""
import copy
import os
import pytest
from measlescast import datadir, settings
from measlescast.errors import ConfigError
import conftest


def test_datadir_env(isolated_datadir):
    assert datadir.path() == isolated_datadir.absolute()


def test_load_config_missing():
    assert datadir.load_config() == {}


def test_write_and_load_config():
    datadir.write_config({"forecast": {"horizon": 3}})
    assert os.path.exists(datadir.path() / datadir.CONFIG_FILENAME)
    assert datadir.load_config() == {"forecast": {"horizon": 3}}


def test_load_config_invalid_yaml():
    os.makedirs(datadir.path(), exist_ok=True)
    with open(datadir.path() / datadir.CONFIG_FILENAME, "w") as f:
        f.write("forecast: [unclosed\n")
    assert datadir.load_config() == {}


def test_defaults():
    assert settings.load({}) == settings.DEFAULTS
    assert settings.DEFAULTS["forecast"]["order"] == "1,0,1"
    assert settings.DEFAULTS["forecast"]["horizon"] == 5
    assert settings.DEFAULTS["forecast"]["level"] == 0.95


def test_load_merges_over_defaults():
    before = copy.deepcopy(settings.DEFAULTS)
    merged = settings.load({"forecast": {"horizon": 14}, "ingest": {"expected_regions": 3}})
    assert merged["forecast"]["horizon"] == 14
    assert merged["forecast"]["order"] == "1,0,1"
    assert merged["ingest"]["expected_regions"] == 3
    assert settings.DEFAULTS == before


@conftest.with_config(config={"select": {"max_order": "1,1,1"}})
def test_load_from_datadir():
    assert settings.load()["select"]["max_order"] == "1,1,1"


@pytest.mark.parametrize(
    "config",
    [
        {"forecast": {"horizon": 0}},
        {"forecast": {"level": 1.5}},
        {"forecast": {"order": "x,y"}},
        {"unknown": {}},
        {"forecast": {"colour": "red"}},
    ],
)
def test_invalid_config(config):
    with pytest.raises(ConfigError):
        settings.load(config)


def test_schema_is_yaml():
    schema = settings.load_schema()
    assert schema["type"] == "object"
    assert set(schema["properties"]) == set(settings.DEFAULTS)

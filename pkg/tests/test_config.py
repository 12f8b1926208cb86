import datetime as dt

import pytest

from gvrisk.config import CONFIG_KEYS
from gvrisk.config import build_config
from gvrisk.config import load_config_file
from gvrisk.config import merge_values
from gvrisk.errors import ConfigurationError
from gvrisk.pipeline import Calibration
from gvrisk.pipeline import EngineConfig
from gvrisk.windows import WindowConfig


def test_defaults():
    cfg = build_config({})
    assert cfg == EngineConfig()
    assert cfg.alpha == 0.05
    assert cfg.window == WindowConfig(width=10, count=5, history=100)
    assert cfg.k_range == (5, 15)
    assert cfg.l_range == (5, 15)
    assert cfg.calibration is Calibration.DAILY
    assert cfg.seed == 0
    assert cfg.baseline is False
    assert cfg.horizons == ()


def test_load_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# S&P500 run\n"
        "\n"
        "alpha = 0.01\n"
        "K = 6   # windows\n"
        "l=12\n"
        "validation-end = 2015-12-31\n"
        "k_range = 5:8\n"
        "baseline = yes\n"
        "calibration = fixed\n"
    )
    values = load_config_file(path)
    assert values == {
        "alpha": "0.01",
        "k": "6",
        "l": "12",
        "validation_end": "2015-12-31",
        "k_range": "5:8",
        "baseline": "yes",
        "calibration": "fixed",
    }

    cfg = build_config(values)
    assert cfg.alpha == 0.01
    assert cfg.window == WindowConfig(width=12, count=6, history=100)
    assert cfg.validation_end == dt.date(2015, 12, 31)
    assert cfg.k_range == (5, 8)
    assert cfg.baseline is True
    assert cfg.calibration is Calibration.FIXED


@pytest.mark.parametrize(
    "text, line",
    [
        ("alpha = 0.05\nthis is not a pair\n", 2),
        ("alpha = 0.05\n= 3\n", 2),
        ("\n\nhorizon = 5\n", 3),
    ],
)
def test_load_file_rejects_bad_lines(tmp_path, text, line):
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    with pytest.raises(ConfigurationError) as info:
        load_config_file(path)
    assert info.value.line == line
    assert f"line={line}" in str(info.value)


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config_file(tmp_path / "nope.cfg")


def test_flags_override_file():
    merged = merge_values(
        {"alpha": "0.01", "k": "6"},
        {"alpha": "0.1", "k": None, "l": None, "k-range": "6:9"},
    )
    assert merged == {"alpha": "0.1", "k": "6", "k_range": "6:9"}


@pytest.mark.parametrize(
    "key, value",
    [
        ("alpha", "high"),
        ("alpha", "0.7"),
        ("k", "1.5"),
        ("n", "2"),
        ("start", "01/02/2020"),
        ("k_range", "5-15"),
        ("baseline", "maybe"),
        ("calibration", "weekly"),
        ("seed", "x"),
        ("horizons", "250;1000"),
        ("horizons", "250,1"),
    ],
)
def test_invalid_values(key, value):
    with pytest.raises(ConfigurationError):
        build_config({key: value})


def test_invalid_value_names_key():
    with pytest.raises(ConfigurationError) as info:
        build_config({"seed": "x"})
    assert info.value.key == "seed"


def test_unset_window_moves_into_ranges():
    cfg = build_config({"k_range": "1:3", "l_range": "20:30"})
    assert cfg.window.count == 3
    assert cfg.window.width == 20


def test_singleton_range():
    cfg = build_config({"k_range": "7", "l_range": "9:9", "k": "7", "l": "9"})
    assert cfg.k_range == (7, 7)
    assert cfg.l_range == (9, 9)


def test_every_key_is_accepted():
    values = {
        "alpha": "0.05",
        "k": "5",
        "l": "10",
        "n": "50",
        "start": "2012-01-02",
        "end": "2012-12-31",
        "validation_start": "2010-01-04",
        "validation_end": "2011-12-30",
        "k_range": "5:15",
        "l_range": "5:15",
        "baseline": "false",
        "seed": "42",
        "calibration": "identity",
        "horizons": "250, 1000,2500",
    }
    assert set(values) == set(CONFIG_KEYS)

    cfg = build_config(values)
    assert cfg.start == dt.date(2012, 1, 2)
    assert cfg.end == dt.date(2012, 12, 31)
    assert cfg.validation_start == dt.date(2010, 1, 4)
    assert cfg.seed == 42
    assert cfg.window.history == 50
    assert cfg.calibration is Calibration.IDENTITY
    assert cfg.horizons == (250, 1000, 2500)

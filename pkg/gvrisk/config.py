"""Flat ``key = value`` configuration files for :class:`EngineConfig`.

Example::

    # S&P500 run
    alpha = 0.05
    k = 5
    l = 10
    n = 100
    start = 2010-07-01
    k_range = 5:15
    calibration = daily
    horizons = 250,1000,2500

Values from the file are overridden by command-line flags of the same name.
"""

from __future__ import annotations
from typing import Any
from typing import Callable
from typing import Mapping
from typing import Optional

from logging import getLogger
import datetime as dt
import os

from gvrisk.errors import ConfigurationError
from gvrisk.pipeline import Calibration
from gvrisk.pipeline import EngineConfig
from gvrisk.windows import WindowConfig

__all__ = (
    "CONFIG_KEYS",
    "load_config_file",
    "normalize_key",
    "merge_values",
    "build_config",
)

COMMENT_START = "#"

logger = getLogger("gvrisk.config")


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected true or false, got {raw!r}")


def _parse_range(raw: str) -> tuple[int, int]:
    lo, sep, hi = raw.partition(":")
    if not sep:
        return int(lo), int(lo)
    return int(lo), int(hi)


def _parse_date(raw: str) -> dt.date:
    return dt.date.fromisoformat(raw.strip())


def _parse_horizons(raw: str) -> tuple[int, ...]:
    return tuple(int(part) for part in raw.split(",") if part.strip())


_CONVERTERS: dict[str, Callable[[str], Any]] = {
    "alpha": float,
    "k": int,
    "l": int,
    "n": int,
    "start": _parse_date,
    "end": _parse_date,
    "validation_start": _parse_date,
    "validation_end": _parse_date,
    "k_range": _parse_range,
    "l_range": _parse_range,
    "baseline": _parse_bool,
    "seed": int,
    "calibration": Calibration,
    "horizons": _parse_horizons,
}

CONFIG_KEYS = tuple(_CONVERTERS)


def normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def load_config_file(file: str | os.PathLike[str]) -> dict[str, str]:
    try:
        with open(file, mode="r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ConfigurationError(
            f"cannot read config file {str(file)!r}: {e.strerror or e}"
        ) from e

    values: dict[str, str] = {}
    for number, line in enumerate(lines, start=1):
        text = line.split(COMMENT_START, 1)[0].strip()
        if not text:
            continue

        key, sep, value = text.partition("=")
        if not sep or not key.strip():
            raise ConfigurationError(
                f"expected 'key = value', got {line.strip()!r}", line=number
            )

        key = normalize_key(key)
        if key not in _CONVERTERS:
            raise ConfigurationError("unknown key", key=key, line=number)

        # NOTE: Values are kept raw here and converted in build_config, so
        # file values and flag values go through the same checks.
        values[key] = value.strip()

    logger.debug(f"Loaded {len(values)} config values from {file}")
    return values


def merge_values(*layers: Mapping[str, Optional[str]]) -> dict[str, str]:
    """Later layers win; ``None`` marks a value the layer does not set."""

    merged: dict[str, str] = {}
    for layer in layers:
        merged.update(
            (normalize_key(k), v) for k, v in layer.items() if v is not None
        )
    return merged


def _convert(values: Mapping[str, str]) -> dict[str, Any]:
    converted: dict[str, Any] = {}
    for key, raw in values.items():
        if key not in _CONVERTERS:
            raise ConfigurationError("unknown key", key=key)
        try:
            converted[key] = _CONVERTERS[key](raw)
        except ValueError as e:
            raise ConfigurationError(
                f"invalid value {raw!r} ({e})", key=key
            ) from None
    return converted


def _within(value: int, bounds: tuple[int, int]) -> int:
    lo, hi = bounds
    return min(max(value, lo), hi)


def build_config(values: Mapping[str, str]) -> EngineConfig:
    """Build and validate an :class:`EngineConfig` from raw string values.

    Unset K and L fall back to their defaults moved into the configured
    ranges, so a grid over ``k_range = 1:3`` needs no explicit ``k``.
    """

    v = _convert(values)
    defaults = EngineConfig()
    k_range = v.get("k_range", defaults.k_range)
    l_range = v.get("l_range", defaults.l_range)

    window = WindowConfig(
        width=v.get("l", _within(defaults.window.width, l_range)),
        count=v.get("k", _within(defaults.window.count, k_range)),
        history=v.get("n", defaults.window.history),
    )

    return EngineConfig(
        alpha=v.get("alpha", defaults.alpha),
        window=window,
        start=v.get("start"),
        end=v.get("end"),
        validation_start=v.get("validation_start"),
        validation_end=v.get("validation_end"),
        k_range=k_range,
        l_range=l_range,
        baseline=v.get("baseline", defaults.baseline),
        seed=v.get("seed", defaults.seed),
        calibration=v.get("calibration", defaults.calibration),
        horizons=v.get("horizons", defaults.horizons),
    )

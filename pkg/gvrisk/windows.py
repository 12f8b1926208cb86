"""Small-window max-mean / min-mean estimation of the local G-normal
parameters.

For a position ``t`` and a shift ``j`` the window is the ``width`` values
ending at ``t - j``. The local mean is taken on the most recent window
(``j = 0``); the lower and upper variances are the min and max of the
unbiased sample variances of the ``count`` windows ``j = 0 .. count - 1``.
An estimate at ``t`` therefore needs ``width + count - 1`` observations up to
and including ``t``.
"""

from __future__ import annotations
from typing import Callable
from typing import NamedTuple
from typing import Sequence

from dataclasses import dataclass
import datetime as dt

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from gvrisk.errors import ConfigurationError
from gvrisk.errors import ContractError
from gvrisk.errors import DomainError
from gvrisk.errors import InsufficientHistory

__all__ = (
    "ReturnSeries",
    "WindowConfig",
    "LocalEstimates",
    "MaxMeanEstimate",
    "window_mean",
    "window_variance",
    "local_estimates",
    "rolling_estimates",
    "phi_max_mean",
)

SYNTHETIC_START = dt.date(2000, 1, 3)


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    dates: tuple[dt.date, ...]
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dates", tuple(self.dates))

        if values.ndim != 1 or len(self.dates) != values.shape[0]:
            raise ContractError(
                f"dates ({len(self.dates)}) and values {values.shape} "
                "must be one-dimensional and aligned"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("values", "non-finite", "returns must be finite")
        for index in range(1, len(self.dates)):
            if self.dates[index] <= self.dates[index - 1]:
                raise ContractError(
                    "dates must be strictly increasing: "
                    f"{self.dates[index - 1]} then {self.dates[index]} "
                    f"at position {index}"
                )

    @classmethod
    def from_values(
        cls, values: ArrayLike, start: dt.date = SYNTHETIC_START
    ) -> ReturnSeries:
        array = np.asarray(values, dtype=np.float64)
        dates = pd.bdate_range(start=start, periods=array.shape[0])
        return cls(tuple(d.date() for d in dates), array)

    def __len__(self) -> int:
        return len(self.dates)

    def index_of(self, day: dt.date) -> int:
        """Position of the first date on or after ``day``."""
        days = np.array(self.dates, dtype="datetime64[D]")
        return int(np.searchsorted(days, np.datetime64(day, "D")))


@dataclass(frozen=True)
class WindowConfig:
    """``width`` = L, ``count`` = K, ``history`` = N."""

    width: int = 10
    count: int = 5
    history: int = 100

    def __post_init__(self) -> None:
        if self.width < 2:
            raise ConfigurationError(
                f"window width L must be at least 2, got {self.width}", key="l"
            )
        if self.count < 1:
            raise ConfigurationError(
                f"window count K must be at least 1, got {self.count}", key="k"
            )
        if self.history < 3:
            raise ConfigurationError(
                "calibration history N must be at least 3, "
                f"got {self.history}",
                key="n",
            )

    @property
    def required_history(self) -> int:
        return self.width + self.count - 1


@dataclass(frozen=True)
class LocalEstimates:
    date: dt.date
    r_hat: float
    var_lo_hat: float
    var_hi_hat: float


class MaxMeanEstimate(NamedTuple):
    kappa_lo: float
    kappa_hi: float


def _window_bounds(series: ReturnSeries, t: int, j: int, width: int) -> slice:
    if not (0 <= t < len(series)):
        raise ContractError(
            f"position t={t} outside series of length {len(series)}"
        )
    if j < 0:
        raise DomainError("j", j, "shift must be nonnegative")
    if width < 1:
        raise DomainError("width", width, "must be positive")

    stop = t - j + 1
    start = stop - width
    if start < 0:
        raise InsufficientHistory(required=width + j, available=t + 1)
    return slice(start, stop)


def window_mean(series: ReturnSeries, t: int, j: int, width: int) -> float:
    return float(np.mean(series.values[_window_bounds(series, t, j, width)]))


def window_variance(
    series: ReturnSeries, t: int, j: int, width: int
) -> float:
    if width < 2:
        raise DomainError(
            "width", width, "sample variance needs at least 2 values"
        )
    window = series.values[_window_bounds(series, t, j, width)]
    return float(np.var(window, ddof=1))


def local_estimates(
    series: ReturnSeries, t: int, cfg: WindowConfig
) -> LocalEstimates:
    return rolling_estimates(series, t, t, cfg)[0]


def rolling_estimates(
    series: ReturnSeries, t_start: int, t_end: int, cfg: WindowConfig
) -> list[LocalEstimates]:
    if t_end < t_start:
        raise ContractError(f"empty range [{t_start}, {t_end}]")
    if t_end >= len(series):
        raise ContractError(
            f"t_end={t_end} outside series of length {len(series)}"
        )
    if t_start + 1 < cfg.required_history:
        raise InsufficientHistory(
            required=cfg.required_history, available=max(t_start + 1, 0)
        )

    # All windows that any date of the range touches: the earliest ends at
    # t_start - (count - 1), the latest at t_end.
    first = t_start - cfg.count + 1 - cfg.width + 1
    windows = sliding_window_view(series.values[first : t_end + 1], cfg.width)
    means = windows.mean(axis=1)
    variances = windows.var(axis=1, ddof=1)

    shifted = sliding_window_view(variances, cfg.count)
    lows = shifted.min(axis=1)
    highs = shifted.max(axis=1)
    recent = means[cfg.count - 1 :]

    return [
        LocalEstimates(
            date=series.dates[t_start + offset],
            r_hat=float(recent[offset]),
            var_lo_hat=float(lows[offset]),
            var_hi_hat=float(highs[offset]),
        )
        for offset in range(t_end - t_start + 1)
    ]


def phi_max_mean(
    samples: Sequence[float] | NDArray[np.float64],
    phi: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    block_size: int,
) -> MaxMeanEstimate:
    """phi-max-mean estimator: the extreme block means of ``phi(samples)``.

    Blocks are consecutive and disjoint; a trailing partial block is dropped.
    """

    if block_size < 1:
        raise DomainError("block_size", block_size, "must be positive")

    x = np.asarray(samples, dtype=np.float64)
    y = np.asarray(phi(x), dtype=np.float64)
    blocks = y.shape[0] // block_size
    if blocks < 2:
        raise InsufficientHistory(
            required=2 * block_size, available=y.shape[0], what="samples"
        )

    block_means = (
        y[: blocks * block_size].reshape(blocks, block_size).mean(axis=1)
    )
    if not np.all(np.isfinite(block_means)):
        raise DomainError("phi", phi, "produced non-finite values")
    return MaxMeanEstimate(float(block_means.min()), float(block_means.max()))

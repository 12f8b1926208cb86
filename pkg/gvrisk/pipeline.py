"""End-to-end G-VaR engine: rolling estimation, AR(1) calibration, one-step
G-VaR forecasts, (K, L) grid search, synthetic data and the rolling-Gaussian
baseline."""

from __future__ import annotations
from typing import Optional

from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from logging import getLogger
import datetime as dt
import enum
import math

import numpy as np

from gvrisk import errors
from gvrisk.arcal import VAR_FLOOR
from gvrisk.arcal import ARCoefficients
from gvrisk.arcal import Forecast
from gvrisk.arcal import calibrate
from gvrisk.arcal import forecast_one_step
from gvrisk.backtest import BacktestReport
from gvrisk.backtest import build_report
from gvrisk.gnormal import g_var
from gvrisk.numerics import std_normal_quantile
from gvrisk.windows import ReturnSeries
from gvrisk.windows import WindowConfig
from gvrisk.windows import rolling_estimates

__all__ = (
    "Calibration",
    "EngineConfig",
    "ForecastRecord",
    "GridCell",
    "GridResult",
    "forecast_range",
    "run_gvar",
    "grid_search",
    "simulate_regime_switching",
    "gaussian_var_baseline",
    "backtest_records",
    "horizon_reports",
)

logger = getLogger("gvrisk.pipeline")


class Calibration(str, enum.Enum):
    DAILY = "daily"
    FIXED = "fixed"
    IDENTITY = "identity"


@dataclass(frozen=True)
class EngineConfig:
    alpha: float = 0.05
    window: WindowConfig = field(default_factory=WindowConfig)
    start: Optional[dt.date] = None
    end: Optional[dt.date] = None
    validation_start: Optional[dt.date] = None
    validation_end: Optional[dt.date] = None
    k_range: tuple[int, int] = (5, 15)
    l_range: tuple[int, int] = (5, 15)
    baseline: bool = False
    seed: int = 0
    calibration: Calibration = Calibration.DAILY
    horizons: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha <= 0.5):
            raise errors.ConfigurationError(
                f"alpha must lie in (0, 0.5], got {self.alpha!r}", key="alpha"
            )

        k_lo, k_hi = self.k_range
        l_lo, l_hi = self.l_range
        if not (1 <= k_lo <= k_hi):
            raise errors.ConfigurationError(
                f"K range must satisfy 1 <= lo <= hi, got {self.k_range}",
                key="k_range",
            )
        if not (2 <= l_lo <= l_hi):
            raise errors.ConfigurationError(
                f"L range must satisfy 2 <= lo <= hi, got {self.l_range}",
                key="l_range",
            )
        if not (k_lo <= self.window.count <= k_hi):
            raise errors.ConfigurationError(
                f"K={self.window.count} outside its range {self.k_range}",
                key="k",
            )
        if not (l_lo <= self.window.width <= l_hi):
            raise errors.ConfigurationError(
                f"L={self.window.width} outside its range {self.l_range}",
                key="l",
            )

        for horizon in self.horizons:
            if horizon < 2:
                raise errors.ConfigurationError(
                    f"horizons need at least 2 dates, got {horizon}",
                    key="horizons",
                )

        for lo, hi, name in (
            (self.start, self.end, "end"),
            (self.validation_start, self.validation_end, "validation_end"),
        ):
            if lo is not None and hi is not None and hi < lo:
                raise errors.ConfigurationError(
                    f"range ends ({hi}) before it starts ({lo})", key=name
                )


@dataclass(frozen=True)
class ForecastRecord:
    date: dt.date
    forecast: Forecast
    g_var: float
    realized_return: float

    @property
    def violation(self) -> bool:
        return self.realized_return < -self.g_var


def _first_forecast_index(window: WindowConfig) -> int:
    # The estimate at s needs width + count - 1 points up to s, and the
    # forecast at f calibrates on the estimates at f - history .. f - 1.
    return window.required_history - 1 + window.history


def forecast_range(
    series: ReturnSeries, cfg: EngineConfig
) -> tuple[int, int]:
    earliest = _first_forecast_index(cfg.window)

    if cfg.start is None:
        first = earliest
        if first >= len(series):
            raise errors.InsufficientHistory(
                required=first + 1, available=len(series)
            )
    else:
        first = series.index_of(cfg.start)
        if first < earliest:
            raise errors.InsufficientHistory(
                required=earliest,
                available=first,
                what="observations before the first forecast date",
            )

    last = len(series) - 1
    if cfg.end is not None:
        last = series.index_of(cfg.end + dt.timedelta(days=1)) - 1

    if last < first:
        raise errors.ContractError(
            f"no forecast dates in "
            f"[{cfg.start or 'first'}, {cfg.end or 'last'}]"
        )
    return first, last


def run_gvar(series: ReturnSeries, cfg: EngineConfig) -> list[ForecastRecord]:
    first, last = forecast_range(series, cfg)
    window = cfg.window

    logger.info(
        f"G-VaR run: alpha={cfg.alpha} K={window.count} L={window.width} "
        f"N={window.history} calibration={cfg.calibration.value} "
        f"dates {series.dates[first]}..{series.dates[last]} "
        f"({last - first + 1})"
    )

    estimates = rolling_estimates(
        series, first - window.history, last - 1, window
    )

    coeffs: Optional[ARCoefficients] = None
    if cfg.calibration is Calibration.IDENTITY:
        coeffs = ARCoefficients.identity()

    records: list[ForecastRecord] = []
    for f in range(first, last + 1):
        offset = f - first
        history = estimates[offset : offset + window.history]

        if coeffs is None or cfg.calibration is Calibration.DAILY:
            coeffs = calibrate(history)

        forecast = forecast_one_step(coeffs, history[-1], date=series.dates[f])
        records.append(
            ForecastRecord(
                date=series.dates[f],
                forecast=forecast,
                g_var=g_var(cfg.alpha, forecast.params()),
                realized_return=float(series.values[f]),
            )
        )

    return records


def gaussian_var_baseline(
    series: ReturnSeries, cfg: EngineConfig
) -> list[ForecastRecord]:
    """Classical VaR from the mean and sample variance of the trailing N
    returns, over the same forecast dates as :func:`run_gvar`."""

    first, last = forecast_range(series, cfg)
    history = cfg.window.history
    z_alpha = std_normal_quantile(cfg.alpha)

    records: list[ForecastRecord] = []
    for f in range(first, last + 1):
        window = series.values[f - history : f]
        mean = float(np.mean(window))
        std = float(np.std(window, ddof=1))
        variance = max(std * std, VAR_FLOOR)

        records.append(
            ForecastRecord(
                date=series.dates[f],
                forecast=Forecast(series.dates[f], mean, variance, variance),
                g_var=-(mean + std * z_alpha),
                realized_return=float(series.values[f]),
            )
        )
    return records


def backtest_records(
    records: list[ForecastRecord], alpha: float
) -> BacktestReport:
    return build_report(
        [r.realized_return for r in records], [r.g_var for r in records], alpha
    )


def horizon_reports(
    records: list[ForecastRecord], alpha: float, horizons: tuple[int, ...]
) -> list[BacktestReport]:
    """One report per trailing horizon, every one ending on the last record.
    Without horizons the whole range is a single report."""

    if not horizons:
        return [backtest_records(records, alpha)]

    reports = []
    for horizon in horizons:
        if horizon > len(records):
            raise errors.InsufficientHistory(
                required=horizon,
                available=len(records),
                what="forecast dates",
            )
        reports.append(backtest_records(records[-horizon:], alpha))
    return reports


@dataclass(frozen=True)
class GridCell:
    count: int
    width: int
    report: Optional[BacktestReport] = None
    error: Optional[str] = None

    def score(self) -> tuple[float, float, int, int]:
        # |alpha_hat - alpha|, then the larger LR_uc, then smaller K and L.
        if self.report is None:
            return (math.inf, math.inf, self.count, self.width)
        return (
            abs(self.report.alpha_hat - self.report.alpha),
            -self.report.lr_uc,
            self.count,
            self.width,
        )


@dataclass(frozen=True)
class GridResult:
    best: tuple[int, int]
    cells: list[GridCell]


def _evaluate_cell(
    series: ReturnSeries, cfg: EngineConfig, count: int, width: int
) -> GridCell:
    cell_cfg = replace(
        cfg,
        window=replace(cfg.window, count=count, width=width),
        start=cfg.validation_start,
        end=cfg.validation_end,
    )
    try:
        records = run_gvar(series, cell_cfg)
        report = backtest_records(records, cfg.alpha)
    except errors.GVaRError as e:
        logger.warning(f"Skipping cell K={count} L={width}", exc_info=e)
        return GridCell(count, width, error=str(e))

    return GridCell(count, width, report=report)


def grid_search(series: ReturnSeries, cfg: EngineConfig) -> GridResult:
    """Pick (K, L) over ``k_range x l_range`` on the validation segment.

    The criterion is the smallest ``|alpha_hat - alpha|``; ties go to the
    larger unconditional-coverage p-value, then to smaller K, then smaller L.
    """

    if (
        cfg.start is not None
        and cfg.validation_end is not None
        and cfg.validation_end >= cfg.start
    ):
        raise errors.ConfigurationError(
            f"validation segment (ends {cfg.validation_end}) overlaps "
            f"the test segment (starts {cfg.start})",
            key="validation_end",
        )

    if cfg.start is not None and cfg.validation_end is None:
        cfg = replace(cfg, validation_end=cfg.start - dt.timedelta(days=1))

    k_lo, k_hi = cfg.k_range
    l_lo, l_hi = cfg.l_range

    if cfg.validation_start is None:
        # Every cell is scored on the same dates: those available to the
        # widest window of the grid.
        widest = replace(cfg.window, count=k_hi, width=l_hi)
        first = _first_forecast_index(widest)
        if first >= len(series):
            raise errors.InsufficientHistory(
                required=first + 1, available=len(series)
            )
        cfg = replace(cfg, validation_start=series.dates[first])

    logger.info(
        f"Grid search K={k_lo}..{k_hi} L={l_lo}..{l_hi} on "
        f"{cfg.validation_start}..{cfg.validation_end or series.dates[-1]}, "
        f"criterion |alpha_hat - alpha|"
    )

    cells = [
        _evaluate_cell(series, cfg, count, width)
        for count in range(k_lo, k_hi + 1)
        for width in range(l_lo, l_hi + 1)
    ]

    scored = [cell for cell in cells if cell.report is not None]
    if not scored:
        raise errors.GridSearchFailed(len(cells))

    best = min(scored, key=GridCell.score)
    logger.info(f"Selected K={best.count} L={best.width}")
    return GridResult(best=(best.count, best.width), cells=cells)


def simulate_regime_switching(
    n: int,
    sigma_lo: float,
    sigma_hi: float,
    mu: float = 0.0,
    switch_prob: float = 0.02,
    seed: int = 0,
    start_high: bool = True,
) -> ReturnSeries:
    """Returns ``mu + sigma_state * xi`` with a two-state volatility chain
    that flips state with probability ``switch_prob`` at every step."""

    if n < 1:
        raise errors.DomainError("n", n, "must be positive")
    if not (0.0 < sigma_lo <= sigma_hi) or not math.isfinite(sigma_hi):
        raise errors.DomainError(
            "sigma_lo",
            (sigma_lo, sigma_hi),
            "must satisfy 0 < sigma_lo <= sigma_hi",
        )
    if not (0.0 <= switch_prob <= 1.0):
        raise errors.DomainError(
            "switch_prob", switch_prob, "must lie in [0, 1]"
        )
    if not math.isfinite(mu):
        raise errors.DomainError("mu", mu, "must be finite")

    rng = np.random.default_rng(seed)
    flips = rng.random(n) < switch_prob
    flips[0] = False
    in_start_state = np.cumsum(flips) % 2 == 0
    high = in_start_state if start_high else ~in_start_state

    sigma = np.where(high, sigma_hi, sigma_lo)
    values = mu + sigma * rng.standard_normal(n)
    return ReturnSeries.from_values(values)

"""CSV ingestion and report emission.

Input price files have the header ``date,close`` with ISO-8601 dates in
ascending order. Output tables are comma separated with floats rendered to
6 significant digits:

- per-date table: ``date,z,r_tilde,sigma_lo,sigma_hi,g_var,violation``
- summary table: ``model,horizon,alpha_hat,lr_uc,lr_ind,mean_var``
"""

from __future__ import annotations
from typing import IO
from typing import Sequence
from typing import Union

from logging import getLogger
from pathlib import Path
import datetime as dt
import io
import os

import numpy as np
import pandas as pd

from gvrisk.arcal import Forecast
from gvrisk.backtest import BacktestReport
from gvrisk.errors import ConfigurationError
from gvrisk.errors import ContractError
from gvrisk.errors import GVaRError
from gvrisk.errors import IngestionError
from gvrisk.pipeline import ForecastRecord
from gvrisk.pipeline import GridResult
from gvrisk.windows import ReturnSeries

__all__ = (
    "PRICE_COLUMNS",
    "FORECAST_COLUMNS",
    "SUMMARY_COLUMNS",
    "GRID_COLUMNS",
    "PDE_COLUMNS",
    "load_prices",
    "prices_frame",
    "returns_frame",
    "forecast_frame",
    "summary_frame",
    "render",
    "deliver",
    "emit_report",
    "write_prices",
    "grid_frame",
    "pde_frame",
    "read_forecast_table",
)

PRICE_COLUMNS = ("date", "close")
FORECAST_COLUMNS = (
    "date",
    "z",
    "r_tilde",
    "sigma_lo",
    "sigma_hi",
    "g_var",
    "violation",
)
SUMMARY_COLUMNS = (
    "model",
    "horizon",
    "alpha_hat",
    "lr_uc",
    "lr_ind",
    "mean_var",
)
GRID_COLUMNS = (
    "k",
    "l",
    "alpha_hat",
    "score",
    "lr_uc",
    "lr_ind",
    "mean_var",
    "selected",
    "error",
)
PDE_COLUMNS = ("x", "closed_form", "numeric", "difference")

FORECAST_TABLE = "forecasts.csv"
SUMMARY_TABLE = "summary.csv"
FLOAT_FORMAT = "%.6g"

Destination = Union[str, "os.PathLike[str]", IO[str]]

logger = getLogger("gvrisk.tables")


def _read_text_table(path: str | os.PathLike[str]) -> pd.DataFrame:
    # Blank lines are read as empty rows and dropped afterwards, so the
    # index keeps each row's position in the file: line = index + 2.
    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            skip_blank_lines=False,
        )
    except pd.errors.EmptyDataError:
        raise IngestionError(str(path), None, "file is empty") from None
    except pd.errors.ParserError as e:
        raise IngestionError(str(path), None, str(e).strip()) from e
    except OSError as e:
        raise IngestionError(str(path), None, e.strerror or str(e)) from e

    if frame.empty:
        return frame

    frame = frame.fillna("")
    blank = frame.apply(lambda column: column.str.strip() == "").all(axis=1)
    return frame[~blank]


def _line_of(frame: pd.DataFrame, row: int) -> int:
    return int(frame.index[row]) + 2


def load_prices(path: str | os.PathLike[str]) -> ReturnSeries:
    frame = _read_text_table(path)

    if tuple(c.strip() for c in frame.columns) != PRICE_COLUMNS:
        raise IngestionError(
            str(path), 1, f"expected header {','.join(PRICE_COLUMNS)!r}, "
            f"got {','.join(frame.columns)!r}"
        )
    if len(frame) < 2:
        raise IngestionError(
            str(path), None, f"need at least 2 price rows, got {len(frame)}"
        )

    dates = pd.to_datetime(
        frame["date"].str.strip(), format="%Y-%m-%d", errors="coerce"
    )
    closes = pd.to_numeric(frame["close"].str.strip(), errors="coerce")

    def fail(row: int, reason: str) -> IngestionError:
        return IngestionError(str(path), _line_of(frame, row), reason)

    missing = dates.isna().to_numpy() | closes.isna().to_numpy()
    unparsable = np.flatnonzero(missing)
    if unparsable.size:
        row = int(unparsable[0])
        raw = ",".join(frame.iloc[row].tolist())
        raise fail(row, f"unparsable row {raw!r}")

    prices = closes.to_numpy(dtype=np.float64)
    nonpositive = np.flatnonzero(~(np.isfinite(prices) & (prices > 0.0)))
    if nonpositive.size:
        row = int(nonpositive[0])
        raise fail(
            row,
            f"price must be strictly positive and finite, got {prices[row]!r}",
        )

    days = dates.to_numpy(dtype="datetime64[D]")
    unordered = np.flatnonzero(np.diff(days) <= np.timedelta64(0, "D"))
    if unordered.size:
        row = int(unordered[0]) + 1
        raise fail(
            row,
            f"date {days[row]} does not follow {days[row - 1]} "
            "(duplicate or unordered)",
        )

    series = ReturnSeries(
        tuple(d.date() for d in dates.iloc[1:]),
        100.0 * np.diff(np.log(prices)),
    )
    logger.info(
        f"Ingested {len(frame)} prices from {path}: {len(series)} returns "
        f"{series.dates[0]}..{series.dates[-1]}"
    )
    return series


def prices_frame(
    series: ReturnSeries, start_price: float = 100.0
) -> pd.DataFrame:
    """Price path whose log-returns are ``series``; the opening price sits on
    the business day before the first return."""

    opening = pd.bdate_range(end=series.dates[0], periods=2)[0].date()
    log_path = np.concatenate(([0.0], np.cumsum(series.values) / 100.0))
    return pd.DataFrame(
        {
            "date": [opening, *series.dates],
            "close": start_price * np.exp(log_path),
        },
        columns=list(PRICE_COLUMNS),
    )


def returns_frame(series: ReturnSeries) -> pd.DataFrame:
    return pd.DataFrame({"date": list(series.dates), "z": series.values})


def forecast_frame(records: Sequence[ForecastRecord]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "date": [r.date for r in records],
            "z": [r.realized_return for r in records],
            "r_tilde": [r.forecast.r_tilde for r in records],
            "sigma_lo": [r.forecast.sigma_lo for r in records],
            "sigma_hi": [r.forecast.sigma_hi for r in records],
            "g_var": [r.g_var for r in records],
            "violation": [int(r.violation) for r in records],
        },
        columns=list(FORECAST_COLUMNS),
    )


def summary_frame(rows: Sequence[tuple[str, BacktestReport]]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            (model, r.horizon, r.alpha_hat, r.lr_uc, r.lr_ind, r.mean_var)
            for model, r in rows
        ],
        columns=list(SUMMARY_COLUMNS),
    )


def render(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(
        buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
    )
    return buffer.getvalue()


def _write_file(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, mode="w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise ConfigurationError(
            f"cannot write {str(path)!r}: {e.strerror or e}", key="output"
        ) from e
    logger.debug(f"Wrote {path}")


def deliver(text: str, destination: Destination, name: str) -> None:
    """Write ``text`` to a stream, or as file ``name`` inside the directory
    ``destination``."""

    if isinstance(destination, (str, os.PathLike)):
        _write_file(Path(destination) / name, text)
    else:
        destination.write(text)


def emit_report(
    records: Sequence[ForecastRecord],
    report: BacktestReport | None,
    destination: Destination,
    *,
    model: str = "G-VaR",
    extra: Sequence[tuple[str, BacktestReport]] = (),
) -> None:
    """Write the per-date table and, when ``report`` is given, the summary.

    A path is taken as a directory receiving ``forecasts.csv`` and
    ``summary.csv``; a text stream receives both tables separated by a blank
    line.
    """

    if not records:
        raise ContractError("cannot emit a report without forecast records")

    table = render(forecast_frame(records))
    if report is None:
        deliver(table, destination, FORECAST_TABLE)
        return

    summary = render(summary_frame([(model, report), *extra]))
    if isinstance(destination, (str, os.PathLike)):
        deliver(table, destination, FORECAST_TABLE)
        deliver(summary, destination, SUMMARY_TABLE)
        logger.info(f"Wrote {len(records)} forecast rows to {destination}")
    else:
        deliver(f"{table}\n{summary}", destination, FORECAST_TABLE)


def write_prices(
    series: ReturnSeries,
    destination: str | os.PathLike[str] | IO[str],
    start_price: float = 100.0,
) -> None:
    text = render(prices_frame(series, start_price))
    if isinstance(destination, (str, os.PathLike)):
        _write_file(Path(destination), text)
        logger.info(f"Wrote {len(series) + 1} prices to {destination}")
    else:
        destination.write(text)


def grid_frame(result: GridResult) -> pd.DataFrame:
    """Score table of every (K, L) cell; failed cells keep their reason and
    leave the statistics empty."""

    rows = []
    for cell in result.cells:
        report = cell.report
        rows.append(
            {
                "k": cell.count,
                "l": cell.width,
                "alpha_hat": None if report is None else report.alpha_hat,
                "score": None if report is None else cell.score()[0],
                "lr_uc": None if report is None else report.lr_uc,
                "lr_ind": None if report is None else report.lr_ind,
                "mean_var": None if report is None else report.mean_var,
                "selected": int((cell.count, cell.width) == result.best),
                "error": cell.error or "",
            }
        )
    return pd.DataFrame(rows, columns=list(GRID_COLUMNS))


def pde_frame(
    rows: Sequence[tuple[float, float, float, float]],
) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=list(PDE_COLUMNS))


def read_forecast_table(
    path: str | os.PathLike[str],
) -> list[ForecastRecord]:
    frame = _read_text_table(path)
    if tuple(frame.columns) != FORECAST_COLUMNS:
        raise IngestionError(
            str(path), 1, f"expected header {','.join(FORECAST_COLUMNS)!r}"
        )

    records = []
    for row, item in enumerate(frame.itertuples(index=False)):
        try:
            day = dt.date.fromisoformat(item.date)
            sigma_lo = float(item.sigma_lo)
            sigma_hi = float(item.sigma_hi)
            forecast = Forecast(
                day, float(item.r_tilde), sigma_hi**2, sigma_lo**2
            )
            records.append(
                ForecastRecord(day, forecast, float(item.g_var), float(item.z))
            )
        except (ValueError, GVaRError) as e:
            line = _line_of(frame, row)
            raise IngestionError(str(path), line, str(e)) from e
    return records

"""First-order autoregressive calibration of the local estimate series and the
one-step-ahead forecast of the G-normal parameters."""

from __future__ import annotations
from typing import Optional
from typing import Sequence

from dataclasses import dataclass
from dataclasses import field
import datetime as dt

import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray

from gvrisk.errors import ContractError
from gvrisk.errors import DomainError
from gvrisk.errors import InsufficientHistory
from gvrisk.errors import SingularFit
from gvrisk.gnormal import GNormalParams
from gvrisk.windows import LocalEstimates

__all__ = (
    "VAR_FLOOR",
    "ARFit",
    "ARCoefficients",
    "Forecast",
    "fit_ar1",
    "calibrate",
    "forecast_one_step",
)

VAR_FLOOR = 1e-8


@dataclass(frozen=True, eq=False)
class ARFit:
    intercept: float
    slope: float
    residuals: NDArray[np.float64] = field(repr=False)
    n_pairs: int

    def predict(self, previous: float) -> float:
        return self.intercept + self.slope * previous


@dataclass(frozen=True)
class ARCoefficients:
    mean_fit: ARFit
    var_hi_fit: ARFit
    var_lo_fit: ARFit

    @classmethod
    def identity(cls) -> ARCoefficients:
        """Coefficients that forecast the latest estimates unchanged."""
        fit = ARFit(0.0, 1.0, np.empty(0, dtype=np.float64), 0)
        return cls(fit, fit, fit)


@dataclass(frozen=True)
class Forecast:
    date: dt.date
    r_tilde: float
    var_hi_tilde: float
    var_lo_tilde: float

    def __post_init__(self) -> None:
        if not (0.0 < self.var_lo_tilde <= self.var_hi_tilde):
            raise DomainError(
                "var_lo_tilde",
                self.var_lo_tilde,
                f"must satisfy 0 < var_lo <= var_hi={self.var_hi_tilde!r}",
            )

    @property
    def sigma_lo(self) -> float:
        return float(np.sqrt(self.var_lo_tilde))

    @property
    def sigma_hi(self) -> float:
        return float(np.sqrt(self.var_hi_tilde))

    def params(self) -> GNormalParams:
        return GNormalParams.from_variances(
            self.r_tilde, self.var_lo_tilde, self.var_hi_tilde
        )


def fit_ar1(values: ArrayLike, series: str = "series") -> ARFit:
    y = np.asarray(values, dtype=np.float64)
    if y.ndim != 1:
        raise ContractError(f"{series}: expected a one-dimensional series")
    if y.shape[0] < 3:
        raise InsufficientHistory(
            required=3, available=y.shape[0], what=series
        )
    if not np.all(np.isfinite(y)):
        raise DomainError(series, "non-finite", "values must be finite")

    lagged = y[:-1]
    target = y[1:]
    if np.all(lagged == lagged[0]):
        raise SingularFit((series,))

    design = np.column_stack((np.ones_like(lagged), lagged))
    coefficients, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < 2:
        raise SingularFit((series,))

    intercept, slope = float(coefficients[0]), float(coefficients[1])
    residuals = target - (intercept + slope * lagged)
    residuals.setflags(write=False)
    return ARFit(intercept, slope, residuals, int(lagged.shape[0]))


def calibrate(history: Sequence[LocalEstimates]) -> ARCoefficients:
    columns = {
        "r_hat": [e.r_hat for e in history],
        "var_hi_hat": [e.var_hi_hat for e in history],
        "var_lo_hat": [e.var_lo_hat for e in history],
    }

    fits: dict[str, ARFit] = {}
    singular: list[str] = []
    for name, values in columns.items():
        try:
            fits[name] = fit_ar1(values, series=name)
        except SingularFit:
            singular.append(name)

    if singular:
        raise SingularFit(tuple(singular))

    return ARCoefficients(
        mean_fit=fits["r_hat"],
        var_hi_fit=fits["var_hi_hat"],
        var_lo_fit=fits["var_lo_hat"],
    )


def forecast_one_step(
    coeffs: ARCoefficients,
    latest: LocalEstimates,
    date: Optional[dt.date] = None,
) -> Forecast:
    """Apply the fitted lines to ``latest``; variances are floored at
    ``VAR_FLOOR`` and the lower one is capped by the upper one."""

    var_hi = max(coeffs.var_hi_fit.predict(latest.var_hi_hat), VAR_FLOOR)
    var_lo = max(coeffs.var_lo_fit.predict(latest.var_lo_hat), VAR_FLOOR)
    var_lo = min(var_lo, var_hi)

    return Forecast(
        date=latest.date if date is None else date,
        r_tilde=coeffs.mean_fit.predict(latest.r_hat),
        var_hi_tilde=var_hi,
        var_lo_tilde=var_lo,
    )

"""Violation counting and the two likelihood-ratio backtests of a VaR
forecast sequence: unconditional coverage (Kupiec) and first-order
independence (Christoffersen).

A date is a violation when the realized return is strictly below the negated
VaR forecast. Consecutive dates form pairs; ``mab`` counts pairs whose first
date has state ``a`` and second date state ``b`` (1 = violation).
"""

from __future__ import annotations
from typing import NamedTuple
from typing import Optional
from typing import Sequence

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from numpy.typing import NDArray
from scipy.special import xlogy

from gvrisk.errors import ContractError
from gvrisk.errors import DomainError
from gvrisk.numerics import chi2_df1_sf

__all__ = (
    "ViolationCounts",
    "LikelihoodRatio",
    "BacktestReport",
    "violation_flags",
    "count_violations",
    "counts_from_flags",
    "lr_uc",
    "lr_ind",
    "build_report",
)


@dataclass(frozen=True)
class ViolationCounts:
    m00: int
    m01: int
    m10: int
    m11: int

    def __post_init__(self) -> None:
        for name in ("m00", "m01", "m10", "m11"):
            if getattr(self, name) < 0:
                raise DomainError(
                    name, getattr(self, name), "must be nonnegative"
                )

    @property
    def m0(self) -> int:
        return self.m00 + self.m01

    @property
    def m1(self) -> int:
        return self.m10 + self.m11

    @property
    def pairs(self) -> int:
        return self.m0 + self.m1


class LikelihoodRatio(NamedTuple):
    statistic: float
    p_value: float


@dataclass(frozen=True)
class BacktestReport:
    counts: ViolationCounts
    alpha: float
    alpha_hat: float
    pi01: Optional[float]
    pi11: Optional[float]
    pi: float
    t1: float
    t2: float
    lr_uc: float
    lr_ind: float
    mean_var: float
    horizon: int


def _aligned(
    returns: ArrayLike, var_forecasts: ArrayLike
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    z = np.asarray(returns, dtype=np.float64)
    var = np.asarray(var_forecasts, dtype=np.float64)
    if z.ndim != 1 or z.shape != var.shape:
        raise ContractError(
            f"returns {z.shape} and VaR forecasts {var.shape} are not aligned"
        )
    return z, var


def violation_flags(
    returns: ArrayLike, var_forecasts: ArrayLike
) -> NDArray[np.bool_]:
    z, var = _aligned(returns, var_forecasts)
    return z < -var


def counts_from_flags(
    flags: Sequence[bool] | NDArray[np.bool_],
) -> ViolationCounts:
    v = np.asarray(flags, dtype=bool)
    if v.shape[0] < 2:
        raise ContractError(
            f"need at least 2 dates to form a pair, got {v.shape[0]}"
        )

    first, second = v[:-1], v[1:]
    return ViolationCounts(
        m00=int(np.count_nonzero(~first & ~second)),
        m01=int(np.count_nonzero(~first & second)),
        m10=int(np.count_nonzero(first & ~second)),
        m11=int(np.count_nonzero(first & second)),
    )


def count_violations(
    returns: ArrayLike, var_forecasts: ArrayLike
) -> ViolationCounts:
    return counts_from_flags(violation_flags(returns, var_forecasts))


def lr_uc(counts: ViolationCounts, alpha: float) -> LikelihoodRatio:
    if not (0.0 < alpha < 1.0):
        raise DomainError(
            "alpha", alpha, "must lie in the open interval (0, 1)"
        )
    if counts.pairs < 1:
        raise ContractError("unconditional coverage test on an empty sample")

    m0, m1 = counts.m0, counts.m1
    alpha_hat = m1 / (m0 + m1)

    t1 = 2.0 * float(
        xlogy(m1, alpha_hat / alpha)
        + xlogy(m0, (1.0 - alpha_hat) / (1.0 - alpha))
    )
    t1 = max(t1, 0.0)
    return LikelihoodRatio(t1, chi2_df1_sf(t1))


def _rate(hits: int, total: int) -> Optional[float]:
    return hits / total if total > 0 else None


def _bernoulli_loglik(
    failures: int, successes: int, p: Optional[float]
) -> float:
    # An undefined rate only occurs when both exponents are zero.
    if p is None:
        return 0.0
    return float(xlogy(failures, 1.0 - p) + xlogy(successes, p))


def lr_ind(counts: ViolationCounts) -> LikelihoodRatio:
    if counts.pairs < 1:
        raise ContractError("independence test on an empty sample")

    pi01 = _rate(counts.m01, counts.m00 + counts.m01)
    pi11 = _rate(counts.m11, counts.m10 + counts.m11)
    pi = _rate(counts.m01 + counts.m11, counts.pairs)

    markov = _bernoulli_loglik(counts.m00, counts.m01, pi01)
    markov += _bernoulli_loglik(counts.m10, counts.m11, pi11)
    independent = _bernoulli_loglik(
        counts.m00 + counts.m10, counts.m01 + counts.m11, pi
    )

    t2 = max(2.0 * (markov - independent), 0.0)
    return LikelihoodRatio(t2, chi2_df1_sf(t2))


def build_report(
    returns: ArrayLike, var_forecasts: ArrayLike, alpha: float
) -> BacktestReport:
    z, var = _aligned(returns, var_forecasts)
    counts = count_violations(z, var)
    uc = lr_uc(counts, alpha)
    ind = lr_ind(counts)

    return BacktestReport(
        counts=counts,
        alpha=alpha,
        alpha_hat=counts.m1 / counts.pairs,
        pi01=_rate(counts.m01, counts.m00 + counts.m01),
        pi11=_rate(counts.m11, counts.m10 + counts.m11),
        pi=(counts.m01 + counts.m11) / counts.pairs,
        t1=uc.statistic,
        t2=ind.statistic,
        lr_uc=uc.p_value,
        lr_ind=ind.p_value,
        mean_var=float(np.mean(var)),
        horizon=int(z.shape[0]),
    )

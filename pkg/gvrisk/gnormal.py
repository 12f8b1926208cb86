"""G-normal distribution N(mu, [sigma_lo^2, sigma_hi^2]): generator, worst-case
CDF, quantile and G-VaR.

The worst-case CDF ``F(x) = E_G[1{xi <= x}]`` is implemented in its
continuous form, split at ``x = mu``::

    x <= mu:  2 sigma_hi / (sigma_hi + sigma_lo) * Phi((x - mu) / sigma_hi)
    x >  mu:  1 - 2 sigma_lo / (sigma_hi + sigma_lo) * Phi((mu - x) / sigma_lo)

The commonly printed variant splits at ``x = 0`` and reuses ``2 sigma_hi`` in
the upper branch; that function jumps at the split point whenever
``sigma_lo != sigma_hi``. The two branch masses above, ``sigma_hi / (sigma_hi
+ sigma_lo)`` and ``sigma_lo / (sigma_hi + sigma_lo)``, add up to one, and the
result agrees with the G-heat solution ``u(1, x)`` computed in
:mod:`gvrisk.gheat` (see ``tests/test_gheat.py``).
"""

from __future__ import annotations

from dataclasses import dataclass
import math

from gvrisk.errors import DomainError
from gvrisk.numerics import std_normal_cdf
from gvrisk.numerics import std_normal_quantile

__all__ = ("GNormalParams", "g_function", "g_cdf", "g_quantile", "g_var")


@dataclass(frozen=True)
class GNormalParams:
    mu: float
    sigma_lo: float
    sigma_hi: float

    def __post_init__(self) -> None:
        for name in ("mu", "sigma_lo", "sigma_hi"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(name, value, "must be finite")

        if self.sigma_hi <= 0.0:
            raise DomainError("sigma_hi", self.sigma_hi, "must be positive")

        if not (0.0 <= self.sigma_lo <= self.sigma_hi):
            raise DomainError(
                "sigma_lo",
                self.sigma_lo,
                f"must satisfy 0 <= sigma_lo <= sigma_hi={self.sigma_hi!r}",
            )

    @classmethod
    def from_variances(
        cls, mu: float, var_lo: float, var_hi: float
    ) -> GNormalParams:
        if var_lo < 0.0 or var_hi < 0.0:
            raise DomainError(
                "variance", (var_lo, var_hi), "variances must be nonnegative"
            )
        return cls(mu, math.sqrt(var_lo), math.sqrt(var_hi))

    @property
    def var_lo(self) -> float:
        return self.sigma_lo * self.sigma_lo

    @property
    def var_hi(self) -> float:
        return self.sigma_hi * self.sigma_hi

    @property
    def left_mass(self) -> float:
        """Worst-case probability of ``xi <= mu``."""
        return self.sigma_hi / (self.sigma_hi + self.sigma_lo)


def g_function(a: float, p: GNormalParams) -> float:
    if not math.isfinite(a):
        raise DomainError("a", a, "must be finite")
    return 0.5 * (p.var_hi * max(a, 0.0) - p.var_lo * max(-a, 0.0))


def _require_nondegenerate(p: GNormalParams) -> None:
    if p.sigma_lo <= 0.0:
        raise DomainError(
            "sigma_lo", p.sigma_lo, "must be positive for the worst-case CDF"
        )


def g_cdf(x: float, p: GNormalParams) -> float:
    _require_nondegenerate(p)

    total = p.sigma_hi + p.sigma_lo
    if x <= p.mu:
        z = (x - p.mu) / p.sigma_hi
        return 2.0 * p.sigma_hi / total * std_normal_cdf(z)
    return 1.0 - 2.0 * p.sigma_lo / total * std_normal_cdf(
        -(x - p.mu) / p.sigma_lo
    )


def g_quantile(alpha: float, p: GNormalParams) -> float:
    if not (0.0 < alpha < 1.0):
        raise DomainError(
            "alpha", alpha, "must lie in the open interval (0, 1)"
        )
    _require_nondegenerate(p)

    total = p.sigma_hi + p.sigma_lo
    branch = p.left_mass

    if alpha == branch:
        return p.mu

    if alpha < branch:
        return p.mu + p.sigma_hi * std_normal_quantile(
            alpha * total / (2.0 * p.sigma_hi)
        )
    return p.mu - p.sigma_lo * std_normal_quantile(
        (1.0 - alpha) * total / (2.0 * p.sigma_lo)
    )


def g_var(alpha: float, p: GNormalParams) -> float:
    return -g_quantile(alpha, p)

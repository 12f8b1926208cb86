"""Explicit monotone finite-difference solver for the G-heat equation

    du/dt = G(d2u/dx2),    u(0, x) = phi(x),

on a truncated domain with Dirichlet ends pinned at ``phi``'s boundary
values. Each step applies the G-function to the central second difference,
which keeps the scheme monotone as long as ``dt * sigma_hi^2 / dx^2 <= 1``;
we insist on 0.9.

The solver is the oracle behind :func:`numeric_g_cdf` (the worst-case CDF is
``u(1, x - mu)`` for the indicator initial data ``1{x >= 0}``) and
:func:`expectation_of` (``E_G[phi(Z)] = u(1, 0)`` for the initial data
``z -> phi(z + mu)``).
"""

from __future__ import annotations
from typing import Callable
from typing import Optional

from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from functools import lru_cache
from logging import getLogger
import math
import sys

import numpy as np
from numpy.typing import NDArray

if sys.version_info >= (3, 10):
    from typing import TypeAlias
else:
    from typing_extensions import TypeAlias

from gvrisk.errors import ConfigurationError
from gvrisk.errors import DomainError
from gvrisk.errors import OutsideTrustedInterior
from gvrisk.gnormal import GNormalParams
from gvrisk.gnormal import g_cdf

__all__ = (
    "GridSpec",
    "PDEGrid",
    "Payoff",
    "indicator_payoff",
    "solve_gheat",
    "numeric_g_cdf",
    "numeric_g_cdf_table",
    "expectation_of",
)

Payoff: TypeAlias = Callable[[NDArray[np.float64]], NDArray[np.float64]]

STABILITY_LIMIT = 0.9
TRUSTED_FRACTION = 0.8

logger = getLogger("gvrisk.gheat")


@dataclass(frozen=True)
class GridSpec:
    """How to lay out the grid. Unset bounds default to ``+-half_width *
    sigma_hi`` and an unset ``dt`` to ``cfl * dx^2 / sigma_hi^2``."""

    nx: int = 1601
    half_width: float = 8.0
    cfl: float = STABILITY_LIMIT
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    dt: Optional[float] = None


@dataclass(eq=False)
class PDEGrid:
    x_min: float
    x_max: float
    nx: int
    dx: float
    dt: float
    t: float
    steps: int
    u: NDArray[np.float64] = field(repr=False)

    @property
    def x(self) -> NDArray[np.float64]:
        return self.x_min + self.dx * np.arange(self.nx, dtype=np.float64)

    def trusted_bounds(self) -> tuple[float, float]:
        margin = 0.5 * (1.0 - TRUSTED_FRACTION) * (self.x_max - self.x_min)
        return self.x_min + margin, self.x_max - margin

    def interpolate(self, x: float) -> float:
        return float(np.interp(x, self.x, self.u))


def indicator_payoff(x: NDArray[np.float64]) -> NDArray[np.float64]:
    """``1{x >= 0}`` with the node at the origin set to 1/2."""

    x = np.asarray(x, dtype=np.float64)
    scale = max(float(np.max(np.abs(x), initial=0.0)), 1.0)
    at_origin = np.abs(x) <= 1e-12 * scale
    return np.where(at_origin, 0.5, np.where(x > 0.0, 1.0, 0.0))


def _layout(
    p: GNormalParams, spec: GridSpec
) -> tuple[float, float, float, float]:
    x_min = -spec.half_width * p.sigma_hi if spec.x_min is None else spec.x_min
    x_max = spec.half_width * p.sigma_hi if spec.x_max is None else spec.x_max

    if spec.nx < 3:
        raise ConfigurationError(
            f"nx must be at least 3, got {spec.nx}", key="nx"
        )
    if not (x_min < 0.0 < x_max):
        raise ConfigurationError(
            f"domain must straddle the origin, got [{x_min}, {x_max}]"
        )

    dx = (x_max - x_min) / (spec.nx - 1)
    dt = spec.cfl * dx * dx / p.var_hi if spec.dt is None else spec.dt

    ratio = dt * p.var_hi / (dx * dx)
    if dt <= 0.0 or ratio > STABILITY_LIMIT:
        raise ConfigurationError(
            f"unstable grid: dt*sigma_hi^2/dx^2={ratio:.6g} "
            f"exceeds {STABILITY_LIMIT} (dt={dt:.6g}, dx={dx:.6g})",
            key="dt",
        )
    return x_min, x_max, dx, dt


def solve_gheat(
    p: GNormalParams,
    phi0: Payoff,
    t_final: float,
    spec: GridSpec | None = None,
) -> PDEGrid:
    if p.mu != 0.0:
        raise DomainError(
            "mu", p.mu, "the G-heat solve works on centered data"
        )
    if not (t_final > 0.0 and math.isfinite(t_final)):
        raise DomainError("t_final", t_final, "must be positive and finite")

    spec = spec or GridSpec()
    x_min, x_max, dx, dt_max = _layout(p, spec)

    steps = math.ceil(t_final / dt_max)
    dt = t_final / steps

    x = x_min + dx * np.arange(spec.nx, dtype=np.float64)
    u = np.array(phi0(x), dtype=np.float64)
    if u.shape != x.shape or not np.all(np.isfinite(u)):
        raise DomainError("phi0", phi0, "must map the grid to finite values")

    logger.debug(
        f"G-heat solve: sigma=[{p.sigma_lo}, {p.sigma_hi}] nx={spec.nx} "
        f"dx={dx:.6g} dt={dt:.6g} steps={steps}"
    )

    up = 0.5 * dt * p.var_hi / (dx * dx)
    down = 0.5 * dt * p.var_lo / (dx * dx)
    second = np.empty(spec.nx - 2, dtype=np.float64)

    for _ in range(steps):
        np.subtract(u[:-2] + u[2:], 2.0 * u[1:-1], out=second)
        u[1:-1] += np.where(second > 0.0, up * second, down * second)

    return PDEGrid(
        x_min=x_min,
        x_max=x_max,
        nx=spec.nx,
        dx=dx,
        dt=dt,
        t=t_final,
        steps=steps,
        u=u,
    )


@lru_cache(maxsize=32)
def _indicator_solution(
    sigma_lo: float, sigma_hi: float, spec: GridSpec
) -> PDEGrid:
    grid = solve_gheat(
        GNormalParams(0.0, sigma_lo, sigma_hi), indicator_payoff, 1.0, spec
    )
    grid.u.setflags(write=False)
    return grid


def numeric_g_cdf(
    x: float, p: GNormalParams, spec: GridSpec | None = None
) -> float:
    # NOTE: The centered G-normal is symmetric, so E_G[1{xi <= y}] equals
    # E_G[1{xi >= -y}], which is the indicator solve evaluated at y.
    grid = _indicator_solution(p.sigma_lo, p.sigma_hi, spec or GridSpec())

    y = x - p.mu
    lower, upper = grid.trusted_bounds()
    if not (lower <= y <= upper):
        raise OutsideTrustedInterior(x, lower + p.mu, upper + p.mu)

    return min(max(grid.interpolate(y), 0.0), 1.0)


def numeric_g_cdf_table(
    p: GNormalParams, spec: GridSpec | None = None
) -> list[tuple[float, float, float, float]]:
    """Rows of ``(x, closed form, numeric, difference)`` over the trusted
    interior nodes."""

    grid = _indicator_solution(p.sigma_lo, p.sigma_hi, spec or GridSpec())
    lower, upper = grid.trusted_bounds()

    rows = []
    for y, u in zip(grid.x, grid.u):
        if not (lower <= y <= upper):
            continue
        x = float(y) + p.mu
        closed = g_cdf(x, p)
        rows.append((x, closed, float(u), float(u) - closed))
    return rows


def expectation_of(
    phi: Payoff, p: GNormalParams, spec: GridSpec | None = None
) -> float:
    def shifted(z: NDArray[np.float64]) -> NDArray[np.float64]:
        return phi(z + p.mu)

    grid = solve_gheat(replace(p, mu=0.0), shifted, 1.0, spec)
    return grid.interpolate(0.0)

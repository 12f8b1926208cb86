from __future__ import annotations
from typing import ClassVar
from typing import Sequence

from dataclasses import dataclass

__all__ = (
    "GVaRError",
    "DomainError",
    "ConfigurationError",
    "SingularFit",
    "ContractError",
    "IngestionError",
    "InsufficientHistory",
    "OutsideTrustedInterior",
    "GridSearchFailed",
)


class GVaRError(Exception):
    exit_code: ClassVar[int] = 2


@dataclass
class DomainError(GVaRError):
    name: str
    value: object
    reason: str

    def __post_init__(self):
        super().__init__(f"{self.name}={self.value!r}: {self.reason}")


@dataclass
class ConfigurationError(GVaRError):
    reason: str
    key: str | None = None
    line: int | None = None

    def __post_init__(self):
        where = ""
        if self.key is not None:
            where += f" key={self.key!r}"
        if self.line is not None:
            where += f" line={self.line}"
        super().__init__(f"Invalid configuration{where}: {self.reason}")


@dataclass
class SingularFit(GVaRError):
    series: Sequence[str]

    def __post_init__(self):
        super().__init__(
            f"Degenerate regressor (lagged values are constant) in series: "
            f"{', '.join(self.series)}"
        )


@dataclass
class ContractError(GVaRError):
    reason: str

    def __post_init__(self):
        super().__init__(self.reason)


@dataclass
class IngestionError(GVaRError):
    exit_code: ClassVar[int] = 3

    path: str
    line: int | None
    reason: str

    def __post_init__(self):
        where = str(self.path)
        if self.line is not None:
            where = f"{where}:{self.line}"
        super().__init__(f"Failed to ingest {where}: {self.reason}")


@dataclass
class InsufficientHistory(GVaRError):
    exit_code: ClassVar[int] = 4

    required: int
    available: int
    what: str = "observations"

    def __post_init__(self):
        super().__init__(
            f"Insufficient history: need {self.required} {self.what}, "
            f"have {self.available} "
            f"(short by {self.required - self.available})"
        )


@dataclass
class OutsideTrustedInterior(GVaRError):
    x: float
    lower: float
    upper: float

    def __post_init__(self):
        super().__init__(
            f"x={self.x!r} is outside the trusted PDE interior "
            f"[{self.lower:.6g}, {self.upper:.6g}]"
        )


@dataclass
class GridSearchFailed(GVaRError):
    cells: int

    def __post_init__(self):
        super().__init__(f"All {self.cells} (K, L) cells failed")

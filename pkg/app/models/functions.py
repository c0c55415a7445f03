# app/models/functions.py
"""
Dense tables for step functions on the group and on the character side.

A Grid (p, N, M) enumerates the p^(N+M) digit tuples (c_{-N}, ..., c_{M-1});
the flat index is sum c_j p^(j+N), least significant digit at position -N.
A StepFunction stores one value per coset G_M + h (class D_M(G_{-N})); a
SpectralFunction stores one value per coset G_{-N}^perp zeta (class
D_{-N}(G_M^perp)). The table is the function: support and constancy hold by
construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import ClassVar, Iterator, Literal, Tuple

import numpy as np

from app.models.errors import GridError
from app.models.group import GroupParams

Side = Literal["group", "spectral"]


@lru_cache(maxsize=64)
def digit_matrix(p: int, width: int) -> np.ndarray:
    """Row r holds the base-p digits of r, least significant first. Read-only."""
    if width < 0:
        raise GridError(f"negative digit width {width}")
    rows = np.arange(p**width, dtype=np.int64)[:, None]
    weights = p ** np.arange(width, dtype=np.int64)[None, :]
    digits = (rows // weights) % p
    digits.flags.writeable = False
    return digits


@dataclass(frozen=True)
class Grid:
    params: GroupParams
    N: int
    M: int

    def __post_init__(self) -> None:
        if self.N < 0 or self.M < 0:
            raise GridError(
                f"grid bounds must be non-negative, got N={self.N}, M={self.M}",
                {"N": self.N, "M": self.M},
            )

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def width(self) -> int:
        return self.N + self.M

    @property
    def size(self) -> int:
        return self.p**self.width

    @property
    def start(self) -> int:
        """Position of the least significant digit."""
        return -self.N

    @property
    def positions(self) -> range:
        return range(-self.N, self.M)

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.p,) * self.width

    def digits(self) -> np.ndarray:
        """(size, width) digit tuples; column i is position -N + i."""
        return digit_matrix(self.p, self.width)

    def index_of(self, digits: Tuple[int, ...]) -> int:
        if len(digits) != self.width:
            raise GridError(
                f"expected {self.width} digits for grid N={self.N}, M={self.M}, got {len(digits)}"
            )
        return int(sum(int(d) * self.p**i for i, d in enumerate(digits)))

    def tuple_at(self, index: int) -> Tuple[int, ...]:
        return tuple(int(d) for d in self.digits()[index])

    def __iter__(self) -> Iterator[Tuple[int, ...]]:
        for row in self.digits():
            yield tuple(int(d) for d in row)


@dataclass(frozen=True, eq=False)
class _Table:
    grid: Grid
    values: np.ndarray

    side: ClassVar[Side]

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.complex128).reshape(-1)
        if values.shape != (self.grid.size,):
            raise GridError(
                f"{self.side} table needs {self.grid.size} values for "
                f"p={self.grid.p}, N={self.grid.N}, M={self.grid.M}; got {values.size}",
                {"expected": self.grid.size, "got": int(values.size)},
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def params(self) -> GroupParams:
        return self.grid.params

    def tensor(self) -> np.ndarray:
        """Values as a p x ... x p array; axis i is position -N + i."""
        return self.values.reshape(self.grid.shape, order="F")

    @classmethod
    def from_tensor(cls, grid: Grid, tensor: np.ndarray):
        return cls(grid, np.asarray(tensor).reshape(-1, order="F"))

    @classmethod
    def zeros(cls, grid: Grid):
        return cls(grid, np.zeros(grid.size, dtype=np.complex128))

    def __len__(self) -> int:
        return self.grid.size


@dataclass(frozen=True, eq=False)
class StepFunction(_Table):
    """Value on each coset G_M + h, h with digits (a_{-N}, ..., a_{M-1})."""

    side: ClassVar[Side] = "group"


@dataclass(frozen=True, eq=False)
class SpectralFunction(_Table):
    """Value on each coset G_{-N}^perp r_{-N}^alpha_{-N} ... r_{M-1}^alpha_{M-1}."""

    side: ClassVar[Side] = "spectral"

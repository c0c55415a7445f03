# app/services/stepfun.py
"""
Fourier analysis of step functions on the finite coset grids.

For f in D_M(G_{-N}) tabulated on the (N, M) grid,

    f^(zeta) = p^-M  sum_h f(h) conj(omega^(zeta, h))
    f(h)     = p^-N  sum_zeta F(zeta) omega^(zeta, h)

with omega = exp(2 pi i / p). Both sides share the digit-tuple index of the
grid. Two kernels compute the same sums:

  naive - exact exponent matrix (D D^T mod p), one lookup into the p roots of
          unity, one dense matrix-vector product; O(p^(2(N+M))).
  fast  - the character factorises over positions, so the transform is a
          tensor product of p-point DFTs, one per axis (numpy fftn);
          O((N+M) p^(N+M+1)).
"""
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Literal, Optional, Union

import numpy as np

from app.config.settings import settings
from app.models.errors import GridError, ParamsMismatch
from app.models.functions import Grid, SpectralFunction, StepFunction, _Table
from app.models.group import CharacterWord, GroupElement

logger = logging.getLogger(__name__)

Kernel = Literal["fast", "naive"]
Table = Union[StepFunction, SpectralFunction]


# ---------------------------------------------------------------------------
# index plumbing
# ---------------------------------------------------------------------------
def gather(table: _Table, digits: np.ndarray, start: int) -> np.ndarray:
    """Values of `table` at arbitrary digit rows.

    Column c of `digits` is position start + c. Positions the table ignores
    (above M-1 on the group side, below -N on the spectral side) are dropped;
    a nonzero digit outside the support (below -N on the group side, at or
    above M on the spectral side) gives 0.
    """
    grid = table.grid
    digits = np.asarray(digits, dtype=np.int64)
    if digits.ndim != 2:
        raise GridError(f"digit rows must be a 2-d array, got shape {digits.shape}")
    rows, width = digits.shape
    index = np.zeros(rows, dtype=np.int64)
    outside = np.zeros(rows, dtype=bool)
    for col in range(width):
        pos = start + col
        if -grid.N <= pos < grid.M:
            index += digits[:, col] * grid.p ** (pos + grid.N)
        elif (table.side == "group" and pos < -grid.N) or (
            table.side == "spectral" and pos >= grid.M
        ):
            outside |= digits[:, col] != 0
    return np.where(outside, 0.0, table.values[index])


def value_at(table: Table, word: Union[GroupElement, CharacterWord]) -> complex:
    """Point value of a group table at x, or of a spectral table at zeta."""
    if table.params != word.params:
        raise ParamsMismatch("table and word use different primes")
    expected = GroupElement if table.side == "group" else CharacterWord
    if not isinstance(word, expected):
        raise GridError(f"{table.side} tables are evaluated at {expected.__name__} values")
    if word.is_zero():
        return complex(table.values[0])
    low = min(word.valuation(), table.grid.start)
    high = max(word.top(), table.grid.M - 1)
    row = np.array([word.window(low, high - low + 1)], dtype=np.int64)
    return complex(gather(table, row, low)[0])


def regrid(table: Table, N: int, M: int) -> Table:
    """The same function tabulated on the larger (N, M) grid."""
    grid = table.grid
    if N < grid.N or M < grid.M:
        raise GridError(
            f"cannot shrink grid (N={grid.N}, M={grid.M}) to (N={N}, M={M})",
            {"from": [grid.N, grid.M], "to": [N, M]},
        )
    target = Grid(grid.params, N, M)
    return type(table)(target, gather(table, target.digits(), target.start))


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------
@lru_cache(maxsize=32)
def character_matrix(grid: Grid) -> np.ndarray:
    """Exact exponents (zeta_alpha, h_a) mod p for every pair of grid tuples."""
    digits = grid.digits()
    exponents = (digits @ digits.T) % grid.p
    exponents.flags.writeable = False
    return exponents


def transform_matrix(grid: Grid) -> np.ndarray:
    """p^-(N+M)/2 conj(omega^(zeta, h)); the forward transform is p^((M-N)/2) times this."""
    roots = grid.params.roots()
    return roots[(-character_matrix(grid)) % grid.p] / np.sqrt(grid.size)


def _pick(kernel: Optional[Kernel]) -> Kernel:
    chosen = kernel or settings.transform
    if chosen not in ("fast", "naive"):
        raise ValueError(f"unknown transform kernel {chosen!r}")
    return chosen


def fourier_naive(f: StepFunction) -> SpectralFunction:
    grid = f.grid
    roots = grid.params.roots()
    matrix = roots[(-character_matrix(grid)) % grid.p]
    return SpectralFunction(grid, (matrix @ f.values) / grid.p**grid.M)


def inverse_fourier_naive(F: SpectralFunction) -> StepFunction:
    grid = F.grid
    roots = grid.params.roots()
    matrix = roots[character_matrix(grid)]
    return StepFunction(grid, (matrix @ F.values) / grid.p**grid.N)


def fourier_fast(f: StepFunction) -> SpectralFunction:
    grid = f.grid
    tensor = f.tensor()
    if grid.width:
        tensor = np.fft.fftn(tensor, axes=tuple(range(grid.width)))
    return SpectralFunction.from_tensor(grid, tensor / grid.p**grid.M)


def inverse_fourier_fast(F: SpectralFunction) -> StepFunction:
    grid = F.grid
    tensor = F.tensor()
    if grid.width:
        # ifftn carries 1/p^(N+M); the inverse wants p^-N
        tensor = np.fft.ifftn(tensor, axes=tuple(range(grid.width))) * grid.p**grid.M
    else:
        tensor = tensor / grid.p**grid.N
    return StepFunction.from_tensor(grid, tensor)


def fourier(f: StepFunction, kernel: Optional[Kernel] = None) -> SpectralFunction:
    """Fourier transform D_M(G_{-N}) -> D_{-N}(G_M^perp)."""
    chosen = _pick(kernel)
    logger.debug("fourier p=%s N=%s M=%s kernel=%s", f.grid.p, f.grid.N, f.grid.M, chosen)
    return fourier_fast(f) if chosen == "fast" else fourier_naive(f)


def inverse_fourier(F: SpectralFunction, kernel: Optional[Kernel] = None) -> StepFunction:
    chosen = _pick(kernel)
    logger.debug("inverse_fourier p=%s N=%s M=%s kernel=%s", F.grid.p, F.grid.N, F.grid.M, chosen)
    return inverse_fourier_fast(F) if chosen == "fast" else inverse_fourier_naive(F)


# ---------------------------------------------------------------------------
# shifts, dilations, inner products
# ---------------------------------------------------------------------------
def shift(f: StepFunction, h: GroupElement, enlarge: bool = False) -> StepFunction:
    """f(x - h).

    Digits of h at positions >= M leave every G_M-coset in place. A digit
    below -N moves the support out of G_{-N}; that needs `enlarge=True`,
    which widens the grid to N = -valuation(h).
    """
    if f.params != h.params:
        raise ParamsMismatch("function and shift use different primes")
    grid = f.grid
    low = h.valuation()
    N = grid.N
    if low is not None and low < -grid.N:
        if not enlarge:
            raise GridError(
                f"shift by an element with digit at position {low} leaves G_{-grid.N}; "
                "pass enlarge=True to widen the grid",
                {"valuation": low, "N": grid.N},
            )
        N = -low
    target = Grid(grid.params, N, grid.M)
    offsets = np.array(h.window(target.start, target.width), dtype=np.int64)
    moved = (target.digits() - offsets) % grid.p
    return StepFunction(target, gather(f, moved, target.start))


def dilate_function(f: StepFunction, n: int) -> StepFunction:
    """x -> f(A^n x), tabulated on (max(N-n, 0), max(M+n, 0))."""
    grid = f.grid
    target = Grid(grid.params, max(grid.N - n, 0), max(grid.M + n, 0))
    # digit at position q of x lands at q - n in A^n x
    return StepFunction(target, gather(f, target.digits(), target.start - n))


def _check_same_grid(a: _Table, b: _Table) -> None:
    if a.grid != b.grid:
        raise GridError(
            f"grid mismatch: (p={a.grid.p}, N={a.grid.N}, M={a.grid.M}) vs "
            f"(p={b.grid.p}, N={b.grid.N}, M={b.grid.M})"
        )


def inner_product(f: StepFunction, g: StepFunction) -> complex:
    """<f, g> = p^-M sum f conj(g)."""
    _check_same_grid(f, g)
    return complex(np.vdot(g.values, f.values) / f.grid.p**f.grid.M)


def spectral_inner_product(F: SpectralFunction, G: SpectralFunction) -> complex:
    """<F, G> over the characters = p^-N sum F conj(G)."""
    _check_same_grid(F, G)
    return complex(np.vdot(G.values, F.values) / F.grid.p**F.grid.N)


def norm_squared(f: StepFunction) -> float:
    return inner_product(f, f).real


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------
def indicator_subgroup(grid: Grid, n: int = 0) -> StepFunction:
    """1_{G_n} for -N <= n <= M."""
    if not -grid.N <= n <= grid.M:
        raise GridError(f"G_{n} is not a union of cosets inside the grid (N={grid.N}, M={grid.M})")
    low = grid.digits()[:, : n + grid.N]
    return StepFunction(grid, np.all(low == 0, axis=1).astype(np.complex128))


def indicator_annihilator(grid: Grid, n: int = 0) -> SpectralFunction:
    """1_{G_n^perp} for -N <= n <= M."""
    if not -grid.N <= n <= grid.M:
        raise GridError(f"G_{n}^perp is not a union of cosets inside the grid (N={grid.N}, M={grid.M})")
    high = grid.digits()[:, n + grid.N :]
    return SpectralFunction(grid, np.all(high == 0, axis=1).astype(np.complex128))


def indicator(grid: Grid, side: str = "group", n: int = 0) -> Table:
    """1_{G_n} on the group side, 1_{G_n^perp} on the spectral side."""
    if side == "group":
        return indicator_subgroup(grid, n)
    if side == "spectral":
        return indicator_annihilator(grid, n)
    raise GridError(f"unknown table side {side!r}")


def coset_indicator(grid: Grid, word: Union[GroupElement, CharacterWord]) -> Table:
    """1_{G_M + h} on the group side, or 1_{G_{-N}^perp zeta} on the spectral side."""
    if isinstance(word, GroupElement):
        if not word.in_subgroup(-grid.N):
            raise GridError("coset lies outside G_{-N}")
        cls = StepFunction
    else:
        if not word.in_annihilator(grid.M):
            raise GridError("coset lies outside G_M^perp")
        cls = SpectralFunction
    values = np.zeros(grid.size, dtype=np.complex128)
    values[grid.index_of(word.window(grid.start, grid.width))] = 1.0
    return cls(grid, values)


def random_table(grid: Grid, rng: np.random.Generator, side: str = "group") -> Table:
    values = rng.standard_normal(grid.size) + 1j * rng.standard_normal(grid.size)
    cls = StepFunction if side == "group" else SpectralFunction
    return cls(grid, values)

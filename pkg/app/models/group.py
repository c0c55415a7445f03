# app/models/group.py
"""
Value types for the p-adic Vilenkin group and its character group.

An element x = sum a_n g_n is a finitely supported digit word; a coset
representative of the character group, zeta = prod r_k^alpha_k, is a finitely
supported exponent word. Both are stored sparsely as sorted (position, value)
pairs with zeros trimmed, so structural equality is semantic equality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy

from app.models.errors import InvalidParams

Entries = Tuple[Tuple[int, int], ...]


@lru_cache(maxsize=None)
def roots_of_unity(p: int) -> np.ndarray:
    """omega^e for e = 0..p-1, omega = exp(2 pi i / p). Read-only."""
    table = np.exp(2j * np.pi * np.arange(p) / p)
    table.flags.writeable = False
    return table


@dataclass(frozen=True)
class GroupParams:
    """The prime p and the measure scalars p^n derived from it."""

    p: int

    def __post_init__(self) -> None:
        if isinstance(self.p, bool) or not isinstance(self.p, int):
            raise InvalidParams(f"p must be an int, got {self.p!r}", {"p": self.p})
        if self.p < 2 or not sympy.isprime(self.p):
            raise InvalidParams(f"p must be prime, got {self.p}", {"p": self.p})

    def scale(self, n: int) -> Fraction:
        """p^n, exact for negative n as well."""
        return Fraction(self.p) ** n

    def measure_subgroup(self, n: int) -> Fraction:
        """mu(G_n) = p^-n."""
        return self.scale(-n)

    def measure_annihilator(self, n: int) -> Fraction:
        """nu(G_n^perp) = p^n."""
        return self.scale(n)

    def roots(self) -> np.ndarray:
        return roots_of_unity(self.p)


def _canonical(params: GroupParams, values: Mapping[int, int], what: str) -> Entries:
    out = []
    for pos, val in values.items():
        if isinstance(pos, bool) or not isinstance(pos, (int, np.integer)):
            raise InvalidParams(f"{what} position must be an int, got {pos!r}")
        val = int(val)
        if not 0 <= val < params.p:
            raise InvalidParams(
                f"{what} at position {pos} is {val}, outside 0..{params.p - 1}",
                {"position": int(pos), "value": val, "p": params.p},
            )
        if val:
            out.append((int(pos), val))
    return tuple(sorted(out))


@dataclass(frozen=True)
class _SparseWord:
    params: GroupParams
    entries: Entries = field(default=())

    _label = "digit"

    def __post_init__(self) -> None:
        canon = _canonical(self.params, dict(self.entries), self._label)
        if len(canon) != len(self.entries):
            raise InvalidParams(f"duplicate or zero {self._label} entries in {self.entries!r}")
        object.__setattr__(self, "entries", canon)

    @classmethod
    def from_map(cls, params: GroupParams, values: Mapping[int, int]):
        return cls(params, _canonical(params, values, cls._label))

    @classmethod
    def from_digits(cls, params: GroupParams, start: int, seq: Sequence[int]):
        """Word whose value at position start + i is seq[i]."""
        return cls.from_map(params, {start + i: v for i, v in enumerate(seq)})

    @classmethod
    def zero(cls, params: GroupParams):
        return cls(params, ())

    def as_map(self) -> Dict[int, int]:
        return dict(self.entries)

    def get(self, n: int) -> int:
        for pos, val in self.entries:
            if pos == n:
                return val
        return 0

    def support(self) -> Tuple[int, ...]:
        return tuple(pos for pos, _ in self.entries)

    def valuation(self) -> Optional[int]:
        """Least position carrying a nonzero value, None for the identity."""
        return self.entries[0][0] if self.entries else None

    def top(self) -> Optional[int]:
        """Greatest position carrying a nonzero value, None for the identity."""
        return self.entries[-1][0] if self.entries else None

    def window(self, start: int, width: int) -> Tuple[int, ...]:
        """Values at positions start .. start+width-1."""
        values = self.as_map()
        return tuple(values.get(start + i, 0) for i in range(width))

    def is_zero(self) -> bool:
        return not self.entries

    def __iter__(self) -> Iterable[Tuple[int, int]]:
        return iter(self.entries)


@dataclass(frozen=True)
class GroupElement(_SparseWord):
    """x = sum a_n g_n with finitely many nonzero digits a_n."""

    _label = "digit"

    @classmethod
    def basis(cls, params: GroupParams, n: int, digit: int = 1) -> "GroupElement":
        """digit * g_n."""
        return cls.from_map(params, {n: digit})

    def digit(self, n: int) -> int:
        return self.get(n)

    def in_subgroup(self, n: int) -> bool:
        """x in G_n: every nonzero digit sits at a position >= n."""
        return self.is_zero() or self.entries[0][0] >= n

    def in_h0(self, s: Optional[int] = None) -> bool:
        """x in H_0 (nonzero digits only at negative positions), or in H_0^(s)."""
        if self.is_zero():
            return True
        low, high = self.entries[0][0], self.entries[-1][0]
        if high >= 0:
            return False
        return s is None or low >= -s


@dataclass(frozen=True)
class CharacterWord(_SparseWord):
    """zeta = prod r_k^alpha_k with finitely many nonzero exponents."""

    _label = "exponent"

    @classmethod
    def rademacher(cls, params: GroupParams, n: int, power: int = 1) -> "CharacterWord":
        """r_n^power."""
        return cls.from_map(params, {n: power % params.p})

    def exponent(self, n: int) -> int:
        return self.get(n)

    def in_annihilator(self, n: int) -> bool:
        """zeta in G_n^perp: every nonzero exponent sits at a position <= n-1."""
        return self.is_zero() or self.entries[-1][0] <= n - 1

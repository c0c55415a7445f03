# app/services/group_core.py
"""
Exact arithmetic on the Vilenkin group: addition without carries, inverse,
the dilation A (digit n moves to position n-1), its adjoint action on
characters, and the character/element pairing.

The pairing returns the exponent e in Z_p of (zeta, x) = exp(2 pi i e / p);
nothing here touches floating point except `character_value`, which turns an
exponent into a root of unity by table lookup.
"""
from __future__ import annotations

import logging
from typing import TypeVar

from app.models.errors import ParamsMismatch
from app.models.group import CharacterWord, GroupElement, GroupParams, _SparseWord

logger = logging.getLogger(__name__)

W = TypeVar("W", bound=_SparseWord)


def _same_params(a: GroupParams, b: GroupParams) -> None:
    if a != b:
        raise ParamsMismatch(
            f"operands use different primes: p={a.p} and p={b.p}",
            {"left": a.p, "right": b.p},
        )


def add(x: GroupElement, y: GroupElement) -> GroupElement:
    """Coordinate-wise addition modulo p (no carry to the next position)."""
    _same_params(x.params, y.params)
    p = x.params.p
    out = x.as_map()
    for pos, digit in y:
        out[pos] = (out.get(pos, 0) + digit) % p
    return GroupElement.from_map(x.params, out)


def neg(x: GroupElement) -> GroupElement:
    p = x.params.p
    return GroupElement.from_map(x.params, {pos: (p - a) % p for pos, a in x})


def sub(x: GroupElement, h: GroupElement) -> GroupElement:
    """x minus h in the group."""
    return add(x, neg(h))


def _shift(word: W, offset: int) -> W:
    return type(word).from_map(word.params, {pos + offset: v for pos, v in word})


def dilate(x: GroupElement, n: int) -> GroupElement:
    """A^n x: every digit moves down by n positions."""
    return _shift(x, -n)


def dilate_character(zeta: CharacterWord, n: int) -> CharacterWord:
    """zeta A^n, defined by (zeta A^n, x) = (zeta, A^n x).

    (r_k, A x) reads digit k+1 of x, so r_k A = r_{k+1}: exponents move up.
    """
    return _shift(zeta, n)


def pair(zeta: CharacterWord, x: GroupElement) -> int:
    """Exponent e in Z_p with (zeta, x) = exp(2 pi i e / p)."""
    _same_params(zeta.params, x.params)
    digits = x.as_map()
    return sum(alpha * digits.get(pos, 0) for pos, alpha in zeta) % zeta.params.p


def character_value(zeta: CharacterWord, x: GroupElement) -> complex:
    return complex(zeta.params.roots()[pair(zeta, x)])

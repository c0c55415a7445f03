# app/models/masks.py
"""
Mask and coefficient tables for the refinement equation

    phi(x) = sum_h beta_h phi(A x - h),   phi^(chi) = m_0(chi) phi^(chi A^-1).

A Mask holds the p^(N+1) values of m_0 on the cosets
G_{-N}^perp r_{-N}^alpha_{-N} ... r_0^alpha_0, stored by
k = alpha_0 + alpha_{-1} p + ... + alpha_{-N} p^N. For N = 1 the same data is
the p x p matrix Lambda with Lambda[alpha_{-1}, alpha_0] = lambda_{alpha_{-1} + alpha_0 p}.

A CoefficientVector holds beta_h for h in H_0^(N+1), stored by
l = a_{-1} + a_{-2} p + ... + a_{-N-1} p^N.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.config.settings import settings
from app.models.errors import MaskError
from app.models.functions import digit_matrix
from app.models.group import GroupParams


def _frozen_complex(values, size: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128).reshape(-1)
    if arr.shape != (size,):
        raise MaskError(
            f"{what} needs {size} values, got {arr.size}",
            {"expected": size, "got": int(arr.size)},
        )
    if not np.all(np.isfinite(arr)):
        raise MaskError(f"{what} contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Mask:
    params: GroupParams
    N: int
    values: np.ndarray
    # tolerance for m_0 = 1 at the identity; settings.eps when None
    eps: Optional[float] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.N < 1:
            raise MaskError(f"mask level N must be at least 1, got {self.N}", {"N": self.N})
        values = np.array(
            _frozen_complex(self.values, self.params.p ** (self.N + 1), "mask"), copy=True
        )
        tol = settings.eps if self.eps is None else self.eps
        if abs(values[0] - 1.0) > tol:
            raise MaskError(
                f"m_0 must equal 1 on G_-{self.N}^perp, got {values[0]}",
                {"value": [values[0].real, values[0].imag]},
            )
        values[0] = 1.0
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def size(self) -> int:
        return self.p ** (self.N + 1)

    def digits(self) -> np.ndarray:
        """Row k holds (alpha_0, alpha_{-1}, ..., alpha_{-N})."""
        return digit_matrix(self.p, self.N + 1)

    def index_of(self, alphas: Sequence[int]) -> int:
        """k for exponents given as (alpha_{-N}, ..., alpha_0)."""
        if len(alphas) != self.N + 1:
            raise MaskError(f"expected {self.N + 1} exponents, got {len(alphas)}")
        return int(sum(int(a) * self.p**i for i, a in enumerate(reversed(alphas))))

    @classmethod
    def from_lambda(cls, params: GroupParams, table) -> "Mask":
        """N = 1 mask from lambda_{alpha_{-1} + alpha_0 p} (flat) or the p x p matrix Lambda."""
        p = params.p
        arr = np.asarray(table, dtype=np.complex128)
        if arr.shape == (p, p):
            matrix = arr
        elif arr.shape == (p * p,):
            matrix = arr.reshape((p, p), order="F")
        else:
            raise MaskError(
                f"lambda table for p={p} must have {p * p} entries or shape ({p}, {p}); got {arr.shape}"
            )
        return cls(params, 1, matrix.reshape(-1))

    def lambda_matrix(self) -> np.ndarray:
        """Lambda[alpha_{-1}, alpha_0]; only defined for N = 1."""
        if self.N != 1:
            raise MaskError(f"the lambda view needs N=1, mask has N={self.N}", {"N": self.N})
        return self.values.reshape(self.p, self.p)

    def lambda_table(self) -> np.ndarray:
        """lambda_j for j = alpha_{-1} + alpha_0 p."""
        return self.lambda_matrix().reshape(-1, order="F")

    def modulus(self) -> np.ndarray:
        return np.abs(self.values)


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    params: GroupParams
    N: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.N < 1:
            raise MaskError(f"coefficient level N must be at least 1, got {self.N}")
        object.__setattr__(
            self,
            "entries",
            _frozen_complex(self.entries, self.params.p ** (self.N + 1), "coefficient vector"),
        )

    @property
    def size(self) -> int:
        return self.params.p ** (self.N + 1)

    def digits(self) -> np.ndarray:
        """Row l holds (a_{-1}, a_{-2}, ..., a_{-N-1})."""
        return digit_matrix(self.params.p, self.N + 1)

    def support(self, eps: Optional[float] = None) -> Tuple[int, ...]:
        """Indices l with |beta_l| above tolerance."""
        tol = settings.eps if eps is None else eps
        return tuple(int(i) for i in np.flatnonzero(np.abs(self.entries) > tol))


@dataclass(frozen=True)
class ElementarySpec:
    """Free choices of the 1-elementary construction at prime p.

    zero_set:    the l values of alpha_{-1} in 1..p-1 where the level-0 row vanishes
    chain_top:   alpha_{l-1}, taken from the complement of zero_set in 1..p-1
    chain_order: (alpha_{l-2}, ..., alpha_{-1}), an ordering of zero_set
    phases:      unit-modulus factor per lambda index j = alpha_{-1} + alpha_0 p
    """

    params: GroupParams
    l: int
    zero_set: Tuple[int, ...]
    chain_top: int
    chain_order: Tuple[int, ...]
    phases: Optional[Mapping[int, complex]] = None

    def chain(self) -> Tuple[int, ...]:
        """(alpha_{l-1}, alpha_{l-2}, ..., alpha_{-1})."""
        return (self.chain_top, *self.chain_order)

    def problems(self, eps: Optional[float] = None) -> List[str]:
        tol = settings.eps if eps is None else eps
        p = self.params.p
        out: List[str] = []
        if p < 3:
            out.append(f"p must be at least 3, got {p}")
        if not 1 <= self.l <= p - 2:
            out.append(f"l must lie in [1, {p - 2}], got {self.l}")
        zeros = set(self.zero_set)
        if len(zeros) != len(self.zero_set):
            out.append(f"zero set {list(self.zero_set)} has repeated values")
        if len(zeros) != self.l:
            out.append(f"zero set must have exactly l={self.l} values, got {len(zeros)}")
        if not zeros <= set(range(1, p)):
            out.append(f"zero set values must lie in 1..{p - 1}")
        if not 1 <= self.chain_top <= p - 1:
            out.append(f"chain top must lie in 1..{p - 1}, got {self.chain_top}")
        elif self.chain_top in zeros:
            out.append(f"chain top {self.chain_top} belongs to the zero set")
        if sorted(self.chain_order) != sorted(self.zero_set):
            out.append("chain order must be an ordering of the zero set")
        for j, phase in (self.phases or {}).items():
            if not 0 <= j < p * p:
                out.append(f"phase index {j} outside 0..{p * p - 1}")
            elif j == 0 and abs(phase - 1.0) > tol:
                out.append("lambda_0 is fixed to 1 and takes no phase")
            elif abs(abs(phase) - 1.0) > tol:
                out.append(f"phase at index {j} has modulus {abs(phase):.6g}, not 1")
        return out

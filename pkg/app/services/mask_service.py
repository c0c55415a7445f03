# app/services/mask_service.py
"""
Mask construction, coefficient recovery, validity checks and the
infinite-product builder for the scaling function.

All shell computations work on digit matrices: column c of a matrix holds
the exponent at position start + c. Evaluating m_0 at zeta A^-j is the same
lookup with `start` lowered by j, so every factor of the product
prod_j m_0(zeta A^-j) is one vectorised gather.
"""
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.config.settings import settings
from app.models.errors import GridError, MaskError, NoFiniteSupport, ParamsMismatch
from app.models.functions import Grid, SpectralFunction, digit_matrix
from app.models.group import CharacterWord, GroupParams
from app.models.masks import CoefficientVector, Mask
from app.models.reports import MaskConditions, ValidityReport
from app.services.stepfun import gather

logger = logging.getLogger(__name__)


def _tol(eps: Optional[float]) -> float:
    return settings.eps if eps is None else eps


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------
def lookup(m: Mask, digits: np.ndarray, start: int) -> np.ndarray:
    """m_0 at every exponent row of `digits` (column c is position start + c).

    Positions outside -N..0 are dropped: m_0 is constant on G_{-N}^perp-cosets
    and has every period in G_1^perp.
    """
    digits = np.asarray(digits, dtype=np.int64)
    rows, width = digits.shape
    k = np.zeros(rows, dtype=np.int64)
    for i in range(m.N + 1):
        col = -i - start
        if 0 <= col < width:
            k += digits[:, col] * m.p**i
    return m.values[k]


def evaluate(m: Mask, zeta: CharacterWord) -> complex:
    if m.params != zeta.params:
        raise ParamsMismatch("mask and character use different primes")
    alphas = zeta.window(-m.N, m.N + 1)
    return complex(m.values[m.index_of(alphas)])


def _product(m: Mask, digits: np.ndarray, start: int, factors: int) -> np.ndarray:
    """prod_{j < factors} m_0(zeta A^-j) for every row."""
    out = np.ones(digits.shape[0], dtype=np.complex128)
    for j in range(factors):
        out *= lookup(m, digits, start - j)
    return out


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------
@lru_cache(maxsize=16)
def _exponents(p: int, N: int) -> np.ndarray:
    """(chi_k, A^-1 h_l) mod p = sum_i k_i l_i over the base-p digits of k and l."""
    digits = digit_matrix(p, N + 1)
    exps = (digits @ digits.T) % p
    exps.flags.writeable = False
    return exps


def _kernel(params: GroupParams, N: int) -> np.ndarray:
    """W[k, l] = conj(omega^(chi_k, A^-1 h_l))."""
    return params.roots()[(-_exponents(params.p, N)) % params.p]


def system_matrix(params: GroupParams, N: int) -> np.ndarray:
    """The unitary p^-(N+1)/2 W of the linear system linking beta and m_0."""
    return _kernel(params, N) / np.sqrt(params.p ** (N + 1))


def unitarity_defect(matrix: np.ndarray) -> float:
    """max |U* U - I|."""
    gram = matrix.conj().T @ matrix
    return float(np.max(np.abs(gram - np.eye(matrix.shape[0]))))


def mask_from_coefficients(beta: CoefficientVector) -> Mask:
    """m_0(chi_k) = (1/p) sum_l beta_l conj(omega^(chi_k, A^-1 h_l))."""
    values = _kernel(beta.params, beta.N) @ beta.entries / beta.params.p
    return Mask(beta.params, beta.N, values)


def coefficients_from_mask(m: Mask) -> CoefficientVector:
    """Inverse of mask_from_coefficients: beta = p^-N W^H m."""
    entries = _kernel(m.params, m.N).conj().T @ m.values / m.p**m.N
    return CoefficientVector(m.params, m.N, entries)


# ---------------------------------------------------------------------------
# constructors and structural views
# ---------------------------------------------------------------------------
def haar_mask(params: GroupParams, N: int = 1) -> Mask:
    """m_0 = 1 where alpha_0 = 0, else 0."""
    digits = digit_matrix(params.p, N + 1)
    return Mask(params, N, (digits[:, 0] == 0).astype(np.complex128))


def constant_mask(params: GroupParams, N: int = 1) -> Mask:
    return Mask(params, N, np.ones(params.p ** (N + 1), dtype=np.complex128))


def is_elementary(m: Mask, eps: Optional[float] = None) -> bool:
    """True when every |m_0| value is 0 or 1."""
    tol = _tol(eps)
    mod = m.modulus()
    return bool(np.all((mod <= tol) | (np.abs(mod - 1.0) <= tol)))


def modulus_pattern(m: Mask, eps: Optional[float] = None) -> np.ndarray:
    """0/1 moduli in k-order."""
    if not is_elementary(m, eps):
        raise MaskError("mask moduli are not all 0 or 1")
    return (m.modulus() > 0.5).astype(np.int64)


def mask_conditions(m: Mask) -> MaskConditions:
    # constancy and periodicity hold by storage; the unit value is enforced by Mask itself
    return MaskConditions(
        constant_on_cosets=True,
        periodic=True,
        unit_at_identity=bool(m.values[0] == 1.0),
    )


def necessary_condition(m: Mask, eps: Optional[float] = None) -> bool:
    """sum over alpha_0 of |m_0|^2 equals 1 for every (alpha_{-N}, ..., alpha_{-1})."""
    sums = np.sum(np.abs(m.values.reshape(m.p**m.N, m.p)) ** 2, axis=1)
    return bool(np.all(np.abs(sums - 1.0) <= _tol(eps)))


# ---------------------------------------------------------------------------
# scaling function
# ---------------------------------------------------------------------------
# shells with more uncovered cosets than this report the count only
UNCOVERED_LISTING_LIMIT = 10_000


def _walk(m: Mask, M: int, tol: float, per_factor: bool) -> np.ndarray:
    """Weights of shell paths, folded onto the p^N digit-window states.

    Exponents of a shell coset are laid down one position at a time from -N
    to M (alpha_M != 0), followed by N zeros. Factor j reads positions
    j-N..j, which are the last N digits plus the new one: with state
    s = sum_i alpha_{q-1-i} p^i, appending alpha_q = d gives window k = d + p s
    and next state k mod p^N.

    per_factor=False: largest |running product| over paths reaching each state,
    a path being dropped as soon as its running product falls to tol.
    per_factor=True: number of paths on which no single factor falls to tol.
    """
    p, N = m.p, m.N
    states = p**N
    windows = np.arange(p ** (N + 1))
    modulus = m.modulus()
    alive = modulus > tol
    weight = np.zeros(states)
    weight[0] = 1.0
    for q in range(-N, M + N + 1):
        if q <= M:
            cand = np.repeat(weight, p)
            if q == M:
                cand[windows % p == 0] = 0.0
        else:
            cand = np.zeros(windows.size)
            cand[::p] = weight
        if q >= 0:
            if per_factor:
                cand = np.where(alive, cand, 0.0)
            else:
                cand = cand * modulus
                cand[cand <= tol] = 0.0
        folded = cand.reshape(p, states)
        weight = folded.sum(axis=0) if per_factor else folded.max(axis=0)
    return weight


def _grow(m: Mask, M: int, tol: float, per_factor: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Materialise the shell paths `_walk` keeps: rows at positions -N..M and their products."""
    p, N = m.p, m.N

    def keep(rows: np.ndarray, running: np.ndarray, factor: np.ndarray):
        if per_factor:
            ok = np.abs(factor) > tol
            return rows[ok], running[ok] * factor[ok]
        running = running * factor
        ok = np.abs(running) > tol
        return rows[ok], running[ok]

    rows = digit_matrix(p, N + 1)
    if M == 0:
        rows = rows[rows[:, -1] != 0]
    rows, running = keep(rows, np.ones(rows.shape[0], dtype=np.complex128), lookup(m, rows, -N))
    for pos in range(1, M + 1):
        digits = np.arange(1 if pos == M else 0, p, dtype=np.int64)
        rows = np.hstack(
            [np.repeat(rows, digits.size, axis=0), np.tile(digits, rows.shape[0])[:, None]]
        )
        rows, running = keep(rows, np.repeat(running, digits.size), lookup(m, rows, -N - pos))
    for j in range(M + 1, M + N + 1):
        rows, running = keep(rows, running, lookup(m, rows, -N - j))
    return rows, running


def shell_vanishes(m: Mask, M: int, eps: Optional[float] = None) -> bool:
    """prod_{j=0}^{M+N} m_0(zeta A^-j) vanishes on all of G_{M+1}^perp minus G_M^perp."""
    return not bool(np.any(_walk(m, M, _tol(eps), per_factor=False) > 0))


def shell_survivors(
    m: Mask, M: int, eps: Optional[float] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Shell cosets above G_M^perp where the product does not vanish, with its values.

    Rows hold exponents at positions -N..M. A vanishing shell returns empty
    arrays without enumerating anything.
    """
    tol = _tol(eps)
    if shell_vanishes(m, M, tol):
        return np.zeros((0, m.N + M + 1), dtype=np.int64), np.zeros(0, dtype=np.complex128)
    return _grow(m, M, tol, per_factor=False)


def tabulate_scaling(m: Mask, M: int) -> SpectralFunction:
    """phi^ = prod_j m_0(. A^-j) on the (N, M) grid; later factors are all 1."""
    grid = Grid(m.params, m.N, M)
    return SpectralFunction(grid, _product(m, grid.digits(), grid.start, M + m.N))


def scaling_from_mask(
    m: Mask, M_max: Optional[int] = None, eps: Optional[float] = None
) -> Tuple[SpectralFunction, int]:
    """Least M <= M_max whose shell product vanishes, with phi^ tabulated on (N, M)."""
    tol = _tol(eps)
    cap = settings.resolve_m_max(m.p) if M_max is None else M_max
    if cap < 0:
        raise GridError(f"M_max must be non-negative, got {cap}")
    for M in range(cap + 1):
        vanishes = shell_vanishes(m, M, tol)
        logger.debug("shell M=%s: product vanishes=%s", M, vanishes)
        if vanishes:
            logger.info("scaling function found: p=%s N=%s M=%s", m.p, m.N, M)
            return tabulate_scaling(m, M), M
    raise NoFiniteSupport(
        f"product does not vanish on any shell up to M_max={cap}",
        {"m_max": cap, "p": m.p, "N": m.N},
    )


def refinement_check(m: Mask, F: SpectralFunction, eps: Optional[float] = None) -> bool:
    """F(zeta) = m_0(zeta) F(zeta A^-1) on every coset of the (N, M+1) grid."""
    if m.params != F.params:
        raise ParamsMismatch("mask and function use different primes")
    grid = Grid(m.params, max(m.N, F.grid.N), F.grid.M + 1)
    digits = grid.digits()
    lhs = gather(F, digits, grid.start)
    rhs = lookup(m, digits, grid.start) * gather(F, digits, grid.start - 1)
    return bool(np.all(np.abs(lhs - rhs) <= _tol(eps)))




# ---------------------------------------------------------------------------
# validity
# ---------------------------------------------------------------------------
def zero_sets(m: Mask, M: int, eps: Optional[float] = None) -> Dict[int, List[Tuple[int, ...]]]:
    """E_k for k = -N+1..M+1: shell cosets at level k (positions -N..k-1) where m_0 vanishes."""
    tol = _tol(eps)
    out: Dict[int, List[Tuple[int, ...]]] = {}
    for k in range(-m.N + 1, M + 2):
        digits = digit_matrix(m.p, m.N + k)
        rows = digits[digits[:, -1] != 0]
        hit = np.abs(lookup(m, rows, -m.N)) <= tol
        out[k] = [tuple(int(d) for d in row) for row in rows[hit]]
    return out


def zero_set_sizes(m: Mask, M: int, eps: Optional[float] = None) -> Dict[int, int]:
    """|E_k| for k = -N+1..M+1 without listing the sets.

    Above level 1 the extra positions 1..k-1 never reach m_0, so
    |E_k| = #{windows where m_0 vanishes} (p-1) p^(k-2).
    """
    tol = _tol(eps)
    p, N = m.p, m.N
    out: Dict[int, int] = {}
    for k in range(-N + 1, min(M, 0) + 2):
        digits = digit_matrix(p, N + k)
        rows = digits[digits[:, -1] != 0]
        out[k] = int(np.count_nonzero(np.abs(lookup(m, rows, -N)) <= tol))
    vanishing = int(np.count_nonzero(m.modulus() <= tol))
    for k in range(2, M + 2):
        out[k] = vanishing * (p - 1) * p ** (k - 2)
    return out


def mask_validity(
    m: Mask, M: int, eps: Optional[float] = None, include_sets: bool = False
) -> ValidityReport:
    """Both criteria for m_0 being a mask on D_{-N}(G_M^perp): shell product and zero-set cover.

    A shell coset is covered when one factor of its product vanishes, that is
    when its image in some level k lies in E_k. Both criteria run on the
    window-state walk; uncovered cosets are listed only while there are at
    most UNCOVERED_LISTING_LIMIT of them.
    """
    if M < 0:
        raise GridError(f"M must be non-negative, got {M}")
    tol = _tol(eps)
    product_vanishes = shell_vanishes(m, M, tol)
    uncovered_count = int(round(float(np.sum(_walk(m, M, tol, per_factor=True)))))
    uncovered: List[List[int]] = []
    if 0 < uncovered_count <= UNCOVERED_LISTING_LIMIT:
        rows, _ = _grow(m, M, tol, per_factor=True)
        uncovered = [[int(d) for d in row] for row in rows]
    elif uncovered_count:
        logger.info("%s uncovered shell cosets, listing skipped", uncovered_count)
    sets = zero_sets(m, M, tol) if include_sets else None
    report = ValidityReport(
        p=m.p,
        N=m.N,
        M=M,
        product_vanishes=product_vanishes,
        zero_sets_cover=uncovered_count == 0,
        zero_set_sizes={str(k): v for k, v in zero_set_sizes(m, M, tol).items()},
        uncovered_count=uncovered_count,
        uncovered=uncovered,
        zero_sets={str(k): [list(t) for t in v] for k, v in sets.items()} if sets is not None else None,
    )
    if not report.criteria_agree:
        logger.warning("validity criteria disagree for p=%s N=%s M=%s", m.p, m.N, M)
    return report

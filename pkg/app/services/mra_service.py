# app/services/mra_service.py
"""
MRA verification on top of the mask layer.

The pipeline in `mra_report` mirrors how a scaling function is certified by
hand: structural mask conditions, the row-sum necessary condition, the
search for a finite support M, refinement, orthonormality checked twice
(through |phi^|^2 sums on the character side and through the Gram row of
integer shifts on the group side), the support shell and the density
hypothesis.

`generate_elementary` builds the N = 1 masks with exactly l zeros on level 0
whose scaling functions reach the shell G_l^perp minus G_{l-1}^perp.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from app.config.settings import settings
from app.models.errors import InvalidElementarySpec, NoFiniteSupport
from app.models.functions import SpectralFunction, StepFunction, digit_matrix
from app.models.group import GroupElement
from app.models.masks import ElementarySpec, Mask
from app.models.reports import ChainCheck, MRAReport
from app.services import mask_service
from app.services.stepfun import Kernel, inner_product, inverse_fourier, regrid, shift

logger = logging.getLogger(__name__)


def _tol(eps: Optional[float]) -> float:
    return settings.eps if eps is None else eps


# ---------------------------------------------------------------------------
# orthonormality
# ---------------------------------------------------------------------------
def orthonormality_spectral(F: SpectralFunction, eps: Optional[float] = None) -> bool:
    """sum over (alpha_0, ..., alpha_{M-1}) of |F|^2 is 1 for every (alpha_{-N}, ..., alpha_{-1})."""
    grid = F.grid
    power = np.abs(F.tensor()) ** 2
    sums = power.sum(axis=tuple(range(grid.N, grid.width))) if grid.M else power
    return bool(np.all(np.abs(sums - 1.0) <= _tol(eps)))


@dataclass(frozen=True)
class ShiftGram:
    """<f, f(. - h)> for h in H_0^(N), keyed by the digits (a_{-N}, ..., a_{-1}) of h."""

    entries: Dict[Tuple[int, ...], complex]
    # shift by g_{-N-1}, which moves the support to a disjoint coset of G_{-N}
    off_grid: complex

    def deviation(self) -> float:
        worst = abs(self.off_grid)
        for h, value in self.entries.items():
            target = 1.0 if not any(h) else 0.0
            worst = max(worst, abs(value - target))
        return worst


def shift_gram(f: StepFunction) -> ShiftGram:
    grid = f.grid
    params = f.params
    entries: Dict[Tuple[int, ...], complex] = {}
    for row in digit_matrix(grid.p, grid.N):
        digits = tuple(int(d) for d in row)
        h = GroupElement.from_digits(params, -grid.N, digits)
        entries[digits] = inner_product(f, shift(f, h))
    outside = shift(f, GroupElement.basis(params, -grid.N - 1), enlarge=True)
    off_grid = inner_product(regrid(f, grid.N + 1, grid.M), outside)
    return ShiftGram(entries=entries, off_grid=off_grid)


def orthonormality_direct(f: StepFunction, eps: Optional[float] = None) -> bool:
    """<f, f(. - h)> = delta_{h,0} over H_0^(N), plus one shift leaving G_{-N}."""
    return shift_gram(f).deviation() <= _tol(eps)


# ---------------------------------------------------------------------------
# support and density
# ---------------------------------------------------------------------------
def support_min_shell(F: SpectralFunction, eps: Optional[float] = None) -> int:
    """Least l >= -N with supp F inside G_l^perp."""
    grid = F.grid
    nonzero = grid.digits()[np.abs(F.values) > _tol(eps)]
    if nonzero.shape[0] == 0:
        return -grid.N
    # top nonzero position of each coset, -N-1 for the identity coset
    marks = np.where(nonzero != 0, np.arange(grid.width), -1)
    return int(marks.max()) + 1 - grid.N


def density_hypothesis(F: SpectralFunction, eps: Optional[float] = None) -> bool:
    """phi^ does not vanish on G_{-N}^perp, so its dilated supports exhaust the character group."""
    return bool(abs(F.values[0]) > _tol(eps))


# ---------------------------------------------------------------------------
# 1-elementary generator
# ---------------------------------------------------------------------------
def generate_elementary(spec: ElementarySpec, eps: Optional[float] = None) -> Mask:
    problems = spec.problems(eps)
    if problems:
        raise InvalidElementarySpec(
            "invalid elementary mask choice: " + "; ".join(problems),
            {"problems": problems},
        )
    p = spec.params.p
    matrix = np.zeros((p, p), dtype=np.complex128)
    zeros = set(spec.zero_set)
    for row in range(p):
        if row not in zeros:
            matrix[row, 0] = 1.0
    chain = spec.chain()
    # row alpha_{s-1} carries its unit at column alpha_s
    for column, row in zip(chain, chain[1:]):
        matrix[row, column] = 1.0
    table = matrix.reshape(-1, order="F")
    for j, phase in (spec.phases or {}).items():
        if j and table[j] != 0:
            table[j] = phase
    logger.debug("generated elementary mask p=%s l=%s chain=%s", p, spec.l, chain)
    return Mask.from_lambda(spec.params, table)


def chain_self_test(spec: ElementarySpec, m: Mask, eps: Optional[float] = None) -> ChainCheck:
    """Level-l products survive only on the chain coset; level l+1 products all vanish."""
    survivors, _ = mask_service.shell_survivors(m, spec.l - 1, eps)
    return ChainCheck(
        l=spec.l,
        chain_tuple=list(reversed(spec.chain())),
        survivors=sorted([int(d) for d in row] for row in survivors),
        next_shell_vanishes=mask_service.shell_vanishes(m, spec.l, eps),
    )


# ---------------------------------------------------------------------------
# full report
# ---------------------------------------------------------------------------
def mra_report(
    m: Mask,
    M_max: Optional[int] = None,
    eps: Optional[float] = None,
    kernel: Optional[Kernel] = None,
    include_sets: bool = False,
) -> MRAReport:
    tol = _tol(eps)
    cap = settings.resolve_m_max(m.p) if M_max is None else M_max
    base = dict(
        p=m.p,
        N=m.N,
        m_max=cap,
        mask_conditions=mask_service.mask_conditions(m),
        necessary_condition=mask_service.necessary_condition(m, tol),
    )
    try:
        phi_hat, M = mask_service.scaling_from_mask(m, cap, tol)
    except NoFiniteSupport as exc:
        logger.warning("no finite support up to M_max=%s for p=%s N=%s", cap, m.p, m.N)
        return MRAReport(**base, no_finite_support=True, diagnostics=exc.diagnostics())

    phi = inverse_fourier(phi_hat, kernel)
    validity = mask_service.mask_validity(m, M, tol, include_sets=include_sets)
    report = MRAReport(
        **base,
        M=M,
        mask_valid=validity.valid,
        validity=validity,
        refinement_holds=mask_service.refinement_check(m, phi_hat, tol),
        orthonormal_spectral=orthonormality_spectral(phi_hat, tol),
        orthonormal_direct=orthonormality_direct(phi, tol),
        support_min_shell=support_min_shell(phi_hat, tol),
        density_hypothesis=density_hypothesis(phi_hat, tol),
    )
    if not report.orthonormality_agrees:
        logger.warning(
            "orthonormality tests disagree: spectral=%s direct=%s",
            report.orthonormal_spectral,
            report.orthonormal_direct,
        )
    logger.info("MRA report p=%s N=%s M=%s verdict=%s", m.p, m.N, M, report.verdict)
    return report

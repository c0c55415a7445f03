# app/services/atlas_service.py
"""
Atlas of N = 1 elementary modulus patterns.

A pattern keeps lambda_0 = 1 and puts exactly one unit entry in every row
alpha_{-1} of Lambda, so the row sums of |lambda|^2 are 1 by construction.
It is written as `columns`, where columns[a] is the alpha_0 of the unit in
row a (columns[0] = 0). There are p^(p-1) patterns; l counts the rows whose
unit is not at alpha_0 = 0, i.e. the zeros of m_0 on level 0.
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from app.config.settings import settings
from app.models.errors import BudgetExceeded, InvalidParams
from app.models.group import GroupParams
from app.models.masks import Mask
from app.models.reports import AtlasCatalog, AtlasEntry, AtlasSummary
from app.services.mra_service import mra_report
from app.services.stepfun import Kernel

logger = logging.getLogger(__name__)

Columns = Tuple[int, ...]


def pattern_mask(params: GroupParams, columns: Sequence[int]) -> Mask:
    p = params.p
    if len(columns) != p or columns[0] != 0:
        raise InvalidParams(
            f"a pattern needs {p} columns with columns[0] = 0, got {list(columns)}",
            {"columns": list(columns)},
        )
    matrix = np.zeros((p, p), dtype=np.complex128)
    for row, column in enumerate(columns):
        if not 0 <= column < p:
            raise InvalidParams(f"column {column} for row {row} outside 0..{p - 1}")
        matrix[row, column] = 1.0
    return Mask.from_lambda(params, matrix)


def pattern_zeros(columns: Sequence[int]) -> int:
    return sum(1 for c in columns[1:] if c != 0)


def haar_pattern(params: GroupParams) -> Columns:
    """Every unit at alpha_0 = 0: no zeros on level 0."""
    return (0,) * params.p


def degenerate_pattern(params: GroupParams) -> Columns:
    """Row a carries its unit at alpha_0 = a: all p-1 nonzero rows vanish on level 0."""
    return tuple(range(params.p))


def pattern_count(params: GroupParams) -> int:
    return params.p ** (params.p - 1)


def iter_patterns(params: GroupParams) -> Iterator[Columns]:
    """All p^(p-1) patterns in lexicographic order of columns[1:]."""
    for tail in itertools.product(range(params.p), repeat=params.p - 1):
        yield (0, *tail)


def sample_patterns(params: GroupParams, count: int, rng: np.random.Generator) -> List[Columns]:
    tails = rng.integers(0, params.p, size=(count, params.p - 1))
    return [(0, *(int(c) for c in row)) for row in tails]


class AtlasService:
    """Evaluates patterns with the full MRA report and summarises the catalog."""

    def __init__(
        self,
        budget: Optional[int] = None,
        workers: Optional[int] = None,
        eps: Optional[float] = None,
        kernel: Optional[Kernel] = None,
    ):
        self.budget = settings.atlas_budget if budget is None else budget
        self.workers = settings.workers if workers is None else workers
        if self.budget < 0:
            raise InvalidParams(f"atlas budget must be non-negative, got {self.budget}")
        if self.workers < 1:
            raise InvalidParams(f"workers must be at least 1, got {self.workers}")
        self.eps = settings.eps if eps is None else eps
        self.kernel = kernel

    def evaluate(self, params: GroupParams, index: int, columns: Columns) -> AtlasEntry:
        report = mra_report(pattern_mask(params, columns), eps=self.eps, kernel=self.kernel)
        return AtlasEntry(
            index=index,
            columns=list(columns),
            l=pattern_zeros(columns),
            verdict=report.verdict,
            mask_valid=report.mask_valid,
            orthonormal_spectral=report.orthonormal_spectral,
            orthonormal_direct=report.orthonormal_direct,
            M=report.M,
            support_min_shell=report.support_min_shell,
        )

    def evaluate_many(self, params: GroupParams, patterns: Iterable[Columns]) -> AtlasCatalog:
        jobs = list(enumerate(patterns))
        logger.debug("evaluating %s patterns for p=%s on %s worker(s)", len(jobs), params.p, self.workers)
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                # map keeps submission order
                entries = list(pool.map(lambda job: self.evaluate(params, *job), jobs))
        else:
            entries = [self.evaluate(params, i, cols) for i, cols in jobs]
        return AtlasCatalog(summary=self.summarize(params, entries), entries=entries)

    def enumerate_elementary(
        self, params: GroupParams, l_range: Optional[Tuple[int, int]] = None
    ) -> AtlasCatalog:
        """Every pattern (optionally only those with l in the inclusive l_range)."""
        total = pattern_count(params)
        if total > self.budget:
            raise BudgetExceeded(
                f"p={params.p} has {total} patterns, over the budget of {self.budget}",
                {"p": params.p, "patterns": total, "budget": self.budget},
            )
        patterns: Iterable[Columns] = iter_patterns(params)
        if l_range is not None:
            low, high = l_range
            patterns = (c for c in patterns if low <= pattern_zeros(c) <= high)
        return self.evaluate_many(params, patterns)

    def summarize(self, params: GroupParams, entries: Sequence[AtlasEntry]) -> AtlasSummary:
        bound = params.p - 2
        verdict_by_l: Dict[str, int] = {}
        sharp_by_l: Dict[str, int] = {}
        counterexamples: List[int] = []
        shell_counterexamples: List[int] = []
        violations: List[int] = []
        orthonormal = 0
        for entry in entries:
            if entry.orthonormal_spectral != entry.orthonormal_direct:
                violations.append(entry.index)
            # any l <= p-2 pattern, orthonormal or not, has phi^ inside G_l^perp
            if entry.l <= bound and (entry.support_min_shell is None or entry.support_min_shell > entry.l):
                shell_counterexamples.append(entry.index)
            if not entry.orthonormal_direct:
                continue
            orthonormal += 1
            if entry.support_min_shell is not None and entry.support_min_shell > bound:
                counterexamples.append(entry.index)
            if entry.verdict:
                key = str(entry.l)
                verdict_by_l[key] = verdict_by_l.get(key, 0) + 1
                if entry.support_min_shell == entry.l:
                    sharp_by_l[key] = sharp_by_l.get(key, 0) + 1
        if counterexamples:
            logger.warning("support bound fails for patterns %s (p=%s)", counterexamples, params.p)
        if shell_counterexamples:
            logger.warning("shell bound fails for patterns %s (p=%s)", shell_counterexamples, params.p)
        if violations:
            logger.warning("orthonormality tests disagree for patterns %s (p=%s)", violations, params.p)
        summary = AtlasSummary(
            p=params.p,
            pattern_count=len(entries),
            orthonormal_count=orthonormal,
            verdict_by_l=verdict_by_l,
            sharp_by_l=sharp_by_l,
            bound_counterexamples=counterexamples,
            shell_bound_counterexamples=shell_counterexamples,
            equivalence_violations=violations,
        )
        logger.info(
            "atlas p=%s: %s patterns, %s orthonormal, bound %s, shell bound %s",
            params.p,
            summary.pattern_count,
            orthonormal,
            "holds" if summary.bound_holds else "FAILS",
            "holds" if summary.shell_bound_holds else "FAILS",
        )
        return summary

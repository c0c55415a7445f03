# app/models/reports.py
"""
Pydantic models for everything the toolkit reports: mask structure,
validity, the full MRA pipeline and the elementary-pattern atlas.

These are plain data; the services fill them in and the serializers dump
them with `model_dump(mode="json")`.
"""
from __future__ import annotations

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field


class MaskConditions(BaseModel):
    """Structural mask laws: constancy on G_{-N}^perp-cosets, periodicity, m_0 = 1 at the identity."""

    model_config = ConfigDict(frozen=True)

    constant_on_cosets: bool
    periodic: bool
    unit_at_identity: bool

    @computed_field
    @property
    def holds(self) -> bool:
        return self.constant_on_cosets and self.periodic and self.unit_at_identity


class ValidityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: int
    N: int
    M: int
    # shell product prod_{j<=M+N} m_0(zeta A^-j) vanishes on G_{M+1}^perp minus G_M^perp
    product_vanishes: bool
    # union of E_k A^(M+1-k) covers that shell
    zero_sets_cover: bool
    zero_set_sizes: Dict[str, int] = Field(default_factory=dict)
    uncovered_count: int = 0
    # listed only for small counts
    uncovered: List[List[int]] = Field(default_factory=list)
    zero_sets: Optional[Dict[str, List[List[int]]]] = None

    @computed_field
    @property
    def criteria_agree(self) -> bool:
        return self.product_vanishes == self.zero_sets_cover

    @computed_field
    @property
    def valid(self) -> bool:
        return self.product_vanishes and self.zero_sets_cover


class MRAReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: int
    N: int
    m_max: int
    mask_conditions: MaskConditions
    necessary_condition: bool
    mask_valid: bool = False
    no_finite_support: bool = False
    M: Optional[int] = None
    refinement_holds: bool = False
    orthonormal_spectral: bool = False
    orthonormal_direct: bool = False
    support_min_shell: Optional[int] = None
    density_hypothesis: bool = False
    validity: Optional[ValidityReport] = None
    diagnostics: Dict[str, Any] = Field(default_factory=dict)

    @computed_field
    @property
    def orthonormality_agrees(self) -> bool:
        return self.orthonormal_spectral == self.orthonormal_direct

    @computed_field
    @property
    def verdict(self) -> bool:
        return all(
            (
                self.mask_conditions.holds,
                self.necessary_condition,
                self.mask_valid,
                not self.no_finite_support,
                self.refinement_holds,
                self.orthonormal_spectral,
                self.orthonormal_direct,
                self.density_hypothesis,
            )
        )


class AtlasEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    # columns[a] = alpha_0 carrying the unit entry of row alpha_{-1} = a
    columns: List[int]
    l: int
    verdict: bool
    mask_valid: bool
    orthonormal_spectral: bool
    orthonormal_direct: bool
    M: Optional[int] = None
    support_min_shell: Optional[int] = None


class AtlasSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: int
    pattern_count: int
    orthonormal_count: int
    verdict_by_l: Dict[str, int] = Field(default_factory=dict)
    sharp_by_l: Dict[str, int] = Field(default_factory=dict)
    # orthonormal patterns with support above G_{p-2}^perp
    bound_counterexamples: List[int] = Field(default_factory=list)
    # patterns with l <= p-2 zeros whose phi^ reaches beyond G_l^perp
    shell_bound_counterexamples: List[int] = Field(default_factory=list)
    equivalence_violations: List[int] = Field(default_factory=list)

    @computed_field
    @property
    def bound_holds(self) -> bool:
        return not self.bound_counterexamples

    @computed_field
    @property
    def shell_bound_holds(self) -> bool:
        return not self.shell_bound_counterexamples


class AtlasCatalog(BaseModel):
    model_config = ConfigDict(frozen=True)

    summary: AtlasSummary
    entries: List[AtlasEntry]


class ChainCheck(BaseModel):
    """Structural self-test of a generated 1-elementary mask with l zeros at level 0."""

    model_config = ConfigDict(frozen=True)

    l: int
    # (alpha_{-1}, alpha_0, ..., alpha_{l-1}) of the one surviving coset at level l
    chain_tuple: List[int]
    survivors: List[List[int]]
    next_shell_vanishes: bool

    @computed_field
    @property
    def only_chain_survives(self) -> bool:
        return self.survivors == [self.chain_tuple]

    @computed_field
    @property
    def passed(self) -> bool:
        return self.only_chain_survives and self.next_shell_vanishes

from enum import Enum
from typing import Any

from pydantic import BaseModel, Field


class DomainError(Exception):
    """Base class of every error raised on mathematically invalid input."""


class FormsMode(str, Enum):
    topological = "topological"
    normal_form = "normal_form"


class CubicCaseTag(str, Enum):
    three_distinct_real = "three_distinct_real"
    double_root = "double_root"
    one_real_root = "one_real_root"


class MinimalModelKind(str, Enum):
    type_ii = "TypeII"
    type_iii_g0 = "TypeIII_g0"


class MovBoundBranch(str, Enum):
    alpha_star = "alpha_star"
    twice_beta = "twice_beta"
    edge = "edge"


class FibrationBranch(str, Enum):
    elliptic = "elliptic"
    k3_abelian = "k3_abelian"


class C2LineKind(str, Enum):
    edge_of_p = "EdgeOfP"
    third_cubic_line = "ThirdCubicLine"
    cubic_root = "CubicRoot"
    hessian_root = "HessianRoot"
    interior_of_sector = "InteriorOfSector"
    misses_p = "MissesP"


class ScenarioTag(str, Enum):
    no_rigid = "NoRigid"
    one_rigid = "OneRigid"
    two_rigid_both_c2_non_neg = "TwoRigid_BothC2NonNeg"
    two_rigid_mixed = "TwoRigid_Mixed"


class Verdict(str, Enum):
    c2_zero = "c2_identically_zero"
    triple_root = "triple_root_cubic"
    empty_positive_cone = "inconsistent_with_ample_class"


class OutputFormat(str, Enum):
    json = "json"
    text = "text"


class ValidationResult(BaseModel):
    accepted: bool
    waived: bool = False
    witness: list[int] | None = None
    residue: int | None = None


class Scenario(BaseModel):
    tag: ScenarioTag
    narrative: str
    assumptions: list[str] = Field(default_factory=list)
    recipes: list[dict[str, Any]] = Field(default_factory=list)
    parametric: bool = False


class CandidateReport(BaseModel):
    e: list[int]
    e_cubed: int
    c2_e: int
    side: str
    provenance: str
    delta: dict[str, Any] | None = None
    delta_semi_ample: bool = False
    mov_bound: dict[str, Any] | None = None
    subcones: list[dict[str, Any]] = Field(default_factory=list)
    fibration: dict[str, Any] | None = None
    notes: list[str] = Field(default_factory=list)


class ComponentReport(BaseModel):
    index: int
    cone: dict[str, Any]
    sample_class: list[int]
    canonical_d: list[int] | None = None
    effectivity: dict[str, Any] | None = None
    c2_line: dict[str, Any]
    c2_dual_ray: dict[str, Any] | None = None
    candidates: list[CandidateReport] = Field(default_factory=list)
    excluded: list[dict[str, Any]] = Field(default_factory=list)
    degenerate_families: list[dict[str, Any]] = Field(default_factory=list)
    slope_bound: dict[str, Any] | None = None
    scenarios: list[Scenario] = Field(default_factory=list)


class AnalysisReport(BaseModel):
    schema_tag: str = Field(serialization_alias="schema")
    validation: ValidationResult
    cubic_case: dict[str, Any] | None = None
    verdict: Verdict | None = None
    verdict_note: str | None = None
    components: list[ComponentReport] = Field(default_factory=list)
    metadata: dict[str, Any] = Field(default_factory=dict)


class ErrorRecord(BaseModel):
    line: int | None = None
    error: str
    message: str

# wllab/schemas.py
"""
wllab - Pydantic Schemas
Documents read and written by the CLI: graphs, partitions, manifests and reports
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from .config import DEFAULT_CAPS

REPORT_SCHEMA = "wllab-report/1"
PARTITION_SCHEMA = "wllab-partition/1"


# =============================================================================
# ENUMS
# =============================================================================

class FamilyName(str, Enum):
    WL = "wl"
    C = "c"
    IM = "im"
    IMT = "imt"
    IMR = "imr"
    EP = "ep"


class ExpectationTag(str, Enum):
    PAPER = "PAPER"        # failure sets a nonzero exit code
    DERIVED = "DERIVED"    # failure is reported only
    RECORD = "RECORD"      # outcome recorded only


class CheckKind(str, Enum):
    DOMINANCE = "dominance"
    EQUIVALENT = "equivalent"
    AXIOMS = "axioms"
    EP_COHERENT = "ep_coherent"
    COHERENT_ALGEBRA = "coherent_algebra"
    DISTINGUISHES = "distinguishes"
    CFI = "cfi"
    IMT_STABLE = "imt_stable"
    ALGEBRAIC_ISOMORPHISM = "algebraic_isomorphism"


# =============================================================================
# GRAPH AND PARTITION DOCUMENTS
# =============================================================================

class GraphDoc(BaseModel):
    """Arc-coloured complete digraph; arcs not listed take the defaults"""
    num_vertices: int = Field(..., ge=1)
    colours: List[str] = Field(..., min_length=1)
    arcs: List[List[int]] = Field(default_factory=list)
    defaults: Dict[str, Optional[str]] = Field(default_factory=dict)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("arcs")
    @classmethod
    def validate_arcs(cls, v):
        for arc in v:
            if len(arc) != 3:
                raise ValueError(f"arc {arc} is not [u, v, colour_index]")
        return v

    @field_validator("colours")
    @classmethod
    def validate_colours(cls, v):
        if len(set(v)) != len(v):
            raise ValueError("colour names must be distinct")
        return v


class PartitionDoc(BaseModel):
    """Labelled partition of V^k listed class by class"""
    schema_id: str = Field(default=PARTITION_SCHEMA, alias="schema")
    n: int = Field(..., ge=1)
    arity: int = Field(..., ge=1)
    classes: List[List[List[int]]]
    class_sizes: List[int] = Field(default_factory=list)
    iterations: int = Field(default=0, ge=0)
    metadata: Dict[str, Any] = Field(default_factory=dict)

    model_config = {"populate_by_name": True}


# =============================================================================
# RUN CONFIGURATION
# =============================================================================

class RunConfig(BaseModel):
    """Validated parameters of one CLI command"""
    command: str
    inputs: List[str] = Field(default_factory=list)
    family: FamilyName = FamilyName.WL
    k: int = Field(default=2, ge=1)
    r: int = Field(default=1, ge=1)
    field: str = Field(default="q", description="q or gf:p")
    cap_tuples: Optional[int] = Field(default=None, ge=1)
    cap_sim: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = None
    out: Optional[str] = None
    manifest: Optional[str] = None
    allow_large: bool = False
    extended: bool = False
    verbosity: int = Field(default=0, ge=-1, le=1)

    @field_validator("field")
    @classmethod
    def validate_field(cls, v):
        from .fields import FieldSpec
        FieldSpec.parse(v)
        return v.lower()

    @model_validator(mode="after")
    def validate_caps(self):
        raised = {
            "CAP_TUPLES": self.cap_tuples,
            "CAP_SIM": self.cap_sim,
        }
        for name, value in raised.items():
            if value is not None and value > DEFAULT_CAPS[name] and not self.allow_large:
                raise ValueError(f"{name.lower()} above its default {DEFAULT_CAPS[name]} needs --allow-large")
        return self


# =============================================================================
# MANIFESTS
# =============================================================================

class ManifestCheck(BaseModel):
    """One expectation of a suite manifest"""
    kind: CheckKind
    tag: ExpectationTag = ExpectationTag.PAPER
    params: Dict[str, Any] = Field(default_factory=dict)
    expect: Optional[Any] = None
    graphs: Optional[List[str]] = None  # corpus names; None means the whole corpus
    max_n: Optional[int] = Field(default=None, ge=1)
    extended: bool = False
    description: str = ""


class Manifest(BaseModel):
    name: str
    description: str = ""
    checks: List[ManifestCheck]

    @model_validator(mode="before")
    @classmethod
    def accept_bare_list(cls, data):
        if isinstance(data, list):
            return {"name": "manifest", "checks": data}
        return data


# =============================================================================
# REPORTS
# =============================================================================

class PairVerdict(BaseModel):
    """Comparison outcomes of two schemes across a corpus"""
    left: str
    right: str
    outcomes: Dict[str, str] = Field(default_factory=dict)
    consistent: bool = True
    counterexample: Optional[str] = None
    verdict: str = ""


class DominanceReport(BaseModel):
    """Per-graph outcomes and per-pair verdicts; verdicts hold for the corpus only"""
    corpus: str
    graphs: List[str] = Field(default_factory=list)
    pairs: List[PairVerdict] = Field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return all(pair.consistent for pair in self.pairs)


class CheckOutcome(BaseModel):
    kind: CheckKind
    tag: ExpectationTag
    description: str = ""
    graph: Optional[str] = None
    outcome: Optional[Any] = None
    expected: Optional[Any] = None
    passed: bool = True
    detail: Dict[str, Any] = Field(default_factory=dict)


class SuiteReport(BaseModel):
    """Deterministic suite report"""
    schema_id: str = Field(default=REPORT_SCHEMA, alias="schema")
    manifest: str
    corpus: List[str] = Field(default_factory=list)
    environment: Dict[str, Any] = Field(default_factory=dict)
    checks: List[CheckOutcome] = Field(default_factory=list)
    dominance: List[DominanceReport] = Field(default_factory=list)
    failed: int = 0
    failed_paper: int = 0

    model_config = {"populate_by_name": True}

    @property
    def passed(self) -> bool:
        return self.failed == 0


__all__ = [
    'REPORT_SCHEMA', 'PARTITION_SCHEMA',
    'FamilyName', 'ExpectationTag', 'CheckKind',
    'GraphDoc', 'PartitionDoc', 'RunConfig',
    'ManifestCheck', 'Manifest',
    'PairVerdict', 'DominanceReport', 'CheckOutcome', 'SuiteReport',
]

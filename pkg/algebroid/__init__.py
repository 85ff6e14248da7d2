"""Lie algebroids in a local frame, two-block products and their verification."""
from .models import (
    AlgebroidError,
    AlgebroidSpec,
    BdcpSpec,
    BLOCK_NAMES,
    CoeffTensor,
    EvaluationError,
    FiberSplit,
    SectionCoeffs,
    ShapeMismatch,
)
from .core import bracket_sections, eval_anchor, eval_structure
from .bdcp import (
    HierarchyLevel,
    IllegalTensorForLevel,
    as_single_block,
    assemble_total,
    classify,
    decompose,
    make_product,
    total_of,
)
from .verifier import (
    CheckResult,
    ResidualReport,
    SamplePlan,
    check_algebroid,
    check_anchor_morphism,
    check_bdcp,
    check_jacobi,
    check_skew,
)

__all__ = [
    "AlgebroidError",
    "AlgebroidSpec",
    "BLOCK_NAMES",
    "BdcpSpec",
    "CheckResult",
    "CoeffTensor",
    "EvaluationError",
    "FiberSplit",
    "HierarchyLevel",
    "IllegalTensorForLevel",
    "ResidualReport",
    "SamplePlan",
    "SectionCoeffs",
    "ShapeMismatch",
    "as_single_block",
    "assemble_total",
    "bracket_sections",
    "check_algebroid",
    "check_anchor_morphism",
    "check_bdcp",
    "check_jacobi",
    "check_skew",
    "classify",
    "decompose",
    "eval_anchor",
    "eval_structure",
    "make_product",
    "total_of",
]

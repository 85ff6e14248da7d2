"""
Assembling, splitting and classifying two-block products.

The total frame lists the A vectors first, so A index ``alpha`` stays
``alpha`` and B index ``a`` becomes ``p + a``.
"""

import logging
from enum import Enum

from exprs import negate

from .models import (
    BLOCK_NAMES,
    AlgebroidError,
    AlgebroidSpec,
    BdcpSpec,
    FiberSplit,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)


class IllegalTensorForLevel(AlgebroidError):
    pass


class HierarchyLevel(str, Enum):
    DIRECT = "direct"
    SEMIDIRECT = "semidirect"
    COCYCLE_EXT = "cocycle_ext"
    DOUBLE_CROSS = "double_cross"
    UNIFIED = "unified"
    BDCP = "BDCP"


# Blocks each level may carry, most specialised level first.
ALLOWED_BLOCKS: dict[HierarchyLevel, frozenset[str]] = {
    HierarchyLevel.DIRECT: frozenset({"phi", "theta"}),
    HierarchyLevel.SEMIDIRECT: frozenset({"theta", "rho"}),
    HierarchyLevel.COCYCLE_EXT: frozenset({"theta", "rho", "psi"}),
    HierarchyLevel.DOUBLE_CROSS: frozenset({"phi", "theta", "rho", "sigma"}),
    HierarchyLevel.UNIFIED: frozenset({"phi", "theta", "rho", "sigma", "psi"}),
    HierarchyLevel.BDCP: frozenset(BLOCK_NAMES),
}


def assemble_total(b: BdcpSpec) -> AlgebroidSpec:
    """The rank ``p + q`` algebroid whose bracket the six blocks describe."""
    p = b.p
    entries = {}
    for (al, be, g), e in b.phi.items():
        entries[(al, be, g)] = e
    for (al, be, c), e in b.zeta.items():
        entries[(al, be, p + c)] = e
    for (a, c, al), e in b.psi.items():
        entries[(p + a, p + c, al)] = e
    for (a, c, d), e in b.theta.items():
        entries[(p + a, p + c, p + d)] = e
    # [e_alpha, e_a] = -[e_a, e_alpha]
    for (a, al, be), e in b.rho.items():
        entries[(al, p + a, be)] = negate(e)
    for (a, al, c), e in b.sigma.items():
        entries[(al, p + a, p + c)] = negate(e)
    anchor = {(al, i): e for (al, i), e in b.anchor_a.items()}
    anchor.update({(p + a, i): e for (a, i), e in b.anchor_b.items()})
    return AlgebroidSpec.build(b.n, b.k, anchor, entries)


def total_of(spec: AlgebroidSpec | BdcpSpec) -> AlgebroidSpec:
    return assemble_total(spec) if isinstance(spec, BdcpSpec) else spec


def decompose(total: AlgebroidSpec, split: FiberSplit) -> BdcpSpec:
    """Read the six blocks off a total structure tensor for the given split."""
    if split.k != total.k:
        raise ShapeMismatch(f"split is for rank {split.k}, algebroid has rank {total.k}")
    p = split.p
    blocks: dict[str, dict] = {name: {} for name in BLOCK_NAMES}
    pairs = {(min(i, j), max(i, j), g) for (i, j, g) in total.structure.entries if i != j}
    for i, j, g in sorted(pairs):
        e = total.structure.entry(i, j, g)
        if j < p:
            name, index = ("phi", (i, j, g)) if g < p else ("zeta", (i, j, g - p))
        elif i >= p:
            name, index = ("psi", (i - p, j - p, g)) if g < p else ("theta", (i - p, j - p, g - p))
        else:
            # i in A, j in B: [e_a, e_alpha] = -C[alpha][a]
            e = negate(e)
            name, index = ("rho", (j - p, i, g)) if g < p else ("sigma", (j - p, i, g - p))
        blocks[name][index] = e
    anchor_a = {(al, i): e for (al, i), e in total.anchor.items() if al < p}
    anchor_b = {(al - p, i): e for (al, i), e in total.anchor.items() if al >= p}
    return BdcpSpec.build(
        total.n, p, split.q, anchor_a=anchor_a, anchor_b=anchor_b, **blocks
    )


def as_single_block(spec: AlgebroidSpec) -> BdcpSpec:
    """View an algebroid as a product with an empty second block."""
    return BdcpSpec.build(
        spec.n,
        spec.k,
        0,
        anchor_a={index: e for index, e in spec.anchor.items()},
        phi={index: e for index, e in spec.structure.items()},
    )


def make_product(
    kind: HierarchyLevel | str,
    n: int,
    p: int,
    q: int,
    *,
    anchor_a=None,
    anchor_b=None,
    **blocks,
) -> BdcpSpec:
    """Build a product of the given kind, refusing blocks that kind cannot carry."""
    level = HierarchyLevel(kind)
    product = BdcpSpec.build(n, p, q, anchor_a=anchor_a, anchor_b=anchor_b, **blocks)
    illegal = set(product.nonzero_blocks()) - ALLOWED_BLOCKS[level]
    if illegal:
        raise IllegalTensorForLevel(
            f"a {level.value} product cannot carry {', '.join(sorted(illegal))}"
        )
    return product


def classify(b: BdcpSpec) -> HierarchyLevel:
    """The most specialised level whose zero pattern ``b`` satisfies."""
    present = set(b.nonzero_blocks())
    for level, allowed in ALLOWED_BLOCKS.items():
        if present <= allowed:
            logger.debug("nonzero blocks %s classify as %s", sorted(present), level.value)
            return level
    raise AssertionError("BDCP admits every block")

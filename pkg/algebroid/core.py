"""Pointwise evaluation of anchors and brackets of sections."""

import numpy as np

from exprs import compile_expr, diff

from .models import AlgebroidSpec, SectionCoeffs, ShapeMismatch, base_env


def eval_anchor(spec: AlgebroidSpec, x) -> np.ndarray:
    """The ``k x n`` anchor matrix at ``x``."""
    return spec.anchor_at(_point(spec, x))


def eval_structure(spec: AlgebroidSpec, x) -> np.ndarray:
    """Dense ``k x k x k`` structure functions at ``x``, honouring implied skew."""
    return spec.structure_at(_point(spec, x))


def _point(spec: AlgebroidSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (spec.n,):
        raise ShapeMismatch(f"base point has {x.size} coordinates, expected {spec.n}")
    return x


def _section_at(spec: AlgebroidSpec, section: SectionCoeffs, x: np.ndarray):
    if len(section.components) != spec.k:
        raise ShapeMismatch(f"section has {len(section.components)} components, expected {spec.k}")
    env = base_env(x)
    values = np.array([compile_expr(c)(env) for c in section.components])
    grads = np.array(
        [[compile_expr(diff(c, f"x{i + 1}"))(env) for c in section.components] for i in range(spec.n)]
    ).reshape(spec.n, spec.k)
    return values, grads


def bracket_sections(spec: AlgebroidSpec, X: SectionCoeffs, Y: SectionCoeffs, x) -> np.ndarray:
    """
    Components of ``[X, Y]`` at ``x``:

    ``X^a Y^b C^g_{ab} + a(X)(Y^g) - a(Y)(X^g)``
    """
    x = _point(spec, x)
    A = spec.anchor_at(x)
    C = spec.structure_at(x)
    xv, dx = _section_at(spec, X, x)
    yv, dy = _section_at(spec, Y, x)
    algebraic = np.einsum("a,b,abg->g", xv, yv, C)
    # a(X) = X^a a^i_a, acting on the components of Y by differentiation
    return algebraic + np.einsum("a,ai,ig->g", xv, A, dy) - np.einsum("b,bi,ig->g", yv, A, dx)

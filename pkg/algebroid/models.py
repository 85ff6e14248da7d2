"""
Algebroid data: coefficient tensors, algebroid specs and their block splits.

All indices are 0-based here; spec files use 1-based indices. Every stored
expression is constant-folded and literal zeros are never stored, so a tensor
is zero exactly when it has no entries.
"""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Self

import numpy as np

from exprs import Expr, ExprDomainError, Num, compile_expr, diff, fold, negate, parse, variables
from exprs.calculus import Compiled

logger = logging.getLogger(__name__)


class AlgebroidError(Exception):
    """Base class for malformed or unevaluable algebroid data."""


class ShapeMismatch(AlgebroidError):
    pass


class EvaluationError(AlgebroidError):
    """A coefficient could not be evaluated at a base point."""


Index = tuple[int, ...]
Coefficient = Expr | str | float | int


def as_expr(value: Coefficient) -> Expr:
    if isinstance(value, str):
        return fold(parse(value))
    if isinstance(value, (int, float)):
        return Num(float(value))
    return fold(value)


def base_env(x: np.ndarray) -> dict[str, float]:
    return {f"x{i + 1}": float(v) for i, v in enumerate(x)}


def _label(name: str, index: Index) -> str:
    return name + "".join(f"[{i + 1}]" for i in index)


@dataclass(frozen=True)
class CoeffTensor:
    """
    Sparse tensor of scalar fields over the base.

    Rank-3 tensors may be antisymmetric in their first two indices. Canonical
    storage keeps only ``i < j`` for those; non-canonical (dense) storage keeps
    entries exactly as given, and the mirror of a stored entry is implied only
    when it is not stored itself.
    """

    shape: Index
    entries: dict[Index, Expr] = field(default_factory=dict)
    antisymmetric: bool = False
    name: str = field(default="C", compare=False)

    @classmethod
    def build(
        cls,
        shape: Iterable[int],
        entries: Mapping[Index, Coefficient] | Iterable[tuple[Index, Coefficient]] = (),
        *,
        antisymmetric: bool = False,
        canonical: bool = True,
        name: str = "C",
    ) -> Self:
        shape = tuple(shape)
        items = entries.items() if isinstance(entries, Mapping) else entries
        stored: dict[Index, Expr] = {}
        for index, value in items:
            index = tuple(int(i) for i in index)
            if len(index) != len(shape) or any(not 0 <= i < d for i, d in zip(index, shape)):
                raise ShapeMismatch(f"{_label(name, index)} is outside shape {shape}")
            expr = as_expr(value)
            if antisymmetric and canonical and index[0] >= index[1]:
                if index[0] == index[1]:
                    if expr == Num(0.0):
                        continue
                    raise ShapeMismatch(f"{_label(name, index)}: diagonal of an antisymmetric tensor")
                index = (index[1], index[0], *index[2:])
                expr = negate(expr)
            if index in stored:
                raise ShapeMismatch(f"{_label(name, index)} given twice")
            if expr == Num(0.0):
                continue
            stored[index] = expr
        return cls(shape, stored, antisymmetric, name)

    def entry(self, *index: int) -> Expr:
        if index in self.entries:
            return self.entries[index]
        if self.antisymmetric:
            mirror = (index[1], index[0], *index[2:])
            if mirror in self.entries:
                return negate(self.entries[mirror])
        return Num(0.0)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def items(self) -> list[tuple[Index, Expr]]:
        return sorted(self.entries.items())

    def variables(self) -> frozenset[str]:
        names: frozenset[str] = frozenset()
        for expr in self.entries.values():
            names |= variables(expr)
        return names

    def dense_items(self) -> list[tuple[Index, Expr]]:
        """Stored entries plus implied antisymmetric mirrors."""
        expanded = dict(self.entries)
        if self.antisymmetric:
            for (i, j, *rest), expr in self.entries.items():
                mirror = (j, i, *rest)
                if mirror not in self.entries:
                    expanded[mirror] = negate(expr)
        return sorted(expanded.items())

    @cached_property
    def _compiled(self) -> list[tuple[Index, Compiled]]:
        return [(index, compile_expr(expr)) for index, expr in self.dense_items()]

    @cached_property
    def is_constant(self) -> bool:
        return not self.variables()

    @cached_property
    def _constant_value(self) -> np.ndarray:
        value = self._fill(self._compiled, {}, self.shape)
        value.flags.writeable = False
        return value

    def _fill(self, compiled, env, shape) -> np.ndarray:
        out = np.zeros(shape)
        for index, fn in compiled:
            try:
                out[index] = fn(env)
            except ExprDomainError as e:
                raise EvaluationError(f"{_label(self.name, index[-len(self.shape):])}: {e}") from e
        return out

    def at(self, x: np.ndarray) -> np.ndarray:
        """Dense numeric value at base point ``x``."""
        if self.is_constant:
            return self._constant_value
        return self._fill(self._compiled, base_env(x), self.shape)

    def _gradient_compiled(self, n: int) -> list[tuple[Index, Compiled]]:
        cache = self.__dict__.setdefault("_gradient_cache", {})
        if n not in cache:
            compiled = []
            for index, expr in self.dense_items():
                for i in range(n):
                    d = diff(expr, f"x{i + 1}")
                    if d != Num(0.0):
                        compiled.append(((i, *index), compile_expr(d)))
            cache[n] = compiled
        return cache[n]

    def gradient_at(self, x: np.ndarray) -> np.ndarray:
        """Base derivatives, shape ``(n, *shape)`` with the derivative index first."""
        n = len(x)
        if self.is_constant:
            return np.zeros((n, *self.shape))
        return self._fill(self._gradient_compiled(n), base_env(x), (n, *self.shape))


def _check_base_only(tensor: CoeffTensor, n: int) -> None:
    allowed = {f"x{i + 1}" for i in range(n)}
    stray = tensor.variables() - allowed
    if stray:
        raise ShapeMismatch(
            f"{tensor.name} uses {sorted(stray)}; only base coordinates x1..x{n} are allowed"
        )


def anchor_tensor(k: int, n: int, anchor, name: str = "anchor") -> CoeffTensor:
    """Accept a mapping ``{(alpha, i): expr}`` or nested rows."""
    if isinstance(anchor, CoeffTensor):
        if anchor.shape != (k, n):
            raise ShapeMismatch(f"{name} has shape {anchor.shape}, expected {(k, n)}")
        return anchor
    if anchor is None:
        anchor = {}
    if not isinstance(anchor, Mapping):
        rows = list(anchor)
        if len(rows) != k or any(len(row) != n for row in rows):
            raise ShapeMismatch(f"{name} must be {k}x{n}")
        anchor = {(a, i): v for a, row in enumerate(rows) for i, v in enumerate(row)}
    return CoeffTensor.build((k, n), anchor, name=name)


def tensor_of(shape: Index, value, *, antisymmetric: bool, name: str, canonical=True) -> CoeffTensor:
    if isinstance(value, CoeffTensor):
        if value.shape != shape:
            raise ShapeMismatch(f"{name} has shape {value.shape}, expected {shape}")
        return value
    return CoeffTensor.build(
        shape, value or {}, antisymmetric=antisymmetric, canonical=canonical, name=name
    )


@dataclass(frozen=True)
class AlgebroidSpec:
    """
    A vector bundle of rank ``k`` over an ``n``-dimensional base, in a local
    frame: the anchor ``a[alpha][i]`` and the structure functions
    ``C[alpha][beta][gamma]`` of ``[e_alpha, e_beta] = C^gamma_{alpha beta} e_gamma``.
    """

    n: int
    k: int
    anchor: CoeffTensor
    structure: CoeffTensor

    def __post_init__(self):
        if self.n < 0 or self.k < 1:
            raise ShapeMismatch(f"need n >= 0 and k >= 1, got n={self.n} k={self.k}")
        if self.anchor.shape != (self.k, self.n):
            raise ShapeMismatch(f"anchor has shape {self.anchor.shape}, expected {(self.k, self.n)}")
        if self.structure.shape != (self.k,) * 3 or not self.structure.antisymmetric:
            raise ShapeMismatch(f"structure must be an antisymmetric {self.k}x{self.k}x{self.k} tensor")
        _check_base_only(self.anchor, self.n)
        _check_base_only(self.structure, self.n)

    @classmethod
    def build(cls, n: int, k: int, anchor=None, structure=None, *, canonical: bool = True) -> Self:
        return cls(
            n,
            k,
            anchor_tensor(k, n, anchor),
            tensor_of((k, k, k), structure, antisymmetric=True, name="structure", canonical=canonical),
        )

    @classmethod
    def lie_algebra(cls, k: int, structure) -> Self:
        """A Lie algebra is an algebroid over a point."""
        return cls.build(0, k, None, structure)

    @classmethod
    def tangent(cls, n: int) -> Self:
        """Tangent bundle of R^n: identity anchor, zero brackets."""
        return cls.build(n, n, {(i, i): 1 for i in range(n)})

    def anchor_at(self, x: np.ndarray) -> np.ndarray:
        return self.anchor.at(x)

    def structure_at(self, x: np.ndarray) -> np.ndarray:
        return self.structure.at(x)


@dataclass(frozen=True)
class SectionCoeffs:
    """Components of a section in the local frame."""

    components: tuple[Expr, ...]

    @classmethod
    def of(cls, *components: Coefficient) -> Self:
        return cls(tuple(as_expr(c) for c in components))


BLOCK_NAMES = ("phi", "zeta", "rho", "sigma", "psi", "theta")


@dataclass(frozen=True)
class BdcpSpec:
    """
    Two sub-bundles A (rank ``p``) and B (rank ``q``) with their six
    interaction tensors:

    - ``phi``   A x A -> A,  ``zeta``  A x A -> B
    - ``rho``   B x A -> A,  ``sigma`` B x A -> B, so that
      ``[e_a, e_alpha] = rho[a][alpha][beta] e_beta + sigma[a][alpha][b] e_b``
    - ``psi``   B x B -> A,  ``theta`` B x B -> B
    """

    n: int
    p: int
    q: int
    anchor_a: CoeffTensor
    anchor_b: CoeffTensor
    phi: CoeffTensor
    zeta: CoeffTensor
    rho: CoeffTensor
    sigma: CoeffTensor
    psi: CoeffTensor
    theta: CoeffTensor

    def __post_init__(self):
        n, p, q = self.n, self.p, self.q
        if n < 0 or p < 0 or q < 0 or p + q < 1:
            raise ShapeMismatch(f"bad dimensions n={n} p={p} q={q}")
        expected = self.shapes(n, p, q)
        for name, shape in expected.items():
            tensor = getattr(self, name)
            if tensor.shape != shape:
                raise ShapeMismatch(f"{name} has shape {tensor.shape}, expected {shape}")
            _check_base_only(tensor, n)

    @staticmethod
    def shapes(n: int, p: int, q: int) -> dict[str, Index]:
        return {
            "anchor_a": (p, n),
            "anchor_b": (q, n),
            "phi": (p, p, p),
            "zeta": (p, p, q),
            "rho": (q, p, p),
            "sigma": (q, p, q),
            "psi": (q, q, p),
            "theta": (q, q, q),
        }

    @classmethod
    def build(cls, n: int, p: int, q: int, *, anchor_a=None, anchor_b=None, **blocks) -> Self:
        unknown = set(blocks) - set(BLOCK_NAMES)
        if unknown:
            raise ShapeMismatch(f"unknown blocks {sorted(unknown)}")
        shapes = cls.shapes(n, p, q)
        tensors = {
            name: tensor_of(
                shapes[name],
                blocks.get(name),
                antisymmetric=name in ("phi", "zeta", "psi", "theta"),
                name=name,
            )
            for name in BLOCK_NAMES
        }
        return cls(
            n,
            p,
            q,
            anchor_tensor(p, n, anchor_a, "anchor_a"),
            anchor_tensor(q, n, anchor_b, "anchor_b"),
            **tensors,
        )

    @property
    def k(self) -> int:
        return self.p + self.q

    def blocks(self) -> dict[str, CoeffTensor]:
        return {name: getattr(self, name) for name in BLOCK_NAMES}

    def nonzero_blocks(self) -> tuple[str, ...]:
        return tuple(name for name, t in self.blocks().items() if not t.is_zero)


@dataclass(frozen=True)
class FiberSplit:
    """First ``p`` frame vectors span A, the remaining ``k - p`` span B."""

    p: int
    k: int

    def __post_init__(self):
        if not 1 <= self.p < self.k:
            raise ShapeMismatch(f"split needs 1 <= p < k, got p={self.p} k={self.k}")

    @property
    def q(self) -> int:
        return self.k - self.p

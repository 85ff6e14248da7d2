"""
Numerical verification of the algebroid axioms on a plan of base points.

Every residual is the maximum absolute value over all index tuples and all
sample points. Ties are broken by the lowest point index and then the
lexicographically smallest index tuple, so reports are reproducible whatever
the worker count.
"""

import json
import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Self

import numpy as np

from .bdcp import assemble_total
from .models import AlgebroidSpec, BdcpSpec

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


def _radical_inverse(index: int, base: int) -> float:
    result, f = 0.0, 1.0 / base
    while index > 0:
        index, digit = divmod(index, base)
        result += digit * f
        f /= base
    return result


def _prime(axis: int) -> int:
    if axis < len(_PRIMES):
        return _PRIMES[axis]
    candidate = _PRIMES[-1]
    found = len(_PRIMES) - 1
    while found < axis:
        candidate += 2
        if all(candidate % d for d in range(3, int(candidate**0.5) + 1, 2)):
            found += 1
    return candidate


@dataclass(frozen=True, eq=False)
class SamplePlan:
    """Base points, shape ``(m, n)``."""

    points: np.ndarray

    @classmethod
    def explicit(cls, points, n: int) -> Self:
        array = np.asarray(points, dtype=float).reshape(-1, n)
        if len(array) == 0:
            raise ValueError("sample plan needs at least one point")
        return cls(array)

    @classmethod
    def sampled(
        cls, n: int, count: int = 32, seed: int = 0, bounds: tuple[float, float] = (-1.0, 1.0)
    ) -> Self:
        """
        Halton points shifted by a seeded random rotation, scaled into ``bounds``.

        A point base (``n == 0``) has a single empty sample whatever ``count`` is.
        """
        if n == 0:
            return cls(np.zeros((1, 0)))
        shift = np.random.default_rng(seed).random(n)
        unit = np.array(
            [[_radical_inverse(i + 1, _prime(axis)) for axis in range(n)] for i in range(count)]
        )
        unit = (unit + shift) % 1.0
        low, high = bounds
        return cls(low + (high - low) * unit)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    point_index: int
    point: tuple[float, ...]
    indices: tuple[int, ...]  # 1-based, matching spec files
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


@dataclass(frozen=True)
class ResidualReport:
    checks: tuple[CheckResult, ...]
    nonzero_blocks: tuple[str, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def merge(self, other: "ResidualReport") -> "ResidualReport":
        return ResidualReport(self.checks + other.checks, self.nonzero_blocks or other.nonzero_blocks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "nonzero_blocks": list(self.nonzero_blocks),
            "checks": [asdict(c) | {"passed": c.passed} for c in self.checks],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "ok" if c.passed else "FAIL"
            where = ",".join(str(i) for i in c.indices) or "-"
            out.append(
                f"{c.name:<16} {status:<4} max residual {c.max_residual:.3e} "
                f"at point #{c.point_index} indices [{where}]"
            )
        return out


Residual = Callable[[AlgebroidSpec, np.ndarray], np.ndarray]


def _scan(
    name: str,
    spec: AlgebroidSpec,
    plan: SamplePlan,
    residual: Residual,
    tol: float,
    workers: int,
) -> ResidualReport:
    def at(i: int) -> np.ndarray:
        return np.abs(residual(spec, plan.points[i]))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            grids = list(pool.map(at, range(len(plan))))
    else:
        grids = [at(i) for i in range(len(plan))]

    best, best_point, best_index = -1.0, 0, ()
    for i, grid in enumerate(grids):
        if grid.size == 0:
            continue
        flat = int(np.argmax(grid))  # first maximum in C order
        value = float(grid.flat[flat])
        if value > best:
            best, best_point = value, i
            best_index = tuple(int(j) + 1 for j in np.unravel_index(flat, grid.shape))
    best = max(best, 0.0)
    result = CheckResult(
        name, best, best_point, tuple(float(v) for v in plan.points[best_point]), best_index, tol
    )
    logger.debug("%s: max residual %.3e at point %d %s", name, best, best_point, best_index)
    return ResidualReport((result,))


def _skew_residual(spec: AlgebroidSpec, x: np.ndarray) -> np.ndarray:
    C = spec.structure_at(x)
    return C + C.transpose(1, 0, 2)


def _anchor_residual(spec: AlgebroidSpec, x: np.ndarray) -> np.ndarray:
    A = spec.anchor_at(x)
    dA = spec.anchor.gradient_at(x)  # dA[i, alpha, j] = d_i a^j_alpha
    C = spec.structure_at(x)
    image = np.einsum("abg,gj->abj", C, A)
    commutator = np.einsum("ai,ibj->abj", A, dA) - np.einsum("bi,iaj->abj", A, dA)
    return image - commutator


def _jacobi_residual(spec: AlgebroidSpec, x: np.ndarray) -> np.ndarray:
    A = spec.anchor_at(x)
    C = spec.structure_at(x)
    dC = spec.structure.gradient_at(x)  # dC[i, b, c, v]
    term = np.einsum("ai,ibcv->abcv", A, dC) + np.einsum("bcm,amv->abcv", C, C)
    return term + np.einsum("bcav->abcv", term) + np.einsum("cabv->abcv", term)


def check_skew(
    spec: AlgebroidSpec, plan: SamplePlan, tol: float = DEFAULT_TOLERANCE, workers: int = 1
) -> ResidualReport:
    """``|C[a][b][g] + C[b][a][g]|``; zero by construction for canonical storage."""
    return _scan("skew", spec, plan, _skew_residual, tol, workers)


def check_anchor_morphism(
    spec: AlgebroidSpec, plan: SamplePlan, tol: float = DEFAULT_TOLERANCE, workers: int = 1
) -> ResidualReport:
    """The anchor maps brackets of frame sections to commutators of vector fields."""
    return _scan("anchor", spec, plan, _anchor_residual, tol, workers)


def check_jacobi(
    spec: AlgebroidSpec, plan: SamplePlan, tol: float = DEFAULT_TOLERANCE, workers: int = 1
) -> ResidualReport:
    """Cyclic sum of ``a(e_a)(C^v_bc) + C^m_bc C^v_am`` over ``(a, b, c)``."""
    return _scan("jacobi", spec, plan, _jacobi_residual, tol, workers)


def check_algebroid(
    spec: AlgebroidSpec, plan: SamplePlan, tol: float = DEFAULT_TOLERANCE, workers: int = 1
) -> ResidualReport:
    report = check_skew(spec, plan, tol, workers)
    report = report.merge(check_anchor_morphism(spec, plan, tol, workers))
    return report.merge(check_jacobi(spec, plan, tol, workers))


def check_bdcp(
    b: BdcpSpec, plan: SamplePlan, tol: float = DEFAULT_TOLERANCE, workers: int = 1
) -> ResidualReport:
    """
    Verify a product through its assembled bracket.

    The block compatibility conditions are exactly the components of the
    total Jacobi and anchor conditions, so checking the total is equivalent.
    The Leibniz rule holds automatically for a bracket built from a frame and
    is reported with a zero residual.
    """
    total = assemble_total(b)
    report = check_algebroid(total, plan, tol, workers)
    leibniz = CheckResult("leibniz", 0.0, 0, tuple(float(v) for v in plan.points[0]), (), tol)
    blocks = b.nonzero_blocks()
    if not report.passed:
        logger.warning("product with nonzero blocks %s fails verification", ", ".join(blocks))
    return ResidualReport(report.checks + (leibniz,), blocks)

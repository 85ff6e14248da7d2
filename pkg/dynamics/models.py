"""States, energy functions and trajectories."""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Self

import numpy as np

from exprs import Expr, Num, compile_expr, diff, fold, parse, to_text, variables
from exprs.calculus import Compiled


class DynamicsError(Exception):
    """Base class for failures while building or integrating a system."""


class ArityError(DynamicsError):
    pass


class SingularLagrangian(DynamicsError):
    pass


class StepUnderflow(DynamicsError):
    pass


class SystemKind(str, Enum):
    HAMILTON = "hamilton"
    DISSIPATIVE_HAMILTON = "dissipative-hamilton"
    EULER_LAGRANGE = "euler-lagrange"
    HERGLOTZ = "herglotz"

    @classmethod
    def _missing_(cls, value):
        return DYNAMICS_ALIASES.get(value)

    @property
    def is_dissipative(self) -> bool:
        return self in (SystemKind.DISSIPATIVE_HAMILTON, SystemKind.HERGLOTZ)

    @property
    def is_lagrangian(self) -> bool:
        return self in (SystemKind.EULER_LAGRANGE, SystemKind.HERGLOTZ)


# Names accepted on the command line.
DYNAMICS_ALIASES: dict[str, SystemKind] = {
    "hamilton": SystemKind.HAMILTON,
    "lie-poisson": SystemKind.HAMILTON,
    "euler-lagrange": SystemKind.EULER_LAGRANGE,
    "euler-poincare": SystemKind.EULER_LAGRANGE,
    "herglotz": SystemKind.HERGLOTZ,
    "dissipative-hamilton": SystemKind.DISSIPATIVE_HAMILTON,
    "contact": SystemKind.DISSIPATIVE_HAMILTON,
}


@dataclass(frozen=True, eq=False)
class DynState:
    """Base point ``x``, fiber point ``y`` and, for dissipative systems, ``z``."""

    x: np.ndarray
    y: np.ndarray
    z: float | None = None

    @classmethod
    def of(cls, x, y, z: float | None = None) -> Self:
        return cls(np.asarray(x, dtype=float).reshape(-1), np.asarray(y, dtype=float).reshape(-1), z)

    @property
    def has_z(self) -> bool:
        return self.z is not None

    def vector(self) -> np.ndarray:
        parts = [self.x, self.y]
        if self.z is not None:
            parts.append(np.array([self.z]))
        return np.concatenate(parts)

    @classmethod
    def from_vector(cls, v: np.ndarray, n: int, k: int, has_z: bool) -> Self:
        return cls(v[:n].copy(), v[n : n + k].copy(), float(v[n + k]) if has_z else None)

    def env(self) -> dict[str, float]:
        env = {f"x{i + 1}": float(v) for i, v in enumerate(self.x)}
        env.update({f"y{a + 1}": float(v) for a, v in enumerate(self.y)})
        if self.z is not None:
            env["z"] = self.z
        return env

    def column_names(self) -> list[str]:
        names = [f"x{i + 1}" for i in range(len(self.x))] + [f"y{a + 1}" for a in range(len(self.y))]
        return names + (["z"] if self.has_z else [])


def _compile_all(exprs) -> list[Compiled]:
    return [compile_expr(e) for e in exprs]


def _evaluate(fns: list[Compiled], env) -> np.ndarray:
    return np.array([fn(env) for fn in fns], dtype=float)


@dataclass(frozen=True)
class EnergyLike:
    """
    A Hamiltonian or Lagrangian on ``n`` base and ``k`` fiber coordinates.

    ``uses_z`` permits the dissipation coordinate. Any variable outside the
    declared arity is rejected.
    """

    expr: Expr
    n: int
    k: int
    uses_z: bool = False
    name: str = field(default="H", compare=False)

    def __post_init__(self):
        allowed = {f"x{i + 1}" for i in range(self.n)} | {f"y{a + 1}" for a in range(self.k)}
        if self.uses_z:
            allowed.add("z")
        stray = variables(self.expr) - allowed
        if stray:
            raise ArityError(
                f"{self.name} = {to_text(self.expr)} uses {sorted(stray)} outside its arity "
                f"(n={self.n}, k={self.k}, z={'yes' if self.uses_z else 'no'})"
            )

    @classmethod
    def parse(cls, text: str, n: int, k: int, uses_z: bool = False, name: str = "H") -> Self:
        return cls(fold(parse(text)), n, k, uses_z, name)

    @property
    def text(self) -> str:
        return to_text(self.expr)

    @cached_property
    def _xs(self) -> list[str]:
        return [f"x{i + 1}" for i in range(self.n)]

    @cached_property
    def _ys(self) -> list[str]:
        return [f"y{a + 1}" for a in range(self.k)]

    @cached_property
    def _value(self) -> Compiled:
        return compile_expr(self.expr)

    @cached_property
    def d_x(self) -> tuple[Expr, ...]:
        return tuple(diff(self.expr, v) for v in self._xs)

    @cached_property
    def d_y(self) -> tuple[Expr, ...]:
        return tuple(diff(self.expr, v) for v in self._ys)

    @cached_property
    def d_z(self) -> Expr:
        return diff(self.expr, "z") if self.uses_z else Num(0.0)

    @cached_property
    def _gradient(self) -> tuple[list[Compiled], list[Compiled], Compiled]:
        return _compile_all(self.d_x), _compile_all(self.d_y), compile_expr(self.d_z)

    @cached_property
    def _hessian(self) -> tuple[list[list[Compiled]], list[list[Compiled]], list[Compiled]]:
        yy = [_compile_all(diff(d, v) for v in self._ys) for d in self.d_y]
        yx = [_compile_all(diff(d, v) for v in self._xs) for d in self.d_y]
        yz = _compile_all(diff(d, "z") if self.uses_z else Num(0.0) for d in self.d_y)
        return yy, yx, yz

    def value(self, s: DynState) -> float:
        return self._value(s.env())

    def gradient(self, s: DynState) -> tuple[np.ndarray, np.ndarray, float]:
        """``(dF/dx, dF/dy, dF/dz)``."""
        env = s.env()
        gx, gy, gz = self._gradient
        return _evaluate(gx, env), _evaluate(gy, env), gz(env)

    def fiber_hessians(self, s: DynState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(d2F/dy dy, d2F/dy dx, d2F/dy dz)`` with shapes ``(k,k)``, ``(k,n)``, ``(k,)``."""
        env = s.env()
        yy, yx, yz = self._hessian
        return (
            np.array([_evaluate(row, env) for row in yy]).reshape(self.k, self.k),
            np.array([_evaluate(row, env) for row in yx]).reshape(self.k, self.n),
            _evaluate(yz, env),
        )


@dataclass(frozen=True)
class CasimirFn:
    """A function of the state expected to stay constant along reversible flows."""

    name: str
    energy: EnergyLike

    @classmethod
    def parse(cls, name: str, text: str, n: int, k: int) -> Self:
        return cls(name, EnergyLike.parse(text, n, k, name=name))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Sampled states at the accepted step times, with monitor columns.

    ``values`` has one row per time and ``n + k (+1)`` columns.
    """

    times: np.ndarray
    values: np.ndarray
    n: int
    k: int
    has_z: bool
    energy: np.ndarray
    casimirs: dict[str, np.ndarray] = field(default_factory=dict)
    dissipation_residual: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> DynState:
        return DynState.from_vector(self.values[i], self.n, self.k, self.has_z)

    @property
    def states(self) -> list[DynState]:
        return [self.state(i) for i in range(len(self))]

    @property
    def final(self) -> DynState:
        return self.state(len(self) - 1)

"""
Right-hand sides of the four equation families on an algebroid.

With anchor ``a[alpha][i]`` and structure functions ``C[alpha][beta][gamma]``:

Hamilton (on the dual, coordinates ``(x, y)``)::

    x'^i     = a[alpha][i] dH/dy_alpha
    y'_alpha = -C[alpha][beta][gamma] y_gamma dH/dy_beta - a[alpha][i] dH/dx^i

The dissipative variant adds ``-y_alpha dH/dz`` to ``y'`` and evolves
``z' = y . dH/dy - H``.

Euler-Lagrange (on the algebroid, coordinates ``(x, y)``)::

    x'^i = a[alpha][i] y^alpha
    d/dt dL/dy^alpha = a[alpha][i] dL/dx^i - C[alpha][beta][gamma] y^beta dL/dy^gamma

and the Herglotz variant adds ``(dL/dz) dL/dy^alpha`` with ``z' = L``. This
sign on the structure term is the one the Legendre map carries into the
Hamilton equations above.
"""

import logging

import numpy as np

from algebroid import AlgebroidSpec, BdcpSpec, total_of
from exprs import BinOp, Num, Var, fold

from .models import ArityError, DynState, EnergyLike, SingularLagrangian, SystemKind

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12


def _check(spec: AlgebroidSpec, f: EnergyLike, s: DynState, needs_z: bool) -> None:
    if (f.n, f.k) != (spec.n, spec.k):
        raise ArityError(f"{f.name} is on (n={f.n}, k={f.k}), algebroid is (n={spec.n}, k={spec.k})")
    if s.x.shape != (spec.n,) or s.y.shape != (spec.k,):
        raise ArityError(f"state has {s.x.size}+{s.y.size} coordinates, expected {spec.n}+{spec.k}")
    if needs_z and not s.has_z:
        raise ArityError("dissipative dynamics need a z coordinate in the state")
    if not needs_z and s.has_z:
        raise ArityError("reversible dynamics take no z coordinate")
    if f.uses_z and not needs_z:
        raise ArityError(f"{f.name} depends on z; use dissipative dynamics")


def _frame(spec: AlgebroidSpec, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return spec.anchor_at(x), spec.structure_at(x)


def hamiltonian_rhs(spec: AlgebroidSpec | BdcpSpec, H: EnergyLike, s: DynState) -> DynState:
    spec = total_of(spec)
    _check(spec, H, s, needs_z=False)
    A, C = _frame(spec, s.x)
    hx, hy, _ = H.gradient(s)
    return DynState(A.T @ hy, -np.einsum("abg,g,b->a", C, s.y, hy) - A @ hx)


def dissipative_hamiltonian_rhs(
    spec: AlgebroidSpec | BdcpSpec, H: EnergyLike, s: DynState
) -> DynState:
    spec = total_of(spec)
    _check(spec, H, s, needs_z=True)
    A, C = _frame(spec, s.x)
    hx, hy, hz = H.gradient(s)
    dy = -np.einsum("abg,g,b->a", C, s.y, hy) - A @ hx - s.y * hz
    return DynState(A.T @ hy, dy, float(s.y @ hy - H.value(s)))


def _solve_fiber(L: EnergyLike, s: DynState, force: np.ndarray, dx: np.ndarray, dz: float, limit: float):
    W, M, Mz = L.fiber_hessians(s)
    rhs = force - M @ dx - Mz * dz
    cond = np.linalg.cond(W)
    if not np.isfinite(cond) or cond > limit:
        raise SingularLagrangian(
            f"fiber Hessian of {L.name} has condition number {cond:.3e} at y={s.y.tolist()}"
        )
    if cond > limit * 1e-3:
        logger.warning("fiber Hessian of %s is nearly singular (cond %.3e)", L.name, cond)
    return np.linalg.solve(W, rhs)


def lagrangian_force(spec: AlgebroidSpec, L: EnergyLike, s: DynState) -> np.ndarray:
    """``a dL/dx - C y dL/dy``, the right side of the reversible equations."""
    A, C = _frame(spec, s.x)
    lx, ly, _ = L.gradient(s)
    return A @ lx - np.einsum("abg,b,g->a", C, s.y, ly)


def euler_lagrange_rhs(
    spec: AlgebroidSpec | BdcpSpec, L: EnergyLike, s: DynState, cond_limit: float = CONDITION_LIMIT
) -> DynState:
    spec = total_of(spec)
    _check(spec, L, s, needs_z=False)
    dx = spec.anchor_at(s.x).T @ s.y
    dy = _solve_fiber(L, s, lagrangian_force(spec, L, s), dx, 0.0, cond_limit)
    return DynState(dx, dy)


def herglotz_rhs(
    spec: AlgebroidSpec | BdcpSpec, L: EnergyLike, s: DynState, cond_limit: float = CONDITION_LIMIT
) -> DynState:
    spec = total_of(spec)
    _check(spec, L, s, needs_z=True)
    _, ly, lz = L.gradient(s)
    dx = spec.anchor_at(s.x).T @ s.y
    dz = L.value(s)
    force = lagrangian_force(spec, L, s) + lz * ly
    return DynState(dx, _solve_fiber(L, s, force, dx, dz, cond_limit), dz)


RHS = {
    SystemKind.HAMILTON: hamiltonian_rhs,
    SystemKind.DISSIPATIVE_HAMILTON: dissipative_hamiltonian_rhs,
    SystemKind.EULER_LAGRANGE: euler_lagrange_rhs,
    SystemKind.HERGLOTZ: herglotz_rhs,
}


def rhs_for(kind: SystemKind):
    return RHS[SystemKind(kind)]


def energy_function(L: EnergyLike) -> EnergyLike:
    """``E_L = y . dL/dy - L`` as a symbolic function."""
    total = Num(0.0)
    for a, d in enumerate(L.d_y):
        total = BinOp("+", total, BinOp("*", Var(f"y{a + 1}"), d))
    return EnergyLike(fold(BinOp("-", total, L.expr)), L.n, L.k, L.uses_z, name=f"E_{L.name}")


def legendre_map(L: EnergyLike, s: DynState) -> DynState:
    """``(x, y, z) -> (x, dL/dy, z)``."""
    _, ly, _ = L.gradient(s)
    return DynState(s.x.copy(), ly, s.z)


def legendre_inverse(
    L: EnergyLike,
    s: DynState,
    guess: np.ndarray | None = None,
    tol: float = 1e-12,
    max_iter: int = 50,
    cond_limit: float = CONDITION_LIMIT,
) -> DynState:
    """
    Solve ``dL/dy (x, y, z) = p`` for ``y`` by Newton iteration, where ``s``
    holds ``(x, p, z)``.
    """
    y = np.array(s.y if guess is None else guess, dtype=float)
    for _ in range(max_iter):
        trial = DynState(s.x, y, s.z)
        _, ly, _ = L.gradient(trial)
        residual = ly - s.y
        if np.max(np.abs(residual), initial=0.0) <= tol:
            return trial
        W, _, _ = L.fiber_hessians(trial)
        if np.linalg.cond(W) > cond_limit:
            raise SingularLagrangian(f"cannot invert the Legendre map of {L.name} at y={y.tolist()}")
        y = y - np.linalg.solve(W, residual)
    raise SingularLagrangian(f"Legendre inverse of {L.name} did not converge")

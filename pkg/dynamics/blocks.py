"""
Block form of the equations of motion on a two-block product.

These evaluate the six interaction tensors directly instead of assembling the
total bracket first. Fiber coordinates are ordered A block first, so
``y[:p]`` are the A components and ``y[p:]`` the B components.
"""

import logging
from enum import Enum

import numpy as np

from algebroid import BdcpSpec

from .models import DynState, EnergyLike
from .rhs import CONDITION_LIMIT, _solve_fiber

logger = logging.getLogger(__name__)


class StructureSign(str, Enum):
    """
    Sign of the structure terms in the Lagrangian equations.

    ``LEGENDRE`` matches the Hamilton equations under the Legendre map.
    ``PLUS`` keeps ``+C y dL/dy`` on the right side, which describes the
    time-reversed flow in the fiber; it exists for comparison only.
    """

    LEGENDRE = "legendre"
    PLUS = "plus"


def _blocks(b: BdcpSpec, x: np.ndarray) -> dict[str, np.ndarray]:
    values = {name: t.at(x) for name, t in b.blocks().items()}
    values["anchor_a"] = b.anchor_a.at(x)
    values["anchor_b"] = b.anchor_b.at(x)
    return values


def _hamilton_fiber(b: BdcpSpec, t: dict, s: DynState, hx, hy) -> tuple[np.ndarray, np.ndarray]:
    p = b.p
    yA, yB = s.y[:p], s.y[p:]
    hA, hB = hy[:p], hy[p:]
    dA = (
        -np.einsum("abg,g,b->a", t["phi"], yA, hA)
        - np.einsum("abd,d,b->a", t["zeta"], yB, hA)
        + np.einsum("cag,g,c->a", t["rho"], yA, hB)
        + np.einsum("cad,d,c->a", t["sigma"], yB, hB)
        - t["anchor_a"] @ hx
    )
    dB = (
        -np.einsum("abg,g,b->a", t["rho"], yA, hA)
        - np.einsum("abd,d,b->a", t["sigma"], yB, hA)
        - np.einsum("acg,g,c->a", t["psi"], yA, hB)
        - np.einsum("acd,d,c->a", t["theta"], yB, hB)
        - t["anchor_b"] @ hx
    )
    return dA, dB


def bdcp_hamiltonian_rhs(b: BdcpSpec, H: EnergyLike, s: DynState) -> DynState:
    t = _blocks(b, s.x)
    hx, hy, _ = H.gradient(s)
    dA, dB = _hamilton_fiber(b, t, s, hx, hy)
    dx = t["anchor_a"].T @ hy[: b.p] + t["anchor_b"].T @ hy[b.p :]
    return DynState(dx, np.concatenate([dA, dB]))


def bdcp_dissipative_hamiltonian_rhs(b: BdcpSpec, H: EnergyLike, s: DynState) -> DynState:
    t = _blocks(b, s.x)
    hx, hy, hz = H.gradient(s)
    dA, dB = _hamilton_fiber(b, t, s, hx, hy)
    dx = t["anchor_a"].T @ hy[: b.p] + t["anchor_b"].T @ hy[b.p :]
    dy = np.concatenate([dA, dB]) - s.y * hz
    return DynState(dx, dy, float(s.y @ hy - H.value(s)))


def structure_terms(b: BdcpSpec, L: EnergyLike, s: DynState) -> tuple[np.ndarray, np.ndarray]:
    """``C[alpha][beta][gamma] y^beta dL/dy^gamma`` split into its A and B rows."""
    t = _blocks(b, s.x)
    _, ly, _ = L.gradient(s)
    p = b.p
    yA, yB, lA, lB = s.y[:p], s.y[p:], ly[:p], ly[p:]
    rowA = (
        np.einsum("abg,b,g->a", t["phi"], yA, lA)
        + np.einsum("abd,b,d->a", t["zeta"], yA, lB)
        - np.einsum("cag,c,g->a", t["rho"], yB, lA)
        - np.einsum("cad,c,d->a", t["sigma"], yB, lB)
    )
    rowB = (
        np.einsum("abg,b,g->a", t["rho"], yA, lA)
        + np.einsum("abd,b,d->a", t["sigma"], yA, lB)
        + np.einsum("acg,c,g->a", t["psi"], yB, lA)
        + np.einsum("acd,c,d->a", t["theta"], yB, lB)
    )
    return rowA, rowB


def bdcp_lagrangian_rhs(
    b: BdcpSpec,
    L: EnergyLike,
    s: DynState,
    sign: StructureSign = StructureSign.LEGENDRE,
    cond_limit: float = CONDITION_LIMIT,
) -> DynState:
    """Euler-Lagrange equations in block form, or Herglotz when ``s`` carries ``z``."""
    if sign is StructureSign.PLUS:
        logger.warning("integrating with +C y dL/dy: the flow is not Legendre-dual to Hamilton's")
    t = _blocks(b, s.x)
    lx, ly, lz = L.gradient(s)
    rowA, rowB = structure_terms(b, L, s)
    structure = np.concatenate([rowA, rowB])
    if sign is StructureSign.LEGENDRE:
        structure = -structure
    anchor = np.vstack([t["anchor_a"], t["anchor_b"]])
    force = anchor @ lx + structure
    dx = anchor.T @ s.y
    if s.has_z:
        dz = L.value(s)
        return DynState(dx, _solve_fiber(L, s, force + lz * ly, dx, dz, cond_limit), dz)
    return DynState(dx, _solve_fiber(L, s, force, dx, 0.0, cond_limit))

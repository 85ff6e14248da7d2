"""
The linear Poisson structure on the dual bundle and its Jacobi extension.

Coordinates are ordered ``(x, y)`` or ``(x, y, z)``. The bivector is

    {x^i, y_alpha} = a[alpha][i],   {y_alpha, y_beta} = -C[alpha][beta][gamma] y_gamma

and, with ``z``, ``{z, y_alpha} = y_alpha``. Hamilton's equations are
``u' = {u, H}`` in the reversible case and ``u' = {u, H} - u dH/dz`` with
the Jacobi bracket ``{F, G} = P(dF, dG) + F dG/dz - G dF/dz``.
"""

import numpy as np

from algebroid import AlgebroidSpec, BdcpSpec, total_of

from .models import DynState, EnergyLike


def poisson_matrix(spec: AlgebroidSpec | BdcpSpec, s: DynState) -> np.ndarray:
    spec = total_of(spec)
    n, k = spec.n, spec.k
    size = n + k + (1 if s.has_z else 0)
    A = spec.anchor_at(s.x)
    C = spec.structure_at(s.x)
    P = np.zeros((size, size))
    P[:n, n : n + k] = A.T
    P[n : n + k, :n] = -A
    P[n : n + k, n : n + k] = -np.einsum("abg,g->ab", C, s.y)
    if s.has_z:
        P[-1, n : n + k] = s.y
        P[n : n + k, -1] = -s.y
    return P


def _differential(f: EnergyLike, s: DynState) -> np.ndarray:
    gx, gy, gz = f.gradient(s)
    parts = [gx, gy] + ([np.array([gz])] if s.has_z else [])
    return np.concatenate(parts)


def bracket(spec: AlgebroidSpec | BdcpSpec, F: EnergyLike, G: EnergyLike, s: DynState) -> float:
    """Poisson bracket, or the Jacobi bracket when ``s`` carries ``z``."""
    P = poisson_matrix(spec, s)
    dF, dG = _differential(F, s), _differential(G, s)
    value = float(dF @ P @ dG)
    if s.has_z:
        value += F.value(s) * dG[-1] - G.value(s) * dF[-1]
    return value


def hamiltonian_vector_field(spec: AlgebroidSpec | BdcpSpec, H: EnergyLike, s: DynState) -> DynState:
    """The flow generated by ``H`` computed from the bivector."""
    P = poisson_matrix(spec, s)
    dH = _differential(H, s)
    v = P @ dH
    n, k = len(s.x), len(s.y)
    if s.has_z:
        # only z has a nonzero z-derivative among the coordinates
        v[-1] -= H.value(s)
        return DynState(v[:n], v[n : n + k], float(v[-1]))
    return DynState(v[:n], v[n : n + k])


def casimir_defect(spec: AlgebroidSpec | BdcpSpec, casimir: EnergyLike, s: DynState) -> float:
    """``max |{C, u}|`` over the coordinates ``u``; zero for a Casimir function."""
    P = poisson_matrix(spec, s)
    return float(np.max(np.abs(_differential(casimir, s) @ P), initial=0.0))

"""
Invariant monitoring along trajectories.

Time derivatives are computed analytically as the gradient of the monitored
function applied to the vector field, never by differencing samples.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from algebroid import AlgebroidSpec

from .models import CasimirFn, DynState, EnergyLike, SystemKind, Trajectory
from .rhs import energy_function, legendre_map, rhs_for

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-8


def time_derivative(F: EnergyLike, s: DynState, ds: DynState) -> float:
    gx, gy, gz = F.gradient(s)
    value = float(gx @ ds.x + gy @ ds.y)
    if s.has_z and ds.z is not None:
        value += gz * ds.z
    return value


@dataclass(frozen=True)
class SystemDescriptor:
    """Everything needed to re-evaluate the vector field of a run."""

    kind: SystemKind
    spec: AlgebroidSpec
    energy: EnergyLike
    casimirs: tuple[CasimirFn, ...] = field(default=())

    @cached_property
    def monitored(self) -> EnergyLike:
        """``H`` for Hamiltonian systems and ``E_L`` for Lagrangian ones."""
        return energy_function(self.energy) if self.kind.is_lagrangian else self.energy

    def rhs(self, s: DynState) -> DynState:
        return rhs_for(self.kind)(self.spec, self.energy, s)

    def dual_state(self, s: DynState) -> DynState:
        return legendre_map(self.energy, s) if self.kind.is_lagrangian else s

    def dissipation_residual(self, s: DynState) -> float:
        """
        ``dH/dt + (dH/dz) H`` for contact Hamiltonians, and the equivalent
        ``dE/dt - (dL/dz) E`` for Herglotz Lagrangians.
        """
        E = self.monitored
        rate = time_derivative(E, s, self.rhs(s))
        _, _, dz = self.energy.gradient(s)
        if self.kind is SystemKind.HERGLOTZ:
            return rate - dz * E.value(s)
        return rate + dz * E.value(s)


def monitor_columns(
    system: SystemDescriptor, states: list[DynState]
) -> tuple[np.ndarray, dict[str, np.ndarray], np.ndarray | None]:
    energy = np.array([system.monitored.value(s) for s in states])
    casimirs = {
        c.name: np.array([c.energy.value(system.dual_state(s)) for s in states])
        for c in system.casimirs
    }
    residual = None
    if system.kind.is_dissipative:
        residual = np.array([system.dissipation_residual(s) for s in states])
    return energy, casimirs, residual


@dataclass(frozen=True)
class MonitorReport:
    kind: SystemKind
    energy_drift: float | None
    dissipation_residual: float | None
    casimir_drifts: dict[str, float]
    tolerance: float

    @property
    def passed(self) -> bool:
        if self.kind.is_dissipative:
            # Casimirs are not conserved by dissipative flows; they are reported only.
            return self.dissipation_residual is not None and self.dissipation_residual <= self.tolerance
        drifts = [self.energy_drift or 0.0, *self.casimir_drifts.values()]
        return all(d <= self.tolerance for d in drifts)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "passed": self.passed,
            "energy_drift": self.energy_drift,
            "dissipation_residual": self.dissipation_residual,
            "casimir_drifts": self.casimir_drifts,
            "tolerance": self.tolerance,
        }

    def lines(self) -> list[str]:
        out = []
        if self.energy_drift is not None:
            out.append(f"energy drift          {self.energy_drift:.3e}")
        if self.dissipation_residual is not None:
            out.append(f"dissipation residual  {self.dissipation_residual:.3e}")
        for name, drift in self.casimir_drifts.items():
            out.append(f"casimir {name:<13} {drift:.3e}")
        out.append(f"{'ok' if self.passed else 'FAIL'} (tolerance {self.tolerance:.1e})")
        return out


def _drift(column: np.ndarray) -> float:
    return float(np.max(np.abs(column - column[0]), initial=0.0)) if len(column) else 0.0


def monitor_invariants(
    traj: Trajectory,
    system: SystemDescriptor,
    casimirs: tuple[CasimirFn, ...] | None = None,
    tol: float = DEFAULT_TOLERANCE,
) -> MonitorReport:
    """Recompute the monitored quantities from the sampled states and report their drift."""
    if casimirs is not None:
        system = SystemDescriptor(system.kind, system.spec, system.energy, tuple(casimirs))
    energy, columns, residual = monitor_columns(system, traj.states)
    report = MonitorReport(
        kind=system.kind,
        energy_drift=None if system.kind.is_dissipative else _drift(energy),
        dissipation_residual=(
            float(np.max(np.abs(residual), initial=0.0)) if residual is not None else None
        ),
        casimir_drifts={name: _drift(column) for name, column in columns.items()},
        tolerance=tol,
    )
    if not report.passed:
        logger.warning("invariants drifted beyond %.1e: %s", tol, report.to_dict())
    return report

"""Hamiltonian and Lagrangian dynamics on algebroids, reversible and dissipative."""
from .models import (
    DYNAMICS_ALIASES,
    ArityError,
    CasimirFn,
    DynamicsError,
    DynState,
    EnergyLike,
    SingularLagrangian,
    StepUnderflow,
    SystemKind,
    Trajectory,
)
from .rhs import (
    dissipative_hamiltonian_rhs,
    energy_function,
    euler_lagrange_rhs,
    hamiltonian_rhs,
    herglotz_rhs,
    legendre_inverse,
    legendre_map,
    rhs_for,
)
from .blocks import (
    StructureSign,
    bdcp_dissipative_hamiltonian_rhs,
    bdcp_hamiltonian_rhs,
    bdcp_lagrangian_rhs,
)
from .brackets import bracket, casimir_defect, hamiltonian_vector_field, poisson_matrix
from .monitor import MonitorReport, SystemDescriptor, monitor_invariants, time_derivative
from .integrators import METHODS, integrate, integrate_batch

__all__ = [
    "ArityError",
    "CasimirFn",
    "DYNAMICS_ALIASES",
    "DynState",
    "DynamicsError",
    "EnergyLike",
    "METHODS",
    "MonitorReport",
    "SingularLagrangian",
    "StepUnderflow",
    "StructureSign",
    "SystemDescriptor",
    "SystemKind",
    "Trajectory",
    "bdcp_dissipative_hamiltonian_rhs",
    "bdcp_hamiltonian_rhs",
    "bdcp_lagrangian_rhs",
    "bracket",
    "casimir_defect",
    "dissipative_hamiltonian_rhs",
    "energy_function",
    "euler_lagrange_rhs",
    "hamiltonian_rhs",
    "hamiltonian_vector_field",
    "herglotz_rhs",
    "integrate",
    "integrate_batch",
    "legendre_inverse",
    "legendre_map",
    "monitor_invariants",
    "poisson_matrix",
    "rhs_for",
    "time_derivative",
]

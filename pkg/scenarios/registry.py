"""
Built-in specimens covering every level of the product hierarchy and every
equation family.

Scenario data lives in code so tests never touch the filesystem. ``get``
returns a deep copy; the registry itself is never mutated.
"""

import copy
import logging
from dataclasses import dataclass

from rapidfuzz import fuzz

from algebroid import (
    AlgebroidSpec,
    BdcpSpec,
    FiberSplit,
    HierarchyLevel,
    as_single_block,
    assemble_total,
    classify,
    decompose,
    make_product,
)
from dynamics import CasimirFn, DynState, EnergyLike, SystemKind

logger = logging.getLogger(__name__)


class ScenarioError(Exception):
    pass


class UnknownScenario(ScenarioError):
    def __init__(self, name: str, suggestions: list[str]):
        self.name = name
        self.suggestions = suggestions
        hint = f"; did you mean {', '.join(suggestions)}?" if suggestions else ""
        super().__init__(f"no scenario named {name!r}{hint}")


class MissingPreset(ScenarioError):
    pass


@dataclass(frozen=True)
class Fact:
    statement: str
    provenance: str


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    summary: str
    algebroid: AlgebroidSpec
    classification: HierarchyLevel
    product: BdcpSpec | None = None
    hamiltonian: EnergyLike | None = None
    lagrangian: EnergyLike | None = None
    dissipative_hamiltonian: EnergyLike | None = None
    dissipative_lagrangian: EnergyLike | None = None
    casimirs: tuple[CasimirFn, ...] = ()
    facts: tuple[Fact, ...] = ()
    x0: tuple[float, ...] = ()
    y0: tuple[float, ...] = ()

    @property
    def spec(self) -> AlgebroidSpec | BdcpSpec:
        """The product when the scenario is split, the algebroid otherwise."""
        return self.product if self.product is not None else self.algebroid

    def as_product(self) -> BdcpSpec:
        return self.product if self.product is not None else as_single_block(self.algebroid)

    def energy_for(self, kind: SystemKind) -> EnergyLike:
        preset = {
            SystemKind.HAMILTON: self.hamiltonian,
            SystemKind.EULER_LAGRANGE: self.lagrangian,
            SystemKind.DISSIPATIVE_HAMILTON: self.dissipative_hamiltonian,
            SystemKind.HERGLOTZ: self.dissipative_lagrangian,
        }[SystemKind(kind)]
        if preset is None:
            raise MissingPreset(f"scenario {self.name!r} has no {SystemKind(kind).value} energy")
        return preset

    def presets(self) -> dict[str, EnergyLike]:
        named = {
            "hamiltonian": self.hamiltonian,
            "lagrangian": self.lagrangian,
            "dissipative-hamiltonian": self.dissipative_hamiltonian,
            "dissipative-lagrangian": self.dissipative_lagrangian,
        }
        return {name: e for name, e in named.items() if e is not None}

    def initial_state(self, kind: SystemKind) -> DynState:
        z = 0.0 if SystemKind(kind).is_dissipative else None
        return DynState.of(self.x0, self.y0, z)


def _energy(text: str | None, spec: AlgebroidSpec, *, uses_z=False, name="H") -> EnergyLike | None:
    if text is None:
        return None
    return EnergyLike.parse(text, spec.n, spec.k, uses_z=uses_z, name=name)


def _scenario(
    name: str,
    summary: str,
    spec: AlgebroidSpec | BdcpSpec,
    *,
    hamiltonian=None,
    lagrangian=None,
    dissipative_hamiltonian=None,
    dissipative_lagrangian=None,
    casimirs: dict[str, str] | None = None,
    facts: tuple[Fact, ...] = (),
    x0=(),
    y0=(),
) -> Scenario:
    product = spec if isinstance(spec, BdcpSpec) else None
    total = assemble_total(spec) if product is not None else spec
    return Scenario(
        name=name,
        summary=summary,
        algebroid=total,
        classification=classify(product if product is not None else as_single_block(total)),
        product=product,
        hamiltonian=_energy(hamiltonian, total),
        lagrangian=_energy(lagrangian, total, name="L"),
        dissipative_hamiltonian=_energy(dissipative_hamiltonian, total, uses_z=True),
        dissipative_lagrangian=_energy(dissipative_lagrangian, total, uses_z=True, name="L"),
        casimirs=tuple(
            CasimirFn.parse(label, text, total.n, total.k) for label, text in (casimirs or {}).items()
        ),
        facts=facts,
        x0=tuple(float(v) for v in x0),
        y0=tuple(float(v) for v in y0),
    )


# [e1, e2] = e3 and cyclic
EPSILON = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1}
# full symbol, for blocks with no antisymmetry of their own
LEVI_CIVITA = {**EPSILON, (1, 0, 2): -1, (2, 1, 0): -1, (0, 2, 1): -1}


def _tangent_r2() -> Scenario:
    return _scenario(
        "tangent-R2",
        "tangent bundle of R^2: classical mechanics of an isotropic oscillator",
        AlgebroidSpec.tangent(2),
        hamiltonian="(y1^2 + y2^2)/2 + (x1^2 + x2^2)/2",
        lagrangian="(y1^2 + y2^2)/2 - (x1^2 + x2^2)/2",
        facts=(Fact("the flow is 2*pi periodic", "closed-form harmonic oscillator"),),
        x0=(1.0, 0.0),
        y0=(0.0, 1.0),
    )


def _so3_rigid_body() -> Scenario:
    return _scenario(
        "so3-rigid-body",
        "free rigid body with inertia (1, 2, 3) on so(3)",
        AlgebroidSpec.lie_algebra(3, EPSILON),
        hamiltonian="y1^2/2 + y2^2/4 + y3^2/6",
        lagrangian="y1^2/2 + y2^2 + 3*y3^2/2",
        casimirs={"norm": "y1^2 + y2^2 + y3^2"},
        facts=(
            Fact("|y|^2 is a Casimir", "epsilon-tensor brackets"),
            Fact("the Legendre map y -> (y1, 2 y2, 3 y3) carries Euler-Poincare onto Lie-Poisson", "quadratic Lagrangian"),
        ),
        y0=(1.0, 0.01, 0.01),
    )


def _se3_heavy_top() -> Scenario:
    # A = span{P1, P2, P3} abelian, B = so(3) acting by [L_a, P_b] = P_c
    product = make_product("semidirect", 0, 3, 3, theta=EPSILON, rho=LEVI_CIVITA)
    return _scenario(
        "se3-heavy-top",
        "heavy top on se(3) = so(3) acting on R^3; y1..y3 = Gamma, y4..y6 = Pi",
        product,
        hamiltonian="y4^2/2 + y5^2/4 + y6^2/6 + y3",
        casimirs={"gamma": "y1^2 + y2^2 + y3^2", "gamma-pi": "y1*y4 + y2*y5 + y3*y6"},
        facts=(Fact("|Gamma|^2 and Gamma.Pi are Casimirs", "se(3) table"),),
        y0=(0.0, 0.6, 0.8, 0.3, 0.2, 0.1),
    )


def _heisenberg_cocycle() -> Scenario:
    # A = span{Z}, B = span{X, Y}, [X, Y] = Z through the cocycle
    product = make_product("cocycle_ext", 0, 1, 2, psi={(0, 1, 0): 1})
    return _scenario(
        "heisenberg-cocycle",
        "Heisenberg algebra h3 as a 2-cocycle extension of R^2 by R",
        product,
        hamiltonian="(y1^2 + y2^2 + y3^2)/2",
        lagrangian="(y1^2 + y2^2 + y3^2)/2",
        casimirs={"center": "y1"},
        facts=(Fact("the central coordinate y1 is a Casimir", "h3 table"),),
        y0=(0.5, 1.0, -0.3),
    )


def _sl2_zeta_split() -> Scenario:
    # A = span{E, F}, B = span{H}: [E, F] = H, [H, E] = 2E, [H, F] = -2F
    product = make_product(
        "BDCP", 0, 2, 1, zeta={(0, 1, 0): 1}, rho={(0, 0, 0): 2, (0, 1, 1): -2}
    )
    return _scenario(
        "sl2-zeta-split",
        "sl(2) split as span{E, F} and span{H}; zeta nonzero, psi zero",
        product,
        hamiltonian="y1^2/2 + y2^2/2 + y3^2/2",
        lagrangian="y1^2/2 + y2^2/2 + y3^2/2",
        casimirs={"killing": "y3^2 + 4*y1*y2"},
        facts=(Fact("y_H^2 + 4 y_E y_F is a Casimir", "inverse Killing form"),),
        y0=(0.3, 0.2, 0.5),
    )


def _so3xso3_bicocycle() -> Scenario:
    # frame a1 a2 b3 | a3 b1 b2 of so(3) + so(3)
    a1, a2, b3, a3, b1, b2 = range(6)
    total = AlgebroidSpec.lie_algebra(
        6,
        {
            (a1, a2, a3): 1, (a2, a3, a1): 1, (a3, a1, a2): 1,
            (b1, b2, b3): 1, (b2, b3, b1): 1, (b3, b1, b2): 1,
        },
    )
    return _scenario(
        "so3xso3-bicocycle",
        "so(3) + so(3) split as span{a1, a2, b3} and span{a3, b1, b2}; zeta and psi both nonzero",
        decompose(total, FiberSplit(3, 6)),
        hamiltonian="y1^2/2 + y2^2/4 + y4^2/6 + y5^2/2 + y6^2/4 + y3^2/6",
        lagrangian="y1^2/2 + y2^2 + 3*y4^2/2 + y5^2/2 + y6^2 + 3*y3^2/2",
        casimirs={"a": "y1^2 + y2^2 + y4^2", "b": "y5^2 + y6^2 + y3^2"},
        facts=(Fact("each summand's |y|^2 is a Casimir", "direct-sum table"),),
        y0=(1.0, 0.2, 0.1, -0.3, 0.4, 0.7),
    )


def _contact_damped_oscillator() -> Scenario:
    return _scenario(
        "contact-damped-oscillator",
        "oscillator on the tangent bundle of R with linear friction 0.1",
        AlgebroidSpec.tangent(1),
        hamiltonian="y1^2/2 + x1^2/2",
        lagrangian="y1^2/2 - x1^2/2",
        dissipative_hamiltonian="y1^2/2 + x1^2/2 + 0.1*z",
        dissipative_lagrangian="y1^2/2 - x1^2/2 - 0.1*z",
        facts=(
            Fact(
                "x(t) = exp(-t/20) (x0 cos wt + (v0 + x0/20)/w sin wt), w = sqrt(1 - 1/400)",
                "closed-form damped oscillator",
            ),
        ),
        x0=(1.0,),
        y0=(1.0,),
    )


def _so3_ep_herglotz() -> Scenario:
    return _scenario(
        "so3-ep-herglotz",
        "Euler-Poincare-Herglotz on so(3) with identity inertia and decay rate 0.1",
        AlgebroidSpec.lie_algebra(3, EPSILON),
        hamiltonian="(y1^2 + y2^2 + y3^2)/2",
        lagrangian="(y1^2 + y2^2 + y3^2)/2",
        dissipative_hamiltonian="(y1^2 + y2^2 + y3^2)/2 + 0.1*z",
        dissipative_lagrangian="(y1^2 + y2^2 + y3^2)/2 - 0.1*z",
        casimirs={"norm": "y1^2 + y2^2 + y3^2"},
        facts=(Fact("y(t) = y0 exp(-t/10)", "exponential decay under identity inertia"),),
        y0=(1.0, 0.5, -0.25),
    )


_REGISTRY: dict[str, Scenario] = {
    s.name: s
    for s in (
        _tangent_r2(),
        _so3_rigid_body(),
        _se3_heavy_top(),
        _heisenberg_cocycle(),
        _sl2_zeta_split(),
        _so3xso3_bicocycle(),
        _contact_damped_oscillator(),
        _so3_ep_herglotz(),
    )
}


def _suggest(name: str, limit: int = 3) -> list[str]:
    scored = sorted(
        ((fuzz.ratio(name.lower(), known.lower()), known) for known in _REGISTRY),
        reverse=True,
    )
    return [known for score, known in scored[:limit] if score >= 50]


def get(name: str) -> Scenario:
    logger.debug("loading scenario %s", name)
    try:
        return copy.deepcopy(_REGISTRY[name])
    except KeyError:
        raise UnknownScenario(name, _suggest(name)) from None


def list_scenarios() -> list[tuple[str, HierarchyLevel]]:
    """Registered names with their classification labels, in registration order."""
    return [(s.name, s.classification) for s in _REGISTRY.values()]

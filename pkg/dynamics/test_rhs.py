"""
Vector fields of the four equation families.

The rigid body (so(3) with inertia 1, 2, 3) and the oscillator on the tangent
bundle of R^1 serve as the known cases; the block forms are compared against
the assembled bracket on two genuinely split products.
"""

import numpy as np
import pytest

from algebroid import AlgebroidSpec, FiberSplit, assemble_total, decompose, make_product
from dynamics import (
    ArityError,
    CasimirFn,
    DynState,
    EnergyLike,
    SingularLagrangian,
    StructureSign,
    bdcp_dissipative_hamiltonian_rhs,
    bdcp_hamiltonian_rhs,
    bdcp_lagrangian_rhs,
    bracket,
    casimir_defect,
    dissipative_hamiltonian_rhs,
    energy_function,
    euler_lagrange_rhs,
    hamiltonian_rhs,
    hamiltonian_vector_field,
    herglotz_rhs,
    legendre_inverse,
    legendre_map,
    time_derivative,
)
from exprs import parse

SO3 = AlgebroidSpec.lie_algebra(3, {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1})
LINE = AlgebroidSpec.tangent(1)
INERTIA = np.array([1.0, 2.0, 3.0])

RIGID_H = EnergyLike.parse("y1^2/2 + y2^2/4 + y3^2/6", 0, 3)
RIGID_L = EnergyLike.parse("y1^2/2 + y2^2 + 3*y3^2/2", 0, 3, name="L")


@pytest.fixture
def rng():
    return np.random.default_rng(11)


def test_rigid_body_is_euler():
    s = DynState.of([], [1.0, 1.0, 1.0])
    assert hamiltonian_rhs(SO3, RIGID_H, s).y == pytest.approx([-1 / 6, 2 / 3, -1 / 2])


def test_oscillator_hamilton():
    H = EnergyLike.parse("y1^2/2 + x1^2/2", 1, 1)
    ds = hamiltonian_rhs(LINE, H, DynState.of([0.3], [0.7]))
    assert ds.x == pytest.approx([0.7])
    assert ds.y == pytest.approx([-0.3])


def test_rigid_body_legendre_duality(rng):
    for _ in range(50):
        y = rng.uniform(-1, 1, 3)
        lagrangian = euler_lagrange_rhs(SO3, RIGID_L, DynState.of([], y))
        hamiltonian = hamiltonian_rhs(SO3, RIGID_H, DynState.of([], INERTIA * y))
        assert INERTIA * lagrangian.y == pytest.approx(hamiltonian.y, abs=1e-12)


def test_herglotz_without_z_matches_euler_lagrange(rng):
    L = EnergyLike.parse("y1^2/2 - x1^2/2", 1, 1, uses_z=True, name="L")
    plain = EnergyLike.parse("y1^2/2 - x1^2/2", 1, 1, name="L")
    for _ in range(20):
        x, y, z = rng.uniform(-1, 1, 3)
        h = herglotz_rhs(LINE, L, DynState.of([x], [y], z))
        e = euler_lagrange_rhs(LINE, plain, DynState.of([x], [y]))
        assert h.x == pytest.approx(e.x)
        assert h.y == pytest.approx(e.y)


def test_damped_oscillator_from_both_sides():
    H = EnergyLike.parse("y1^2/2 + x1^2/2 + 0.1*z", 1, 1, uses_z=True)
    L = EnergyLike.parse("y1^2/2 - x1^2/2 - 0.1*z", 1, 1, uses_z=True, name="L")
    s = DynState.of([0.5], [0.2], 0.0)
    dh = dissipative_hamiltonian_rhs(LINE, H, s)
    dl = herglotz_rhs(LINE, L, s)
    # x'' = -x - 0.1 x'
    assert dh.y == pytest.approx([-0.5 - 0.02])
    assert dl.y == pytest.approx([-0.5 - 0.02])


@pytest.mark.parametrize(
    "spec, text",
    [
        (LINE, "y1^2/2 + x1^2/2 + 0.1*z"),
        (SO3, "y1^2/2 + y2^2/4 + y3^2/6 - 0.2*z + 0.05*z^2"),
    ],
)
def test_dissipation_law_holds_pointwise(spec, text, rng):
    H = EnergyLike.parse(text, spec.n, spec.k, uses_z=True)
    for _ in range(100):
        s = DynState.of(rng.uniform(-1, 1, spec.n), rng.uniform(-1, 1, spec.k), rng.uniform(-1, 1))
        rate = time_derivative(H, s, dissipative_hamiltonian_rhs(spec, H, s))
        _, _, hz = H.gradient(s)
        assert rate + hz * H.value(s) == pytest.approx(0.0, abs=1e-12)


def test_herglotz_energy_law(rng):
    L = EnergyLike.parse("y1^2/2 + y2^2 + 3*y3^2/2 - 0.1*z", 0, 3, uses_z=True, name="L")
    E = energy_function(L)
    for _ in range(50):
        s = DynState.of([], rng.uniform(-1, 1, 3), rng.uniform(-1, 1))
        rate = time_derivative(E, s, herglotz_rhs(SO3, L, s))
        assert rate == pytest.approx(-0.1 * E.value(s), abs=1e-12)


def test_energy_function_of_oscillator():
    L = EnergyLike.parse("y1^2/2 - x1^2/2", 1, 1, name="L")
    assert energy_function(L).value(DynState.of([3.0], [4.0])) == pytest.approx(12.5)


def test_singular_lagrangian():
    L = EnergyLike.parse("x1*y1", 1, 1, name="L")
    with pytest.raises(SingularLagrangian):
        euler_lagrange_rhs(LINE, L, DynState.of([1.0], [1.0]))


def test_arity_is_enforced():
    with pytest.raises(ArityError):
        EnergyLike.parse("y4^2", 0, 3)
    with pytest.raises(ArityError):
        EnergyLike.parse("y1 + z", 0, 3)
    with pytest.raises(ArityError):
        hamiltonian_rhs(SO3, RIGID_H, DynState.of([], [1.0, 2.0]))
    with pytest.raises(ArityError):
        hamiltonian_rhs(SO3, RIGID_H, DynState.of([], [1.0, 2.0, 3.0], 0.0))


def test_legendre_inverse_round_trip(rng):
    L = EnergyLike.parse("y1^2/2 + y1^4/12 + cos(x1)*y1", 1, 1, name="L")
    for _ in range(20):
        s = DynState.of(rng.uniform(-1, 1, 1), rng.uniform(-2, 2, 1))
        back = legendre_inverse(L, legendre_map(L, s), guess=np.zeros(1))
        assert back.y == pytest.approx(s.y, abs=1e-10)


def test_bivector_generates_the_flows(rng):
    H = EnergyLike.parse("y1^2/2 + y2^2/4 + y3^2/6 + 0.3*z", 0, 3, uses_z=True)
    for _ in range(20):
        y = rng.uniform(-1, 1, 3)
        s = DynState.of([], y)
        assert hamiltonian_vector_field(SO3, RIGID_H, s).y == pytest.approx(
            hamiltonian_rhs(SO3, RIGID_H, s).y
        )
        sz = DynState.of([], y, rng.uniform(-1, 1))
        field, direct = hamiltonian_vector_field(SO3, H, sz), dissipative_hamiltonian_rhs(SO3, H, sz)
        assert field.y == pytest.approx(direct.y)
        assert field.z == pytest.approx(direct.z)


def test_casimir_commutes_with_everything(rng):
    casimir = CasimirFn.parse("|y|^2", "y1^2 + y2^2 + y3^2", 0, 3)
    for _ in range(20):
        s = DynState.of([], rng.uniform(-1, 1, 3))
        assert casimir_defect(SO3, casimir.energy, s) == pytest.approx(0.0, abs=1e-14)
        assert bracket(SO3, casimir.energy, RIGID_H, s) == pytest.approx(0.0, abs=1e-14)


def _so3xso3():
    a1, a2, b3, a3, b1, b2 = range(6)
    total = AlgebroidSpec.lie_algebra(
        6,
        {
            (a1, a2, a3): 1, (a2, a3, a1): 1, (a3, a1, a2): 1,
            (b1, b2, b3): 1, (b2, b3, b1): 1, (b3, b1, b2): 1,
        },
    )
    return decompose(total, FiberSplit(3, 6))


def _sl2():
    return make_product("BDCP", 0, 2, 1, zeta={(0, 1, 0): 1}, rho={(0, 0, 0): 2, (0, 1, 1): -2})


@pytest.mark.parametrize("build", [_so3xso3, _sl2])
def test_block_hamilton_matches_assembled(build, rng):
    b = build()
    total = assemble_total(b)
    k = b.k
    terms = " + ".join(f"{i + 1}*y{i + 1}^2/2" for i in range(k))
    H = EnergyLike.parse(f"{terms} + y1*y{k} + 0.2*z", 0, k, uses_z=True)
    Hr = EnergyLike.parse(f"{terms} + y1*y{k}", 0, k)
    for _ in range(1000):
        y = rng.uniform(-1, 1, k)
        s = DynState.of([], y)
        assert bdcp_hamiltonian_rhs(b, Hr, s).y == pytest.approx(
            hamiltonian_rhs(total, Hr, s).y, abs=1e-12
        )
    for _ in range(100):
        s = DynState.of([], rng.uniform(-1, 1, k), rng.uniform(-1, 1))
        blocks, generic = bdcp_dissipative_hamiltonian_rhs(b, H, s), dissipative_hamiltonian_rhs(total, H, s)
        assert blocks.y == pytest.approx(generic.y, abs=1e-12)
        assert blocks.z == pytest.approx(generic.z, abs=1e-12)


@pytest.mark.parametrize("build", [_so3xso3, _sl2])
def test_block_lagrange_matches_assembled(build, rng):
    b = build()
    total = assemble_total(b)
    k = b.k
    L = EnergyLike.parse(" + ".join(f"{i + 2}*y{i + 1}^2/2" for i in range(k)), 0, k, name="L")
    for _ in range(200):
        s = DynState.of([], rng.uniform(-1, 1, k))
        assert bdcp_lagrangian_rhs(b, L, s).y == pytest.approx(
            euler_lagrange_rhs(total, L, s).y, abs=1e-12
        )


def test_plus_sign_reverses_the_fiber_flow():
    b = _sl2()
    L = EnergyLike.parse("y1^2 + y2^2/2 + 2*y3^2", 0, 3, name="L")
    s = DynState.of([], [0.3, -0.4, 0.5])
    legendre = bdcp_lagrangian_rhs(b, L, s)
    plus = bdcp_lagrangian_rhs(b, L, s, sign=StructureSign.PLUS)
    assert plus.y == pytest.approx(-legendre.y)


def test_structure_may_depend_on_base():
    spec = AlgebroidSpec.build(1, 2, {(0, 0): 1}, {(0, 1, 1): "x1"})
    H = EnergyLike.parse("y1^2/2 + y2^2/2 + x1^2/2", 1, 2)
    s = DynState.of([2.0], [1.0, 3.0])
    ds = hamiltonian_rhs(spec, H, s)
    # y1' = -C[1][2][2] y2 dH/dy2 - dH/dx1 = -2*3*3 - 2
    assert ds.y[0] == pytest.approx(-20.0)
    assert parse("x1") in spec.structure.entries.values()

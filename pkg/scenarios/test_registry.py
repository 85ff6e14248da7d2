"""
Every registered scenario is a valid specimen: it verifies, classifies as
labelled, and its dynamics keep the advertised invariants and closed forms.
"""

import math

import numpy as np
import pytest

from algebroid import HierarchyLevel, SamplePlan, check_bdcp
from dynamics import (
    SystemDescriptor,
    SystemKind,
    casimir_defect,
    integrate,
    legendre_map,
    monitor_invariants,
)
from scenarios import MissingPreset, UnknownScenario, get, list_scenarios

EXPECTED = {
    "tangent-R2": HierarchyLevel.DIRECT,
    "so3-rigid-body": HierarchyLevel.DIRECT,
    "se3-heavy-top": HierarchyLevel.SEMIDIRECT,
    "heisenberg-cocycle": HierarchyLevel.COCYCLE_EXT,
    "sl2-zeta-split": HierarchyLevel.BDCP,
    "so3xso3-bicocycle": HierarchyLevel.BDCP,
    "contact-damped-oscillator": HierarchyLevel.DIRECT,
    "so3-ep-herglotz": HierarchyLevel.DIRECT,
}

NAMES = list(EXPECTED)


def test_registry_contents():
    assert list_scenarios() == list(EXPECTED.items())


@pytest.mark.parametrize("name", NAMES)
def test_scenario_verifies(name):
    scenario = get(name)
    plan = SamplePlan.sampled(scenario.algebroid.n, count=16, seed=3)
    report = check_bdcp(scenario.as_product(), plan, tol=1e-9)
    assert report.passed, report.lines()
    assert scenario.classification == EXPECTED[name]


def test_unknown_scenario_suggests_close_names():
    with pytest.raises(UnknownScenario) as err:
        get("so3-rigid")
    assert "so3-rigid-body" in err.value.suggestions


def test_get_returns_a_copy():
    assert get("sl2-zeta-split") is not get("sl2-zeta-split")


def test_missing_preset():
    with pytest.raises(MissingPreset):
        get("se3-heavy-top").energy_for(SystemKind.EULER_LAGRANGE)


@pytest.mark.parametrize("name", NAMES)
def test_casimirs_commute_with_coordinates(name):
    scenario = get(name)
    rng = np.random.default_rng(5)
    for casimir in scenario.casimirs:
        for _ in range(20):
            s = scenario.initial_state(SystemKind.HAMILTON)
            s = type(s).of(rng.uniform(-1, 1, len(s.x)), rng.uniform(-1, 1, len(s.y)))
            assert casimir_defect(scenario.spec, casimir.energy, s) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("name", [n for n in NAMES if get(n).hamiltonian is not None])
def test_reversible_runs_conserve_their_invariants(name):
    scenario = get(name)
    kind = SystemKind.HAMILTON
    traj = integrate(
        kind, scenario.spec, scenario.hamiltonian, scenario.initial_state(kind), 0.0, 5.0, 1e-2,
        rtol=1e-11, atol=1e-13, casimirs=scenario.casimirs,
    )
    system = SystemDescriptor(kind, scenario.algebroid, scenario.hamiltonian, scenario.casimirs)
    report = monitor_invariants(traj, system)
    assert report.passed, report.to_dict()


@pytest.mark.parametrize(
    "name, kind",
    [
        ("contact-damped-oscillator", SystemKind.DISSIPATIVE_HAMILTON),
        ("contact-damped-oscillator", SystemKind.HERGLOTZ),
        ("so3-ep-herglotz", SystemKind.DISSIPATIVE_HAMILTON),
        ("so3-ep-herglotz", SystemKind.HERGLOTZ),
    ],
)
def test_dissipative_runs_satisfy_the_dissipation_law(name, kind):
    scenario = get(name)
    energy = scenario.energy_for(kind)
    traj = integrate(kind, scenario.spec, energy, scenario.initial_state(kind), 0.0, 5.0, 1e-2)
    report = monitor_invariants(traj, SystemDescriptor(kind, scenario.algebroid, energy))
    assert report.passed, report.to_dict()


def test_tangent_oscillator_period():
    scenario = get("tangent-R2")
    s0 = scenario.initial_state(SystemKind.HAMILTON)
    traj = integrate("hamilton", scenario.spec, scenario.hamiltonian, s0, 0.0, 2 * math.pi, 1e-3, "rk4")
    assert traj.final.vector() == pytest.approx(s0.vector(), abs=1e-7)


def test_herglotz_decay_on_so3():
    scenario = get("so3-ep-herglotz")
    kind = SystemKind.HERGLOTZ
    s0 = scenario.initial_state(kind)
    traj = integrate(kind, scenario.spec, scenario.dissipative_lagrangian, s0, 0.0, 10.0, 1e-2)
    for t, s in zip(traj.times, traj.states):
        assert s.y == pytest.approx(s0.y * math.exp(-0.1 * t), abs=1e-7)


def test_euler_poincare_and_lie_poisson_are_legendre_dual():
    scenario = get("so3-rigid-body")
    y0 = scenario.initial_state(SystemKind.HAMILTON).y
    inertia = np.array([1.0, 2.0, 3.0])
    lp0 = scenario.initial_state(SystemKind.HAMILTON)
    ep0 = type(lp0).of([], y0 / inertia)
    ep = integrate("euler-lagrange", scenario.spec, scenario.lagrangian, ep0, 0.0, 10.0, 5e-3, "rk4")
    lp = integrate("hamilton", scenario.spec, scenario.hamiltonian, lp0, 0.0, 10.0, 5e-3, "rk4")
    assert np.array_equal(ep.times, lp.times)
    for a, b in zip(ep.states, lp.states):
        assert legendre_map(scenario.lagrangian, a).y == pytest.approx(b.y, abs=1e-6)


def test_rigid_body_long_run_conservation():
    scenario = get("so3-rigid-body")
    kind = SystemKind.HAMILTON
    traj = integrate(
        kind, scenario.spec, scenario.hamiltonian, scenario.initial_state(kind), 0.0, 100.0, 1e-2,
        rtol=1e-9, casimirs=scenario.casimirs,
    )
    assert np.max(np.abs(traj.energy - traj.energy[0])) < 1e-8
    assert np.max(np.abs(traj.casimirs["norm"] - traj.casimirs["norm"][0])) < 1e-8

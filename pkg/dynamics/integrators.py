"""
Explicit Runge-Kutta integration of the equations of motion.

``rk4`` takes fixed steps (the last one shortened to land on ``t1``).
``rk45`` is the Fehlberg 4(5) pair advancing with the fifth-order solution,
with a PI step controller.
"""

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from algebroid import AlgebroidError, AlgebroidSpec, BdcpSpec, total_of
from exprs import ExprError

from .models import CasimirFn, DynamicsError, DynState, EnergyLike, StepUnderflow, SystemKind, Trajectory
from .monitor import SystemDescriptor, monitor_columns
from .rhs import CONDITION_LIMIT, rhs_for

logger = logging.getLogger(__name__)

METHODS = ("rk4", "rk45")

SAFETY = 0.9
MIN_FACTOR, MAX_FACTOR = 0.2, 5.0
# PI gains for a pair whose error estimate is of order 4
ALPHA, BETA = 0.7 / 5.0, 0.4 / 5.0

_A = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_B5 = np.array([16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55])
_ERR = np.array([1 / 360, 0.0, -128 / 4275, -2197 / 75240, 1 / 50, 2 / 55])

Field = Callable[[np.ndarray], np.ndarray]


def rk4_step(f: Field, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def rkf45_step(f: Field, y: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """One Fehlberg step: the fifth-order update and its error estimate."""
    k = []
    for row in _A:
        stage = y.copy()
        for coeff, kj in zip(row, k):
            stage += h * coeff * kj
        k.append(f(stage))
    K = np.array(k)
    return y + h * (_B5 @ K), h * (_ERR @ K)


def _error_norm(err: np.ndarray, y: np.ndarray, y_new: np.ndarray, rtol: float, atol: float) -> float:
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2))) if err.size else 0.0


def _run_rk4(f: Field, y0: np.ndarray, t0: float, t1: float, dt: float):
    times, values = [t0], [y0]
    t, y = t0, y0
    while t < t1:
        h = t1 - t if t + dt * (1 + 1e-9) >= t1 else dt
        y = _guarded(lambda: rk4_step(f, y, h), t)
        t = t1 if h == t1 - t else t + h
        times.append(t)
        values.append(y)
    return times, values


def _run_rk45(f: Field, y0: np.ndarray, t0, t1, dt, rtol, atol, dt_min):
    times, values = [t0], [y0]
    t, y, h = t0, y0, dt
    err_prev = 1.0
    rejected = 0
    while t < t1:
        last = t + h * (1 + 1e-9) >= t1
        if last:
            h = t1 - t
        elif h < dt_min:
            raise StepUnderflow(f"step {h:.3e} fell below {dt_min:.1e} at t={t!r}")
        y_new, err_vec = _guarded(lambda: rkf45_step(f, y, h), t)
        err = _error_norm(err_vec, y, y_new, rtol, atol)
        if err <= 1.0:
            t = t1 if last else t + h
            y = y_new
            times.append(t)
            values.append(y)
            err = max(err, 1e-10)
            factor = SAFETY * err**-ALPHA * err_prev**BETA
            h *= min(MAX_FACTOR, max(MIN_FACTOR, factor))
            err_prev = max(err, 1e-4)
        else:
            rejected += 1
            h *= max(MIN_FACTOR, SAFETY * err ** -0.2)
            if h < dt_min:
                raise StepUnderflow(f"step {h:.3e} fell below {dt_min:.1e} at t={t!r}")
    logger.debug("rk45: %d accepted, %d rejected steps", len(times) - 1, rejected)
    return times, values


def _guarded(step, t):
    try:
        return step()
    except (DynamicsError, AlgebroidError, ExprError) as e:
        e.add_note(f"while stepping from t={t!r}")
        raise


def integrate(
    kind: SystemKind | str,
    spec: AlgebroidSpec | BdcpSpec,
    energy: EnergyLike,
    s0: DynState,
    t0: float,
    t1: float,
    dt: float,
    method: str = "rk45",
    *,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    dt_min: float = 1e-12,
    casimirs: Sequence[CasimirFn] = (),
    cond_limit: float = CONDITION_LIMIT,
) -> Trajectory:
    """Integrate from ``s0`` over ``[t0, t1]`` and attach the monitor columns."""
    if not t1 > t0:
        raise ValueError(f"need t1 > t0, got [{t0}, {t1}]")
    if not dt > 0:
        raise ValueError(f"need dt > 0, got {dt}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    kind = SystemKind(kind)
    total = total_of(spec)
    n, k, has_z = total.n, total.k, s0.has_z
    rhs = rhs_for(kind)
    extra = {"cond_limit": cond_limit} if kind.is_lagrangian else {}

    # validates arity and state shape before stepping
    rhs(total, energy, s0, **extra)

    def f(v: np.ndarray) -> np.ndarray:
        return rhs(total, energy, DynState.from_vector(v, n, k, has_z), **extra).vector()

    logger.info("integrating %s on [%g, %g] with %s", kind.value, t0, t1, method)
    y0 = s0.vector()
    if method == "rk4":
        times, values = _run_rk4(f, y0, t0, t1, dt)
    else:
        times, values = _run_rk45(f, y0, t0, t1, dt, rtol, atol, dt_min)

    values = np.array(values)
    states = [DynState.from_vector(v, n, k, has_z) for v in values]
    system = SystemDescriptor(kind, total, energy, tuple(casimirs))
    energy_column, casimir_columns, residual = monitor_columns(system, states)
    return Trajectory(
        times=np.array(times),
        values=values,
        n=n,
        k=k,
        has_z=has_z,
        energy=energy_column,
        casimirs=casimir_columns,
        dissipation_residual=residual,
    )


def integrate_batch(
    kind: SystemKind | str,
    spec: AlgebroidSpec | BdcpSpec,
    energy: EnergyLike,
    states: Sequence[DynState],
    t0: float,
    t1: float,
    dt: float,
    method: str = "rk45",
    workers: int = 1,
    **options,
) -> list[Trajectory]:
    """Integrate several initial states; results keep the input order."""
    total = total_of(spec)

    def run(s0: DynState) -> Trajectory:
        return integrate(kind, total, energy, s0, t0, t1, dt, method, **options)

    if workers <= 1:
        return [run(s) for s in states]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, states))

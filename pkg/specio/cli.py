"""Command-line interface: verify, assemble, split and simulate algebroids."""

import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Annotated, Optional

import typer
from pydantic import ValidationError

import scenarios
from algebroid import (
    BdcpSpec,
    EvaluationError,
    FiberSplit,
    IllegalTensorForLevel,
    SamplePlan,
    ShapeMismatch,
    assemble_total,
    check_algebroid,
    check_bdcp,
    classify,
    decompose,
    total_of,
)
from dynamics import (
    DYNAMICS_ALIASES,
    METHODS,
    ArityError,
    CasimirFn,
    DynamicsError,
    DynState,
    EnergyLike,
    SystemDescriptor,
    SystemKind,
    integrate,
    integrate_batch,
    monitor_invariants,
)
from exprs import ExprDomainError, ExprSyntaxError, UnboundVariable
from scenarios import Scenario, ScenarioError
from shared import SolverConfig

from .spec_files import SpecFormatError, load_spec, load_system, save_spec, save_system
from .trajectory_csv import read_trajectory, write_trajectory

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FORMAT = 2
EXIT_FAILED = 3
EXIT_NUMERICAL = 4

# typer re-exports BadParameter but not the usage-error base every parse failure derives from
UsageError = typer.BadParameter.__base__

app = typer.Typer(
    name="bdcp",
    help="Lie algebroids, bicocycle double cross products and their dynamics",
    no_args_is_help=True,
)


def setup_logging(verbose: bool = False) -> None:
    """Configure logging based on verbosity."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%H:%M:%S",
    )


def _usage(message: str) -> typer.Exit:
    typer.echo(f"error: {message}", err=True)
    return typer.Exit(EXIT_USAGE)


def system_path(out: Path) -> Path:
    """Where ``simulate`` puts the descriptor for the trajectory at ``out``."""
    return out.with_name(out.name + ".system.json")


def batch_path(out: Path, i: int) -> Path:
    return out.with_name(f"{out.stem}-{i + 1}{out.suffix}")


@app.command()
def verify(
    spec_file: Annotated[Path, typer.Argument(help="Spec file (algebroid or bdcp)", metavar="SPEC")],
    points: Annotated[Optional[int], typer.Option("--points", help="Number of sampled base points", min=1)] = None,
    seed: Annotated[Optional[int], typer.Option("--seed", help="Seed for the sample shift")] = None,
    tol: Annotated[Optional[float], typer.Option("--tol", help="Largest accepted residual")] = None,
    workers: Annotated[Optional[int], typer.Option("--workers", help="Threads evaluating sample points", min=1)] = None,
    as_json: Annotated[bool, typer.Option("--json", help="Print only the JSON report")] = False,
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Enable verbose/debug logging")] = False,
) -> None:
    """
    Check antisymmetry, the anchor morphism and the Jacobi identity.

    Prints the readable report and verdict, then the same report as one line
    of JSON.
    """
    setup_logging(verbose=verbose)
    config = SolverConfig.from_env().override(points=points, seed=seed, tol=tol, workers=workers)

    spec = load_spec(spec_file)
    plan = SamplePlan.sampled(total_of(spec).n, config.points, config.seed, config.bounds)
    logger.debug("verifying %s on %d points", spec_file, len(plan))
    if isinstance(spec, BdcpSpec):
        report = check_bdcp(spec, plan, config.tol, config.workers)
    else:
        report = check_algebroid(spec, plan, config.tol, config.workers)

    if as_json:
        typer.echo(report.to_json())
    else:
        for line in report.lines():
            typer.echo(line)
        if report.nonzero_blocks:
            typer.echo(f"nonzero blocks: {', '.join(report.nonzero_blocks)}")
        typer.echo("PASS" if report.passed else "FAIL")
        typer.echo(report.to_json(indent=None))
    if not report.passed:
        raise typer.Exit(EXIT_FAILED)


@app.command()
def product(
    spec_file: Annotated[Path, typer.Argument(help="Product spec file (kind bdcp)", metavar="SPEC")],
    out: Annotated[Path, typer.Option("--out", help="Where to write the assembled algebroid")],
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Enable verbose/debug logging")] = False,
) -> None:
    """Assemble the total algebroid of a two-block product."""
    setup_logging(verbose=verbose)

    spec = load_spec(spec_file)
    if not isinstance(spec, BdcpSpec):
        raise _usage(f"{spec_file} is an algebroid document; product needs kind bdcp")
    total = assemble_total(spec)
    save_spec(total, out)
    typer.echo(f"{classify(spec).value}: wrote rank {total.k} algebroid to {out}")


@app.command("decompose")
def decompose_command(
    spec_file: Annotated[Path, typer.Argument(help="Spec file (algebroid or bdcp)", metavar="SPEC")],
    split: Annotated[int, typer.Option("--split", help="Rank p of the first block")],
    out: Annotated[Path, typer.Option("--out", help="Where to write the product")],
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Enable verbose/debug logging")] = False,
) -> None:
    """Split the frame after the first p vectors and print the hierarchy label."""
    setup_logging(verbose=verbose)

    total = total_of(load_spec(spec_file))
    if not 1 <= split < total.k:
        raise _usage(f"--split must lie in 1..{total.k - 1} for rank {total.k}")
    b = decompose(total, FiberSplit(split, total.k))
    label = classify(b)
    save_spec(b, out, classification=label)
    typer.echo(label.value)


def _parse_state(text: str, n: int, k: int, dissipative: bool) -> DynState:
    """``x1..xn,y1..yk`` with an optional trailing ``z`` (default 0) for dissipative runs."""
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise _usage(f"state {text!r} is not a comma separated list of numbers") from None
    if len(values) == n + k:
        return DynState.of(values[:n], values[n:], 0.0 if dissipative else None)
    if dissipative and len(values) == n + k + 1:
        return DynState.of(values[:n], values[n : n + k], values[-1])
    wanted = f"{n + k} or {n + k + 1}" if dissipative else f"{n + k}"
    raise _usage(f"state {text!r} has {len(values)} values, expected {wanted}")


def _initial_states(
    state: str | None,
    states_file: Path | None,
    scenario: Scenario | None,
    kind: SystemKind,
    n: int,
    k: int,
) -> list[DynState]:
    if state is not None and states_file is not None:
        raise _usage("give either --state or --states-file")
    if states_file is not None:
        try:
            lines = states_file.read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise SpecFormatError(str(states_file), f"cannot read file ({e.strerror or e})") from e
        states = [
            _parse_state(line, n, k, kind.is_dissipative)
            for line in lines
            if line.strip() and not line.lstrip().startswith("#")
        ]
        if not states:
            raise _usage(f"{states_file} lists no states")
        return states
    if state is not None:
        return [_parse_state(state, n, k, kind.is_dissipative)]
    if scenario is not None:
        return [scenario.initial_state(kind)]
    raise _usage("--state is required when no scenario is given")


def _energy(
    energy: str | None, scenario: Scenario | None, kind: SystemKind, n: int, k: int
) -> EnergyLike:
    name = "L" if kind.is_lagrangian else "H"
    if energy is None:
        if scenario is None:
            raise _usage("--energy is required when no scenario is given")
        return scenario.energy_for(kind)
    if scenario is not None and energy in scenario.presets():
        preset = scenario.presets()[energy]
        return EnergyLike(preset.expr, n, k, uses_z=kind.is_dissipative, name=name)
    return EnergyLike.parse(energy, n, k, uses_z=kind.is_dissipative, name=name)


def _casimirs(
    given: list[str] | None, scenario: Scenario | None, n: int, k: int
) -> tuple[CasimirFn, ...]:
    if not given:
        return scenario.casimirs if scenario is not None else ()
    casimirs = []
    for item in given:
        name, sep, text = item.partition("=")
        if not sep or not name.strip():
            raise _usage(f"--casimir expects NAME=EXPR, got {item!r}")
        casimirs.append(CasimirFn.parse(name.strip(), text, n, k))
    return tuple(casimirs)


@app.command()
def simulate(
    spec_file: Annotated[Optional[Path], typer.Argument(help="Spec file; omit when using --scenario", metavar="[SPEC]")] = None,
    scenario_name: Annotated[Optional[str], typer.Option("--scenario", help="Registered scenario to run")] = None,
    dynamics: Annotated[str, typer.Option("--dynamics", help=f"Equations: {', '.join(DYNAMICS_ALIASES)}")] = "hamilton",
    energy: Annotated[Optional[str], typer.Option("--energy", help="Energy expression or scenario preset name")] = None,
    state: Annotated[Optional[str], typer.Option("--state", help="Initial state x..,y..[,z] as a comma list")] = None,
    states_file: Annotated[Optional[Path], typer.Option("--states-file", help="One initial state per line")] = None,
    t0: Annotated[float, typer.Option("--t0", help="Start time")] = 0.0,
    t1: Annotated[float, typer.Option("--t1", help="End time")] = 10.0,
    dt: Annotated[float, typer.Option("--dt", help="Step (rk4) or initial step (rk45)")] = 0.01,
    method: Annotated[str, typer.Option("--method", help=f"Integrator: {', '.join(METHODS)}")] = "rk45",
    out: Annotated[Path, typer.Option("--out", help="Trajectory CSV to write")] = Path("traj.csv"),
    casimir: Annotated[Optional[list[str]], typer.Option("--casimir", help="Extra monitored NAME=EXPR (repeatable)")] = None,
    rtol: Annotated[Optional[float], typer.Option("--rtol", help="rk45 relative tolerance")] = None,
    atol: Annotated[Optional[float], typer.Option("--atol", help="rk45 absolute tolerance")] = None,
    workers: Annotated[Optional[int], typer.Option("--workers", help="Threads for --states-file runs", min=1)] = None,
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Enable verbose/debug logging")] = False,
) -> None:
    """Integrate Hamiltonian, Lagrangian or dissipative dynamics and write the trajectory."""
    setup_logging(verbose=verbose)
    config = SolverConfig.from_env().override(rtol=rtol, atol=atol, workers=workers)

    if (spec_file is None) == (scenario_name is None):
        raise _usage("give exactly one of SPEC or --scenario")
    if dynamics not in DYNAMICS_ALIASES:
        raise _usage(f"unknown dynamics {dynamics!r}; choose from {', '.join(DYNAMICS_ALIASES)}")
    if method not in METHODS:
        raise _usage(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if not t1 > t0 or not dt > 0:
        raise _usage(f"need t1 > t0 and dt > 0, got t0={t0} t1={t1} dt={dt}")
    kind = DYNAMICS_ALIASES[dynamics]

    scenario = scenarios.get(scenario_name) if scenario_name is not None else None
    spec = scenario.spec if scenario is not None else load_spec(spec_file)
    total = total_of(spec)
    n, k = total.n, total.k

    H = _energy(energy, scenario, kind, n, k)
    casimirs = _casimirs(casimir, scenario, n, k)
    states = _initial_states(state, states_file, scenario, kind, n, k)
    options = dict(
        rtol=config.rtol,
        atol=config.atol,
        dt_min=config.dt_min,
        casimirs=casimirs,
        cond_limit=config.cond_limit,
    )

    if states_file is None:
        traj = integrate(kind, total, H, states[0], t0, t1, dt, method, **options)
        write_trajectory(traj, out)
        typer.echo(f"wrote {len(traj)} rows to {out}")
    else:
        trajectories = integrate_batch(
            kind, total, H, states, t0, t1, dt, method, workers=config.workers, **options
        )
        for i, traj in enumerate(trajectories):
            write_trajectory(traj, batch_path(out, i))
        typer.echo(f"wrote {len(trajectories)} trajectories next to {out}")

    descriptor = system_path(out)
    save_system(SystemDescriptor(kind, total, H, casimirs), descriptor, method)
    typer.echo(f"wrote {descriptor}")


@app.command()
def invariants(
    traj_file: Annotated[Path, typer.Argument(help="Trajectory CSV written by simulate", metavar="TRAJ")],
    system_file: Annotated[Path, typer.Option("--system", help="System descriptor written by simulate")],
    tol: Annotated[Optional[float], typer.Option("--tol", help="Largest accepted drift or residual")] = None,
    as_json: Annotated[bool, typer.Option("--json", help="Print the report as JSON")] = False,
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Enable verbose/debug logging")] = False,
) -> None:
    """Recompute energy, Casimirs and the dissipation law along a trajectory."""
    setup_logging(verbose=verbose)
    config = SolverConfig.from_env().override(monitor_tol=tol)

    system = load_system(system_file)
    traj = read_trajectory(traj_file, [c.name for c in system.casimirs])
    if (traj.n, traj.k, traj.has_z) != (system.spec.n, system.spec.k, system.kind.is_dissipative):
        raise SpecFormatError(
            str(traj_file), f"columns do not match the {system.kind.value} system in {system_file}"
        )

    report = monitor_invariants(traj, system, tol=config.monitor_tol)
    if as_json:
        typer.echo(json.dumps(report.to_dict() | {"rows": len(traj)}, indent=2))
    else:
        for line in report.lines():
            typer.echo(line)
    if not report.passed:
        raise typer.Exit(EXIT_FAILED)


@app.command("scenarios")
def scenarios_command(
    export: Annotated[Optional[str], typer.Option("--export", help="Scenario to write as a spec file")] = None,
    out: Annotated[Optional[Path], typer.Option("--out", help="Where --export writes")] = None,
    total: Annotated[bool, typer.Option("--total", help="Export the assembled algebroid instead of the product")] = False,
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Enable verbose/debug logging")] = False,
) -> None:
    """List the registered scenarios, or export one."""
    setup_logging(verbose=verbose)

    if export is None:
        for name, label in scenarios.list_scenarios():
            typer.echo(f"{name:<28} {label.value:<13} {scenarios.get(name).summary}")
        return
    if out is None:
        raise _usage("--export needs --out")
    scenario = scenarios.get(export)
    if total or scenario.product is None:
        value = scenario.algebroid
        label = scenario.classification if scenario.product is None else None
    else:
        value, label = scenario.product, scenario.classification
    save_spec(value, out, classification=label)
    typer.echo(f"wrote {export} to {out}")


def _fail(error: Exception, code: int) -> int:
    typer.echo(f"error: {error}", err=True)
    for note in getattr(error, "__notes__", ()):
        typer.echo(f"  {note}", err=True)
    return code


def run(argv: Sequence[str] | None = None) -> int:
    """Run the CLI and map failures onto exit codes 1 (usage) to 4 (numerical)."""
    try:
        result = app(
            args=list(argv) if argv is not None else None,
            prog_name="bdcp",
            standalone_mode=False,
        )
    except UsageError as e:
        e.show()
        return EXIT_USAGE
    except typer.Abort:
        return EXIT_USAGE
    except ScenarioError as e:
        return _fail(e, EXIT_USAGE)
    except (
        SpecFormatError,
        ExprSyntaxError,
        UnboundVariable,
        ShapeMismatch,
        IllegalTensorForLevel,
        ArityError,
        ValidationError,
    ) as e:
        return _fail(e, EXIT_FORMAT)
    except (ExprDomainError, EvaluationError, DynamicsError) as e:
        return _fail(e, EXIT_NUMERICAL)
    except OSError as e:
        return _fail(e, EXIT_FORMAT)
    return result if isinstance(result, int) else EXIT_OK

import csv
import json
import math

import pytest

import scenarios
from algebroid import HierarchyLevel
from specio import load_classification, load_spec, read_trajectory
from specio.cli import EXIT_FAILED, EXIT_FORMAT, EXIT_NUMERICAL, EXIT_USAGE, batch_path, run, system_path


def export(tmp_path, name: str, *flags: str):
    path = tmp_path / f"{name}.json"
    assert run(["scenarios", "--export", name, "--out", str(path), *flags]) == 0
    return path


def write_document(path, structure: list[dict]):
    document = {"format_version": "1", "kind": "algebroid", "dims": {"n": 0, "k": 3}, "tensors": {"structure": structure}}
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def test_scenarios_lists_the_registry(capsys):
    assert run(["scenarios"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [line.split()[0] for line in lines] == [name for name, _ in scenarios.list_scenarios()]
    assert lines[1].split()[1] == "direct"


def test_verify_exported_bicocycle(tmp_path, capsys):
    path = export(tmp_path, "so3xso3-bicocycle")
    capsys.readouterr()
    assert run(["verify", str(path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-3:-1] == ["nonzero blocks: zeta, rho, sigma, psi", "PASS"]
    report = json.loads(lines[-1])
    assert report["passed"]
    assert report["nonzero_blocks"] == ["zeta", "rho", "sigma", "psi"]


def test_verify_json_report(tmp_path, capsys):
    path = export(tmp_path, "se3-heavy-top")
    capsys.readouterr()
    assert run(["verify", str(path), "--json", "--points", "8", "--seed", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"]
    assert [c["name"] for c in report["checks"]] == ["skew", "anchor", "jacobi", "leibniz"]
    assert report["nonzero_blocks"] == ["rho", "theta"]


def test_verify_failure_exit_code(tmp_path, capsys):
    path = write_document(
        tmp_path / "skew.json",
        [{"indices": [1, 2, 3], "expr": "1"}, {"indices": [2, 1, 3], "expr": "1"}],
    )
    assert run(["verify", str(path)]) == EXIT_FAILED
    lines = capsys.readouterr().out.splitlines()
    assert lines[-2] == "FAIL"
    assert not json.loads(lines[-1])["passed"]


def test_decompose_exported_se3_is_semidirect(tmp_path, capsys):
    path = export(tmp_path, "se3-heavy-top")
    out = tmp_path / "split.json"
    capsys.readouterr()
    assert run(["decompose", str(path), "--split", "3", "--out", str(out)]) == 0
    assert capsys.readouterr().out.strip() == "semidirect"
    assert load_classification(out) is HierarchyLevel.SEMIDIRECT


def test_decompose_rejects_bad_split(tmp_path):
    path = export(tmp_path, "so3-rigid-body")
    assert run(["decompose", str(path), "--split", "3", "--out", str(tmp_path / "x.json")]) == EXIT_USAGE


def test_product_assembles_the_total(tmp_path):
    path = export(tmp_path, "sl2-zeta-split")
    out = tmp_path / "total.json"
    assert run(["product", str(path), "--out", str(out)]) == 0
    assert load_spec(out) == scenarios.get("sl2-zeta-split").algebroid


def test_product_needs_a_product(tmp_path):
    path = export(tmp_path, "so3-rigid-body")
    assert run(["product", str(path), "--out", str(tmp_path / "x.json")]) == EXIT_USAGE


def test_export_total(tmp_path):
    path = export(tmp_path, "heisenberg-cocycle", "--total")
    assert load_spec(path) == scenarios.get("heisenberg-cocycle").algebroid
    assert load_classification(path) is None


def test_rigid_body_run_keeps_its_invariants(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    args = ["simulate", "--scenario", "so3-rigid-body", "--dynamics", "lie-poisson", "--t1", "100"]
    assert run([*args, "--out", str(out)]) == 0
    assert system_path(out).exists()
    assert out.read_text().splitlines()[0] == "t,y1,y2,y3,H,C1"
    capsys.readouterr()

    assert run(["invariants", str(out), "--system", str(system_path(out)), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["casimir_drifts"]["norm"] < 1e-8
    assert report["energy_drift"] < 1e-8


def test_invariants_notice_a_tampered_trajectory(tmp_path):
    out = tmp_path / "traj.csv"
    assert run(["simulate", "--scenario", "so3-rigid-body", "--t1", "1", "--out", str(out)]) == 0
    with open(out, newline="") as f:
        rows = list(csv.reader(f))
    rows[-1][1] = repr(float(rows[-1][1]) + 1e-3)
    with open(out, "w", newline="") as f:
        csv.writer(f, lineterminator="\n").writerows(rows)
    assert run(["invariants", str(out), "--system", str(system_path(out))]) == EXIT_FAILED


def test_dissipative_run_satisfies_the_dissipation_law(tmp_path):
    out = tmp_path / "traj.csv"
    args = ["simulate", "--scenario", "contact-damped-oscillator", "--dynamics", "contact", "--t1", "20"]
    assert run([*args, "--out", str(out)]) == 0
    assert run(["invariants", str(out), "--system", str(system_path(out)), "--tol", "1e-9"]) == 0


def test_repeated_runs_write_identical_files(tmp_path):
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        args = ["simulate", "--scenario", "so3-ep-herglotz", "--dynamics", "herglotz", "--t1", "5"]
        assert run([*args, "--out", str(out)]) == 0
        outputs.append((out.read_bytes(), system_path(out).read_bytes()))
    assert outputs[0] == outputs[1]


def test_repeated_exports_are_identical(tmp_path):
    first = export(tmp_path, "so3xso3-bicocycle").read_bytes()
    assert export(tmp_path, "so3xso3-bicocycle").read_bytes() == first


def test_simulate_spec_file_with_explicit_energy(tmp_path):
    path = export(tmp_path, "tangent-R2")
    out = tmp_path / "traj.csv"
    args = [
        "simulate", str(path),
        "--energy", "(y1^2 + y2^2)/2 + (x1^2 + x2^2)/2",
        "--state", "1,0,0,1",
        "--t1", "1", "--dt", "1e-3", "--method", "rk4",
        "--out", str(out),
    ]
    assert run(args) == 0
    final = read_trajectory(out).final
    assert final.x == pytest.approx([math.cos(1.0), math.sin(1.0)], abs=1e-9)


def test_states_file_runs_a_batch(tmp_path):
    states = tmp_path / "states.txt"
    states.write_text("# x1,y1[,z]\n1,1\n0.5,0,0.2\n")
    out = tmp_path / "traj.csv"
    args = ["simulate", "--scenario", "contact-damped-oscillator", "--dynamics", "contact"]
    assert run([*args, "--states-file", str(states), "--t1", "1", "--workers", "2", "--out", str(out)]) == 0
    first, second = read_trajectory(batch_path(out, 0)), read_trajectory(batch_path(out, 1))
    assert first.state(0).z == 0.0
    assert second.state(0).z == 0.2


def test_unknown_scenario_is_a_usage_error(tmp_path, capsys):
    code = run(["simulate", "--scenario", "so3-rigid-bdy", "--out", str(tmp_path / "t.csv")])
    assert code == EXIT_USAGE
    assert "so3-rigid-body" in capsys.readouterr().err


def test_unknown_dynamics_is_a_usage_error(tmp_path):
    code = run(["simulate", "--scenario", "so3-rigid-body", "--dynamics", "newton", "--out", str(tmp_path / "t.csv")])
    assert code == EXIT_USAGE


def test_missing_option_is_a_usage_error(tmp_path):
    path = export(tmp_path, "so3-rigid-body")
    assert run(["decompose", str(path), "--out", str(tmp_path / "x.json")]) == EXIT_USAGE


def test_out_of_range_option_is_a_usage_error(tmp_path):
    path = export(tmp_path, "so3-rigid-body")
    assert run(["verify", str(path), "--points", "0"]) == EXIT_USAGE


def test_parse_error_exit_code(tmp_path, capsys):
    path = write_document(tmp_path / "bad.json", [{"indices": [1, 2, 3], "expr": "sin("}])
    assert run(["verify", str(path)]) == EXIT_FORMAT
    assert "at byte 4" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path):
    assert run(["verify", str(tmp_path / "absent.json")]) == EXIT_FORMAT


def test_energy_outside_arity_exit_code(tmp_path):
    args = ["simulate", "--scenario", "contact-damped-oscillator", "--energy", "y2^2"]
    assert run([*args, "--out", str(tmp_path / "t.csv")]) == EXIT_FORMAT


def test_singular_lagrangian_exit_code(tmp_path):
    args = ["simulate", "--scenario", "contact-damped-oscillator", "--dynamics", "euler-lagrange", "--energy", "x1^2"]
    assert run([*args, "--out", str(tmp_path / "t.csv")]) == EXIT_NUMERICAL


def test_domain_error_exit_code(tmp_path):
    args = ["simulate", "--scenario", "contact-damped-oscillator", "--energy", "sqrt(x1) + y1^2", "--state=-1,0"]
    assert run([*args, "--out", str(tmp_path / "t.csv")]) == EXIT_NUMERICAL

"""Tests for the command-line front end."""

import json
import math

import pandas as pd
import pytest

from finsler_lab import cli
from finsler_lab.experiments import CLOSED_FORM, ExperimentReport


@pytest.fixture
def disc_file(tmp_path):
    path = tmp_path / "disc.txt"
    path.write_text("ball\n# unit disc\n0 0\n1\n", encoding="utf-8")
    return str(path)


def _run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if captured.out.strip().startswith("{") else None
    return code, payload, captured


def test_dist_funk_and_reverse(disc_file, capsys):
    """Test closed-form distances on the unit disc."""
    code, payload, _ = _run(capsys, "dist", "--body", disc_file, "--from", "0,0", "--to", "0.5,0")
    assert code == cli.EXIT_OK
    assert payload["value"] == pytest.approx(math.log(2.0))

    code, payload, _ = _run(capsys, "dist", "--body", disc_file, "--metric", "reverse", "--from", "0,0", "--to", "0.5,0")
    assert payload["value"] == pytest.approx(math.log(1.5))


def test_dist_weighted_family(disc_file, capsys):
    """Test that the arithmetic family at t = 1/2 equals the Hilbert distance."""
    _, arith, _ = _run(capsys, "dist", "--body", disc_file, "--metric", "arith", "--t", "0.5", "--from", "0,0", "--to", "0.5,0")
    _, hilbert, _ = _run(capsys, "dist", "--body", disc_file, "--metric", "hilbert", "--from", "0,0", "--to", "0.5,0")
    assert arith["value"] == pytest.approx(hilbert["value"])


def test_dist_rejects_boundary_point(disc_file, capsys):
    """Test that invalid input exits with the usage code and an error message."""
    code, _, captured = _run(capsys, "dist", "--body", disc_file, "--from", "1,0", "--to", "0,0")
    assert code == cli.EXIT_USAGE
    assert captured.err.startswith("error:")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["dist", "--body", "x.txt", "--from", "0,0", "--to", "0,a"],
        ["dist", "--body", "x.txt", "--from", "0,0", "--to", "0,0", "--t", "2"],
        ["example", "--name", "unknown"],
        ["geodesic", "--body", "x.txt", "--from", "0,0", "--to", "0.1,0", "--nodes", "1"],
    ],
    ids=["no-command", "bad-point", "bad-weight", "bad-experiment", "bad-nodes"],
)
def test_usage_errors(argv, capsys):
    """Test that malformed arguments exit with code 2."""
    code, _, captured = _run(capsys, *argv)
    assert code == cli.EXIT_USAGE
    assert "error:" in captured.err


def test_missing_body_file(tmp_path, capsys):
    """Test that an unreadable body file is an input error."""
    code, _, _ = _run(capsys, "dist", "--body", str(tmp_path / "none.txt"), "--from", "0,0", "--to", "0.1,0")
    assert code == cli.EXIT_USAGE


def test_version(capsys):
    """Test the version flag."""
    with pytest.raises(SystemExit) as exc:
        cli.main(["--version"])
    assert exc.value.code == 0
    assert "finsler-lab" in capsys.readouterr().out


def test_geodesic_writes_path(disc_file, tmp_path, capsys):
    """Test the geodesic command and its path CSV."""
    path_csv = tmp_path / "path.csv"
    code, payload, _ = _run(
        capsys,
        "geodesic", "--body", disc_file, "--from", "0,0", "--to", "0.5,0",
        "--nodes", "9", "--multistart", "1", "--path-csv", str(path_csv),
    )
    assert code == cli.EXIT_OK
    assert payload["length"] == pytest.approx(math.log(2.0), rel=1e-3)
    assert set(payload) == {"length", "converged", "iterations", "nodes", "history"}
    frame = pd.read_csv(path_csv)
    assert list(frame.columns) == ["x1", "x2"]
    assert len(frame) == len(payload["nodes"])


def test_probe_triangle(disc_file, capsys):
    """Test the triangle probe of the Hilbert metric."""
    code, payload, _ = _run(capsys, "probe", "--body", disc_file, "--metric", "hilbert", "--count", "50")
    assert code == cli.EXIT_OK
    assert payload["probe"] == "triangle_inequality"
    assert payload["passed"] is True


def test_probe_busemann(disc_file, capsys):
    """Test the Busemann probe at a chosen point."""
    code, payload, _ = _run(capsys, "probe", "--body", disc_file, "--kind", "busemann", "--at", "0.3,0.2")
    assert code == cli.EXIT_OK
    assert set(payload["witness"]) == {"forward_tail", "backward_tail", "tail_start"}


def test_example_remark(capsys):
    """Test running a named experiment."""
    code, payload, _ = _run(capsys, "example", "--name", "remark")
    assert code == cli.EXIT_OK
    assert payload["name"] == "weighted-max-line"
    assert payload["passed"] is True


def test_example_anisotropic(capsys):
    """Test a solver-backed experiment with small options."""
    code, payload, _ = _run(capsys, "example", "--name", "ex4", "--pairs", "2", "--nodes", "9", "--multistart", "1")
    assert code == cli.EXIT_OK
    assert payload["name"] == "anisotropic-sum"


def test_triangle_actions(capsys):
    """Test eta, scaling and witness actions."""
    code, payload, _ = _run(capsys, "triangle", "--action", "eta", "--X", "1,1,1", "--Y", "2,2,2")
    assert payload["value"] == pytest.approx(math.log(2.0))

    code, payload, _ = _run(
        capsys, "triangle", "--action", "scaling", "--X", "1,2,2", "--Y", "2,1,1", "--lam", "0.5", "--lam-prime", "3"
    )
    assert code == cli.EXIT_OK
    assert payload["residual"] <= 1e-12

    code, payload, _ = _run(capsys, "triangle", "--action", "witness", "--t", "0.5", "--count", "500")
    assert payload["witness"] is None

    code, _, _ = _run(capsys, "triangle", "--action", "eta", "--X", "1,1,1")
    assert code == cli.EXIT_USAGE


def test_out_file(disc_file, tmp_path, capsys):
    """Test that --out writes JSON to a file instead of stdout."""
    out = tmp_path / "dist.json"
    code, _, captured = _run(capsys, "dist", "--body", disc_file, "--from", "0,0", "--to", "0.5,0", "--out", str(out))
    assert code == cli.EXIT_OK
    assert captured.out == ""
    assert json.loads(out.read_text())["value"] == pytest.approx(math.log(2.0))


def test_report_summary(monkeypatch, tmp_path, capsys):
    """Test the report command on stubbed battery results."""
    good = ExperimentReport("good")
    good.check_close("x", 1.0, 1.0, CLOSED_FORM)
    bad = ExperimentReport("bad")
    bad.check_gap("g", 0.0, 0.1)
    monkeypatch.setattr(cli, "run_battery", lambda quick, seed: [good, bad])

    code = cli.main(["report"])
    out = capsys.readouterr().out
    assert code == cli.EXIT_FAILED
    assert out.splitlines()[0] == "name,residual_key,residual,tolerance,passed"

    target = tmp_path / "battery.csv"
    cli.main(["report", "--out", str(target)])
    assert pd.read_csv(target)["name"].tolist() == ["good", "bad"]

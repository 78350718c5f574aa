"""Tests for experiments module."""

import math

import numpy as np
import pytest

from finsler_lab import experiments
from finsler_lab.convex_bodies import Ball
from finsler_lab.errors import DegenerateInputError
from finsler_lab.experiments import (
    BOUND,
    CLOSED_FORM,
    ExperimentReport,
    battery_options,
    chord_sign_profile,
    reports_frame,
    residual_tables,
    run_busemann_check,
    run_chord_identity_check,
    run_closed_form_check,
    run_example_1,
    run_example_2,
    run_example_3,
    run_example_4,
    run_main_theorem_check,
    run_remark_counterexample,
    run_symmetry_check,
    run_theorem_max_check,
    run_theorem_sum_check,
    run_triangle_check,
)
from finsler_lab.finsler import GeodesicOptions, reverse_lagrangian
from finsler_lab.funk_hilbert import funk_lagrangian, hyperbolic_distance

SMALL = GeodesicOptions(nodes=9, initial_nodes=5, multistart=1)


def test_report_bookkeeping():
    """Test residual limits, failures and the worst residual."""
    report = ExperimentReport("demo", tolerance=1e-3, tolerances={"loose": 0.5})
    report.check_close("exact", 2.0, 2.0, CLOSED_FORM)
    report.check_close("loose", 1.2, 1.0, CLOSED_FORM)
    report.check_gap("gap", 0.2, 0.1)
    assert report.passed
    assert report.limit("loose") == 0.5
    assert report.limit("gap") == 0.0
    assert report.worst_residual == ("gap", 0.0, 0.0)

    report.check_gap("tight", 0.05, 0.1)
    assert not report.passed
    assert report.failures == ["tight"]
    assert report.worst_residual[0] == "tight"


def test_report_nan_residual_fails():
    """Test that a NaN residual fails the report."""
    report = ExperimentReport("demo")
    report.residuals["broken"] = math.nan
    assert not report.passed
    assert report.worst_residual[0] == "broken"


def test_report_to_dict_omits_runtime_by_default():
    """Test the JSON mapping of a report."""
    report = ExperimentReport("demo", runtime=1.5)
    report.check_close("x", 1.0, 1.0, CLOSED_FORM)
    payload = report.to_dict()
    assert "runtime" not in payload
    assert payload["expected"]["x"] == {"value": 1.0, "provenance": CLOSED_FORM}
    assert report.to_dict(include_runtime=True)["runtime"] == 1.5


def test_remark_counterexample():
    """Test the non-additivity residual of the max family on the line."""
    report = run_remark_counterexample()
    assert report.passed
    assert report.quantities["max_half"] == pytest.approx(0.5 * math.log(7 / 4), abs=1e-9)
    assert abs(report.quantities["arith_half"]) <= 1e-12
    assert report.runtime >= 0.0
    assert report.notes


def test_example_1_max_of_norms():
    """Test the max of Euclidean and hyperbolic norms on a vertical segment."""
    report = run_example_1(0.5, 2.0, SMALL)
    expected = 1.0 - math.log(0.5)
    assert report.quantities["d_m"] == pytest.approx(expected, rel=1e-2)
    assert report.quantities["d_h"] == pytest.approx(math.log(4.0))
    assert report.quantities["d_m"] >= expected - 1e-12
    assert report.quantities["gap_over_max"] >= 0.15
    assert report.quantities["converged"] == 1.0
    assert report.passed


def test_example_1_rejects_bad_heights():
    """Test that heights must straddle 1."""
    with pytest.raises(DegenerateInputError):
        run_example_1(1.5, 2.0, SMALL)


def test_example_2_sum_of_norms():
    """Test that the sum Lagrangian strictly exceeds the sum of the distances."""
    report = run_example_2((0.0, 1.0), (1.0, 2.0), SMALL, margin=1e-3)
    assert report.quantities["d_h"] == pytest.approx(hyperbolic_distance([0.0, 1.0], [1.0, 2.0]))
    assert report.quantities["d_s"] - report.quantities["d_sigma"] >= 1e-3
    assert report.passed


def test_example_2_edge_cases():
    """Test coincident points and points sharing an abscissa."""
    report = run_example_2((0.0, 1.0), (0.0, 1.0), SMALL)
    assert report.passed
    assert "coincident points" in report.notes
    with pytest.raises(DegenerateInputError):
        run_example_2((0.0, 1.0), (0.0, 2.0), SMALL)


def test_example_3_anisotropic_max():
    """Test that the max of constant norms gives the max distance along straight lines."""
    report = run_example_3(pairs=[((0.0, 0.0), (1.0, 0.5)), ((-0.5, 0.2), (0.3, -0.4))], opts=SMALL)
    assert report.passed
    assert report.expected["pair_00"].value == pytest.approx(max(math.hypot(1.0, 0.5), math.sqrt(4 + 9 * 0.25)))
    assert report.quantities["pair_01_deviation"] < 1e-3


def test_example_4_anisotropic_sum():
    """Test that the sum of constant norms gives the sum of the distances."""
    report = run_example_4(count=2, seed=1, opts=SMALL)
    assert report.passed
    assert set(report.residuals) == {"pair_00", "pair_01"}


def test_theorem_sum_check():
    """Test the sum combination of the Funk Lagrangian and its reverse."""
    report = run_theorem_sum_check(pairs=[((0.0, 0.0), (0.5, 0.0))], t=0.3, opts=SMALL)
    assert report.passed
    assert report.notes == ["t=0.3"]


def test_chord_sign_profile():
    """Test the sign profile of (1 - t) p - t reverse(p) on a diameter of the disc."""
    p = funk_lagrangian(Ball(np.zeros(2), 1.0))
    # Moving outward p exceeds its reverse everywhere on the chord.
    outward = chord_sign_profile(p, reverse_lagrangian(p), 0.5, [0.5, 0.0], [0.9, 0.0])
    assert np.all(outward > 0)
    # Through the center the sign flips.
    through = chord_sign_profile(p, reverse_lagrangian(p), 0.5, [-0.5, 0.0], [0.5, 0.0])
    assert through.min() < 0 < through.max()


def test_theorem_max_check():
    """Test the max combination, including the bound on sign-changing chords."""
    report = run_theorem_max_check(opts=SMALL)
    assert report.quantities["pair_00_sign_constant"] == 1.0
    assert report.quantities["pair_01_sign_constant"] == 0.0
    assert report.expected["pair_01"].provenance == BOUND
    assert report.quantities["pair_01_gap"] >= -1e-3
    assert report.passed


def test_main_theorem_check():
    """Test the arithmetic family against its closed form and the Hilbert distance."""
    report = run_main_theorem_check(ts=(0.5,), pairs=2, seed=0, opts=SMALL)
    assert report.passed
    assert "t=0.5/pair_00/hilbert" in report.residuals


def test_chord_identity_check():
    """Test the Funk distance against quadrature along chords."""
    report = run_chord_identity_check(count=5, seed=0)
    assert report.passed
    assert set(report.residuals) == {"ball", "polytope"}


def test_closed_form_check():
    """Test the closed-form Lagrangians against the oracles."""
    report = run_closed_form_check(samples=50, seed=1)
    assert report.passed


def test_busemann_check():
    """Test that radial sequences converge in both directions."""
    report = run_busemann_check(targets=2, seed=0)
    assert report.passed
    assert report.quantities["target_0_forward"] <= 1e-3


def test_triangle_check():
    """Test the triangle-space battery entry with small samples."""
    report = run_triangle_check(samples=200, seed=0, witness_samples=2000)
    assert report.passed


def test_symmetry_check():
    """Test that only t = 1/2 is symmetric."""
    report = run_symmetry_check(ts=(0.0, 0.5), samples=200, seed=0)
    assert report.passed
    assert report.quantities["arith/t=0"] > 0.01


def test_battery_options():
    """Test quick and full solver settings."""
    assert battery_options(True).multistart == 1
    assert battery_options(False, seed=3).seed == 3


def test_run_battery_order_and_progress(monkeypatch):
    """Test that the battery runs every experiment in name order and reports progress."""
    runners = [
        "run_example_1",
        "run_example_2",
        "run_example_3",
        "run_example_4",
        "run_remark_counterexample",
        "run_theorem_sum_check",
        "run_theorem_max_check",
        "run_main_theorem_check",
        "run_chord_identity_check",
        "run_closed_form_check",
        "run_busemann_check",
        "run_triangle_check",
        "run_symmetry_check",
    ]
    for runner in runners:
        monkeypatch.setattr(experiments, runner, lambda *args, _name=runner, **kwargs: ExperimentReport(_name))

    updates = []
    reports = experiments.run_battery(quick=True, seed=1, progress=updates.append)

    assert len(reports) == len(runners)
    assert len({report.name for report in reports}) == len(runners)
    assert reports[0].name == "run_example_3"
    assert reports[-1].name == "run_remark_counterexample"
    assert [u.progress for u in updates] == sorted(u.progress for u in updates)
    assert updates[-1].progress == 1.0
    assert len(updates) == len(runners) + 1


def test_reports_frame():
    """Test the summary table of several reports."""
    good = ExperimentReport("good")
    good.check_close("x", 1.0, 1.0, CLOSED_FORM)
    bad = ExperimentReport("bad")
    bad.check_gap("g", 0.0, 0.1)
    frame = reports_frame([good, bad])
    assert list(frame.columns) == ["name", "residual_key", "residual", "tolerance", "passed", "runtime"]
    assert frame["passed"].tolist() == [True, False]
    assert frame.loc[1, "residual"] == pytest.approx(0.1)


def test_residual_tables():
    """Test one summary plus one long residual table per report."""
    good = ExperimentReport("good")
    good.check_close("x", 1.0, 1.0, CLOSED_FORM)
    bad = ExperimentReport("bad")
    bad.check_gap("g", 0.0, 0.1)
    tables = residual_tables([good, bad])
    assert list(tables) == ["summary", "good", "bad"]
    assert tables["good"].loc[0, "provenance"] == CLOSED_FORM
    row = tables["bad"].iloc[0]
    assert row["check"] == "g"
    assert tables["bad"]["expected"].isna().all()
    assert row["limit"] == 0.0
    assert not row["passed"]

"""Tests for report health checks."""

from finsler_lab.experiments import CLOSED_FORM, ExperimentReport
from finsler_lab.utils.report_health import check_report, overall_status, run_health_checks


def _report(name, value, expected=1.0, tolerance=1e-3):
    report = ExperimentReport(name, tolerance=tolerance)
    report.check_close("x", value, expected, CLOSED_FORM)
    return report


def test_clean_report_passes():
    """Test that a report far inside its limits passes."""
    assert check_report(_report("clean", 1.0)).status == "pass"


def test_near_limit_report_warns():
    """Test that a residual above half its limit is a warning."""
    check = check_report(_report("near", 1.0008))
    assert check.status == "warning"
    assert "x" in check.details


def test_unconverged_solver_warns():
    """Test that a passing report with an unconverged solve is a warning."""
    report = _report("slow", 1.0)
    report.quantities["converged"] = 0.0
    assert check_report(report).status == "warning"


def test_failed_report():
    """Test that a failing report lists its failures."""
    check = check_report(_report("broken", 2.0))
    assert check.status == "fail"
    assert check.details.startswith("x=")


def test_overall_status():
    """Test the rollup across reports."""
    clean, near = _report("clean", 1.0), _report("near", 1.0008)
    assert overall_status(run_health_checks([clean])) == "pass"
    assert overall_status(run_health_checks([clean, near])) == "warning"
    assert overall_status(run_health_checks([clean, _report("broken", 2.0)])) == "fail"
    assert overall_status(run_health_checks([])) == "fail"

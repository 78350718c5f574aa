"""Health rollup of experiment reports for the explorer's status panel."""

from dataclasses import dataclass
from typing import Literal, Sequence

from finsler_lab.experiments import ExperimentReport

# A passing residual above this fraction of its limit is flagged as a warning.
NEAR_LIMIT_FRACTION = 0.5


@dataclass
class HealthCheck:
    """Result of a single health check."""

    name: str
    status: Literal["pass", "warning", "fail"]
    message: str
    details: str | None = None


def check_report(report: ExperimentReport) -> HealthCheck:
    """Classify one report: failed, passing but close to a limit, or clean."""
    key, residual, limit = report.worst_residual
    if not report.passed:
        return HealthCheck(
            report.name,
            "fail",
            f"{len(report.failures)} check(s) out of tolerance",
            ", ".join(f"{k}={report.residuals[k]:.3g} (limit {report.limit(k):.3g})" for k in report.failures),
        )
    if limit > 0 and residual > NEAR_LIMIT_FRACTION * limit:
        return HealthCheck(
            report.name,
            "warning",
            "Passed close to the limit",
            f"{key}: {residual:.3g} of {limit:.3g}",
        )
    if report.quantities.get("converged", 1.0) == 0.0:
        return HealthCheck(report.name, "warning", "Passed, but the solver did not converge")
    return HealthCheck(report.name, "pass", f"{len(report.residuals)} check(s) passed")


def run_health_checks(reports: Sequence[ExperimentReport]) -> list[HealthCheck]:
    """
    Run all health checks.

    Args:
        reports: Reports from one battery run

    Returns:
        List of HealthCheck results, in report order
    """
    if not reports:
        return [HealthCheck("Battery", "fail", "No experiment reports available")]
    return [check_report(report) for report in reports]


def overall_status(checks: Sequence[HealthCheck]) -> Literal["pass", "warning", "fail"]:
    statuses = {check.status for check in checks}
    if "fail" in statuses:
        return "fail"
    return "warning" if "warning" in statuses else "pass"

"""Overview page with battery KPIs and the residual chart."""

import streamlit as st

from finsler_lab.experiments import ExperimentReport, reports_frame
from finsler_lab.utils.chart_helpers import create_residual_chart


def render(reports: list[ExperimentReport]) -> None:
    """
    Render the overview page.

    Args:
        reports: Reports from the last battery run
    """
    if not reports:
        st.warning("No experiment reports yet.")
        return

    summary = reports_frame(reports)

    render_kpis(summary)

    st.divider()

    st.plotly_chart(
        create_residual_chart(summary, "Worst residual per experiment (1 = limit)"),
        use_container_width=True,
    )

    failed = [report for report in reports if not report.passed]
    if failed:
        st.subheader("Failed checks")
        for report in failed:
            st.error(f"**{report.name}**: " + ", ".join(report.failures))

    notes = [(report.name, note) for report in reports for note in report.notes]
    if notes:
        with st.expander("Notes", expanded=False):
            for name, note in notes:
                st.caption(f"{name}: {note}")


def render_kpis(summary) -> None:
    """Render KPI metrics row."""
    col1, col2, col3, col4 = st.columns(4)

    with col1:
        st.metric("Experiments", len(summary))

    with col2:
        st.metric("Passed", int(summary["passed"].sum()))

    with col3:
        st.metric("Failed", int((~summary["passed"]).sum()))

    with col4:
        st.metric("Runtime", f"{summary['runtime'].sum():.1f} s")

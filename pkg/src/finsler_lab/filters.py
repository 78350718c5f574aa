"""Sidebar controls, health panel and downloads."""

from typing import Any

import streamlit as st

from finsler_lab.experiments import ExperimentReport
from finsler_lab.run_manager import PRESET_BODIES
from finsler_lab.utils.export import PARQUET_AVAILABLE, export_to_json, report_archive
from finsler_lab.utils.report_health import overall_status, run_health_checks


def render_sidebar_controls() -> dict[str, Any]:
    """
    Render sidebar control components.

    Returns:
        Dictionary of control values
    """
    controls = {}

    st.sidebar.header("Geometry")

    controls["body"] = st.sidebar.selectbox(
        "Convex body",
        options=PRESET_BODIES,
        index=PRESET_BODIES.index(st.session_state.get("body", "Unit disc")),
        help="Domain of the Funk-type metrics",
    )

    controls["t"] = st.sidebar.slider(
        "Weight t",
        min_value=0.0,
        max_value=1.0,
        value=st.session_state.get("t", 0.5),
        step=0.05,
        help="t = 0 is the Funk metric, t = 1/2 the Hilbert metric, t = 1 the reverse Funk metric",
    )

    st.sidebar.subheader("Solver")

    controls["nodes"] = st.sidebar.select_slider(
        "Max nodes",
        options=[9, 17, 33, 65],
        value=st.session_state.get("nodes", 33),
        help="Refinement stops at this node count",
    )

    controls["multistart"] = st.sidebar.slider(
        "Multistart",
        min_value=1,
        max_value=5,
        value=st.session_state.get("multistart", 3),
    )

    controls["tolerance"] = st.sidebar.select_slider(
        "Relative tolerance",
        options=[1e-3, 1e-4, 1e-5],
        value=st.session_state.get("tolerance", 1e-4),
        format_func=lambda v: f"{v:.0e}",
    )

    controls["seed"] = st.sidebar.number_input(
        "Seed",
        min_value=0,
        max_value=2**31 - 1,
        value=st.session_state.get("seed", 0),
        step=1,
    )

    st.sidebar.divider()
    st.sidebar.header("Experiment Battery")

    controls["quick"] = st.sidebar.checkbox(
        "Quick battery",
        value=st.session_state.get("quick", True),
        help="Fewer pairs and a single solver start for the geodesic experiments",
    )

    settings_changed = st.session_state.get("battery_settings") not in (None, (controls["quick"], controls["seed"]))

    if settings_changed:
        st.sidebar.warning("Settings changed - click to apply", icon="⚠️")
        controls["rerun"] = st.sidebar.button(
            "🔄 Rerun Battery",
            help="Apply new settings and rerun every experiment",
            use_container_width=True,
            type="primary",
        )
    else:
        controls["rerun"] = st.sidebar.button(
            "Rerun Battery",
            help="Rerun every experiment with the same settings",
            use_container_width=True,
        )

    return controls


def render_health_panel(reports: list[ExperimentReport]) -> None:
    """
    Render report health checks in sidebar.

    Args:
        reports: Reports from the last battery run
    """
    st.sidebar.divider()
    st.sidebar.subheader("Report Health")

    checks = run_health_checks(reports)
    status = overall_status(checks)
    st.sidebar.caption(f"Overall: {status.upper()}")

    for check in checks:
        if check.status == "pass":
            st.sidebar.success(f"**{check.name}**: {check.message}")
        elif check.status == "warning":
            with st.sidebar.expander(f"**{check.name}**: {check.message}", expanded=False):
                if check.details:
                    st.caption(check.details)
        else:  # fail
            st.sidebar.error(f"**{check.name}**: {check.message}")
            if check.details:
                st.sidebar.caption(check.details)


def render_download_buttons(reports: list[ExperimentReport]) -> None:
    """
    Render download buttons for report export.

    Args:
        reports: Reports from the last battery run
    """
    st.sidebar.divider()
    st.sidebar.subheader("Export Reports")

    format_options = ["CSV"]
    if PARQUET_AVAILABLE:
        format_options.append("Parquet")

    selected_format = st.sidebar.radio("Table Format", options=format_options, horizontal=True)
    export_format = "parquet" if selected_format == "Parquet" else "csv"

    st.sidebar.download_button(
        label=f"Download Tables ({export_format.upper()})",
        data=report_archive(reports, export_format),
        file_name=f"finsler_reports_{export_format}.zip",
        mime="application/zip",
        use_container_width=True,
        type="primary",
    )

    st.sidebar.download_button(
        label="Download Reports (JSON)",
        data=export_to_json([report.to_dict() for report in reports]),
        file_name="finsler_reports.json",
        mime="application/json",
        use_container_width=True,
    )

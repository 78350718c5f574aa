"""Main Streamlit application entry point."""

import streamlit as st

from finsler_lab.experiments import residual_tables
from finsler_lab.filters import (
    render_download_buttons,
    render_health_panel,
    render_sidebar_controls,
)
from finsler_lab.finsler import GeodesicOptions
from finsler_lab.run_manager import force_rerun, get_battery, preset_body
from finsler_lab.views import data_tables, geodesics, overview, triangles, unit_balls


def main():
    """Main application entry point."""
    st.set_page_config(
        page_title="Finsler Lab",
        page_icon="📐",
        layout="wide",
        initial_sidebar_state="expanded",
    )

    st.title("Finsler Lab")

    # Pending settings shown in the UI, not necessarily what the battery ran with
    defaults = {"body": "Unit disc", "t": 0.5, "nodes": 33, "multistart": 3, "tolerance": 1e-4, "seed": 0, "quick": True}
    for key, value in defaults.items():
        if key not in st.session_state:
            st.session_state[key] = value

    controls = render_sidebar_controls()
    for key in defaults:
        st.session_state[key] = controls[key]

    if controls["rerun"]:
        force_rerun()

    # The battery keeps its settings until an explicit rerun
    quick, seed = st.session_state.get("battery_settings", (controls["quick"], int(controls["seed"])))
    reports = get_battery(quick, seed)

    body = preset_body(controls["body"], int(controls["seed"]))
    opts = GeodesicOptions(
        nodes=controls["nodes"],
        initial_nodes=min(9, controls["nodes"]),
        tolerance=controls["tolerance"],
        multistart=controls["multistart"],
        seed=int(controls["seed"]),
    )

    render_health_panel(reports)
    render_download_buttons(reports)

    tab_overview, tab_balls, tab_geodesics, tab_triangles, tab_reports = st.tabs([
        "Overview",
        "Unit Balls",
        "Geodesics",
        "Triangles",
        "📋 Reports",
    ])

    with tab_overview:
        overview.render(reports)

    with tab_balls:
        unit_balls.render(body, controls["t"])

    with tab_geodesics:
        geodesics.render(body, controls["body"], controls["t"], opts)

    with tab_triangles:
        triangles.render(controls["t"], int(controls["seed"]))

    with tab_reports:
        data_tables.render(residual_tables(reports))


if __name__ == "__main__":
    main()

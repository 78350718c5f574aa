"""Geodesic solver paths over the body and their refinement history."""

import numpy as np
import pandas as pd
import streamlit as st

from finsler_lab.convex_bodies import ConvexBody
from finsler_lab.errors import FinslerLabError
from finsler_lab.finsler import GeodesicOptions
from finsler_lab.funk_hilbert import (
    funk_distance,
    funk_lagrangian,
    weighted_funk_lagrangian,
    weighted_funk_max,
    weighted_funk_max_lagrangian,
)
from finsler_lab.run_manager import get_geodesic
from finsler_lab.utils.chart_helpers import create_line_chart, create_path_chart, supports_outline
from finsler_lab.utils.export import encode_table


def render(body: ConvexBody, body_name: str, t: float, opts: GeodesicOptions) -> None:
    """
    Render the geodesic page.

    Args:
        body: Planar convex body
        body_name: Preset name, used as cache key
        t: Weight of the weighted families
        opts: Solver options from the sidebar
    """
    if not supports_outline(body):
        st.info("Only planar bodies can be drawn.")
        return

    center = body.interior_point()
    col1, col2, col3, col4 = st.columns(4)
    with col1:
        x1 = st.number_input("start x1", value=float(center[0]) - 0.3, step=0.05)
    with col2:
        x2 = st.number_input("start x2", value=float(center[1]), step=0.05)
    with col3:
        y1 = st.number_input("end x1", value=float(center[0]) + 0.5, step=0.05)
    with col4:
        y2 = st.number_input("end x2", value=float(center[1]) + 0.2, step=0.05)
    x, y = np.array([x1, x2]), np.array([y1, y2])

    families = {
        "funk": funk_lagrangian(body),
        f"arith(t={t:g})": weighted_funk_lagrangian(body, t),
        f"max(t={t:g})": weighted_funk_max_lagrangian(body, t),
    }
    selected = st.multiselect("Lagrangians", options=list(families), default=list(families)[:2])
    if not selected:
        st.info("Select at least one Lagrangian.")
        return

    try:
        results = {name: get_geodesic(families[name], f"{body_name}/{name}", x, y, opts) for name in selected}
        closed = {
            "funk": funk_distance(body, x, y),
            f"arith(t={t:g})": (1 - t) * funk_distance(body, x, y) + t * funk_distance(body, y, x),
            f"max(t={t:g})": weighted_funk_max(body, t, x, y),
        }
    except FinslerLabError as exc:
        st.error(str(exc))
        return

    st.plotly_chart(
        create_path_chart(body, {name: r.path.to_frame() for name, r in results.items()}, "Optimized paths"),
        use_container_width=True,
    )

    rows = [
        {
            "lagrangian": name,
            "induced distance": r.length,
            "distance formula": closed[name],
            "converged": r.converged,
            "nodes": r.path.count,
            "deviation from chord": r.path.max_deviation_from_segment(),
        }
        for name, r in results.items()
    ]
    st.dataframe(pd.DataFrame(rows), use_container_width=True, hide_index=True)
    st.caption("For the max family the formula is only a lower bound of the induced distance.")

    history = pd.DataFrame(
        [{"lagrangian": name, "nodes": n, "length": length} for name, r in results.items() for n, length in r.history]
    )
    st.plotly_chart(create_line_chart(history, "nodes", "length", "Refinement history", color="lagrangian"), use_container_width=True)

    for name, r in results.items():
        st.download_button(
            label=f"Path {name} (CSV)",
            data=encode_table(r.path.to_frame()),
            file_name=f"path_{name}.csv",
            mime="text/csv",
        )

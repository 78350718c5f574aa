"""Triangle-space metric: asymmetry heat-map, witness search and family profile."""

import numpy as np
import pandas as pd
import streamlit as st

from finsler_lab.triangle_space import asymmetry_witness, eta_family, family_profile, normalize_unit_area
from finsler_lab.utils.chart_helpers import create_heatmap, create_line_chart

# Grid of unit-area triangles parametrized by log(A1 / A3) and log(A2 / A3).
GRID_RADIUS = 1.5
GRID_SIZE = 25


def render(t: float, seed: int) -> None:
    """
    Render the triangle page.

    Args:
        t: Weight of the family
        seed: Seed for witness search and profiles
    """
    kind = st.radio("Family", options=["arith", "max"], horizontal=True)

    render_asymmetry_map(kind, t)

    st.divider()

    col1, col2 = st.columns(2)
    with col1:
        st.subheader("Asymmetry witness")
        count = st.select_slider("Samples", options=[1000, 5000, 10000], value=5000)
        witness = asymmetry_witness(t, kind, count, seed)
        if witness is None:
            st.success(f"No pair with gap above 0.01 found for t = {t:g}.")
        else:
            st.json(witness)
    with col2:
        st.subheader("Family profile")
        profile = family_profile(kind, np.linspace(0.0, 1.0, 11), 1000, seed)
        st.plotly_chart(create_line_chart(profile, "t", "mean_asymmetry", "Mean |eta_t(X,Y) - eta_t(Y,X)|"), use_container_width=True)
        st.caption("Sampled evidence only; says nothing definite about isometry classes.")


def render_asymmetry_map(kind: str, t: float) -> None:
    """Heat-map of eta_t(X0, Y) - eta_t(Y, X0) from the equilateral triangle X0."""
    d = eta_family(kind, t)
    X0 = normalize_unit_area([1.0, 1.0, 1.0])
    axis = np.linspace(-GRID_RADIUS, GRID_RADIUS, GRID_SIZE)
    rows = []
    for u in axis:
        for w in axis:
            Y = normalize_unit_area(np.exp([u, w, 0.0]))
            rows.append({"log(A1/A3)": round(u, 3), "log(A2/A3)": round(w, 3), "gap": d(X0, Y) - d(Y, X0)})
    grid = pd.DataFrame(rows).pivot_table(values="gap", index="log(A2/A3)", columns="log(A1/A3)")
    st.plotly_chart(
        create_heatmap(grid, f"Asymmetry from the equilateral triangle ({kind}, t = {t:g})", "RdBu"),
        use_container_width=True,
    )

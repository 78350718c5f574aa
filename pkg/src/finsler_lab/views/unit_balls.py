"""Unit balls of the Funk, Hilbert and weighted Funk Lagrangians at a chosen point."""

import numpy as np
import streamlit as st

from finsler_lab.convex_bodies import ConvexBody
from finsler_lab.errors import FinslerLabError
from finsler_lab.finsler import reverse_lagrangian
from finsler_lab.funk_hilbert import (
    funk_lagrangian,
    hilbert_lagrangian,
    weighted_funk_lagrangian,
    weighted_funk_max_lagrangian,
)
from finsler_lab.utils.chart_helpers import create_indicatrix_chart, indicatrix


def render(body: ConvexBody, t: float) -> None:
    """
    Render the unit-ball page.

    Args:
        body: Planar convex body
        t: Weight of the weighted families
    """
    st.subheader("Unit balls {v : F(x, v) = 1}")
    center = body.interior_point()

    col1, col2 = st.columns(2)
    with col1:
        x1 = st.number_input("x1", value=float(center[0]), step=0.05, key="ball_x1")
    with col2:
        x2 = st.number_input("x2", value=float(center[1]), step=0.05, key="ball_x2")
    x = np.array([x1, x2])

    if not body.contains(x):
        st.warning("The point must lie inside the body.")
        return

    p = funk_lagrangian(body)
    lagrangians = {
        "funk": p,
        "reverse": reverse_lagrangian(p),
        "hilbert": hilbert_lagrangian(body),
        f"arith(t={t:g})": weighted_funk_lagrangian(body, t),
        f"max(t={t:g})": weighted_funk_max_lagrangian(body, t),
    }
    try:
        curves = {name: indicatrix(F, x) for name, F in lagrangians.items()}
    except FinslerLabError as exc:
        st.error(str(exc))
        return

    st.plotly_chart(create_indicatrix_chart(curves, f"Indicatrices at x = ({x1:g}, {x2:g})"), use_container_width=True)
    st.caption("Directions in which a Lagrangian vanishes are clipped at the plot window.")

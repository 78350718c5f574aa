"""Chart helper utilities."""

import numpy as np
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

from finsler_lab.convex_bodies import Ball, ConvexBody, Ellipsoid, Polytope, UpperHalfSpace
from finsler_lab.finsler import Lagrangian

COLORS = {
    "primary": "#0A6ED1",
    "secondary": "#E9730C",
    "success": "#107E3E",
    "warning": "#DF6E0C",
    "error": "#BB0000",
    "neutral": "#6A6D70",
}

STATUS_COLORS = {
    "pass": COLORS["success"],
    "warning": COLORS["warning"],
    "fail": COLORS["error"],
}

# One color per Lagrangian family in the unit-ball and geodesic plots.
FAMILY_COLORS = {
    "funk": "#0A6ED1",
    "reverse": "#89B8E6",
    "hilbert": "#107E3E",
    "arith": "#E9730C",
    "max": "#BB0000",
}

CHART_BGCOLOR = "#FFFFFF"
CHART_PAPER_BGCOLOR = "#FFFFFF"
CHART_FONT_COLOR = "#32363A"

# Half-planes are drawn clipped to this window.
PLANE_WINDOW = 3.0


def _style(fig: go.Figure, equal_axes: bool = False) -> go.Figure:
    fig.update_layout(
        plot_bgcolor=CHART_BGCOLOR,
        paper_bgcolor=CHART_PAPER_BGCOLOR,
        font=dict(color=CHART_FONT_COLOR),
        margin=dict(l=40, r=40, t=60, b=40),
    )
    if equal_axes:
        fig.update_yaxes(scaleanchor="x", scaleratio=1)
    return fig


def body_outline(body: ConvexBody, samples: int = 361) -> pd.DataFrame:
    """
    Boundary of a planar body as a closed polyline.

    Rays from the reference point are cut at their exit distance; unbounded
    directions are cut at ``PLANE_WINDOW``.

    Returns:
        DataFrame with columns x1, x2
    """
    if body.dim != 2:
        raise ValueError("only planar bodies can be drawn")
    center = body.interior_point()
    angles = np.linspace(0.0, 2 * np.pi, samples)
    directions = np.column_stack([np.cos(angles), np.sin(angles)])
    reach = body.ray_exit_many(np.tile(center, (samples, 1)), directions)
    reach = np.minimum(reach, PLANE_WINDOW)
    points = center + reach[:, None] * directions
    return pd.DataFrame(points, columns=["x1", "x2"])


def indicatrix(F: Lagrangian, x, samples: int = 361) -> pd.DataFrame:
    """
    Unit sphere {v : F(x, v) = 1} of a planar Lagrangian, sampled by angle.

    Directions where F vanishes are cut at ``PLANE_WINDOW``.
    """
    x = np.asarray(x, dtype=float)
    angles = np.linspace(0.0, 2 * np.pi, samples)
    directions = np.column_stack([np.cos(angles), np.sin(angles)])
    values = F.evaluate(np.tile(x, (samples, 1)), directions)
    with np.errstate(divide="ignore"):
        radius = np.minimum(np.where(values > 0, 1.0 / values, np.inf), PLANE_WINDOW)
    return pd.DataFrame(radius[:, None] * directions, columns=["v1", "v2"])


def create_indicatrix_chart(curves: dict[str, pd.DataFrame], title: str) -> go.Figure:
    """
    Overlay of unit balls.

    Args:
        curves: Family name to ``indicatrix`` output
        title: Chart title

    Returns:
        Plotly Figure
    """
    fig = go.Figure()
    for name, df in curves.items():
        fig.add_trace(
            go.Scatter(
                x=df["v1"],
                y=df["v2"],
                mode="lines",
                name=name,
                line=dict(color=FAMILY_COLORS.get(name.split("(")[0], COLORS["neutral"])),
            )
        )
    fig.update_layout(title=title)
    return _style(fig, equal_axes=True)


def create_path_chart(
    body: ConvexBody,
    paths: dict[str, pd.DataFrame],
    title: str,
) -> go.Figure:
    """
    Geodesic paths drawn over the outline of their body.

    Args:
        body: Planar body
        paths: Label to path frame (columns x1, x2)
        title: Chart title

    Returns:
        Plotly Figure
    """
    outline = body_outline(body)
    fig = go.Figure()
    fig.add_trace(
        go.Scatter(
            x=outline["x1"],
            y=outline["x2"],
            mode="lines",
            name=body.tag,
            line=dict(color=COLORS["neutral"], dash="dot"),
        )
    )
    for name, df in paths.items():
        fig.add_trace(
            go.Scatter(
                x=df["x1"],
                y=df["x2"],
                mode="lines+markers",
                name=name,
                marker=dict(size=4),
                line=dict(color=FAMILY_COLORS.get(name.split("(")[0], COLORS["primary"])),
            )
        )
    fig.update_layout(title=title)
    return _style(fig, equal_axes=True)


def create_residual_chart(summary: pd.DataFrame, title: str) -> go.Figure:
    """
    Worst residual of each report relative to its limit, on a log scale.

    Args:
        summary: Output of ``reports_frame``
        title: Chart title

    Returns:
        Plotly Figure
    """
    df = summary.copy()
    # Gap checks have limit 0; show them at their raw residual.
    limit = df["tolerance"].where(df["tolerance"] > 0)
    df["ratio"] = (df["residual"] / limit).fillna(df["residual"]).clip(lower=1e-16)
    df["status"] = np.where(df["passed"], "pass", "fail")
    fig = px.bar(
        df,
        x="name",
        y="ratio",
        color="status",
        color_discrete_map=STATUS_COLORS,
        title=title,
        log_y=True,
    )
    fig.add_hline(y=1.0, line_dash="dash", line_color=COLORS["error"])
    fig.update_layout(xaxis_title="", yaxis_title="residual / limit")
    return _style(fig)


def create_line_chart(
    df: pd.DataFrame,
    x: str,
    y: str,
    title: str,
    color: str | None = None,
    markers: bool = True,
) -> go.Figure:
    """
    Create a styled line chart.

    Args:
        df: DataFrame with data
        x: X-axis column
        y: Y-axis column
        title: Chart title
        color: Column for color encoding
        markers: Show markers on line

    Returns:
        Plotly Figure
    """
    fig = px.line(df, x=x, y=y, title=title, color=color, markers=markers)
    return _style(fig)


def create_heatmap(grid: pd.DataFrame, title: str, color_scale: str = "Blues") -> go.Figure:
    """
    Create a styled heatmap of an already pivoted table.

    Args:
        grid: Pivoted values (index rows, columns columns)
        title: Chart title
        color_scale: Plotly color scale name

    Returns:
        Plotly Figure
    """
    fig = px.imshow(grid, title=title, color_continuous_scale=color_scale, aspect="auto", origin="lower")
    return _style(fig)


def supports_outline(body: ConvexBody) -> bool:
    return body.dim == 2 and isinstance(body, (Ball, Ellipsoid, Polytope, UpperHalfSpace))

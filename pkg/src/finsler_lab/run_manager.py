"""Experiment runs and solver results cached in the Streamlit session."""

import numpy as np
import streamlit as st

from finsler_lab.convex_bodies import Ball, ConvexBody, Ellipsoid, UpperHalfSpace, random_polytope, square
from finsler_lab.experiments import BatteryProgress, ExperimentReport, run_battery
from finsler_lab.finsler import GeodesicOptions, GeodesicResult, Lagrangian, induced_distance

PRESET_BODIES = ["Unit disc", "Ellipse", "Square", "Random polytope", "Upper half-plane"]


def preset_body(name: str, seed: int = 0) -> ConvexBody:
    """Build one of the explorer's planar bodies."""
    if name == "Unit disc":
        return Ball(np.zeros(2), 1.0)
    if name == "Ellipse":
        return Ellipsoid(np.zeros(2), np.array([1.5, 0.8]))
    if name == "Square":
        return square()
    if name == "Random polytope":
        return random_polytope(np.random.default_rng(seed), faces=5)
    if name == "Upper half-plane":
        return UpperHalfSpace(2)
    raise ValueError(f"unknown preset body {name!r}")


def get_battery(quick: bool, seed: int) -> list[ExperimentReport]:
    """
    Run or retrieve the cached experiment battery.

    Uses Streamlit session state to cache reports. The battery only reruns
    when its settings change or ``force_rerun`` cleared the cache.

    Args:
        quick: Trimmed pair counts and multistarts
        seed: Seed shared by all experiments

    Returns:
        Reports in fixed experiment order
    """
    cache_key = "battery_reports"
    settings_key = "battery_settings"
    settings = (quick, seed)

    needs_run = cache_key not in st.session_state or st.session_state.get(settings_key) != settings

    if needs_run:
        with st.status("Running experiment battery...", expanded=True) as status:
            progress_bar = st.progress(0.0)
            status_text = st.empty()

            def on_progress(info: BatteryProgress) -> None:
                """Update Streamlit progress UI with battery progress."""
                progress_bar.progress(min(info.progress, 1.0))
                status_text.text(info.message)

            reports = run_battery(quick=quick, seed=seed, progress=on_progress)
            progress_bar.progress(1.0)
            status.update(label="Battery complete!", state="complete")

            st.session_state[cache_key] = reports
            st.session_state[settings_key] = settings

    return st.session_state[cache_key]


def force_rerun() -> None:
    """Drop cached battery reports so the next ``get_battery`` call recomputes them."""
    for key in ("battery_reports", "battery_settings"):
        st.session_state.pop(key, None)


def get_geodesic(F: Lagrangian, key: str, x, y, opts: GeodesicOptions) -> GeodesicResult:
    """
    Solve or retrieve a cached geodesic.

    Args:
        F: Lagrangian to minimize
        key: Identifies F and its body (Lagrangians are not hashable)
        x: Start point
        y: End point
        opts: Solver options

    Returns:
        The solver result
    """
    cache = st.session_state.setdefault("geodesic_cache", {})
    cache_key = (key, tuple(np.asarray(x, dtype=float)), tuple(np.asarray(y, dtype=float)), opts)
    if cache_key not in cache:
        with st.spinner(f"Optimizing path for {F.label}..."):
            cache[cache_key] = induced_distance(F, x, y, opts)
    return cache[cache_key]

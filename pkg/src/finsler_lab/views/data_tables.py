"""Report tables for inspection before export."""

import pandas as pd
import streamlit as st


def render(tables: dict[str, pd.DataFrame]) -> None:
    """
    Render the report tables view.

    Args:
        tables: Table name to DataFrame (summary first)
    """
    st.subheader("Report Tables")

    selected_table = st.selectbox(
        "Select Table",
        options=list(tables),
        format_func=lambda x: f"{x} ({len(tables[x]):,} rows)",
    )

    if selected_table:
        render_table_details(tables[selected_table], selected_table)


def render_table_details(df: pd.DataFrame, table_name: str) -> None:
    """Render table metrics, an optional failing-only filter and the preview."""
    col1, col2, col3 = st.columns(3)

    with col1:
        st.metric("Rows", f"{len(df):,}")
    with col2:
        st.metric("Columns", len(df.columns))
    with col3:
        if "passed" in df.columns and len(df) > 0:
            st.metric("Passing", f"{df['passed'].mean() * 100:.0f}%")

    only_failed = st.checkbox("Only failing rows", key=f"failed_{table_name}")
    display_df = df[~df["passed"].astype(bool)] if only_failed and "passed" in df.columns else df

    if len(display_df) == 0:
        st.info("No rows to show.")
        return

    st.dataframe(display_df, use_container_width=True, hide_index=True)

    numeric_cols = display_df.select_dtypes(include=["number"]).columns.tolist()
    if numeric_cols:
        with st.expander("Numeric Column Statistics", expanded=False):
            st.dataframe(display_df[numeric_cols].describe().T, use_container_width=True)

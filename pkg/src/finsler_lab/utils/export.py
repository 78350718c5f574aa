"""Encoders for reports, geodesic paths and residual tables."""

import io
import json
import zipfile
from pathlib import Path
from typing import Any, Literal, Sequence

import pandas as pd

from finsler_lab.experiments import ExperimentReport, residual_tables
from finsler_lab.weak_metrics import to_jsonable

# Attempt to import pyarrow for parquet support
try:
    import pyarrow  # noqa: F401

    PARQUET_AVAILABLE = True
except ImportError:
    PARQUET_AVAILABLE = False

TableFormat = Literal["csv", "parquet"]

TABLE_SUFFIXES: dict[str, TableFormat] = {".csv": "csv", ".parquet": "parquet"}


def export_to_json(payload: Any) -> bytes:
    """
    Serialize a payload to JSON bytes.

    Keys are sorted and non-finite floats encoded as strings, so identical
    payloads always give identical bytes.

    Args:
        payload: Dicts, lists, numbers and numpy values

    Returns:
        UTF-8 JSON followed by a newline
    """
    text = json.dumps(to_jsonable(payload), sort_keys=True, allow_nan=False, indent=2)
    return (text + "\n").encode("utf-8")


def encode_table(frame: pd.DataFrame, fmt: TableFormat = "csv") -> bytes:
    """
    Encode a table without its index.

    Raises:
        ImportError: For ``"parquet"`` when pyarrow is missing
    """
    if fmt == "csv":
        return frame.to_csv(index=False).encode("utf-8")
    if not PARQUET_AVAILABLE:
        raise ImportError("pyarrow is required for Parquet export. Install with: pip install pyarrow")
    buffer = io.BytesIO()
    frame.to_parquet(buffer, index=False, engine="pyarrow")
    return buffer.getvalue()


def archive_member_name(table: str, fmt: TableFormat) -> str:
    """Archive member holding ``table`` encoded as ``fmt``."""
    return f"{table}.{fmt}"


def report_archive(reports: Sequence[ExperimentReport], fmt: TableFormat = "csv") -> bytes:
    """
    Zip the summary and every report's residual table.

    Args:
        reports: Reports from one battery run
        fmt: Encoding of each member

    Returns:
        ZIP archive bytes, one member per table of ``residual_tables``
    """
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
        for table, frame in residual_tables(reports).items():
            archive.writestr(archive_member_name(table, fmt), encode_table(frame, fmt))
    return buffer.getvalue()


def write_output(path: str | Path, payload: Any, frame: pd.DataFrame | None = None) -> None:
    """
    Write a result to ``path``, choosing the format from the extension.

    ``.csv`` writes ``frame`` (or a one-row table of the payload's scalar
    fields), ``.parquet`` the same table as Parquet, anything else JSON.
    """
    path = Path(path)
    fmt = TABLE_SUFFIXES.get(path.suffix.lower())
    if fmt is None:
        path.write_bytes(export_to_json(payload))
        return
    if frame is None:
        flat = to_jsonable(payload)
        frame = pd.DataFrame([{k: v for k, v in flat.items() if not isinstance(v, (dict, list))}])
    path.write_bytes(encode_table(frame, fmt))

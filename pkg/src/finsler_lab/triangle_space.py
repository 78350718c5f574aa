"""The asymmetric metric on marked unit-area Euclidean triangles and its weighted families."""

from __future__ import annotations

import logging
import math
from typing import Any

import numpy as np
import pandas as pd

from finsler_lab.errors import DegenerateInputError
from finsler_lab.weak_metrics import (
    SymmetrisationKind,
    WeakMetric,
    asymmetry_search,
    symmetrise,
    validate_weight,
)

logger = logging.getLogger(__name__)

UNIT_AREA_SLACK = 1e-9
# A-coordinates are drawn log-uniformly in [exp(-r), exp(r)] before normalizing.
LOG_SAMPLING_RADIUS = 2.0


def _positive_triple(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (3,):
        raise DegenerateInputError(f"{name} must have exactly three entries")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DegenerateInputError(f"{name} must be positive, got {arr.tolist()}")
    return arr


def sides_to_A(sides) -> np.ndarray:
    """
    A-coordinates A_i = (a_j + a_k - a_i) / 2 of a triangle with edge lengths a.

    Raises:
        DegenerateInputError: If the sides violate a strict triangle inequality
    """
    a = _positive_triple(sides, "sides")
    A = (a.sum() - 2 * a) / 2
    if np.any(A <= 0):
        raise DegenerateInputError(f"sides {a.tolist()} violate the triangle inequality")
    return A


def A_to_sides(A) -> np.ndarray:
    """Inverse coordinate change a_i = A_j + A_k."""
    A = _positive_triple(A, "A")
    return A.sum() - A


def heron_area(A) -> float:
    """Area sqrt((A1 + A2 + A3) A1 A2 A3)."""
    A = _positive_triple(A, "A")
    return math.sqrt(A.sum() * A.prod())


def normalize_unit_area(A) -> np.ndarray:
    """The rescaling A / sqrt(Ar(A)), the unique positive multiple with area 1."""
    A = _positive_triple(A, "A")
    return A / math.sqrt(heron_area(A))


def _max_ratio(X: np.ndarray, Y: np.ndarray) -> float:
    """exp(eta(X, Y))."""
    return float(np.max(Y / X))


def eta(X, Y) -> float:
    """log max_i (Y_i / X_i)."""
    X, Y = _positive_triple(X, "X"), _positive_triple(Y, "Y")
    return math.log(_max_ratio(X, Y))


def eta_scaling_residual(X, Y, lam: float, lam_prime: float) -> float:
    """|exp(eta(lam X, lam' Y)) - (lam' / lam) exp(eta(X, Y))|; zero up to rounding."""
    if not (lam > 0 and lam_prime > 0):
        raise DegenerateInputError("scaling factors must be positive")
    X, Y = _positive_triple(X, "X"), _positive_triple(Y, "Y")
    return abs(_max_ratio(lam * X, lam_prime * Y) - lam_prime / lam * _max_ratio(X, Y))


def _require_unit_area(A: np.ndarray, name: str) -> np.ndarray:
    A = _positive_triple(A, name)
    if abs(heron_area(A) - 1.0) > UNIT_AREA_SLACK:
        raise DegenerateInputError(f"{name} is not a unit-area triangle (area {heron_area(A):.12g})")
    return A


def eta_metric() -> WeakMetric:
    """eta restricted to unit-area triangles."""

    def fn(X, Y):
        return eta(_require_unit_area(X, "X"), _require_unit_area(Y, "Y"))

    return WeakMetric(fn, "eta")


def eta_family(kind: SymmetrisationKind, t: float) -> WeakMetric:
    """eta_t^a or eta_t^m on unit-area triangles."""
    return symmetrise(eta_metric(), validate_weight(t), kind)


def sample_unit_area(rng: np.random.Generator, count: int) -> np.ndarray:
    """Unit-area A-coordinates, one triangle per row, from a log-uniform draw."""
    raw = np.exp(rng.uniform(-LOG_SAMPLING_RADIUS, LOG_SAMPLING_RADIUS, size=(count, 3)))
    areas = np.sqrt(raw.sum(axis=1) * raw.prod(axis=1))
    return raw / np.sqrt(areas)[:, None]


def asymmetry_witness(
    t: float,
    kind: SymmetrisationKind = "arith",
    count: int = 10_000,
    seed: int = 0,
    threshold: float = 0.01,
) -> dict[str, Any] | None:
    """
    Seeded search for a unit-area pair on which eta_t is asymmetric.

    Returns:
        ``{t, kind, X, Y, forward, backward, gap}`` for the best pair whose
        gap exceeds ``threshold``, or ``None``
    """
    found = asymmetry_search(eta_family(kind, t), sample_unit_area, count, seed, threshold)
    if found is None:
        logger.info("no asymmetry witness for eta_%s (t=%g) in %d samples", kind, t, count)
        return None
    return {"t": float(t), "kind": kind, **found.to_dict()}


def local_norm_estimate(kind: SymmetrisationKind, t: float, X, V, eps: float = 1e-6) -> float:
    """
    Difference quotient eta_t(X, normalize(X + eps V)) / eps.

    A candidate value of the infinitesimal norm of eta_t at X in direction V;
    homogeneity and subadditivity of this estimate are numerical evidence on
    whether eta_t comes from a Finsler structure, not a proof.
    """
    X = _require_unit_area(X, "X")
    V = np.asarray(V, dtype=float)
    moved = X + eps * V
    if np.any(moved <= 0):
        raise DegenerateInputError("step leaves the positive orthant; decrease eps")
    return eta_family(kind, t)(X, normalize_unit_area(moved)) / eps


def family_profile(kind: SymmetrisationKind, ts, count: int = 1000, seed: int = 0) -> pd.DataFrame:
    """
    Per-t statistics of eta_t on one shared set of seeded unit-area pairs.

    Columns: t, kind, mean, max, mean_asymmetry. Distinct profiles are
    evidence that the members of the family differ, not a proof that they
    are non-isometric.
    """
    rng = np.random.default_rng(seed)
    xs, ys = sample_unit_area(rng, count), sample_unit_area(rng, count)
    forward = np.array([eta(x, y) for x, y in zip(xs, ys)])
    backward = np.array([eta(y, x) for x, y in zip(xs, ys)])
    rows = []
    for t in ts:
        t = validate_weight(t)
        if kind == "arith":
            there, back = (1 - t) * forward + t * backward, (1 - t) * backward + t * forward
        else:
            there = np.maximum((1 - t) * forward, t * backward)
            back = np.maximum((1 - t) * backward, t * forward)
        rows.append(
            {
                "t": t,
                "kind": kind,
                "mean": float(there.mean()),
                "max": float(there.max()),
                "mean_asymmetry": float(np.abs(there - back).mean()),
            }
        )
    return pd.DataFrame(rows)

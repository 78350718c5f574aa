"""Funk, Hilbert and weighted Funk distances and Lagrangians on convex bodies."""

from __future__ import annotations

import logging
import math

import numpy as np

from finsler_lab.convex_bodies import Ball, ConvexBody, Ellipsoid, UpperHalfSpace, as_point, interval
from finsler_lab.errors import DegenerateInputError, NotInteriorError
from finsler_lab.finsler import Lagrangian, arith_family, max_family
from finsler_lab.weak_metrics import SymmetrisationKind, WeakMetric, symmetrise, validate_weight

logger = logging.getLogger(__name__)

# Funk values blow up logarithmically at the boundary; evaluation needs this much slack.
EVALUATION_MARGIN = 1e-10

BISECTION_STEPS = 200


def _interior_pair(body: ConvexBody, x, y) -> tuple[np.ndarray, np.ndarray]:
    return (
        body.require_interior(x, EVALUATION_MARGIN, "x"),
        body.require_interior(y, EVALUATION_MARGIN, "y"),
    )


def _funk_from_exit(s: float) -> float:
    """log(|x - a+| / |y - a+|) written in terms of the exit parameter s > 1 of x + s (y - x)."""
    if math.isinf(s):
        return 0.0
    return -math.log1p(-1.0 / s)


def funk_distance(body: ConvexBody, x, y) -> float:
    """
    Funk distance F(x, y) = log(|x - a+| / |y - a+|).

    a+ is where the ray from x through y leaves the body; the distance is 0
    when that ray stays inside or when x = y.

    Raises:
        NotInteriorError: If x or y is within the evaluation margin of the boundary
    """
    x, y = _interior_pair(body, x, y)
    if np.array_equal(x, y):
        return 0.0
    s = float(body.ray_exit_many(x[None, :], (y - x)[None, :])[0])
    return _funk_from_exit(s)


def hilbert_distance(body: ConvexBody, x, y) -> float:
    """Hilbert distance, the arithmetic symmetrisation (F(x, y) + F(y, x)) / 2."""
    return 0.5 * (funk_distance(body, x, y) + funk_distance(body, y, x))


def weighted_funk_arith(body: ConvexBody, t: float, x, y) -> float:
    """(1 - t) F(x, y) + t F(y, x)."""
    t = validate_weight(t)
    return (1 - t) * funk_distance(body, x, y) + t * funk_distance(body, y, x)


def weighted_funk_max(body: ConvexBody, t: float, x, y) -> float:
    """max{(1 - t) F(x, y), t F(y, x)}."""
    t = validate_weight(t)
    return max((1 - t) * funk_distance(body, x, y), t * funk_distance(body, y, x))


def funk_metric(body: ConvexBody) -> WeakMetric:
    return WeakMetric(lambda x, y: funk_distance(body, x, y), f"funk[{body.tag}]")


def hilbert_metric(body: ConvexBody) -> WeakMetric:
    return WeakMetric(lambda x, y: hilbert_distance(body, x, y), f"hilbert[{body.tag}]")


def weighted_funk_metric(body: ConvexBody, t: float, kind: SymmetrisationKind = "arith") -> WeakMetric:
    """The weighted Funk family of the given kind as a ``WeakMetric``."""
    return symmetrise(funk_metric(body), t, kind)


def funk_lagrangian(body: ConvexBody) -> Lagrangian:
    """
    The Funk Lagrangian p(x, v) = inf{s > 0 : x + v / s in the body}.

    Computed as 1 / ray_exit(x, v), i.e. |v| / |x - a| with a the exit point;
    p = 0 on directions whose ray stays inside and on v = 0. Smooth off the
    zero section for balls and ellipsoids, piecewise otherwise.
    """

    def fn(X: np.ndarray, V: np.ndarray) -> np.ndarray:
        s = body.ray_exit_many(X, V)
        with np.errstate(divide="ignore"):
            return np.where(np.isinf(s), 0.0, 1.0 / s)

    hint = "smooth" if isinstance(body, (Ball, Ellipsoid)) else "piecewise"
    return Lagrangian(fn, f"funk[{body.tag}]", hint, body, margin=EVALUATION_MARGIN)


def hilbert_lagrangian(body: ConvexBody) -> Lagrangian:
    """q(x, v) = (p(x, v) + p(x, -v)) / 2."""
    q = arith_family(funk_lagrangian(body), 0.5)
    return Lagrangian(q.fn, f"hilbert[{body.tag}]", q.hint, body, margin=EVALUATION_MARGIN)


def weighted_funk_lagrangian(body: ConvexBody, t: float) -> Lagrangian:
    """p_t^a(x, v) = (1 - t) p(x, v) + t p(x, -v)."""
    return arith_family(funk_lagrangian(body), t)


def weighted_funk_max_lagrangian(body: ConvexBody, t: float) -> Lagrangian:
    """p_t^m(x, v) = max{(1 - t) p(x, v), t p(x, -v)}."""
    return max_family(funk_lagrangian(body), t)


def ball_funk_lagrangian_closed(x, v, t: float = 0.0) -> float:
    """
    Weighted Funk Lagrangian of the unit ball in closed form.

    ((1 - 2t) <x, v> + sqrt((1 - |x|^2) |v|^2 + <x, v>^2)) / (1 - |x|^2);
    t = 0 gives p itself.

    Raises:
        NotInteriorError: If |x| >= 1
    """
    t = validate_weight(t)
    x = as_point(x, name="x")
    v = as_point(v, x.size, "v")
    slack = 1.0 - float(x @ x)
    if slack <= 0:
        raise NotInteriorError(f"x {x.tolist()} is not inside the unit ball")
    xv = float(x @ v)
    return ((1 - 2 * t) * xv + math.sqrt(slack * float(v @ v) + xv * xv)) / slack


def halfspace_funk_lagrangian_closed(x, v, t: float = 0.0) -> float:
    """
    Weighted Funk Lagrangian of {x_n > 0} in closed form.

    p(x, v) = max(-v_n / x_n, 0): only directions heading to the boundary
    have positive cost. The weighted form is t v_n / x_n for v_n > 0 and
    (1 - t) |v_n| / x_n for v_n < 0.

    Raises:
        NotInteriorError: If x_n <= 0
    """
    t = validate_weight(t)
    x = as_point(x, name="x")
    v = as_point(v, x.size, "v")
    height, rate = float(x[-1]), float(v[-1])
    if height <= 0:
        raise NotInteriorError(f"x {x.tolist()} is not in the upper half-space")
    if rate > 0:
        return t * rate / height
    if rate < 0:
        return (1 - t) * -rate / height
    return 0.0


def funk_lagrangian_by_bisection(body: ConvexBody, x, v, rel_tol: float = 1e-15) -> float:
    """
    Reference oracle for p(x, v) straight from inf{s > 0 : x + v / s in the body}.

    Uses only membership queries: the condition is monotone in s, so the
    threshold is bracketed by doubling and then bisected.
    """
    x = body.require_interior(x, EVALUATION_MARGIN, "x")
    v = as_point(v, body.dim, "v")
    if not np.any(v):
        return 0.0

    def inside(s: float) -> bool:
        return body.margin(x + v / s) > 0

    hi = 1.0
    while not inside(hi):
        hi *= 2.0
    lo = hi
    while inside(lo):
        lo *= 0.5
        if lo < 1e-300:
            return 0.0
    for _ in range(BISECTION_STEPS):
        if hi - lo <= rel_tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if inside(mid):
            hi = mid
        else:
            lo = mid
    return hi


def hyperbolic_distance(a, b) -> float:
    """Upper half-space hyperbolic distance arccosh(1 + |a - b|^2 / (2 a_n b_n))."""
    body = UpperHalfSpace(as_point(a, name="a").size)
    a = body.require_interior(a, name="a")
    b = body.require_interior(b, name="b")
    gap = a - b
    return float(np.arccosh(1.0 + float(gap @ gap) / (2.0 * a[-1] * b[-1])))


def remark_configuration() -> tuple[ConvexBody, float, float, float]:
    """
    The collinear configuration on the segment [0, 9] with x, y, z at 1, 2, 8.

    On it the max-weighted Funk metric at t = 1/2 is not additive along the
    line: the straight segment through y is not a geodesic.
    """
    return interval(0.0, 9.0), 1.0, 2.0, 8.0


def funk_family_value(body: ConvexBody, t: float, kind: SymmetrisationKind, x, y) -> float:
    if kind == "arith":
        return weighted_funk_arith(body, t, x, y)
    if kind == "max":
        return weighted_funk_max(body, t, x, y)
    raise DegenerateInputError(f"unknown symmetrisation kind {kind!r}")

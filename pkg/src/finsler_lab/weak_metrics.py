"""Weak (possibly asymmetric) metrics, their symmetrisations and axiom probes."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Literal, Protocol

import numpy as np

from finsler_lab.convex_bodies import as_point
from finsler_lab.errors import DegenerateInputError, EmptySampleError, InvalidWeightError

logger = logging.getLogger(__name__)

TRIANGLE_SLACK = 1e-9
BUSEMANN_TAIL_FRACTION = 0.25
BUSEMANN_TOLERANCE = 1e-3
COLLINEAR_SLACK = 1e-9

SymmetrisationKind = Literal["arith", "max"]


class PointSampler(Protocol):
    """Draws ``size`` points, one per row, from a seeded generator."""

    def __call__(self, rng: np.random.Generator, size: int) -> np.ndarray: ...


def validate_weight(t: float) -> float:
    """Return ``t`` as a float, rejecting weights outside [0, 1]."""
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise InvalidWeightError(f"weight t={t} must lie in [0, 1]")
    return t


def scale_extended(c: float, value: float) -> float:
    """c * value on [0, inf] with 0 * inf = 0."""
    return 0.0 if c == 0 else c * value


@dataclass(frozen=True)
class WeakMetric:
    """A two-point distance function valued in [0, inf], not assumed symmetric."""

    fn: Callable[[np.ndarray, np.ndarray], float]
    label: str = "d"

    def __call__(self, x, y) -> float:
        return float(self.fn(np.asarray(x, dtype=float), np.asarray(y, dtype=float)))


def reverse_metric(d: WeakMetric) -> WeakMetric:
    """The reverse metric (x, y) -> d(y, x)."""
    return WeakMetric(lambda x, y: d(y, x), f"reverse({d.label})")


def arith_symmetrise(d: WeakMetric, t: float) -> WeakMetric:
    """(1 - t) d(x, y) + t d(y, x)."""
    t = validate_weight(t)

    def fn(x, y):
        return scale_extended(1 - t, d(x, y)) + scale_extended(t, d(y, x))

    return WeakMetric(fn, f"arith({d.label}, t={t:g})")


def max_symmetrise(d: WeakMetric, t: float) -> WeakMetric:
    """max{(1 - t) d(x, y), t d(y, x)}."""
    t = validate_weight(t)

    def fn(x, y):
        return max(scale_extended(1 - t, d(x, y)), scale_extended(t, d(y, x)))

    return WeakMetric(fn, f"max({d.label}, t={t:g})")


def symmetrise(d: WeakMetric, t: float, kind: SymmetrisationKind) -> WeakMetric:
    """Dispatch on the symmetrisation family."""
    if kind == "arith":
        return arith_symmetrise(d, t)
    if kind == "max":
        return max_symmetrise(d, t)
    raise ValueError(f"unknown symmetrisation kind {kind!r}")


def symmetry_residual(d: WeakMetric, x, y) -> float:
    """|d(x, y) - d(y, x)|."""
    return abs(d(x, y) - d(y, x))


def to_jsonable(value: Any) -> Any:
    """Recursively convert numpy values to plain Python; non-finite floats become "inf", "-inf" or "nan"."""
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return value if math.isfinite(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


@dataclass
class ProbeReport:
    """Outcome of a sampling probe of a metric axiom."""

    probe: str
    samples: int
    max_residual: float
    tolerance: float
    witness: dict[str, Any] | None = None
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.max_residual <= self.tolerance)

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready mapping with the fields probe, samples, max_residual, witness, passed."""
        return {
            "probe": self.probe,
            "samples": self.samples,
            "max_residual": to_jsonable(self.max_residual),
            "witness": to_jsonable(self.witness),
            "passed": self.passed,
        }


def triangle_inequality_probe(
    d: WeakMetric,
    sampler: PointSampler,
    count: int,
    seed: int = 0,
    tolerance: float = TRIANGLE_SLACK,
) -> ProbeReport:
    """
    Largest violation of d(x, z) <= d(x, y) + d(y, z) over sampled triples.

    Args:
        d: Metric under test
        sampler: Seeded point source
        count: Number of triples
        seed: Generator seed
        tolerance: Absolute slack allowed

    Returns:
        ProbeReport whose witness is the worst triple
    """
    if count < 1:
        raise EmptySampleError("triangle inequality probe needs at least one triple")
    rng = np.random.default_rng(seed)
    xs, ys, zs = sampler(rng, count), sampler(rng, count), sampler(rng, count)
    worst, witness = -math.inf, None
    for x, y, z in zip(xs, ys, zs):
        dxy, dyz, dxz = d(x, y), d(y, z), d(x, z)
        # inf - inf is undefined; the inequality trivially holds when the right side is inf.
        residual = -math.inf if math.isinf(dxy + dyz) else dxz - dxy - dyz
        if residual > worst:
            worst = residual
            witness = {"x": x, "y": y, "z": z, "d_xy": dxy, "d_yz": dyz, "d_xz": dxz}
    if worst == -math.inf:
        worst = 0.0
    report = ProbeReport("triangle_inequality", count, worst, tolerance, witness)
    logger.debug("%s: triangle residual %.3g over %d triples", d.label, worst, count)
    return report


def identity_probe(d: WeakMetric, sampler: PointSampler, count: int, seed: int = 0) -> ProbeReport:
    """Largest |d(x, x)| over sampled points."""
    if count < 1:
        raise EmptySampleError("identity probe needs at least one point")
    points = sampler(np.random.default_rng(seed), count)
    values = np.array([abs(d(x, x)) for x in points])
    worst = int(np.argmax(values))
    return ProbeReport("identity", count, float(values[worst]), 0.0, {"x": points[worst]})


def busemann_probe(
    d: WeakMetric,
    x,
    approach,
    tail_fraction: float = BUSEMANN_TAIL_FRACTION,
    tolerance: float = BUSEMANN_TOLERANCE,
) -> ProbeReport:
    """
    Forward and backward convergence of a sequence converging to x.

    Reports max over the tail of d(x_n, x) and of d(x, x_n); the probe passes
    when both tails are within ``tolerance``, i.e. the two notions of
    convergence agree on this sample.
    """
    x = as_point(x)
    approach = np.asarray(approach, dtype=float)
    if approach.ndim != 2 or approach.shape[0] < 4:
        raise DegenerateInputError("Busemann probe needs an approach sequence of length >= 4")
    start = approach.shape[0] - max(1, math.ceil(tail_fraction * approach.shape[0]))
    tail = approach[start:]
    forward = max(d(p, x) for p in tail)
    backward = max(d(x, p) for p in tail)
    witness = {"forward_tail": forward, "backward_tail": backward, "tail_start": start}
    return ProbeReport("busemann", int(approach.shape[0]), max(forward, backward), tolerance, witness)


def collinear_additivity_residual(d: WeakMetric, x, y, z, slack: float = COLLINEAR_SLACK) -> float:
    """
    d(x, y) + d(y, z) - d(x, z) for y on the segment [x, z].

    Zero means distances add along the line at this triple; a positive value
    means the straight line through y does not realize the distance.

    Raises:
        DegenerateInputError: If y is off the segment by more than ``slack``
    """
    x, y, z = as_point(x), as_point(y), as_point(z)
    chord = z - x
    length2 = float(chord @ chord)
    s = 0.0 if length2 == 0 else float((y - x) @ chord) / length2
    scale = max(1.0, math.sqrt(length2))
    off_line = float(np.linalg.norm(x + s * chord - y))
    if off_line > slack * scale or not -slack <= s <= 1 + slack:
        raise DegenerateInputError("y does not lie on the segment [x, z]")
    return d(x, y) + d(y, z) - d(x, z)


@dataclass
class AsymmetryWitness:
    """A pair of points on which a metric is measurably asymmetric."""

    x: np.ndarray
    y: np.ndarray
    forward: float
    backward: float

    @property
    def gap(self) -> float:
        return abs(self.forward - self.backward)

    def to_dict(self) -> dict[str, Any]:
        return to_jsonable(
            {"X": self.x, "Y": self.y, "forward": self.forward, "backward": self.backward, "gap": self.gap}
        )


def asymmetry_search(
    d: WeakMetric,
    sampler: PointSampler,
    count: int,
    seed: int = 0,
    threshold: float = 0.01,
) -> AsymmetryWitness | None:
    """
    Seeded search for the most asymmetric sampled pair.

    Returns the pair with the largest |d(x, y) - d(y, x)| when it exceeds
    ``threshold``, otherwise ``None``. The first maximal pair wins ties.
    """
    if count < 1:
        raise EmptySampleError("asymmetry search needs at least one pair")
    rng = np.random.default_rng(seed)
    xs, ys = sampler(rng, count), sampler(rng, count)
    best: AsymmetryWitness | None = None
    for x, y in zip(xs, ys):
        candidate = AsymmetryWitness(x, y, d(x, y), d(y, x))
        if best is None or candidate.gap > best.gap:
            best = candidate
    if best is None or not best.gap > threshold:
        return None
    return best

"""Scripted numerical checks of the worked examples, the counterexample and the combination theorems."""

from __future__ import annotations

import functools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
import pandas as pd

from finsler_lab.convex_bodies import Ball, ConvexBody, UpperHalfSpace, random_polytope, sample_interior
from finsler_lab.errors import DegenerateInputError
from finsler_lab.finsler import (
    GeodesicOptions,
    Lagrangian,
    PolylinePath,
    approach_sequence,
    diagonal_lagrangian,
    euclidean_lagrangian,
    gauss_legendre,
    hyperbolic_lagrangian,
    induced_distance,
    path_length,
    pointwise_max,
    pointwise_sum,
    reverse_lagrangian,
    weighted_max_lagrangian,
    weighted_sum_lagrangian,
)
from finsler_lab.funk_hilbert import (
    ball_funk_lagrangian_closed,
    funk_distance,
    funk_lagrangian,
    funk_lagrangian_by_bisection,
    funk_metric,
    halfspace_funk_lagrangian_closed,
    hilbert_distance,
    hyperbolic_distance,
    remark_configuration,
    weighted_funk_lagrangian,
    weighted_funk_metric,
)
from finsler_lab.triangle_space import (
    asymmetry_witness,
    eta,
    eta_family,
    eta_metric,
    eta_scaling_residual,
    sample_unit_area,
)
from finsler_lab.weak_metrics import (
    asymmetry_search,
    busemann_probe,
    collinear_additivity_residual,
    triangle_inequality_probe,
)

logger = logging.getLogger(__name__)

# Provenance tags for expected values.
CLOSED_FORM = "closed-form"
IDENTITY = "identity"
BOUND = "bound"

STRICT_MARGIN = 1e-3
SOLVER_TOLERANCE = 1e-3

# Values printed for the remark configuration that do not follow from the
# Funk formula under either reading of its labels; kept for the record only.
UNRECONCILED_PRINTED_VALUES = "log 1, log 7/2, log 4"


@dataclass(frozen=True)
class Expected:
    """An expected value and where it comes from."""

    value: float
    provenance: str


@dataclass
class ExperimentReport:
    """
    Computed quantities checked against independently derived expectations.

    A report passes when every residual is within its limit: the entry of
    ``tolerances`` for that residual when present, ``tolerance`` otherwise.
    Strict-inequality checks store max(0, margin - gap) with limit 0.
    """

    name: str
    quantities: dict[str, float] = field(default_factory=dict)
    expected: dict[str, Expected] = field(default_factory=dict)
    residuals: dict[str, float] = field(default_factory=dict)
    tolerance: float = SOLVER_TOLERANCE
    tolerances: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    runtime: float = 0.0

    def limit(self, key: str) -> float:
        return self.tolerances.get(key, self.tolerance)

    @property
    def passed(self) -> bool:
        # NaN residuals compare False and fail the report.
        return all(value <= self.limit(key) for key, value in self.residuals.items())

    @property
    def failures(self) -> list[str]:
        return [key for key, value in self.residuals.items() if not value <= self.limit(key)]

    @property
    def worst_residual(self) -> tuple[str, float, float]:
        """(key, residual, limit) of the residual closest to, or furthest past, its limit."""
        if not self.residuals:
            return "", 0.0, self.tolerance

        def excess(item):
            key, value = item
            return value - self.limit(key) if not math.isnan(value) else math.inf

        key, value = max(self.residuals.items(), key=excess)
        return key, value, self.limit(key)

    def check_close(self, key: str, value: float, expected: float, provenance: str, relative: bool = True) -> None:
        """Record a computed value, its expectation and their (relative) difference."""
        self.quantities[key] = value
        self.expected[key] = Expected(expected, provenance)
        diff = abs(value - expected)
        self.residuals[key] = diff / max(abs(expected), 1e-12) if relative else diff

    def check_gap(self, key: str, gap: float, margin: float) -> None:
        """Record a strict inequality gap > margin as residual max(0, margin - gap) with limit 0."""
        self.quantities[key] = gap
        self.residuals[key] = max(0.0, margin - gap)
        self.tolerances[key] = 0.0

    def to_dict(self, include_runtime: bool = False) -> dict[str, Any]:
        """JSON-ready mapping; runtime is left out unless asked for, so reruns compare equal."""
        payload: dict[str, Any] = {
            "name": self.name,
            "quantities": dict(self.quantities),
            "expected": {k: {"value": e.value, "provenance": e.provenance} for k, e in self.expected.items()},
            "residuals": dict(self.residuals),
            "tolerance": self.tolerance,
            "tolerances": dict(self.tolerances),
            "passed": self.passed,
            "notes": list(self.notes),
        }
        if include_runtime:
            payload["runtime"] = self.runtime
        return payload


def _timed(fn: Callable[..., ExperimentReport]) -> Callable[..., ExperimentReport]:
    @functools.wraps(fn)
    def wrapper(*args, **kwargs) -> ExperimentReport:
        start = time.perf_counter()
        report = fn(*args, **kwargs)
        report.runtime = time.perf_counter() - start
        logger.info(
            "%s: %s in %.2fs", report.name, "passed" if report.passed else f"FAILED {report.failures}", report.runtime
        )
        return report

    return wrapper


def _ball() -> Ball:
    return Ball(np.zeros(2), 1.0)


def _seeded_pairs(body: ConvexBody, count: int, seed: int, shrink: float = 0.9) -> list[tuple[np.ndarray, np.ndarray]]:
    rng = np.random.default_rng(seed)
    xs = sample_interior(body, rng, count, shrink)
    ys = sample_interior(body, rng, count, shrink)
    return list(zip(xs, ys))


def _scale(x, y) -> float:
    return float(np.linalg.norm(np.asarray(y, dtype=float) - np.asarray(x, dtype=float)))


# Worked examples on the plane --------------------------------------------


@_timed
def run_example_1(
    y1: float = 0.5,
    y2: float = 2.0,
    opts: GeodesicOptions | None = None,
    margin: float = STRICT_MARGIN,
) -> ExperimentReport:
    """
    Max of the Euclidean and hyperbolic norms on the upper half-plane.

    On the vertical segment from (0, y1) to (0, y2) the distance of the max
    Lagrangian is (y2 - 1) - log(y1), strictly larger than the max of the
    two distances.
    """
    if not 0 < y1 < 1 < y2:
        raise DegenerateInputError(f"need 0 < y1 < 1 < y2, got y1={y1}, y2={y2}")
    report = ExperimentReport("max-of-norms", tolerance=1e-2)
    F = pointwise_max(euclidean_lagrangian(2), hyperbolic_lagrangian(2))
    result = induced_distance(F, [0.0, y1], [0.0, y2], opts)
    d_e, d_h = y2 - y1, math.log(y2 / y1)
    report.check_close("d_m", result.length, (y2 - 1) - math.log(y1), CLOSED_FORM)
    report.quantities["d_e"], report.quantities["d_h"] = d_e, d_h
    report.check_gap("gap_over_max", result.length - max(d_e, d_h), margin)
    report.quantities["converged"] = float(result.converged)
    return report


@_timed
def run_example_2(
    a1=(0.0, 1.0),
    a2=(1.0, 2.0),
    opts: GeodesicOptions | None = None,
    margin: float = STRICT_MARGIN,
) -> ExperimentReport:
    """
    Sum of the Euclidean and hyperbolic norms on the upper half-plane.

    The two geodesics differ when the abscissae differ, so the distance of
    the sum Lagrangian strictly exceeds the sum of the two distances.
    """
    a1, a2 = np.asarray(a1, dtype=float), np.asarray(a2, dtype=float)
    report = ExperimentReport("sum-of-norms")
    if np.array_equal(a1, a2):
        report.check_close("d_sigma", 0.0, 0.0, IDENTITY, relative=False)
        report.notes.append("coincident points")
        return report
    if a1[0] == a2[0]:
        raise DegenerateInputError("points with equal abscissae share their geodesic; no strict gap to measure")
    d_e = _scale(a1, a2)
    d_h = hyperbolic_distance(a1, a2)
    d_sigma = d_e + d_h
    result = induced_distance(pointwise_sum(euclidean_lagrangian(2), hyperbolic_lagrangian(2)), a1, a2, opts)
    report.quantities.update({"d_e": d_e, "d_h": d_h, "d_sigma": d_sigma, "d_s": result.length})
    report.expected["d_sigma"] = Expected(d_sigma, CLOSED_FORM)
    report.check_gap("gap_over_sum", result.length - d_sigma, margin)
    return report


def _plane_pairs(count: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    rng = np.random.default_rng(seed)
    points = rng.uniform(-1.0, 1.0, size=(count, 2, 2))
    return [(p[0], p[1]) for p in points]


def _anisotropic_example(
    name: str,
    combine: Callable[[Lagrangian, Lagrangian], Lagrangian],
    closed: Callable[[float, float], float],
    a: float,
    b: float,
    pairs,
    count: int,
    seed: int,
    opts: GeodesicOptions | None,
    check_straightness: bool,
) -> ExperimentReport:
    report = ExperimentReport(name)
    F = combine(euclidean_lagrangian(2), diagonal_lagrangian([a, b]))
    for i, (x, y) in enumerate(pairs if pairs is not None else _plane_pairs(count, seed)):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        dx, dy = y - x
        result = induced_distance(F, x, y, opts)
        report.check_close(f"pair_{i:02d}", result.length, closed(math.hypot(dx, dy), math.sqrt(a * dx**2 + b * dy**2)), CLOSED_FORM)
        if check_straightness:
            key = f"pair_{i:02d}_deviation"
            report.quantities[key] = report.residuals[key] = result.path.max_deviation_from_segment()
    return report


@_timed
def run_example_3(
    a: float = 4.0,
    b: float = 9.0,
    pairs=None,
    count: int = 20,
    seed: int = 0,
    opts: GeodesicOptions | None = None,
) -> ExperimentReport:
    """Max of the Euclidean and a constant diagonal norm: the distance is the max of the two, straight lines minimize."""
    return _anisotropic_example("anisotropic-max", pointwise_max, max, a, b, pairs, count, seed, opts, True)


@_timed
def run_example_4(
    a: float = 4.0,
    b: float = 9.0,
    pairs=None,
    count: int = 20,
    seed: int = 0,
    opts: GeodesicOptions | None = None,
) -> ExperimentReport:
    """Sum of the Euclidean and a constant diagonal norm: the distance is the sum of the two."""
    return _anisotropic_example("anisotropic-sum", pointwise_sum, lambda u, w: u + w, a, b, pairs, count, seed, opts, False)


# Weighted Funk configurations ----------------------------------------------


@_timed
def run_remark_counterexample() -> ExperimentReport:
    """
    Additivity along a line for the weighted Funk metrics on [0, 9] at 1, 2, 8.

    The max family at t = 1/2 is not additive there (residual log(7/4) / 2),
    while the arithmetic family and the Funk metric itself are.
    """
    body, x, y, z = remark_configuration()
    report = ExperimentReport("weighted-max-line", tolerance=1e-12, tolerances={"max_half": 1e-9})
    metrics = {
        "max_half": weighted_funk_metric(body, 0.5, "max"),
        "arith_half": weighted_funk_metric(body, 0.5, "arith"),
        "funk": funk_metric(body),
    }
    residual = {key: collinear_additivity_residual(d, [x], [y], [z]) for key, d in metrics.items()}
    report.check_close("max_half", residual["max_half"], 0.5 * math.log(7 / 4), CLOSED_FORM, relative=False)
    report.check_close("arith_half", residual["arith_half"], 0.0, IDENTITY, relative=False)
    report.check_close("funk", residual["funk"], 0.0, IDENTITY, relative=False)
    report.check_gap("max_half_not_geodesic", residual["max_half"], 0.1)
    report.notes.append(f"printed values {UNRECONCILED_PRINTED_VALUES} not reproduced; residual from the definition")
    return report


@_timed
def run_theorem_sum_check(
    body: ConvexBody | None = None,
    pairs=None,
    t: float = 0.5,
    opts: GeodesicOptions | None = None,
) -> ExperimentReport:
    """
    Induced distance of (1 - t) p + t reverse(p) against the combination of the two distances.

    Straight chords are geodesic for the Funk metric and its reverse, so the
    two sides agree.
    """
    body = body or _ball()
    pairs = pairs if pairs is not None else [((0.0, 0.0), (0.5, 0.0)), ((-0.3, 0.2), (0.4, -0.5))]
    p = funk_lagrangian(body)
    F = weighted_sum_lagrangian(p, reverse_lagrangian(p), t)
    report = ExperimentReport("sum-theorem", notes=[f"t={t:g}"])
    for i, (x, y) in enumerate(pairs):
        expected = (1 - t) * funk_distance(body, x, y) + t * funk_distance(body, y, x)
        report.check_close(f"pair_{i:02d}", induced_distance(F, x, y, opts).length, expected, CLOSED_FORM)
    return report


def chord_sign_profile(F1: Lagrangian, F2: Lagrangian, t: float, x, y, segments: int = 32) -> np.ndarray:
    """(1 - t) F1 - t F2 along the chord [x, y] with velocity y - x, at the quadrature nodes."""
    nodes = PolylinePath.straight(x, y, segments + 1).nodes
    s, _ = gauss_legendre(4)
    v = nodes[-1] - nodes[0]
    points = (nodes[:-1, None, :] + s[None, :, None] * (nodes[1] - nodes[0])).reshape(-1, nodes.shape[1])
    velocities = np.tile(v, (len(points), 1))
    return (1 - t) * F1.fn(points, velocities) - t * F2.fn(points, velocities)


@_timed
def run_theorem_max_check(
    body: ConvexBody | None = None,
    pairs=None,
    t: float = 0.5,
    opts: GeodesicOptions | None = None,
) -> ExperimentReport:
    """
    Induced distance of max{(1 - t) p, t reverse(p)} against max{(1 - t) d, t d_reverse}.

    Where (1 - t) p - t reverse(p) keeps one sign along the chord the two
    agree; where it changes sign only the gap (never negative) is recorded.
    """
    body = body or _ball()
    pairs = pairs if pairs is not None else [((0.5, 0.0), (0.9, 0.0)), ((-0.5, 0.0), (0.5, 0.0))]
    p = funk_lagrangian(body)
    rp = reverse_lagrangian(p)
    F = weighted_max_lagrangian(p, rp, t)
    report = ExperimentReport("max-theorem", notes=[f"t={t:g}"])
    for i, (x, y) in enumerate(pairs):
        closed = max((1 - t) * funk_distance(body, x, y), t * funk_distance(body, y, x))
        induced = induced_distance(F, x, y, opts).length
        signs = np.sign(chord_sign_profile(p, rp, t, x, y))
        constant = bool(np.all(signs >= 0) or np.all(signs <= 0))
        report.quantities[f"pair_{i:02d}_sign_constant"] = float(constant)
        if constant:
            report.check_close(f"pair_{i:02d}", induced, closed, CLOSED_FORM)
        else:
            report.quantities[f"pair_{i:02d}"] = induced
            report.expected[f"pair_{i:02d}"] = Expected(closed, BOUND)
            gap = induced - closed
            report.quantities[f"pair_{i:02d}_gap"] = gap
            report.residuals[f"pair_{i:02d}_gap"] = max(0.0, -gap) / max(closed, 1e-12)
            report.notes.append(f"pair {i}: sign changes along the chord, gap {gap:.6g}")
    return report


@_timed
def run_main_theorem_check(
    ts: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
    pairs: int = 10,
    seed: int = 0,
    opts: GeodesicOptions | None = None,
) -> ExperimentReport:
    """
    Induced distance of p_t^a on the unit disc against (1 - t) F(x, y) + t F(y, x).

    Also records the lower bound of the length-inequality lemma and, at
    t = 1/2, the comparison with the Hilbert distance.
    """
    body = _ball()
    report = ExperimentReport("arith-family-theorem")
    tol = (opts or GeodesicOptions()).tolerance
    for t in ts:
        F = weighted_funk_lagrangian(body, t)
        for i, (x, y) in enumerate(_seeded_pairs(body, pairs, seed, shrink=0.8)):
            key = f"t={t:g}/pair_{i:02d}"
            expected = (1 - t) * funk_distance(body, x, y) + t * funk_distance(body, y, x)
            induced = induced_distance(F, x, y, opts).length
            report.check_close(key, induced, expected, CLOSED_FORM)
            report.check_gap(f"{key}/lower_bound", induced - expected + 2 * tol * max(_scale(x, y), 1.0), 0.0)
            if t == 0.5:
                report.check_close(f"{key}/hilbert", induced, hilbert_distance(body, x, y), CLOSED_FORM)
    return report


# Closed forms and probes -----------------------------------------------------


@_timed
def run_chord_identity_check(count: int = 100, seed: int = 0, order: int = 8, nodes: int = 65) -> ExperimentReport:
    """Funk distance against the quadrature of p along the straight chord, on the disc and a random polytope."""
    report = ExperimentReport("chord-identity", tolerance=1e-6)
    rng = np.random.default_rng(seed)
    for name, body in (("ball", _ball()), ("polytope", random_polytope(rng, 4))):
        p = funk_lagrangian(body)
        worst = 0.0
        for x, y in _seeded_pairs(body, count, seed):
            worst = max(worst, abs(funk_distance(body, x, y) - path_length(p, PolylinePath.straight(x, y, nodes), order)))
        report.check_close(name, worst, 0.0, IDENTITY, relative=False)
    return report


@_timed
def run_closed_form_check(samples: int = 1000, seed: int = 0) -> ExperimentReport:
    """Closed-form ball and half-space Lagrangians against ray exit and the bisection oracle."""
    report = ExperimentReport("closed-forms", tolerance=1e-9)
    rng = np.random.default_rng(seed)
    ball = _ball()
    xs, vs, ts = sample_interior(ball, rng, samples), rng.normal(size=(samples, 2)), rng.uniform(size=samples)
    worst = 0.0
    for x, v, t in zip(xs, vs, ts):
        closed = ball_funk_lagrangian_closed(x, v, t)
        worst = max(worst, abs(closed - weighted_funk_lagrangian(ball, t)(x, v)) / max(1.0, abs(closed)))
    report.check_close("ball", worst, 0.0, IDENTITY, relative=False)

    half = UpperHalfSpace(2)
    xs, vs, ts = sample_interior(half, rng, samples), rng.normal(size=(samples, 2)), rng.uniform(size=samples)
    worst = 0.0
    for x, v, t in zip(xs, vs, ts):
        oracle = (1 - t) * funk_lagrangian_by_bisection(half, x, v) + t * funk_lagrangian_by_bisection(half, x, -v)
        closed = halfspace_funk_lagrangian_closed(x, v, t)
        worst = max(worst, abs(closed - oracle) / max(1.0, abs(closed)))
    report.check_close("halfspace", worst, 0.0, IDENTITY, relative=False)
    return report


@_timed
def run_busemann_check(targets: int = 3, length: int = 200, seed: int = 0) -> ExperimentReport:
    """Forward and backward convergence of radial approach sequences for the Funk metric of the disc."""
    body = _ball()
    d = funk_metric(body)
    report = ExperimentReport("busemann")
    rng = np.random.default_rng(seed)
    for i, x in enumerate(sample_interior(body, rng, targets, shrink=0.8)):
        direction = rng.normal(size=2)
        direction /= np.linalg.norm(direction)
        sequence = approach_sequence(x, direction, length, scale=0.5 * body.ray_exit(x, direction))
        probe = busemann_probe(d, x, sequence)
        report.quantities[f"target_{i}_forward"] = probe.witness["forward_tail"]
        report.quantities[f"target_{i}_backward"] = probe.witness["backward_tail"]
        report.residuals[f"target_{i}"] = probe.max_residual
    return report


@_timed
def run_triangle_check(samples: int = 1000, seed: int = 0, witness_samples: int = 10_000) -> ExperimentReport:
    """Scaling identity, symmetry at t = 1/2, triangle inequality and asymmetry witnesses on unit-area triangles."""
    report = ExperimentReport("triangle-space", tolerance=1e-12)
    rng = np.random.default_rng(seed)
    xs, ys = sample_unit_area(rng, samples), sample_unit_area(rng, samples)
    lams = np.exp(rng.uniform(-math.log(2), math.log(2), size=(samples, 2)))
    scaling = max(eta_scaling_residual(x, y, lam, lam_prime) for x, y, (lam, lam_prime) in zip(xs, ys, lams))
    report.check_close("scaling", scaling, 0.0, IDENTITY, relative=False)
    for kind in ("arith", "max"):
        d = eta_family(kind, 0.5)
        worst = max(abs(d(x, y) - d(y, x)) for x, y in zip(xs, ys))
        report.check_close(f"symmetry_{kind}_half", worst, 0.0, IDENTITY, relative=False)
    probe = triangle_inequality_probe(eta_metric(), sample_unit_area, samples, seed, tolerance=1e-12)
    report.check_close("triangle_inequality", max(probe.max_residual, 0.0), 0.0, IDENTITY, relative=False)
    report.check_gap("nonnegativity", min(eta(x, y) for x, y in zip(xs, ys)), -1e-12)
    for t in (0.0, 0.3):
        witness = asymmetry_witness(t, "arith", witness_samples, seed)
        report.check_gap(f"witness_t={t:g}", witness["gap"] if witness else 0.0, 0.01)
    return report


@_timed
def run_symmetry_check(
    ts: Sequence[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
    samples: int = 2000,
    seed: int = 0,
) -> ExperimentReport:
    """Among the weighted Funk metrics of the disc only t = 1/2 is symmetric."""
    body = _ball()
    report = ExperimentReport("funk-symmetry", tolerance=1e-12)

    def sampler(rng, size):
        return sample_interior(body, rng, size, 0.9)

    for kind in ("arith", "max"):
        for t in ts:
            key = f"{kind}/t={t:g}"
            witness = asymmetry_search(weighted_funk_metric(body, t, kind), sampler, samples, seed, threshold=0.0)
            gap = witness.gap if witness is not None else 0.0
            if t == 0.5:
                report.check_close(key, gap, 0.0, IDENTITY, relative=False)
            else:
                report.check_gap(key, gap, 0.01)
    return report


# Battery -----------------------------------------------------------------------


@dataclass(frozen=True)
class BatteryProgress:
    """Progress of ``run_battery``: fraction done and the experiment about to run."""

    progress: float
    message: str


def battery_options(quick: bool, seed: int = 0) -> GeodesicOptions:
    if quick:
        return GeodesicOptions(nodes=17, multistart=1, seed=seed)
    return GeodesicOptions(seed=seed)


def run_battery(
    quick: bool = True,
    seed: int = 0,
    progress: Callable[[BatteryProgress], None] | None = None,
) -> list[ExperimentReport]:
    """
    Run every experiment in fixed name order.

    ``quick`` trims pair counts and solver multistarts; the closed-form and
    sampling checks always run at full size.
    """
    opts = battery_options(quick, seed)
    pairs = 5 if quick else 20
    jobs: list[tuple[str, Callable[[], ExperimentReport]]] = [
        ("anisotropic-max", lambda: run_example_3(count=pairs, seed=seed, opts=opts)),
        ("anisotropic-sum", lambda: run_example_4(count=pairs, seed=seed, opts=opts)),
        ("arith-family-theorem", lambda: run_main_theorem_check(pairs=3 if quick else 10, seed=seed, opts=opts)),
        ("busemann", lambda: run_busemann_check(seed=seed)),
        ("chord-identity", lambda: run_chord_identity_check(seed=seed)),
        ("closed-forms", lambda: run_closed_form_check(seed=seed)),
        ("funk-symmetry", lambda: run_symmetry_check(seed=seed)),
        ("max-of-norms", lambda: run_example_1(opts=opts)),
        ("max-theorem", lambda: run_theorem_max_check(opts=opts)),
        ("sum-of-norms", lambda: run_example_2(opts=opts)),
        ("sum-theorem", lambda: run_theorem_sum_check(opts=opts)),
        ("triangle-space", lambda: run_triangle_check(seed=seed)),
        ("weighted-max-line", run_remark_counterexample),
    ]
    reports = []
    for index, (name, job) in enumerate(jobs):
        if progress is not None:
            progress(BatteryProgress(index / len(jobs), f"Running {name}..."))
        reports.append(job())
    if progress is not None:
        progress(BatteryProgress(1.0, "Battery complete"))
    return reports


def reports_frame(reports: Sequence[ExperimentReport]) -> pd.DataFrame:
    """Flat summary, one row per report: name, residual, tolerance, passed, runtime."""
    rows = []
    for report in reports:
        key, residual, limit = report.worst_residual
        rows.append(
            {
                "name": report.name,
                "residual_key": key,
                "residual": residual,
                "tolerance": limit,
                "passed": report.passed,
                "runtime": report.runtime,
            }
        )
    return pd.DataFrame(rows, columns=["name", "residual_key", "residual", "tolerance", "passed", "runtime"])


def residual_tables(reports: Sequence[ExperimentReport]) -> dict[str, pd.DataFrame]:
    """The summary under ``"summary"`` and one long residual table per report, keyed by report name."""
    columns = ["check", "value", "expected", "provenance", "residual", "limit", "passed"]
    tables = {"summary": reports_frame(reports)}
    for report in reports:
        rows = []
        for key, residual in report.residuals.items():
            reference = report.expected.get(key)
            limit = report.limit(key)
            rows.append(
                [
                    key,
                    report.quantities.get(key),
                    None if reference is None else reference.value,
                    None if reference is None else reference.provenance,
                    residual,
                    limit,
                    residual <= limit,
                ]
            )
        tables[report.name] = pd.DataFrame(rows, columns=columns)
    return tables

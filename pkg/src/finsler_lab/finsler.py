"""Lagrangians, path length and the discretized geodesic solver for induced distances."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Callable, Literal

import numpy as np
import pandas as pd
from scipy.optimize import minimize

from finsler_lab.convex_bodies import INTERIOR_MARGIN, ConvexBody, UpperHalfSpace, as_point
from finsler_lab.errors import DegenerateInputError, DimensionMismatchError, NotInteriorError
from finsler_lab.weak_metrics import WeakMetric, validate_weight

logger = logging.getLogger(__name__)

SmoothnessHint = Literal["smooth", "piecewise"]

# Relative decrease a trial move must achieve to be accepted by the pattern search.
IMPROVEMENT_SLACK = 1e-14
# Multistart lengths closer than this count as ties (earliest start wins).
TIE_SLACK = 1e-12
# Search-time length accuracy, as a fraction of GeodesicOptions.tolerance.
SEARCH_ACCURACY = 1e-2
# Relative accuracy of every length the solver reports.
MEASURE_TOLERANCE = 1e-13
# Bisection depth limit of the error-controlled quadrature.
MAX_SUBDIVISIONS = 60


@dataclass(frozen=True)
class Lagrangian:
    """
    A Finsler Lagrangian F(x, v) >= 0, positively homogeneous in v.

    ``fn`` is vectorized: it maps row-stacked points X and vectors V of shape
    (m, n) to an array of shape (m,). When ``body`` is set, F is only defined
    at its interior points.
    """

    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    label: str = "F"
    hint: SmoothnessHint = "smooth"
    body: ConvexBody | None = None
    dim: int | None = None
    margin: float = INTERIOR_MARGIN

    def __post_init__(self):
        if self.body is not None and self.dim is None:
            object.__setattr__(self, "dim", self.body.dim)

    def evaluate(self, X: np.ndarray, V: np.ndarray) -> np.ndarray:
        """Unchecked vectorized evaluation."""
        return self.fn(X, V)

    def __call__(self, x, v) -> float:
        if self.body is not None:
            x = self.body.require_interior(x, self.margin, "x")
        else:
            x = as_point(x, self.dim, "x")
        v = as_point(v, x.size, "v")
        return float(self.fn(x[None, :], v[None, :])[0])


def euclidean_lagrangian(dim: int = 2) -> Lagrangian:
    """The flat norm |v|."""
    return Lagrangian(lambda X, V: np.linalg.norm(V, axis=1), "euclidean", dim=dim)


def diagonal_lagrangian(weights) -> Lagrangian:
    """Constant Riemannian norm sqrt(sum_i w_i v_i^2)."""
    weights = as_point(weights, name="weights")
    if np.any(weights <= 0):
        raise DegenerateInputError("diagonal norm weights must be positive")
    label = "diag(" + ",".join(f"{w:g}" for w in weights) + ")"
    return Lagrangian(lambda X, V: np.sqrt(V * V @ weights), label, dim=weights.size)


def hyperbolic_lagrangian(dim: int = 2) -> Lagrangian:
    """The upper half-space hyperbolic norm |v| / x_n."""
    body = UpperHalfSpace(dim)
    return Lagrangian(lambda X, V: np.linalg.norm(V, axis=1) / X[:, -1], "hyperbolic", body=body)


def _joint_domain(F1: Lagrangian, F2: Lagrangian) -> tuple[ConvexBody | None, int | None]:
    if F1.dim is not None and F2.dim is not None and F1.dim != F2.dim:
        raise DimensionMismatchError(f"Lagrangians of dimension {F1.dim} and {F2.dim} cannot be combined")
    body = F1.body if F1.body is not None else F2.body
    return body, F1.dim if F1.dim is not None else F2.dim


def reverse_lagrangian(F: Lagrangian) -> Lagrangian:
    """(x, v) -> F(x, -v)."""
    return replace(F, fn=lambda X, V: F.fn(X, -V), label=f"reverse({F.label})")


def weighted_sum_lagrangian(F1: Lagrangian, F2: Lagrangian, t: float) -> Lagrangian:
    """(1 - t) F1 + t F2."""
    t = validate_weight(t)
    body, dim = _joint_domain(F1, F2)
    hint = "smooth" if F1.hint == F2.hint == "smooth" else "piecewise"
    return Lagrangian(
        lambda X, V: (1 - t) * F1.fn(X, V) + t * F2.fn(X, V),
        f"sum({F1.label}, {F2.label}, t={t:g})",
        hint,
        body,
        dim,
        max(F1.margin, F2.margin),
    )


def weighted_max_lagrangian(F1: Lagrangian, F2: Lagrangian, t: float) -> Lagrangian:
    """max{(1 - t) F1, t F2}; always flagged piecewise."""
    t = validate_weight(t)
    body, dim = _joint_domain(F1, F2)
    return Lagrangian(
        lambda X, V: np.maximum((1 - t) * F1.fn(X, V), t * F2.fn(X, V)),
        f"max({F1.label}, {F2.label}, t={t:g})",
        "piecewise",
        body,
        dim,
        max(F1.margin, F2.margin),
    )


def pointwise_sum(F1: Lagrangian, F2: Lagrangian) -> Lagrangian:
    """F1 + F2, unweighted."""
    body, dim = _joint_domain(F1, F2)
    hint = "smooth" if F1.hint == F2.hint == "smooth" else "piecewise"
    return Lagrangian(
        lambda X, V: F1.fn(X, V) + F2.fn(X, V), f"{F1.label} + {F2.label}", hint, body, dim, max(F1.margin, F2.margin)
    )


def pointwise_max(F1: Lagrangian, F2: Lagrangian) -> Lagrangian:
    """max{F1, F2}, unweighted."""
    body, dim = _joint_domain(F1, F2)
    return Lagrangian(
        lambda X, V: np.maximum(F1.fn(X, V), F2.fn(X, V)),
        f"max({F1.label}, {F2.label})",
        "piecewise",
        body,
        dim,
        max(F1.margin, F2.margin),
    )


def arith_family(F: Lagrangian, t: float) -> Lagrangian:
    """F_t^a(x, v) = (1 - t) F(x, v) + t F(x, -v)."""
    return weighted_sum_lagrangian(F, reverse_lagrangian(F), t)


def max_family(F: Lagrangian, t: float) -> Lagrangian:
    """F_t^m(x, v) = max{(1 - t) F(x, v), t F(x, -v)}."""
    return weighted_max_lagrangian(F, reverse_lagrangian(F), t)


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1] (weights sum to 1)."""
    if order < 1:
        raise ValueError("quadrature order must be at least 1")
    x, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = (x + 1.0) / 2.0, w / 2.0
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@dataclass(frozen=True, eq=False)
class PolylinePath:
    """Piecewise-linear path through ``nodes`` (shape (N, n), N >= 2), uniform parameter."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        if nodes.shape[0] < 2:
            raise DegenerateInputError("a polyline path needs at least 2 nodes")
        if not np.all(np.isfinite(nodes)):
            raise DegenerateInputError("path nodes must be finite")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def straight(cls, x, y, count: int = 2) -> "PolylinePath":
        """Uniformly spaced nodes on the segment [x, y]."""
        x, y = as_point(x, name="x"), as_point(y, name="y")
        if x.size != y.size:
            raise DimensionMismatchError("path endpoints differ in dimension")
        s = np.linspace(0.0, 1.0, max(count, 2))
        return cls(x + s[:, None] * (y - x))

    @property
    def count(self) -> int:
        return self.nodes.shape[0]

    @property
    def start(self) -> np.ndarray:
        return self.nodes[0]

    @property
    def end(self) -> np.ndarray:
        return self.nodes[-1]

    def reversed(self) -> "PolylinePath":
        return PolylinePath(self.nodes[::-1].copy())

    def refined(self) -> "PolylinePath":
        """Insert the midpoint of every segment (N -> 2N - 1 nodes)."""
        mids = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        out = np.empty((2 * self.count - 1, self.nodes.shape[1]))
        out[0::2], out[1::2] = self.nodes, mids
        return PolylinePath(out)

    def concatenate(self, other: "PolylinePath") -> "PolylinePath":
        if not np.array_equal(self.end, other.start):
            raise DegenerateInputError("paths can only be concatenated end to start")
        return PolylinePath(np.vstack([self.nodes, other.nodes[1:]]))

    def max_deviation_from_segment(self) -> float:
        """Sup distance of the nodes from the straight segment joining the endpoints."""
        chord = self.end - self.start
        length2 = float(chord @ chord)
        if length2 == 0:
            return float(np.max(np.linalg.norm(self.nodes - self.start, axis=1)))
        s = np.clip((self.nodes - self.start) @ chord / length2, 0.0, 1.0)
        return float(np.max(np.linalg.norm(self.start + s[:, None] * chord - self.nodes, axis=1)))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.nodes, columns=[f"x{i + 1}" for i in range(self.nodes.shape[1])])


def _gauss_pieces(
    F: Lagrangian,
    starts: np.ndarray,
    steps: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    order: int,
) -> np.ndarray:
    """Gauss quadrature of F over the parameter pieces [lo, hi] of the given segments."""
    s, w = gauss_legendre(order)
    width = hi - lo
    params = lo[:, None] + width[:, None] * s[None, :]
    points = starts[:, None, :] + params[:, :, None] * steps[:, None, :]
    velocities = np.broadcast_to(steps[:, None, :], points.shape)
    n = starts.shape[1]
    values = F.fn(points.reshape(-1, n), velocities.reshape(-1, n)).reshape(len(lo), len(s))
    return width * (values @ w)


def _segment_lengths(F: Lagrangian, nodes: np.ndarray, order: int, rel_tol: float | None = None) -> np.ndarray:
    """
    Quadrature of F along each segment of the polyline ``nodes``.

    Without ``rel_tol`` every segment gets one fixed-order rule. With it, a
    piece is accepted once the order-k and order-2k rules agree to ``rel_tol``
    (relative to the piece, floored by its share of the whole segment) and
    bisected otherwise.
    """
    starts, steps = nodes[:-1], np.diff(nodes, axis=0)
    count = len(steps)
    if rel_tol is None:
        return _gauss_pieces(F, starts, steps, np.zeros(count), np.ones(count), order)

    totals = np.zeros(count)
    owner, lo, hi = np.arange(count), np.zeros(count), np.ones(count)
    whole: np.ndarray | None = None
    for depth in range(MAX_SUBDIVISIONS + 1):
        coarse = _gauss_pieces(F, starts[owner], steps[owner], lo, hi, order)
        fine = _gauss_pieces(F, starts[owner], steps[owner], lo, hi, 2 * order)
        if whole is None:
            whole = np.abs(fine)
        with np.errstate(invalid="ignore"):
            limit = rel_tol * np.maximum(np.abs(fine), whole[owner] * (hi - lo))
            done = ~np.isfinite(fine) | (np.abs(fine - coarse) <= limit)
        if depth == MAX_SUBDIVISIONS:
            done[:] = True
        np.add.at(totals, owner[done], fine[done])
        if done.all():
            break
        owner, lo, hi = owner[~done], lo[~done], hi[~done]
        mid = 0.5 * (lo + hi)
        owner, lo, hi = np.concatenate([owner, owner]), np.concatenate([lo, mid]), np.concatenate([mid, hi])
    return totals


def path_length(F: Lagrangian, path: PolylinePath, order: int = 4, rel_tol: float | None = None) -> float:
    """
    Length of a polyline: the sum over segments of Gauss quadrature of F.

    Args:
        F: Lagrangian to integrate
        path: Polyline in the domain of F
        order: Points of the Gauss rule per segment (or per piece)
        rel_tol: If given, bisect each segment until the order and 2 * order
            rules agree to this relative tolerance; otherwise one fixed-order
            rule per segment

    Raises:
        NotInteriorError: If a node lies outside the domain of F
    """
    if F.dim is not None and path.nodes.shape[1] != F.dim:
        raise DimensionMismatchError(f"path of dimension {path.nodes.shape[1]} for a {F.dim}-D Lagrangian")
    if F.body is not None and not np.all(F.body.margin_many(path.nodes) >= F.margin):
        raise NotInteriorError(f"path leaves the domain of {F.label}")
    return float(np.sum(_segment_lengths(F, path.nodes, order, rel_tol)))


def metric_path_length(d: WeakMetric, path: PolylinePath, samples_per_segment: int = 16) -> float:
    """Length of a path in the metric sense: sum of d over a uniform partition of each segment."""
    s = np.linspace(0.0, 1.0, samples_per_segment + 1)[:-1]
    starts, steps = path.nodes[:-1], np.diff(path.nodes, axis=0)
    points = (starts[:, None, :] + s[None, :, None] * steps[:, None, :]).reshape(-1, path.nodes.shape[1])
    points = np.vstack([points, path.end])
    return float(sum(d(p, q) for p, q in zip(points[:-1], points[1:])))


def crucial_identity_check(F1: Lagrangian, F2: Lagrangian, t: float, path: PolylinePath, order: int = 4) -> float:
    """|l_{(1-t)F1 + tF2}(path) - ((1-t) l_{F1}(path) + t l_{F2}(path))|; linearity of the length."""
    combined = path_length(weighted_sum_lagrangian(F1, F2, t), path, order)
    return abs(combined - ((1 - t) * path_length(F1, path, order) + t * path_length(F2, path, order)))


@dataclass(frozen=True)
class GeodesicOptions:
    """Knobs of the geodesic solver."""

    nodes: int = 33
    initial_nodes: int = 9
    quadrature_order: int = 4
    tolerance: float = 1e-4
    max_iterations: int = 400
    multistart: int = 3
    seed: int = 0
    perturbation: float = 0.05
    quasi_newton: bool = True

    def __post_init__(self):
        if self.nodes < 2 or self.initial_nodes < 2:
            raise ValueError("node counts must be at least 2")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.quadrature_order < 1 or self.max_iterations < 1 or self.multistart < 1:
            raise ValueError("quadrature order, max iterations and multistart must be positive")
        if self.perturbation < 0:
            raise ValueError("perturbation must be non-negative")


@dataclass
class GeodesicResult:
    """Best path found by ``induced_distance`` and its length."""

    path: PolylinePath
    length: float
    converged: bool
    iterations: int
    history: list[tuple[int, float]] = field(default_factory=list)
    start_index: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "length": self.length,
            "converged": self.converged,
            "iterations": self.iterations,
            "nodes": self.path.nodes.tolist(),
            "history": [[n, length] for n, length in self.history],
        }


class _PathObjective:
    """
    Length of polylines with fixed endpoints, with an infinite barrier outside the domain.

    The search scores candidates with an error-controlled length at
    ``search_tol``; ``measure`` re-measures a path at MEASURE_TOLERANCE.
    """

    def __init__(self, F: Lagrangian, x: np.ndarray, y: np.ndarray, order: int, search_tol: float):
        self.F, self.x, self.y, self.order, self.search_tol = F, x, y, order, search_tol

    def admissible(self, points: np.ndarray) -> bool:
        body = self.F.body
        return body is None or bool(np.all(body.margin_many(points) >= self.F.margin))

    def segment_costs(self, nodes: np.ndarray) -> np.ndarray:
        return _segment_lengths(self.F, nodes, self.order, self.search_tol)

    def measure(self, nodes: np.ndarray) -> float:
        return float(np.sum(_segment_lengths(self.F, nodes, self.order, MEASURE_TOLERANCE)))

    def full_nodes(self, interior_flat: np.ndarray) -> np.ndarray:
        return np.vstack([self.x, interior_flat.reshape(-1, self.x.size), self.y])

    def total(self, interior_flat: np.ndarray) -> float:
        nodes = self.full_nodes(interior_flat)
        if not self.admissible(nodes[1:-1]):
            return math.inf
        value = float(np.sum(self.segment_costs(nodes)))
        return value if math.isfinite(value) else math.inf


def _pattern_search(
    objective: _PathObjective,
    nodes: np.ndarray,
    step: float,
    min_step: float,
    max_sweeps: int,
) -> tuple[np.ndarray, float, int, bool]:
    """
    Coordinate-wise compass search over the interior nodes.

    Each poll moves one coordinate of one node by +-step and is accepted on
    strict decrease; only the two segments touching the node are re-evaluated.
    The step halves after a sweep without improvement.
    """
    nodes = nodes.copy()
    costs = objective.segment_costs(nodes)
    n = nodes.shape[1]
    sweeps = 0
    while step >= min_step and sweeps < max_sweeps:
        sweeps += 1
        improved = False
        for i in range(1, nodes.shape[0] - 1):
            for j in range(n):
                current = costs[i - 1] + costs[i]
                for move in (step, -step):
                    trial = nodes[i - 1 : i + 2].copy()
                    trial[1, j] += move
                    if not objective.admissible(trial[1:2]):
                        continue
                    local = objective.segment_costs(trial)
                    if local[0] + local[1] < current - IMPROVEMENT_SLACK * max(1.0, abs(current)):
                        nodes[i] = trial[1]
                        costs[i - 1 : i + 1] = local
                        improved = True
                        break
        if not improved:
            step *= 0.5
    return nodes, float(np.sum(costs)), sweeps, step < min_step


def _quasi_newton(objective: _PathObjective, nodes: np.ndarray, length: float) -> tuple[np.ndarray, float, int]:
    """Finite-difference BFGS polish; kept only when it finds an admissible shorter path."""
    if nodes.shape[0] <= 2:
        return nodes, length, 0
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore", RuntimeWarning)
        res = minimize(objective.total, nodes[1:-1].ravel(), method="BFGS", options={"maxiter": 200})
    candidate = float(res.fun)
    if math.isfinite(candidate) and candidate < length - IMPROVEMENT_SLACK * max(1.0, length):
        polished = objective.full_nodes(res.x)
        # Re-evaluate rather than trusting the optimizer's cached value.
        value = objective.total(res.x)
        if value < length:
            return polished, value, int(res.nit)
    return nodes, length, int(res.nit)


def _initial_paths(F: Lagrangian, x: np.ndarray, y: np.ndarray, opts: GeodesicOptions) -> list[np.ndarray]:
    """Straight segment plus seeded sine-bump perturbations, pulled back inside the domain."""
    base = PolylinePath.straight(x, y, opts.initial_nodes).nodes
    scale = float(np.linalg.norm(y - x))
    rng = np.random.default_rng(opts.seed)
    s = np.linspace(0.0, 1.0, opts.initial_nodes)
    starts = [base]
    for _ in range(opts.multistart - 1):
        direction = rng.normal(size=x.size)
        direction *= opts.perturbation * scale / max(np.linalg.norm(direction), 1e-300)
        nodes = base + np.sin(np.pi * s)[:, None] * direction
        for i in range(1, len(nodes) - 1):
            offset = nodes[i] - base[i]
            for _ in range(40):
                if F.body is None or F.body.margin(nodes[i]) >= F.margin:
                    break
                offset *= 0.5
                nodes[i] = base[i] + offset
            else:
                nodes[i] = base[i]
        starts.append(nodes)
    return starts


def _refine_from(objective: _PathObjective, nodes: np.ndarray, opts: GeodesicOptions, scale: float):
    """
    Successive refinement from one start: solve at N, warm-start at 2N - 1.

    Every level's result is re-measured; the start itself is a candidate, so
    the best length never exceeds the measured length of the start. Converged
    means two successive levels agree to ``opts.tolerance``.
    """
    history: list[tuple[int, float]] = []
    best_nodes, best = nodes, objective.measure(nodes)
    iterations, converged, previous = 0, False, None
    min_step = 1e-2 * opts.tolerance * scale
    while True:
        count = nodes.shape[0]
        step = 0.5 * scale / (count - 1)
        nodes, estimate, sweeps, finished = _pattern_search(objective, nodes, step, min_step, opts.max_iterations)
        iterations += sweeps
        if not finished:
            logger.debug("level N=%d stopped at the sweep budget (%d)", count, sweeps)
        if opts.quasi_newton and objective.F.hint == "smooth":
            nodes, estimate, nit = _quasi_newton(objective, nodes, estimate)
            iterations += nit
        length = objective.measure(nodes)
        if length < best:
            best_nodes, best = nodes, length
        history.append((count, best))
        logger.debug("level N=%d: length %.12g after %d sweeps", count, length, sweeps)
        if previous is not None and abs(previous - best) <= opts.tolerance * max(abs(best), 1e-300):
            converged = True
            break
        if 2 * count - 1 > opts.nodes:
            # A single level has no refinement to compare against.
            converged = len(history) == 1 and finished
            break
        previous = best
        nodes = best_nodes
        while nodes.shape[0] <= count:
            nodes = PolylinePath(nodes).refined().nodes
    return best_nodes, best, iterations, history, converged


def induced_distance(F: Lagrangian, x, y, opts: GeodesicOptions | None = None) -> GeodesicResult:
    """
    Upper estimate of the induced distance d(F)(x, y) by polyline optimization.

    Minimizes ``path_length`` over polylines with fixed endpoints, starting
    from the straight segment and ``multistart - 1`` seeded perturbations,
    with successive node refinement. The lowest length wins; ties go to the
    earliest start.

    The reported length is the error-controlled length of the returned path,
    ``path_length(F, result.path, opts.quadrature_order, MEASURE_TOLERANCE)``,
    never the search estimate, so it is a true upper bound up to that
    relative accuracy.

    Raises:
        NotInteriorError: If an endpoint lies outside the domain of F
    """
    opts = opts or GeodesicOptions()
    if F.body is not None:
        x = F.body.require_interior(x, F.margin, "x")
        y = F.body.require_interior(y, F.margin, "y")
    else:
        x = as_point(x, F.dim, "x")
        y = as_point(y, x.size, "y")
    if np.array_equal(x, y):
        return GeodesicResult(PolylinePath(np.vstack([x, y])), 0.0, True, 0, [(2, 0.0)])

    objective = _PathObjective(F, x, y, opts.quadrature_order, SEARCH_ACCURACY * opts.tolerance)
    scale = float(np.linalg.norm(y - x))
    best: GeodesicResult | None = None
    for index, start in enumerate(_initial_paths(F, x, y, opts)):
        nodes, length, iterations, history, converged = _refine_from(objective, start, opts, scale)
        if best is None or length < best.length - TIE_SLACK:
            best = GeodesicResult(PolylinePath(nodes), length, converged, iterations, history, index)
    assert best is not None
    if not best.converged:
        logger.warning("geodesic solve for %s did not converge (length %.6g)", F.label, best.length)
    logger.info("induced distance of %s: %.10g (start %d)", F.label, best.length, best.start_index)
    return best


def approach_sequence(x, direction, count: int, power: float = 2.0, scale: float = 1.0) -> np.ndarray:
    """Radial approach x + scale * direction / n**power for n = 1..count, one point per row."""
    x = as_point(x, name="x")
    direction = as_point(direction, x.size, "direction")
    n = np.arange(1, count + 1, dtype=float)
    return x + (scale / n**power)[:, None] * direction

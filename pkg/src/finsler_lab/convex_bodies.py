"""Convex domains and the ray/boundary queries behind the Funk and Hilbert formulas."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import ClassVar

import numpy as np
from scipy.optimize import linprog

from finsler_lab.errors import (
    BodyFormatError,
    DegenerateInputError,
    DimensionMismatchError,
    NotInteriorError,
)

logger = logging.getLogger(__name__)

# Points and tangent vectors are plain float arrays of shape (n,).
Point = np.ndarray
Vector = np.ndarray

# A point is interior when every constraint holds with at least this slack.
INTERIOR_MARGIN = 1e-12

# Cap for rays that never leave an unbounded body, used by the samplers only.
UNBOUNDED_REACH = 2.0


def as_point(x, dim: int | None = None, name: str = "point") -> np.ndarray:
    """
    Convert coordinates to a finite 1-D float array.

    Args:
        x: Sequence of coordinates
        dim: Expected dimension (checked when given)
        name: Label used in error messages

    Returns:
        Float array of shape (n,)

    Raises:
        DimensionMismatchError: If the dimension differs from ``dim``
        DegenerateInputError: If an entry is not finite
    """
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatchError(f"{name} must be a non-empty 1-D coordinate vector")
    if dim is not None and arr.size != dim:
        raise DimensionMismatchError(f"{name} has dimension {arr.size}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise DegenerateInputError(f"{name} has non-finite coordinates")
    return arr


class ConvexBody(ABC):
    """
    A convex domain in R^n with nonempty interior.

    Subclasses implement the vectorized primitives ``margin_many`` and
    ``ray_exit_many``; the scalar methods validate their input and delegate.
    """

    tag: ClassVar[str]

    @property
    @abstractmethod
    def dim(self) -> int:
        """Ambient dimension n."""

    @abstractmethod
    def margin_many(self, X: np.ndarray) -> np.ndarray:
        """Normalized interior slack of each row of X (positive inside)."""

    @abstractmethod
    def ray_exit_many(self, X: np.ndarray, V: np.ndarray) -> np.ndarray:
        """
        Exit parameter s of each ray X[i] + s V[i], s > 0.

        Rows are assumed interior. Rays that stay in the body and zero
        directions give ``inf``.
        """

    @abstractmethod
    def interior_point(self) -> Point:
        """A reference point well inside the body."""

    def margin(self, x) -> float:
        x = as_point(x, self.dim)
        return float(self.margin_many(x[None, :])[0])

    def contains(self, x) -> bool:
        """Strict interior membership."""
        return self.margin(x) >= INTERIOR_MARGIN

    def contains_many(self, X: np.ndarray) -> np.ndarray:
        return self.margin_many(np.asarray(X, dtype=float)) >= INTERIOR_MARGIN

    def require_interior(self, x, margin: float = INTERIOR_MARGIN, name: str = "point") -> Point:
        """Validate ``x`` and return it as an array, rejecting near-boundary points."""
        x = as_point(x, self.dim, name)
        if self.margin(x) < margin:
            raise NotInteriorError(f"{name} {x.tolist()} is not interior to the {self.tag}")
        return x

    def ray_exit(self, x, v) -> float:
        """
        Distance parameter to the boundary along a ray.

        Args:
            x: Interior point
            v: Nonzero direction

        Returns:
            The unique s > 0 with x + s v on the boundary, or ``inf``
        """
        x = self.require_interior(x)
        v = as_point(v, self.dim, "direction")
        if not np.any(v):
            raise DegenerateInputError("ray direction must be nonzero")
        return float(self.ray_exit_many(x[None, :], v[None, :])[0])


@dataclass(frozen=True, eq=False)
class Ball(ConvexBody):
    """Euclidean ball."""

    center: np.ndarray
    radius: float

    tag: ClassVar[str] = "ball"

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center, name="center"))
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise DegenerateInputError("ball radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size

    def margin_many(self, X):
        return (self.radius - np.linalg.norm(X - self.center, axis=1)) / self.radius

    def ray_exit_many(self, X, V):
        return _unit_ball_exit((X - self.center) / self.radius, V / self.radius)

    def interior_point(self):
        return self.center.copy()


@dataclass(frozen=True, eq=False)
class Ellipsoid(ConvexBody):
    """Axis-aligned ellipsoid sum(((x - c) / a)^2) < 1."""

    center: np.ndarray
    semi_axes: np.ndarray

    tag: ClassVar[str] = "ellipsoid"

    def __post_init__(self):
        center = as_point(self.center, name="center")
        axes = as_point(self.semi_axes, center.size, "semi-axes")
        if np.any(axes <= 0):
            raise DegenerateInputError("ellipsoid semi-axes must be positive")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "semi_axes", axes)

    @property
    def dim(self) -> int:
        return self.center.size

    def margin_many(self, X):
        return 1.0 - np.linalg.norm((X - self.center) / self.semi_axes, axis=1)

    def ray_exit_many(self, X, V):
        return _unit_ball_exit((X - self.center) / self.semi_axes, V / self.semi_axes)

    def interior_point(self):
        return self.center.copy()


@dataclass(frozen=True, eq=False)
class Polytope(ConvexBody):
    """
    Intersection of half-spaces normal . x <= offset.

    Rows are normalized at construction so that margins are Euclidean
    distances to the face hyperplanes. Construction fails unless a strictly
    feasible point exists.
    """

    normals: np.ndarray
    offsets: np.ndarray

    tag: ClassVar[str] = "polytope"

    def __post_init__(self):
        normals = np.atleast_2d(np.asarray(self.normals, dtype=float))
        offsets = np.atleast_1d(np.asarray(self.offsets, dtype=float))
        if normals.shape[0] != offsets.size or normals.shape[0] == 0:
            raise DimensionMismatchError("polytope needs one offset per normal")
        if not (np.all(np.isfinite(normals)) and np.all(np.isfinite(offsets))):
            raise DegenerateInputError("polytope data must be finite")
        lengths = np.linalg.norm(normals, axis=1)
        if np.any(lengths == 0):
            raise DegenerateInputError("polytope normals must be nonzero")
        object.__setattr__(self, "normals", normals / lengths[:, None])
        object.__setattr__(self, "offsets", offsets / lengths)
        center, radius = _chebyshev_center(self.normals, self.offsets)
        if radius < INTERIOR_MARGIN:
            raise DegenerateInputError("polytope has empty interior")
        object.__setattr__(self, "_center", center)
        object.__setattr__(self, "_radius", radius)
        logger.debug("polytope with %d faces, inscribed radius %.3g", offsets.size, radius)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def margin_many(self, X):
        return np.min(self.offsets - X @ self.normals.T, axis=1)

    def ray_exit_many(self, X, V):
        rates = V @ self.normals.T
        slacks = self.offsets - X @ self.normals.T
        with np.errstate(divide="ignore", invalid="ignore"):
            steps = np.where(rates > 0, slacks / np.where(rates > 0, rates, 1.0), np.inf)
        return np.min(steps, axis=1)

    def interior_point(self):
        return self._center.copy()


@dataclass(frozen=True, eq=False)
class UpperHalfSpace(ConvexBody):
    """Half-space {x : x[axis] > 0} in R^dim (0-based axis, default last)."""

    dimension: int = 2
    axis: int = -1

    tag: ClassVar[str] = "halfspace"

    def __post_init__(self):
        if self.dimension < 1:
            raise DimensionMismatchError("half-space dimension must be at least 1")
        if not -self.dimension <= self.axis < self.dimension:
            raise DimensionMismatchError(f"axis {self.axis} out of range for dimension {self.dimension}")
        object.__setattr__(self, "axis", self.axis % self.dimension)

    @property
    def dim(self) -> int:
        return self.dimension

    def margin_many(self, X):
        return X[:, self.axis].copy()

    def ray_exit_many(self, X, V):
        rate = V[:, self.axis]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(rate < 0, X[:, self.axis] / np.where(rate < 0, -rate, 1.0), np.inf)

    def interior_point(self):
        point = np.zeros(self.dimension)
        point[self.axis] = 1.0
        return point


def _unit_ball_exit(W: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Exit parameter of rays W + s U from the unit ball, rows interior."""
    a = np.einsum("ij,ij->i", U, U)
    b = np.einsum("ij,ij->i", U, W)
    c = np.einsum("ij,ij->i", W, W) - 1.0
    root = np.sqrt(np.maximum(b * b - a * c, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        # Two algebraically equal forms of the positive root; each avoids cancellation on one side.
        s = np.where(b > 0, -c / (b + root), (root - b) / a)
    return np.where(a > 0, s, np.inf)


def _chebyshev_center(normals: np.ndarray, offsets: np.ndarray) -> tuple[np.ndarray, float]:
    """Largest inscribed ball of a normalized H-representation (radius capped at 1)."""
    k, n = normals.shape
    res = linprog(
        c=np.concatenate([np.zeros(n), [-1.0]]),
        A_ub=np.hstack([normals, np.ones((k, 1))]),
        b_ub=offsets,
        bounds=[(None, None)] * n + [(0.0, 1.0)],
        method="highs",
    )
    if res.status != 0:
        return np.zeros(n), 0.0
    return res.x[:n], float(res.x[n])


@dataclass(frozen=True)
class ChordEndpoints:
    """Boundary points of the line through x and y, beyond y and beyond x."""

    a_plus: Point | None
    a_minus: Point | None


def chord_endpoints(body: ConvexBody, x, y) -> ChordEndpoints:
    """
    Boundary points of the chord through two interior points.

    ``a_plus`` lies on the ray from x through y, ``a_minus`` on the ray from
    y through x; either is ``None`` when that ray stays in the body.

    Raises:
        DegenerateInputError: If x and y coincide
        NotInteriorError: If either point is not interior
    """
    x = body.require_interior(x, name="x")
    y = body.require_interior(y, name="y")
    if np.array_equal(x, y):
        raise DegenerateInputError("chord endpoints need two distinct points")
    s_plus = body.ray_exit(x, y - x)
    s_minus = body.ray_exit(y, x - y)
    a_plus = x + s_plus * (y - x) if np.isfinite(s_plus) else None
    a_minus = y + s_minus * (x - y) if np.isfinite(s_minus) else None
    return ChordEndpoints(a_plus, a_minus)


def interval(lo: float, hi: float) -> Polytope:
    """The open interval (lo, hi) as a 1-D polytope."""
    if not hi > lo:
        raise DegenerateInputError("interval needs lo < hi")
    return Polytope(np.array([[1.0], [-1.0]]), np.array([hi, -lo]))


def square(half_width: float = 1.0, dim: int = 2) -> Polytope:
    """Axis-aligned cube [-h, h]^dim."""
    eye = np.eye(dim)
    return Polytope(np.vstack([eye, -eye]), np.full(2 * dim, float(half_width)))


def random_polytope(rng: np.random.Generator, faces: int = 4, dim: int = 2) -> Polytope:
    """
    Bounded random polytope containing the origin.

    In the plane the face normals are evenly spread angles with jitter, so
    consecutive normals are less than pi apart. In higher dimensions a cube
    is cut by ``faces`` extra random half-spaces.
    """
    if dim == 2:
        if faces < 4:
            raise DegenerateInputError("planar random polytopes need at least 4 faces")
        spacing = 2 * np.pi / faces
        angles = spacing * np.arange(faces) + rng.uniform(-0.3, 0.3, faces) * spacing
        normals = np.column_stack([np.cos(angles), np.sin(angles)])
        offsets = rng.uniform(0.5, 1.5, faces)
        return Polytope(normals, offsets)
    box = square(1.5, dim)
    extra = rng.normal(size=(faces, dim))
    return Polytope(
        np.vstack([box.normals, extra]),
        np.concatenate([box.offsets, rng.uniform(0.5, 1.5, faces) * np.linalg.norm(extra, axis=1)]),
    )


def sample_interior(
    body: ConvexBody,
    rng: np.random.Generator,
    count: int,
    shrink: float = 0.95,
) -> np.ndarray:
    """
    Seeded interior points, one per row.

    Each point lies on a random ray from ``body.interior_point()`` at a
    uniform fraction (volume-weighted) of ``shrink`` times the exit distance.
    """
    center = body.interior_point()
    directions = rng.normal(size=(count, body.dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    reach = body.ray_exit_many(np.tile(center, (count, 1)), directions)
    reach = np.where(np.isfinite(reach), reach, UNBOUNDED_REACH)
    fraction = shrink * rng.uniform(size=count) ** (1.0 / body.dim)
    return center + (fraction * reach)[:, None] * directions


# Body files ---------------------------------------------------------------


def _numeric_rows(lines: list[str]) -> list[list[float]]:
    rows = []
    for line in lines:
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError as exc:
            raise BodyFormatError(f"non-numeric entry in line {line!r}") from exc
    return rows


def parse_body(text: str) -> ConvexBody:
    """
    Parse a body description.

    Line 1 is the variant tag; ``#`` starts a comment and blank lines are
    ignored. ``ball``: center row, radius row. ``ellipsoid``: center row,
    semi-axes row. ``polytope``: one ``n1 ... nk b`` row per half-space.
    ``halfspace``: one ``n k`` row (dimension, 1-based axis).

    Raises:
        BodyFormatError: On any malformed input
    """
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise BodyFormatError("empty body description")
    tag, rows = lines[0].lower(), _numeric_rows(lines[1:])
    try:
        if tag == "ball":
            if len(rows) != 2 or len(rows[1]) != 1:
                raise BodyFormatError("ball needs a center row and a radius row")
            return Ball(np.array(rows[0]), rows[1][0])
        if tag == "ellipsoid":
            if len(rows) != 2:
                raise BodyFormatError("ellipsoid needs a center row and a semi-axes row")
            return Ellipsoid(np.array(rows[0]), np.array(rows[1]))
        if tag == "polytope":
            if not rows or len({len(r) for r in rows}) != 1 or len(rows[0]) < 2:
                raise BodyFormatError("polytope rows must all have the form 'n1 ... nk b'")
            data = np.array(rows)
            return Polytope(data[:, :-1], data[:, -1])
        if tag == "halfspace":
            if len(rows) != 1 or len(rows[0]) != 2:
                raise BodyFormatError("halfspace needs one 'n k' row")
            n, k = (int(v) for v in rows[0])
            if not 1 <= k <= n:
                raise BodyFormatError(f"halfspace axis {k} out of range 1..{n}")
            return UpperHalfSpace(n, k - 1)
    except BodyFormatError:
        raise
    except (DegenerateInputError, DimensionMismatchError) as exc:
        raise BodyFormatError(str(exc)) from exc
    raise BodyFormatError(f"unknown body tag {tag!r}")


def load_body(path: str | Path) -> ConvexBody:
    """Read and parse a body file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise BodyFormatError(f"cannot read body file {path}: {exc.strerror}") from exc
    return parse_body(text)


def format_body(body: ConvexBody) -> str:
    """Inverse of ``parse_body``."""

    def row(values) -> str:
        return " ".join(repr(float(v)) for v in values)

    if isinstance(body, Ball):
        lines = [row(body.center), repr(body.radius)]
    elif isinstance(body, Ellipsoid):
        lines = [row(body.center), row(body.semi_axes)]
    elif isinstance(body, Polytope):
        lines = [row(np.append(n, b)) for n, b in zip(body.normals, body.offsets)]
    elif isinstance(body, UpperHalfSpace):
        lines = [f"{body.dimension} {body.axis + 1}"]
    else:
        raise BodyFormatError(f"cannot format {type(body).__name__}")
    return "\n".join([body.tag, *lines]) + "\n"

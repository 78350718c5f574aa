"""Tests for finsler module."""

import math

import numpy as np
import pytest

from finsler_lab.convex_bodies import Ball
from finsler_lab.errors import DegenerateInputError, DimensionMismatchError, NotInteriorError
from finsler_lab.finsler import (
    MEASURE_TOLERANCE,
    GeodesicOptions,
    PolylinePath,
    approach_sequence,
    crucial_identity_check,
    diagonal_lagrangian,
    euclidean_lagrangian,
    gauss_legendre,
    hyperbolic_lagrangian,
    induced_distance,
    max_family,
    metric_path_length,
    path_length,
    pointwise_max,
    pointwise_sum,
    reverse_lagrangian,
    weighted_max_lagrangian,
    weighted_sum_lagrangian,
)
from finsler_lab.funk_hilbert import funk_distance, funk_lagrangian, hyperbolic_distance, weighted_funk_max
from finsler_lab.weak_metrics import WeakMetric

SMALL = GeodesicOptions(nodes=9, initial_nodes=5, multistart=1)


def test_gauss_legendre_exactness():
    """Test that order-k quadrature integrates degree 2k-1 polynomials on [0, 1] exactly."""
    nodes, weights = gauss_legendre(4)
    assert weights.sum() == pytest.approx(1.0)
    assert weights @ nodes**7 == pytest.approx(1 / 8)
    with pytest.raises(ValueError):
        gauss_legendre(0)


def test_gauss_legendre_is_read_only():
    """Test that cached nodes cannot be modified by callers."""
    nodes, _ = gauss_legendre(3)
    with pytest.raises(ValueError):
        nodes[0] = 0.0


def test_lagrangian_values():
    """Test the standard Lagrangians at a point."""
    assert euclidean_lagrangian()([0.0, 0.0], [3.0, 4.0]) == pytest.approx(5.0)
    assert diagonal_lagrangian([4.0, 9.0])([0.0, 0.0], [1.0, 1.0]) == pytest.approx(math.sqrt(13.0))
    assert hyperbolic_lagrangian()([0.0, 2.0], [3.0, 4.0]) == pytest.approx(2.5)


def test_lagrangian_validates_points():
    """Test domain and dimension checks on evaluation."""
    with pytest.raises(NotInteriorError):
        hyperbolic_lagrangian()([0.0, -1.0], [1.0, 0.0])
    with pytest.raises(DimensionMismatchError):
        euclidean_lagrangian(2)([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
    with pytest.raises(DegenerateInputError):
        diagonal_lagrangian([1.0, 0.0])


def test_combinators():
    """Test reverse, weighted and pointwise combinations."""
    disc = Ball(np.zeros(2), 1.0)
    p = funk_lagrangian(disc)
    x, v = [0.3, 0.2], [1.0, -0.5]
    assert reverse_lagrangian(p)(x, v) == pytest.approx(p(x, [-1.0, 0.5]))
    both = weighted_sum_lagrangian(p, reverse_lagrangian(p), 0.25)
    assert both(x, v) == pytest.approx(0.75 * p(x, v) + 0.25 * p(x, [-1.0, 0.5]))
    assert max_family(p, 0.5)(x, v) == pytest.approx(0.5 * max(p(x, v), p(x, [-1.0, 0.5])))
    assert max_family(p, 0.5).hint == "piecewise"

    e = euclidean_lagrangian()
    h = hyperbolic_lagrangian()
    assert pointwise_sum(e, h)([0.0, 2.0], [0.0, 1.0]) == pytest.approx(1.5)
    assert pointwise_max(e, h)([0.0, 0.5], [0.0, 1.0]) == pytest.approx(2.0)
    assert pointwise_sum(e, h).body is h.body


def test_weighted_max_lagrangian():
    """Test max{(1 - t) F1, t F2} on two constant norms."""
    F = weighted_max_lagrangian(euclidean_lagrangian(), diagonal_lagrangian([4.0, 9.0]), 0.5)
    assert F([0.0, 0.0], [3.0, 4.0]) == pytest.approx(0.5 * math.sqrt(36.0 + 144.0))
    assert F([0.0, 0.0], [1.0, 0.0]) == pytest.approx(1.0)
    assert F.hint == "piecewise"


def test_combinators_reject_dimension_clash():
    """Test that Lagrangians of different dimension cannot be combined."""
    with pytest.raises(DimensionMismatchError):
        weighted_sum_lagrangian(euclidean_lagrangian(2), euclidean_lagrangian(3), 0.5)


def test_polyline_path_basics():
    """Test construction, refinement, reversal and concatenation."""
    path = PolylinePath.straight([0.0, 0.0], [1.0, 0.0], 3)
    assert path.count == 3
    refined = path.refined()
    assert refined.count == 5
    assert np.allclose(refined.nodes[:, 0], [0.0, 0.25, 0.5, 0.75, 1.0])
    assert np.array_equal(path.reversed().start, [1.0, 0.0])
    other = PolylinePath(np.array([[1.0, 0.0], [1.0, 1.0]]))
    assert path.concatenate(other).count == 4
    with pytest.raises(DegenerateInputError):
        other.concatenate(path)
    assert list(path.to_frame().columns) == ["x1", "x2"]


def test_polyline_path_validation():
    """Test that degenerate node arrays are rejected."""
    with pytest.raises(DegenerateInputError):
        PolylinePath(np.array([[0.0, 0.0]]))
    with pytest.raises(DegenerateInputError):
        PolylinePath(np.array([[0.0, 0.0], [np.nan, 1.0]]))


def test_max_deviation_from_segment():
    """Test the sup distance of the nodes from the chord."""
    path = PolylinePath(np.array([[0.0, 0.0], [0.5, 0.3], [1.0, 0.0]]))
    assert path.max_deviation_from_segment() == pytest.approx(0.3)
    assert PolylinePath.straight([0.0, 0.0], [2.0, 1.0], 7).max_deviation_from_segment() == pytest.approx(0.0, abs=1e-15)


def test_path_length_euclidean_straight():
    """Test that straight paths have Euclidean length, independent of refinement."""
    path = PolylinePath.straight([0.0, 0.0], [3.0, 4.0], 2)
    F = euclidean_lagrangian()
    assert path_length(F, path) == pytest.approx(5.0)
    assert path_length(F, path.refined().refined()) == pytest.approx(5.0)


def test_path_length_hyperbolic_vertical():
    """Test the hyperbolic length of a vertical segment against log of the height ratio."""
    path = PolylinePath.straight([0.0, 1.0], [0.0, math.e], 9)
    assert path_length(hyperbolic_lagrangian(), path) == pytest.approx(1.0, abs=1e-7)


def test_path_length_rejects_paths_leaving_the_domain():
    """Test that nodes outside the domain raise NotInteriorError."""
    path = PolylinePath(np.array([[0.0, 1.0], [0.0, -1.0], [1.0, 1.0]]))
    with pytest.raises(NotInteriorError):
        path_length(hyperbolic_lagrangian(), path)
    with pytest.raises(DimensionMismatchError):
        path_length(euclidean_lagrangian(3), PolylinePath.straight([0.0, 0.0], [1.0, 1.0]))


def test_reversed_path_has_reverse_length():
    """Test that l_F(reversed path) equals l_{reverse F}(path)."""
    disc = Ball(np.zeros(2), 1.0)
    p = funk_lagrangian(disc)
    path = PolylinePath(np.array([[-0.4, 0.1], [0.0, 0.3], [0.5, -0.2]]))
    assert path_length(p, path.reversed()) == pytest.approx(path_length(reverse_lagrangian(p), path), rel=1e-12)


def test_crucial_identity_is_exact():
    """Test linearity of the length in the Lagrangian."""
    disc = Ball(np.zeros(2), 1.0)
    p = funk_lagrangian(disc)
    path = PolylinePath(np.array([[-0.4, 0.1], [0.0, 0.3], [0.2, 0.1], [0.5, -0.2]]))
    assert crucial_identity_check(p, reverse_lagrangian(p), 0.3, path) == pytest.approx(0.0, abs=1e-12)


def test_metric_path_length():
    """Test metric length of a straight path under the Euclidean metric."""
    d = WeakMetric(lambda x, y: float(np.linalg.norm(x - y)))
    path = PolylinePath.straight([0.0, 0.0], [3.0, 4.0], 3)
    assert metric_path_length(d, path, samples_per_segment=4) == pytest.approx(5.0)


def test_geodesic_options_validation():
    """Test that invalid solver options are rejected."""
    with pytest.raises(ValueError):
        GeodesicOptions(nodes=1)
    with pytest.raises(ValueError):
        GeodesicOptions(tolerance=0.0)
    with pytest.raises(ValueError):
        GeodesicOptions(multistart=0)


def test_induced_distance_euclidean():
    """Test that the solver recovers the straight-line distance of a flat norm."""
    result = induced_distance(euclidean_lagrangian(), [0.0, 0.0], [1.0, 2.0], SMALL)
    assert result.length == pytest.approx(math.sqrt(5.0), rel=1e-9)
    assert result.converged
    assert result.path.max_deviation_from_segment() < 1e-6


def test_induced_distance_coincident_points():
    """Test that x = y returns zero length without solving."""
    result = induced_distance(euclidean_lagrangian(), [0.5, 0.5], [0.5, 0.5], SMALL)
    assert result.length == 0.0
    assert result.converged
    assert result.iterations == 0


def test_induced_distance_hyperbolic_bends_upward():
    """Test that the solver finds the curved hyperbolic geodesic."""
    opts = GeodesicOptions(nodes=17, initial_nodes=5, multistart=1, tolerance=1e-5)
    x, y = [-1.0, 1.0], [1.0, 1.0]
    result = induced_distance(hyperbolic_lagrangian(), x, y, opts)
    exact = hyperbolic_distance(x, y)
    assert result.length == pytest.approx(exact, rel=5e-3)
    assert result.length < 2.0
    assert result.path.nodes[:, 1].max() > 1.2


def test_induced_distance_history_is_monotone():
    """Test the refinement history and start bookkeeping of a multistart solve."""
    opts = GeodesicOptions(nodes=9, initial_nodes=3, multistart=3, seed=5)
    result = induced_distance(hyperbolic_lagrangian(), [-1.0, 1.0], [1.0, 2.0], opts)
    lengths = [length for _, length in result.history]
    assert all(b <= a for a, b in zip(lengths, lengths[1:]))
    assert 0 <= result.start_index < 3
    assert result.history[-1][1] == pytest.approx(result.length)
    payload = result.to_dict()
    assert set(payload) == {"length", "converged", "iterations", "nodes", "history"}


def test_induced_distance_rejects_exterior_endpoints():
    """Test that endpoints outside the domain raise NotInteriorError."""
    with pytest.raises(NotInteriorError):
        induced_distance(hyperbolic_lagrangian(), [0.0, -1.0], [0.0, 1.0], SMALL)


def test_approach_sequence():
    """Test the radial approach sequence."""
    seq = approach_sequence([1.0, 1.0], [1.0, 0.0], 4, power=2.0, scale=0.5)
    assert seq.shape == (4, 2)
    assert np.allclose(seq[:, 0], 1.0 + 0.5 / np.array([1.0, 4.0, 9.0, 16.0]))
    assert np.allclose(seq[:, 1], 1.0)


def test_duplicate_node_insertion_is_exact():
    """Test that repeating a node leaves the length unchanged for an x-dependent Lagrangian."""
    p = funk_lagrangian(Ball(np.zeros(2), 1.0))
    nodes = np.array([[-0.4, 0.1], [0.0, 0.3], [0.5, -0.2]])
    doubled = np.insert(nodes, 1, nodes[1], axis=0)
    assert path_length(p, PolylinePath(doubled)) == pytest.approx(path_length(p, PolylinePath(nodes)), abs=1e-12)


def test_midpoint_insertion_for_constant_norm():
    """Test that refinement is exact for a norm independent of x."""
    F = diagonal_lagrangian([4.0, 9.0])
    path = PolylinePath(np.array([[0.0, 0.0], [0.3, 0.7], [1.0, 0.2]]))
    assert path_length(F, path.refined()) == pytest.approx(path_length(F, path), abs=1e-12)


def test_metric_length_matches_quadrature_on_a_chord():
    """Test that the metric length and the Lagrangian length agree on a Funk chord."""
    disc = Ball(np.zeros(2), 1.0)
    path = PolylinePath.straight([-0.3, 0.1], [0.6, 0.2], 33)
    d = WeakMetric(lambda x, y: funk_distance(disc, x, y))
    assert metric_path_length(d, path, 4) == pytest.approx(funk_distance(disc, path.start, path.end), rel=1e-9)
    assert path_length(funk_lagrangian(disc), path) == pytest.approx(metric_path_length(d, path, 4), rel=1e-6)


def test_error_controlled_length_resolves_steep_ends():
    """Test that the fixed rule undercuts a steep Funk chord and the controlled rule does not."""
    p = funk_lagrangian(Ball(np.zeros(2), 1.0))
    path = PolylinePath.straight([0.0, 0.0], [0.95, 0.0], 3)
    exact = math.log(20.0)
    assert path_length(p, path) < exact
    assert path_length(p, path, rel_tol=MEASURE_TOLERANCE) == pytest.approx(exact, abs=1e-11)


def test_error_controlled_length_resolves_kinks():
    """Test a single segment across the switch of a max-type Lagrangian."""
    F = pointwise_max(euclidean_lagrangian(), hyperbolic_lagrangian())
    path = PolylinePath.straight([0.0, 0.5], [0.0, 2.0], 2)
    assert path_length(F, path, rel_tol=MEASURE_TOLERANCE) == pytest.approx(1.0 + math.log(2.0), abs=1e-11)


@pytest.mark.parametrize(
    "t, kind, x, y",
    [
        (0.5, "max", [0.5, 0.0], [0.9, 0.0]),
        (0.0, "funk", [0.0, 0.3], [0.85, -0.4]),
        (0.5, "max", [-0.2, 0.6], [0.1, 0.93]),
    ],
)
def test_induced_distance_never_undercuts_the_distance(t, kind, x, y):
    """Test that solver lengths stay above the exact distance on chords near the boundary."""
    disc = Ball(np.zeros(2), 1.0)
    p = funk_lagrangian(disc)
    if kind == "funk":
        F, exact = p, funk_distance(disc, x, y)
    else:
        F, exact = max_family(p, t), weighted_funk_max(disc, t, x, y)
    result = induced_distance(F, x, y)
    assert result.length >= exact - 1e-12
    if kind == "funk":
        assert result.length == pytest.approx(exact, rel=1e-4)


def test_induced_length_is_the_measured_length_of_the_path():
    """Test that the reported length is the controlled length of the returned path."""
    F = max_family(funk_lagrangian(Ball(np.zeros(2), 1.0)), 0.5)
    opts = GeodesicOptions(nodes=17, initial_nodes=5, multistart=2)
    result = induced_distance(F, [0.5, 0.0], [0.9, 0.0], opts)
    measured = path_length(F, result.path, opts.quadrature_order, MEASURE_TOLERANCE)
    assert result.length == pytest.approx(measured, abs=1e-12)


@pytest.mark.parametrize(
    "F, x, y",
    [
        (hyperbolic_lagrangian(), [-1.0, 1.0], [1.0, 2.0]),
        (funk_lagrangian(Ball(np.zeros(2), 1.0)), [-0.3, 0.5], [0.7, -0.6]),
        (pointwise_max(euclidean_lagrangian(), hyperbolic_lagrangian()), [0.0, 0.5], [0.4, 2.0]),
    ],
)
def test_induced_distance_is_no_longer_than_the_chord(F, x, y):
    """Test that the solver never returns more than the straight segment's length."""
    result = induced_distance(F, x, y, SMALL)
    chord = path_length(F, PolylinePath.straight(x, y, 2), SMALL.quadrature_order, MEASURE_TOLERANCE)
    assert result.length <= chord + 1e-12


def test_doubling_nodes_never_lengthens_the_solution():
    """Test that a finer node budget returns a length no larger than a coarser one."""
    x, y = [-1.0, 1.0], [1.0, 1.5]
    coarse = induced_distance(hyperbolic_lagrangian(), x, y, GeodesicOptions(nodes=9, initial_nodes=5, multistart=2))
    fine = induced_distance(hyperbolic_lagrangian(), x, y, GeodesicOptions(nodes=17, initial_nodes=5, multistart=2))
    assert fine.length <= coarse.length * (1 + GeodesicOptions().tolerance)


def test_converged_follows_agreement_between_levels():
    """Test that an easy solve reports convergence once two levels agree."""
    p = funk_lagrangian(Ball(np.zeros(2), 1.0))
    result = induced_distance(p, [0.0, 0.0], [0.5, 0.0])
    assert result.converged
    assert result.length >= math.log(2.0) - 1e-12
    assert result.length == pytest.approx(math.log(2.0), abs=1e-4)
    lengths = [length for _, length in result.history]
    assert abs(lengths[-1] - lengths[-2]) <= GeodesicOptions().tolerance * lengths[-1]

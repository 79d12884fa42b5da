import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ballfix.errors import InvalidCombinationError, InvalidDimensionError
from ballfix.geometry import (
    TOL_GEOM,
    ConvexCombination,
    PointSet,
    diameter,
    eval_combination,
    jung_nearest,
    jung_radius,
    min_enclosing_ball,
    regular_simplex_vertices,
)
from ballfix.oracle import random_ball_points


def test_jung_radius_known_values():
    assert jung_radius(1) == pytest.approx(2.0, abs=1e-12)
    assert jung_radius(2) == pytest.approx(math.sqrt(3.0), abs=1e-12)
    assert jung_radius(3) == pytest.approx(math.sqrt(8.0 / 3.0), abs=1e-12)


def test_jung_radius_monotone_towards_sqrt2():
    values = [jung_radius(n) for n in range(1, 33)]
    for smaller, larger in zip(values[1:], values[:-1]):
        assert smaller < larger
        assert smaller > math.sqrt(2.0)


@pytest.mark.parametrize("bad", [0, -1, 2.5, "3"])
def test_jung_radius_rejects_bad_dimension(bad):
    with pytest.raises((InvalidDimensionError, TypeError)):
        jung_radius(bad)


def test_regular_simplex_dim1_is_signed_pair():
    verts = regular_simplex_vertices(1)
    assert verts.points.shape == (2, 1)
    np.testing.assert_allclose(verts.points.ravel(), [-1.0, 1.0], atol=TOL_GEOM)
    assert verts.diameter == pytest.approx(2.0, abs=TOL_GEOM)


def test_regular_simplex_dim2_geometry():
    verts = regular_simplex_vertices(2).points
    assert verts.shape == (3, 2)
    np.testing.assert_allclose(np.linalg.norm(verts, axis=1), 1.0, atol=TOL_GEOM)
    for i in range(3):
        for j in range(i + 1, 3):
            assert np.linalg.norm(verts[i] - verts[j]) == pytest.approx(
                jung_radius(2), abs=TOL_GEOM)
            # mutual angle 120 degrees
            assert verts[i] @ verts[j] == pytest.approx(-0.5, abs=TOL_GEOM)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6])
def test_regular_simplex_gram_and_centroid(n):
    verts = regular_simplex_vertices(n).points
    gram = verts @ verts.T
    expected = -np.ones((n + 1, n + 1)) / n
    np.fill_diagonal(expected, 1.0)
    np.testing.assert_allclose(gram, expected, atol=TOL_GEOM)
    np.testing.assert_allclose(verts.mean(axis=0), np.zeros(n), atol=TOL_GEOM)


def test_diameter_examples():
    assert diameter(np.array([[0.0, 0.0]])) == 0.0
    assert diameter(np.array([[-1.0], [1.0]])) == pytest.approx(2.0)
    assert regular_simplex_vertices(2).diameter == pytest.approx(
        math.sqrt(3.0), abs=TOL_GEOM)


def test_pointset_caches_diameter():
    ps = PointSet(np.array([[0.0, 0.0], [3.0, 4.0]]))
    assert ps.diameter == pytest.approx(5.0)
    assert ps.dim == 2
    assert len(ps) == 2


def test_min_enclosing_ball_symmetric_pair():
    ball = min_enclosing_ball(np.array([[-1.0], [1.0]]))
    np.testing.assert_allclose(ball.center, [0.0], atol=TOL_GEOM)
    assert ball.radius == pytest.approx(1.0, abs=TOL_GEOM)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_min_enclosing_ball_of_inscribed_simplex(n):
    verts = regular_simplex_vertices(n)
    ball = min_enclosing_ball(verts)
    assert np.linalg.norm(ball.center) == pytest.approx(0.0, abs=1e-7)
    assert ball.radius == pytest.approx(1.0, abs=1e-7)


def test_min_enclosing_ball_equilateral_triangle_circumradius():
    # Independent oracle: circumradius of an equilateral triangle of side s
    # is s / sqrt(3).
    side = 1.0
    tri = np.array([[0.0, 0.0], [side, 0.0], [side / 2.0, side * math.sqrt(3.0) / 2.0]])
    ball = min_enclosing_ball(tri)
    assert ball.radius == pytest.approx(side / math.sqrt(3.0), abs=TOL_GEOM)


def test_min_enclosing_ball_random_sets_jung_bound_and_minimality():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        dim = int(rng.integers(1, 5))
        count = int(rng.integers(1, 11))
        pts = random_ball_points(rng, dim, count)
        ball = min_enclosing_ball(pts)
        dists = np.linalg.norm(pts - ball.center, axis=1)
        assert dists.max() <= ball.radius + TOL_GEOM          # containment
        assert ball.radius <= diameter(pts) / jung_radius(dim) + TOL_GEOM
        if count > 1:
            # shrinking by 10 * TOL_GEOM must exclude at least one point
            assert dists.max() > ball.radius - 10.0 * TOL_GEOM


def test_eval_combination_examples():
    single = ConvexCombination(points=np.array([[1.0, 0.0]]), weights=np.array([1.0]))
    np.testing.assert_allclose(eval_combination(single), [1.0, 0.0])
    mid = ConvexCombination(points=np.array([[-1.0], [1.0]]), weights=np.array([0.5, 0.5]))
    np.testing.assert_allclose(eval_combination(mid), [0.0])
    verts = regular_simplex_vertices(2)
    centroid = ConvexCombination(points=verts.points, weights=np.full(3, 1.0 / 3.0))
    assert np.linalg.norm(eval_combination(centroid)) <= TOL_GEOM


@pytest.mark.parametrize(
    "weights",
    [np.array([0.5, 0.4]), np.array([0.5, -0.5, 1.0]), np.array([1.0, 1e-11 - 0.0])],
)
def test_convex_combination_rejects_bad_weights(weights):
    points = np.zeros((weights.shape[0], 2))
    with pytest.raises(InvalidCombinationError):
        ConvexCombination(points=points, weights=weights)


def test_convex_combination_rejects_length_mismatch():
    with pytest.raises(InvalidCombinationError):
        ConvexCombination(points=np.zeros((3, 2)), weights=np.array([0.5, 0.5]))


def test_jung_nearest_examples():
    single = ConvexCombination(points=np.array([[0.3, 0.4]]), weights=np.array([1.0]))
    assert jung_nearest(single) == (0, 0.0)

    # uniform weights on the inscribed simplex scaled by eps/R_n: every
    # vertex ends up exactly eps/R_n from the centroid
    for n in (1, 2, 3):
        eps = 1.0
        scale = eps / jung_radius(n)
        verts = regular_simplex_vertices(n).points * scale
        c = ConvexCombination(points=verts, weights=np.full(n + 1, 1.0 / (n + 1)))
        _, dist = jung_nearest(c)
        assert dist == pytest.approx(scale, abs=TOL_GEOM)

    mid = ConvexCombination(points=np.array([[-1.0], [1.0]]), weights=np.array([0.5, 0.5]))
    _, dist = jung_nearest(mid)
    assert dist == pytest.approx(1.0, abs=TOL_GEOM)  # = diameter 2 / jung_radius(1)


@settings(max_examples=200, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**31 - 1),
    dim=st.integers(min_value=1, max_value=4),
    count=st.integers(min_value=1, max_value=10),
)
def test_jung_nearest_bound_random(seed, dim, count):
    rng = np.random.default_rng(seed)
    pts = random_ball_points(rng, dim, count)
    weights = rng.exponential(size=count)
    c = ConvexCombination(points=pts, weights=weights / weights.sum())
    _, dist = jung_nearest(c)
    assert dist <= diameter(pts) / jung_radius(dim) + TOL_GEOM


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**31 - 1),
    n=st.integers(min_value=1, max_value=4),
)
def test_combination_stays_inside_simplex_facets(seed, n):
    # every facet of the inscribed simplex supports the halfspace
    # {y : <y, x_i> >= -1/n}; convex combinations must satisfy all of them
    rng = np.random.default_rng(seed)
    verts = regular_simplex_vertices(n).points
    weights = rng.exponential(size=n + 1)
    c = ConvexCombination(points=verts, weights=weights / weights.sum())
    p = eval_combination(c)
    assert np.all(verts @ p >= -1.0 / n - TOL_GEOM)

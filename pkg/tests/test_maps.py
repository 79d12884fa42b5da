import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ballfix.errors import DomainError, InvalidDimensionError
from ballfix.geometry import TOL_GEOM, jung_radius
from ballfix.maps import (
    ConstantMap,
    ExtremalMap,
    SampledMap,
    StepMap1D,
    discontinuity_witness_1d,
    eps_fixed_indices,
    image_diameter,
    modulus_estimate,
    sample_map_on_grid,
)


# --- step map ----------------------------------------------------------------


def test_step_eval_branches():
    m = StepMap1D(1.0)
    assert m(-0.5) == 0.5
    assert m(0.0) == 0.5              # boundary belongs to the left branch
    assert StepMap1D(2.0)(0.3) == -1.0


def test_step_eval_domain_error():
    with pytest.raises(DomainError):
        StepMap1D(1.0)(1.5)


@pytest.mark.parametrize("eps", [0.0, -1.0, 2.5, 3.0])
def test_eps_range_rejected(eps):
    with pytest.raises(DomainError):
        StepMap1D(eps)
    with pytest.raises(DomainError):
        ExtremalMap(dim=2, eps=eps)


def test_step_batch_matches_scalar():
    m = StepMap1D(0.8)
    xs = np.linspace(-1, 1, 17)[:, None]
    np.testing.assert_allclose(m.batch(xs).ravel(), [m(float(x)) for x in xs.ravel()])


# --- extremal map ------------------------------------------------------------


def test_voronoi_index_examples():
    m = ExtremalMap(dim=2, eps=1.0)
    for i in range(3):
        assert m.voronoi_index(m.vertices[i]) == i
    assert m.voronoi_index(np.zeros(2)) == 0          # tie at the center
    assert m.voronoi_index(0.9 * m.vertices[2]) == 2


def test_voronoi_tie_break_rules():
    low = ExtremalMap(dim=2, eps=1.0, tie_break="lowest_index")
    high = ExtremalMap(dim=2, eps=1.0, tie_break="highest_index")
    assert low.voronoi_index(np.zeros(2)) == 0
    assert high.voronoi_index(np.zeros(2)) == 2
    with pytest.raises(ValueError):
        ExtremalMap(dim=2, eps=1.0, tie_break="coin_flip")


def test_extremal_eval_examples():
    m1 = ExtremalMap(dim=1, eps=1.0)
    assert m1(np.array([-0.2]))[0] == pytest.approx(0.5, abs=TOL_GEOM)

    m2 = ExtremalMap(dim=2, eps=1.0)
    np.testing.assert_allclose(
        m2(np.zeros(2)), -m2.scale * m2.vertices[0], atol=TOL_GEOM)
    assert m2.scale == pytest.approx(1.0 / math.sqrt(3.0), abs=TOL_GEOM)

    m3 = ExtremalMap(dim=3, eps=2.0)
    x = 0.99 * m3.vertices[1]
    out = m3(x)
    np.testing.assert_allclose(out, -(2.0 / jung_radius(3)) * m3.vertices[1], atol=TOL_GEOM)
    assert np.linalg.norm(out) == pytest.approx(2.0 / jung_radius(3), abs=TOL_GEOM)


def test_extremal_value_norms():
    # every value has norm exactly eps/jung_radius(dim); inside the unit
    # ball whenever eps <= jung_radius(dim)
    rng = np.random.default_rng(3)
    for n in (1, 2, 3):
        for eps in (0.5, 1.0, 2.0):
            m = ExtremalMap(dim=n, eps=eps)
            pts = rng.standard_normal((100, n))
            pts /= np.maximum(np.linalg.norm(pts, axis=1, keepdims=True), 1.0)
            norms = np.linalg.norm(m.batch(pts), axis=1)
            np.testing.assert_allclose(norms, eps / jung_radius(n), atol=TOL_GEOM)
            if eps <= jung_radius(n):
                assert norms.max() <= 1.0 + TOL_GEOM


def test_extremal_rejects_bad_dim():
    with pytest.raises(InvalidDimensionError):
        ExtremalMap(dim=0, eps=1.0)


def test_image_diameter_examples():
    assert image_diameter(StepMap1D(1.0)) == 1.0       # exact
    assert image_diameter(StepMap1D(2.0)) == 2.0
    for n in (1, 2, 3, 4):
        for eps in (0.1, 1.0, 2.0):
            assert image_diameter(ExtremalMap(dim=n, eps=eps)) == pytest.approx(
                eps, abs=TOL_GEOM)
    constant = sample_map_on_grid(ConstantMap(np.array([0.2, 0.1])), 2, 0.25)
    assert image_diameter(constant) == 0.0


def test_step_and_extremal_agree_in_dim1():
    step = StepMap1D(1.0)
    low = ExtremalMap(dim=1, eps=1.0)                  # origin goes to vertex -1
    high = ExtremalMap(dim=1, eps=1.0, tie_break="highest_index")
    xs = np.linspace(-1.0, 1.0, 81)
    for x in xs:
        assert low(np.array([x]))[0] == step(float(x))
        if x != 0.0:
            assert high(np.array([x]))[0] == step(float(x))
    assert high(np.array([0.0]))[0] == -step(0.0)      # they differ only at 0


def test_extremal_min_displacement_respects_bound():
    # no grid point moves by less than eps/jung_radius(dim)
    for n, ppa in ((1, 401), (2, 101), (3, 41)):
        m = ExtremalMap(dim=n, eps=1.0)
        axis = np.linspace(-1, 1, ppa)
        grids = np.meshgrid(*([axis] * n), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        pts = pts[np.linalg.norm(pts, axis=1) <= 1.0]
        disp = np.linalg.norm(pts - m.batch(pts), axis=1)
        assert disp.min() >= 1.0 / jung_radius(n) - TOL_GEOM


# --- sampled maps and the modulus --------------------------------------------


def test_sampled_map_validation():
    with pytest.raises(DomainError):
        SampledMap(np.array([[1.5]]), np.array([[0.0]]), covering_radius=0.1)
    with pytest.raises(DomainError):
        SampledMap(np.array([[0.5]]), np.array([[1.5]]), covering_radius=0.1)
    with pytest.raises(ValueError):
        SampledMap(np.array([[0.5]]), np.array([[0.0], [0.1]]), covering_radius=0.1)


def test_sampled_map_covering_probe():
    sm = sample_map_on_grid(StepMap1D(1.0), 1, 0.01)
    assert sm.check_covering(probes=2000) <= sm.covering_radius


def test_modulus_estimate_examples():
    constant = sample_map_on_grid(ConstantMap(np.zeros(1)), 1, 0.05)
    assert modulus_estimate(constant, 0.3).value == 0.0

    step = sample_map_on_grid(StepMap1D(1.0), 1, 0.01, eps=1.0)
    assert modulus_estimate(step, 0.05).value == pytest.approx(1.0, abs=TOL_GEOM)

    positive = SampledMap(step.points[step.points[:, 0] > 0],
                          step.values[step.points[:, 0] > 0],
                          covering_radius=1.0)
    assert modulus_estimate(positive, 0.05).value == 0.0


def test_modulus_estimate_monotone_in_radius():
    step = sample_map_on_grid(StepMap1D(1.0), 1, 0.02)
    values = [modulus_estimate(step, r).value for r in (0.01, 0.05, 0.1, 0.5, 1.0)]
    assert values == sorted(values)
    assert max(values) <= image_diameter(step) + TOL_GEOM


def test_modulus_estimate_rejects_bad_radius():
    step = sample_map_on_grid(StepMap1D(1.0), 1, 0.1)
    with pytest.raises(DomainError):
        modulus_estimate(step, 0.0)


# --- 1-D discontinuity witness -----------------------------------------------


@pytest.fixture(scope="module")
def step_grid():
    return sample_map_on_grid(StepMap1D(1.0), 1, 0.01, eps=1.0)


def test_witness_found_below_half_eps(step_grid):
    w = discontinuity_witness_1d(step_grid, 0.45, 0.0101)
    assert w is not None
    assert w.right_point == pytest.approx(0.0, abs=1e-12)
    assert w.left_point == pytest.approx(0.01, abs=1e-9)
    assert w.image_gap == pytest.approx(1.0, abs=1e-12)
    gap_bound = 2 * 0.45 - abs(w.left_point - w.right_point)
    assert w.image_gap > gap_bound


def test_no_witness_above_half_eps(step_grid):
    # above eps/2 the grid contains displaced-by-at-most-eps_prime samples,
    # so no adjacent opposite-mover pair exists
    for eps_prime in (0.55, 0.6):
        assert discontinuity_witness_1d(step_grid, eps_prime, 0.0101) is None
        fixed = eps_fixed_indices(step_grid, eps_prime)
        assert fixed.size > 0
        xs = step_grid.points[fixed, 0]
        assert np.all(np.abs(xs) <= eps_prime - 0.5 + 1e-12)


def test_witness_none_when_one_side_empty():
    class Clamp:
        def batch(self, xs):
            return np.clip(xs + 0.9, -1.0, 1.0)

    sm = sample_map_on_grid(Clamp(), 1, 0.01)
    assert discontinuity_witness_1d(sm, 0.5, 0.011) is None
    fixed = eps_fixed_indices(sm, 0.5)
    assert fixed.size > 0
    # the right boundary point is exactly fixed
    assert np.any(np.isclose(sm.points[fixed, 0], 1.0))


def test_witness_dimension_and_argument_errors(step_grid):
    sm2 = sample_map_on_grid(ConstantMap(np.zeros(2)), 2, 0.5)
    with pytest.raises(InvalidDimensionError):
        discontinuity_witness_1d(sm2, 0.4, 0.1)
    with pytest.raises(DomainError):
        discontinuity_witness_1d(step_grid, -0.1, 0.1)
    with pytest.raises(DomainError):
        discontinuity_witness_1d(step_grid, 0.4, 0.0)


@settings(max_examples=60, deadline=None)
@given(
    eps=st.floats(min_value=0.2, max_value=2.0),
    ratio=st.floats(min_value=0.05, max_value=0.95),
)
def test_witness_inequality_whenever_found(eps, ratio):
    # whichever outcome, a returned witness always satisfies the two-sided
    # displacement rearrangement
    eps_prime = ratio * eps / 2.0
    sm = sample_map_on_grid(StepMap1D(eps), 1, 0.01, eps=eps)
    w = discontinuity_witness_1d(sm, eps_prime, 0.0101)
    assert w is not None  # below eps/2 the step map has no near-fixed samples
    assert w.image_gap > 2 * eps_prime - abs(w.left_point - w.right_point)

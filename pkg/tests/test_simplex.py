import math

import numpy as np
import pytest
from hypothesis import given, settings

from simplex_cluster.exceptions import (
    DimensionTooSmall,
    EmptyCluster,
    NegativeComponent,
    SumOutOfTolerance,
    ThetaOutOfRange,
)
from simplex_cluster.simplex import (
    check_simplex_array,
    entropy,
    is_absolute_margin,
    mean,
    smooth,
    uniform_center,
    validate,
)

from conftest import prob_vectors, random_simplex


def test_validate_accepts_simplex_point():
    v = validate([0.2, 0.3, 0.5])
    assert v.tolist() == [0.2, 0.3, 0.5]
    assert not v.flags.writeable


@pytest.mark.parametrize("raw, exc", [
    ([0.2, 0.3, 0.4], SumOutOfTolerance),
    ([0.5, -0.1, 0.6], NegativeComponent),
    ([1.0], DimensionTooSmall),
])
def test_validate_rejects(raw, exc):
    with pytest.raises(exc):
        validate(raw)


def test_validate_renormalizes_within_tolerance():
    v = validate([0.5, 0.5 + 5e-10])
    assert v.sum() == pytest.approx(1.0, abs=1e-15)


def test_check_simplex_array_reports_row():
    with pytest.raises(SumOutOfTolerance, match="row 1"):
        check_simplex_array([[0.5, 0.5], [0.5, 0.6]])


def test_entropy_examples():
    assert entropy(uniform_center(3)) == pytest.approx(math.log(3), abs=1e-15)
    assert entropy([1.0, 0.0, 0.0]) == 0.0
    v = [0.5, 0.25, 0.25]
    by_terms = -sum(p * math.log(p) for p in v)
    assert entropy(v) == pytest.approx(by_terms, abs=1e-15)
    assert entropy(v) == pytest.approx(1.0397208, abs=1e-7)


@pytest.mark.parametrize("m", range(2, 21))
def test_uniform_entropy_is_log_m(m):
    u = uniform_center(m)
    assert np.all(u == 1.0 / m)
    assert entropy(u) == pytest.approx(math.log(m), rel=1e-14)


def test_uniform_center_small_m():
    assert uniform_center(2).tolist() == [0.5, 0.5]
    with pytest.raises(DimensionTooSmall):
        uniform_center(1)


@given(prob_vectors())
def test_entropy_bounds(v):
    h = entropy(v)
    assert -1e-15 <= h <= math.log(len(v)) + 1e-12


def test_smooth_examples():
    v = np.array([1.0, 0.0, 0.0])
    np.testing.assert_allclose(smooth(v, 0.0), [1 / 3] * 3, rtol=0, atol=1e-16)
    assert smooth(v, 1.0).tolist() == [1.0, 0.0, 0.0]
    expected = [0.9 * 1 + 0.1 / 3, 0.1 / 3, 0.1 / 3]
    np.testing.assert_allclose(smooth(v, 0.9), expected, rtol=0, atol=1e-15)
    np.testing.assert_allclose(smooth(v, 0.9), [0.9333333333, 0.0333333333, 0.0333333333], atol=1e-9)


def test_smooth_rejects_theta():
    with pytest.raises(ThetaOutOfRange):
        smooth([0.5, 0.5], 1.5)
    with pytest.raises(ThetaOutOfRange):
        smooth([0.5, 0.5], -0.1)


@settings(max_examples=200)
@given(prob_vectors())
def test_smooth_is_affine_and_interior(v):
    for theta in (0.0, 0.3, 0.99):
        s = smooth(v, theta)
        m = len(v)
        np.testing.assert_allclose(s, theta * v + (1 - theta) / m, rtol=0, atol=1e-15)
        assert s.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(s >= (1 - theta) / m - 1e-15)
        assert not is_absolute_margin(s)


def test_mean_examples():
    np.testing.assert_allclose(mean([[1, 0, 0], [0, 1, 0]]), [0.5, 0.5, 0.0])
    v = np.array([0.1, 0.2, 0.7])
    np.testing.assert_allclose(mean([v]), v, rtol=0, atol=1e-16)
    pts = [[0.2, 0.8], [0.6, 0.4], [0.7, 0.3]]
    direct = [(0.2 + 0.6 + 0.7) / 3, (0.8 + 0.4 + 0.3) / 3]
    np.testing.assert_allclose(mean(pts), direct, atol=1e-15)
    np.testing.assert_allclose(mean(pts), [0.5, 0.5], atol=1e-15)


def test_mean_empty():
    with pytest.raises(EmptyCluster):
        mean(np.empty((0, 3)))


def test_mean_closure_on_random_multisets(rng):
    for _ in range(1000):
        m = int(rng.integers(2, 10))
        pts = random_simplex(rng, int(rng.integers(1, 20)), m, 0.3)
        pts[rng.random(pts.shape) < 0.2] = 0.0
        pts[pts.sum(axis=1) == 0, 0] = 1.0
        pts /= pts.sum(axis=1, keepdims=True)
        q = mean(pts)
        assert np.all(q >= 0)
        assert abs(q.sum() - 1) <= 1e-12


def test_absolute_margin_partition():
    assert is_absolute_margin([0.5, 0.5, 0.0])
    assert not is_absolute_margin([0.2, 0.3, 0.5])
    np.testing.assert_array_equal(is_absolute_margin([[1.0, 0.0], [0.4, 0.6]]), [True, False])

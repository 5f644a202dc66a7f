"""Tests for manifolds/sphere.py"""

import math

import numpy as np
import pytest

from eigenbound.manifolds import make_manifold
from eigenbound.manifolds.sphere import fejer_rule


@pytest.mark.parametrize("n", [2, 3])
def test_correction_k_closed_form(n):
    sphere = make_manifold(f"s{n}")
    r = np.array([0.01, 0.049, 0.051, 0.3, 1.0, 2.5])
    expected = (n - 1) * (1 / r - 1 / np.tan(r))
    np.testing.assert_allclose(sphere.correction_k(r), expected, rtol=1e-9, atol=1e-12)


def test_correction_k_continuous_at_series_switch():
    sphere = make_manifold("s2")
    below, above = sphere.correction_k(np.array([0.05 - 1e-9, 0.05 + 1e-9]))
    assert below == pytest.approx(above, abs=1e-8)


def test_correction_k_positive():
    sphere = make_manifold("s3")
    r = np.linspace(0.001, 3.0, 100)
    assert np.all(sphere.correction_k(r) > 0)


def test_mean_radius_limit():
    assert make_manifold("s2").geometry.mean_radius_limit == pytest.approx(math.pi / 2)
    assert make_manifold("t2").geometry.mean_radius_limit == pytest.approx(math.pi)


def test_scan_grid_includes_poles():
    grid = make_manifold("s2").scan_grid(16)
    np.testing.assert_allclose(np.linalg.norm(grid, axis=-1), 1.0)
    assert any(np.allclose(p, [0, 0, 1]) for p in grid)
    assert any(np.allclose(p, [0, 0, -1]) for p in grid)


def test_s3_scan_grid_on_sphere():
    grid = make_manifold("s3").scan_grid(16)
    np.testing.assert_allclose(np.linalg.norm(grid, axis=-1), 1.0)


@pytest.mark.parametrize("n", [2, 3])
def test_random_points_are_unit(n, data_generator):
    points = make_manifold(f"s{n}").random_points(data_generator.rng, 50)
    np.testing.assert_allclose(np.linalg.norm(points, axis=-1), 1.0)


def test_distance_antipodal():
    sphere = make_manifold("s2")
    pole = sphere.default_center()
    assert sphere.distance(pole, -pole) == pytest.approx(math.pi)


def test_fejer_rule_integrates_polynomials():
    t, w = fejer_rule(12)
    assert np.sum(w) == pytest.approx(2.0)
    assert np.dot(w, t**2) == pytest.approx(2 / 3)
    assert np.dot(w, t**4) == pytest.approx(2 / 5)


def test_s3_sphere_integrates_first_moments(data_generator):
    """The direction quadrature integrates linear functions to zero."""
    sphere = make_manifold("s3")
    center = data_generator.random_sphere_point(3)
    quadrature = sphere.geodesic_sphere(center, 0.4, 200)
    moments = quadrature.weights @ (quadrature.nodes - math.cos(0.4) * center)
    np.testing.assert_allclose(moments, 0.0, atol=1e-12)


def test_tangent_frame_orthonormal(data_generator):
    sphere = make_manifold("s3")
    center = data_generator.random_sphere_point(3)
    frame = sphere.tangent_frame(center)
    np.testing.assert_allclose(frame.T @ frame, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(center @ frame, 0.0, atol=1e-12)

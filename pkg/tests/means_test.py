"""Tests for means.py"""

import math

import numpy as np
import pytest

from eigenbound import means, specialfun
from eigenbound.eigenfunctions import Frequency, Zonal, eigenfunction
from eigenbound.manifolds import RadiusOutOfRangeError, make_manifold


@pytest.fixture
def torus():
    return make_manifold("t2")


def test_flat_mean_value_property(torus, data_generator):
    for _ in range(5):
        psi = eigenfunction(
            torus, Frequency(data_generator.random_frequency(), phase=0.7)
        )
        x = data_generator.random_torus_point()
        r = data_generator.random_radius()
        mean = means.spherical_mean(torus, psi, x, r, m=512)
        expected = specialfun.bessel_j(0, psi.lam * r) * float(psi(x))
        assert mean == pytest.approx(expected, abs=1e-10)


def test_s2_zonal_means(data_generator):
    sphere = make_manifold("s2")
    psi = eigenfunction(sphere, Zonal(10))
    x = data_generator.random_sphere_point(2)
    for r in (0.05, 0.3, 1.0):
        mean = means.spherical_mean(sphere, psi, x, r, m=256)
        expected = specialfun.legendre(10, math.cos(r)) * float(psi(x))
        assert mean == pytest.approx(expected, abs=1e-10)


def test_s3_zonal_means(data_generator):
    sphere = make_manifold("s3")
    psi = eigenfunction(sphere, Zonal(6))
    x = data_generator.random_sphere_point(3)
    for r in (0.1, 0.6):
        mean = means.spherical_mean(sphere, psi, x, r, m=512)
        expected = math.sin(7 * r) / (7 * math.sin(r)) * float(psi(x))
        assert mean == pytest.approx(expected, abs=1e-10)


def test_square_mean_at_flat_maximum(torus):
    psi = eigenfunction(torus, Frequency((3, 4)))
    r = 0.2
    mean = means.spherical_mean(torus, psi, np.zeros(2), r, m=512, power=2)
    expected = (1 + specialfun.bessel_j(0, 2 * psi.lam * r)) / 2
    assert mean == pytest.approx(expected, abs=1e-10)


def test_mean_linear_ratio(torus):
    psi = eigenfunction(torus, Frequency((5, 0)))
    r = 0.1
    ratio = means.mean_linear_ratio(torus, psi, np.array([0.3, 1.0]), r, m=512)
    assert ratio == pytest.approx(2 * specialfun.bessel_j(0, 5 * r) ** 2, abs=1e-9)


def test_mean_profile_grid(torus):
    psi = eigenfunction(torus, Frequency((3, 4)))
    profile = means.mean_profile(torus, psi, np.zeros(2), r_max=0.2, grid_size=20)
    assert profile.radii.shape == (20,)
    assert profile.step == pytest.approx(0.01)
    assert profile.radii[-1] == pytest.approx(0.2)
    assert profile.origin_value == pytest.approx(1.0)
    radii, values = profile.with_origin()
    assert radii[0] == 0.0 and values[0] == profile.origin_value
    assert len(radii) == 21


def test_mean_profile_rejects_small_power(torus):
    psi = eigenfunction(torus, Frequency((1, 0)))
    with pytest.raises(ValueError):
        means.mean_profile(torus, psi, np.zeros(2), power=0.5)


def test_mean_profile_radius_range(torus):
    psi = eigenfunction(torus, Frequency((1, 0)))
    with pytest.raises(RadiusOutOfRangeError):
        means.mean_profile(torus, psi, np.zeros(2), r_max=4.0)


def test_extrapolate_origin(torus):
    psi = eigenfunction(torus, Frequency((3, 4)))
    profile = means.mean_profile(torus, psi, np.zeros(2), r_max=0.05, grid_size=16)
    assert means.extrapolate_origin(profile) == pytest.approx(1.0, abs=1e-9)


def test_epd_residual_eigen_mode(torus, data_generator):
    psi = eigenfunction(torus, Frequency((3, 4), phase=0.2))
    profile = means.mean_profile(
        torus, psi, data_generator.random_torus_point(), r_max=0.2, grid_size=64
    )
    residual = means.epd_residual(profile, torus.geometry, psi.lam, "eigen")
    assert np.max(np.abs(residual)) <= 1e-3 * psi.lam**2


def test_epd_residual_square_mode_non_negative(torus, data_generator):
    psi = eigenfunction(torus, Frequency((3, 4), phase=0.2))
    x = data_generator.random_torus_point()
    profile = means.mean_profile(torus, psi, x, power=2, r_max=0.2, grid_size=64)
    residual = means.epd_residual(profile, torus.geometry, psi.lam, "square")
    assert np.min(residual) >= -1e-3 * psi.lam**2


def test_epd_residual_second_order(torus):
    psi = eigenfunction(torus, Frequency((5, 0)))
    errors = []
    for grid_size in (16, 32, 64):
        profile = means.mean_profile(
            torus, psi, np.zeros(2), r_max=1 / psi.lam, grid_size=grid_size
        )
        residual = means.epd_residual(profile, torus.geometry, psi.lam, "eigen")
        errors.append(np.max(np.abs(residual)))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(orders >= 1.8)


def test_epd_residual_unknown_mode(torus):
    psi = eigenfunction(torus, Frequency((1, 0)))
    profile = means.mean_profile(torus, psi, np.zeros(2), r_max=0.2, grid_size=16)
    with pytest.raises(ValueError):
        means.epd_residual(profile, torus.geometry, psi.lam, "cube")


def test_radial_derivatives_need_enough_points(torus):
    psi = eigenfunction(torus, Frequency((1, 0)))
    profile = means.mean_profile(torus, psi, np.zeros(2), r_max=0.2, grid_size=3)
    with pytest.raises(means.GridError):
        means.radial_derivatives(profile)


def test_divergence_identity(torus):
    psi = eigenfunction(torus, Frequency((3, 4)))
    assert means.divergence_identity_check(torus, psi, np.zeros(2), 0.3) <= 1e-4


def test_divergence_identity_coarse_step(torus):
    psi = eigenfunction(torus, Frequency((3, 4)))
    with pytest.raises(means.GridError):
        means.divergence_identity_check(torus, psi, np.zeros(2), 0.3, step=0.1)


def test_locate_max_zonal_plateau():
    sphere = make_manifold("s2")
    location = means.locate_max(
        sphere, eigenfunction(sphere, Zonal(10)), coarse_size=16
    )
    assert location.value == pytest.approx(1.0, abs=1e-12)
    assert location.plateau


def test_locate_max_frequency(torus):
    location = means.locate_max(
        torus, eigenfunction(torus, Frequency((3, 4), phase=0.4)), coarse_size=16
    )
    assert location.value == pytest.approx(1.0, abs=1e-9)


def test_locate_max_without_candidates(torus):
    peak = np.array([1.0, 2.0])

    def bump(x):
        return np.exp(-np.sum((x - peak) ** 2, axis=-1))

    location = means.locate_max(torus, bump, coarse_size=16)
    assert location.value == pytest.approx(1.0, abs=1e-8)
    np.testing.assert_allclose(location.point, peak, atol=1e-3)
    assert not location.plateau


def test_locate_max_against_dense_grid(torus):
    def wave(x):
        return np.cos(3 * x[..., 0]) + 0.5 * np.cos(4 * x[..., 1])

    axis = 2 * math.pi * np.arange(512) / 512
    dense = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
    oracle = float(np.max(np.abs(wave(dense))))
    location = means.locate_max(torus, wave)
    assert oracle == pytest.approx(1.5)
    assert location.value == pytest.approx(oracle, abs=1e-9)
    assert abs(float(wave(location.point))) == pytest.approx(location.value, abs=1e-12)


def test_default_node_count():
    assert means.default_node_count(1.0, 0.5) == 256
    assert means.default_node_count(100.0, 1.0) == 800

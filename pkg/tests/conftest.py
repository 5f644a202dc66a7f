"""Shared fixtures for running tests"""

import helpers
import numpy as np
import pytest

from eigenbound.manifolds import make_manifold


class DataGenerator:
    """Seeded random draws, so failures reproduce."""

    rng = np.random.default_rng(20240611)

    @classmethod
    def reseed(cls, seed=20240611):
        cls.rng = np.random.default_rng(seed)

    @classmethod
    def random_frequency(cls, max_norm=12):
        while True:
            k = cls.rng.integers(-max_norm, max_norm + 1, size=2)
            if 0 < np.linalg.norm(k) <= max_norm:
                return k

    @classmethod
    def random_torus_point(cls):
        return make_manifold("t2").random_points(cls.rng, 1)[0]

    @classmethod
    def random_sphere_point(cls, n=2):
        return make_manifold(f"s{n}").random_points(cls.rng, 1)[0]

    @classmethod
    def random_radius(cls, low=0.01, high=0.4):
        return float(cls.rng.uniform(low, high))


@pytest.fixture
def data_generator():
    DataGenerator.reseed()
    return DataGenerator


@pytest.fixture(params=["t2", "s2", "s3"])
def manifold(request):
    return make_manifold(request.param)


@pytest.fixture
def quick_env():
    """Smaller default grids for tests that run whole sweeps."""
    with helpers.utils.eigenbound_env(
        profile_points=128, scan_size=32, series_points=2048
    ):
        yield

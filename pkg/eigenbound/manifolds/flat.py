"""The flat square torus of side 2 pi and the Euclidean plane patch."""

import math

import numpy as np

from eigenbound.manifolds.base import (
    GeodesicSphereQuadrature,
    ModelManifold,
    VolumeGeometry,
)

SIDE = 2 * math.pi
MIN_SPHERE_NODES = 16


class FlatGeometry(VolumeGeometry):
    def __init__(self, r_inj: float = math.pi):
        super().__init__(n=2, r_inj=r_inj)

    def h_at(self, r):
        return 2 * math.pi * np.asarray(r, dtype=np.float64)

    def g_at(self, r):
        return 1.0 / np.asarray(r, dtype=np.float64)

    def c_at(self, r):
        return np.zeros_like(np.asarray(r, dtype=np.float64))

    def ball_volume_at(self, r):
        return math.pi * np.asarray(r, dtype=np.float64) ** 2


def check_node_count(m: int) -> int:
    if m < MIN_SPHERE_NODES:
        raise ValueError(
            f"Sphere quadratures need at least {MIN_SPHERE_NODES} nodes, got {m}."
        )
    return int(m)


class FlatTorus(ModelManifold):
    """R^2 / (2 pi Z)^2 with points stored as periodic coordinates in [0, 2 pi)^2."""

    name = "t2"
    n = 2
    total_volume = SIDE**2

    def __init__(self):
        super().__init__(FlatGeometry())

    @property
    def ambient_dim(self) -> int:
        return 2

    def wrap(self, points):
        return np.mod(points, SIDE)

    def default_center(self):
        return np.zeros(2)

    def distance(self, p, q):
        delta = np.mod(np.asarray(p) - np.asarray(q) + math.pi, SIDE) - math.pi
        return np.linalg.norm(delta, axis=-1)

    def geodesic_sphere(self, center, r, m):
        r = float(self.geometry.check_radius(r))
        m = check_node_count(m)
        phi = 2 * math.pi * np.arange(m) / m
        directions = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        nodes = self.wrap(np.asarray(center, dtype=np.float64) + r * directions)
        weights = np.full(m, float(self.geometry.h_at(r)) / m)
        return GeodesicSphereQuadrature(
            center=center, radius=r, nodes=nodes, weights=weights
        )

    def chart(self, center):
        center = np.asarray(center, dtype=np.float64)
        return lambda y: self.wrap(center + y)

    def scan_grid(self, size):
        axis = SIDE * np.arange(size) / size
        x, y = np.meshgrid(axis, axis, indexing="ij")
        return np.stack([x.ravel(), y.ravel()], axis=-1)

    def random_points(self, rng, count):
        return rng.uniform(0.0, SIDE, size=(count, 2))

    def laplacian(self, f, points, step):
        points = np.asarray(points, dtype=np.float64)
        total = -2 * self.n * f(points)
        for axis in range(self.n):
            shift = np.zeros(self.n)
            shift[axis] = step
            total = total + f(self.wrap(points + shift)) + f(self.wrap(points - shift))
        return total / step**2

    def l2_quadrature(self, f, resolution):
        # The trapezoid rule on the period cell is spectrally accurate.
        points = self.scan_grid(resolution)
        cell = (SIDE / resolution) ** 2
        return float(np.sum(f(points) ** 2) * cell)


class EuclideanPatch(FlatTorus):
    """The square [0, 2 pi)^2 of the plane without identifications, used for oracles."""

    name = "e2"

    def wrap(self, points):
        return np.asarray(points, dtype=np.float64)

    def distance(self, p, q):
        return np.linalg.norm(np.asarray(p) - np.asarray(q), axis=-1)

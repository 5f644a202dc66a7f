"""Unit round spheres S^2 and S^3, points stored as ambient unit vectors."""

import math
from abc import abstractmethod

import numpy as np
import scipy.linalg

from eigenbound.manifolds.base import (
    GeodesicSphereQuadrature,
    ModelManifold,
    VolumeGeometry,
)
from eigenbound.manifolds.flat import check_node_count

# Measure of the unit sphere S^(n-1) of directions.
DIRECTION_MEASURE = {2: 2 * math.pi, 3: 4 * math.pi}
# Below this radius cot(r) - 1/r is summed from its Taylor series.
_SERIES_RADIUS = 0.05
DEFAULT_DIRECTION_NODES = 1152


class SphereGeometry(VolumeGeometry):
    def __init__(self, n: int):
        super().__init__(n=n, r_inj=math.pi)
        self._omega = DIRECTION_MEASURE[n]

    def h_at(self, r):
        return self._omega * np.sin(np.asarray(r, dtype=np.float64)) ** (self.n - 1)

    def g_at(self, r):
        return (self.n - 1) / np.tan(np.asarray(r, dtype=np.float64))

    def c_at(self, r):
        r = np.asarray(r, dtype=np.float64)
        out = np.empty_like(r)
        small = r < _SERIES_RADIUS
        s = r[small]
        out[small] = -(s / 3 + s**3 / 45 + 2 * s**5 / 945 + s**7 / 4725)
        out[~small] = 1 / np.tan(r[~small]) - 1 / r[~small]
        return (self.n - 1) * out

    def ball_volume_at(self, r):
        r = np.asarray(r, dtype=np.float64)
        if self.n == 2:
            return 2 * math.pi * (1 - np.cos(r))
        return math.pi * (2 * r - np.sin(2 * r))

    @property
    def mean_radius_limit(self) -> float:
        return min(self.r_inj, math.pi / 2)


def fejer_rule(k: int):
    """Nodes and weights of the first Fejer rule on [-1, 1] with k points."""
    theta = (2 * np.arange(k) + 1) * math.pi / (2 * k)
    j = np.arange(1, k // 2 + 1)
    sums = np.sum(np.cos(2 * np.outer(theta, j)) / (4 * j**2 - 1), axis=1)
    return np.cos(theta), 2.0 / k * (1 - 2 * sums)


def polar_points(t, phi):
    """Points of S^2 from the cosine of the polar angle and the azimuth."""
    s = np.sqrt(np.clip(1 - t**2, 0.0, None))
    return np.stack([s * np.cos(phi), s * np.sin(phi), t], axis=-1)


class RoundSphere(ModelManifold):
    """Shared machinery of the unit spheres; subclasses fix the dimension."""

    def __init__(self):
        super().__init__(SphereGeometry(self.n))

    @property
    def ambient_dim(self) -> int:
        return self.n + 1

    def default_center(self):
        pole = np.zeros(self.ambient_dim)
        pole[-1] = 1.0
        return pole

    def normalize(self, points):
        points = np.asarray(points, dtype=np.float64)
        return points / np.linalg.norm(points, axis=-1, keepdims=True)

    def distance(self, p, q):
        # The chordal form keeps full accuracy at small distances.
        chord = np.linalg.norm(np.asarray(p) - np.asarray(q), axis=-1)
        return 2 * np.arcsin(np.clip(chord / 2, 0.0, 1.0))

    def tangent_frame(self, center):
        """Orthonormal basis of the tangent space at center, shape (n + 1, n)."""
        return scipy.linalg.null_space(np.asarray(center, dtype=np.float64)[None, :])

    def chart(self, center):
        center = np.asarray(center, dtype=np.float64)
        frame = self.tangent_frame(center)

        def exponential(y):
            v = np.asarray(y, dtype=np.float64) @ frame.T
            length = np.linalg.norm(v, axis=-1, keepdims=True)
            return np.cos(length) * center + np.sinc(length / math.pi) * v

        return exponential

    @abstractmethod
    def unit_directions(self, m: int):
        """Directions in R^n with weights summing to the measure of S^(n-1)."""

    def geodesic_sphere(self, center, r, m):
        r = float(self.geometry.check_radius(r))
        m = check_node_count(m)
        center = np.asarray(center, dtype=np.float64)
        directions, direction_weights = self.unit_directions(m)
        tangent = directions @ self.tangent_frame(center).T
        nodes = math.cos(r) * center + math.sin(r) * tangent
        weights = direction_weights * math.sin(r) ** (self.n - 1)
        return GeodesicSphereQuadrature(
            center=center, radius=r, nodes=nodes, weights=weights
        )

    def random_points(self, rng, count):
        return self.normalize(rng.standard_normal(size=(count, self.ambient_dim)))

    def laplacian(self, f, points, step):
        # Ambient Laplacian of the degree zero homogeneous extension f(x / |x|).
        points = self.normalize(points)

        def extended(x):
            return f(self.normalize(x))

        total = -2 * self.ambient_dim * f(points)
        for axis in range(self.ambient_dim):
            shift = np.zeros(self.ambient_dim)
            shift[axis] = step
            total = total + extended(points + shift) + extended(points - shift)
        return total / step**2


class RoundSphere2(RoundSphere):
    name = "s2"
    n = 2
    total_volume = 4 * math.pi

    def unit_directions(self, m):
        phi = 2 * math.pi * np.arange(m) / m
        directions = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        return directions, np.full(m, 2 * math.pi / m)

    def scan_grid(self, size):
        theta = math.pi * np.arange(1, size - 1) / (size - 1)
        phi = 2 * math.pi * np.arange(2 * size) / (2 * size)
        t, p = np.meshgrid(np.cos(theta), phi, indexing="ij")
        body = polar_points(t.ravel(), p.ravel())
        poles = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
        return np.concatenate([poles, body])

    def l2_quadrature(self, f, resolution):
        t, w = np.polynomial.legendre.leggauss(resolution)
        n_phi = 2 * resolution
        phi = 2 * math.pi * np.arange(n_phi) / n_phi
        tt, pp = np.meshgrid(t, phi, indexing="ij")
        values = f(polar_points(tt, pp)) ** 2
        return float(np.sum(w[:, None] * values) * 2 * math.pi / n_phi)


class RoundSphere3(RoundSphere):
    name = "s3"
    n = 3
    total_volume = 2 * math.pi**2

    def unit_directions(self, m):
        # A product Fejer x trapezoid grid of k x 2k nodes on the sphere of directions.
        k = math.ceil(math.sqrt(m / 2))
        t, w = fejer_rule(k)
        phi = 2 * math.pi * np.arange(2 * k) / (2 * k)
        tt, pp = np.meshgrid(t, phi, indexing="ij")
        weights = np.repeat(w, 2 * k) * (math.pi / k)
        return polar_points(tt.ravel(), pp.ravel()), weights

    def _hyperspherical(self, chi, t, phi):
        inner = polar_points(t, phi)
        return np.concatenate(
            [np.cos(chi)[..., None], np.sin(chi)[..., None] * inner], axis=-1
        )

    def scan_grid(self, size):
        size = max(size // 2, 4)
        chi = math.pi * np.arange(size) / (size - 1)
        t = np.cos(math.pi * np.arange(size) / (size - 1))
        phi = 2 * math.pi * np.arange(2 * size) / (2 * size)
        grid = self._hyperspherical(*np.meshgrid(chi, t, phi, indexing="ij"))
        # Angular grids repeat points at the coordinate singularities.
        return np.unique(np.round(grid.reshape(-1, 4), 12), axis=0)

    def l2_quadrature(self, f, resolution):
        x, wx = np.polynomial.legendre.leggauss(resolution)
        chi = math.pi * (x + 1) / 2
        w_chi = wx * math.pi / 2 * np.sin(chi) ** 2
        t, w_t = np.polynomial.legendre.leggauss(resolution)
        n_phi = 2 * resolution
        phi = 2 * math.pi * np.arange(n_phi) / n_phi
        cc, tt, pp = np.meshgrid(chi, t, phi, indexing="ij")
        values = f(self._hyperspherical(cc, tt, pp)) ** 2
        weights = w_chi[:, None, None] * w_t[None, :, None]
        return float(np.sum(weights * values) * 2 * math.pi / n_phi)

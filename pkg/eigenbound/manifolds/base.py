"""Base classes for model manifolds and the plugin lookup that finds them."""

import dataclasses
import functools
import logging
import math
import sys
from abc import ABCMeta, abstractmethod
from typing import Callable, Optional

import numpy as np

if sys.version_info < (3, 10):
    from importlib_metadata import entry_points
else:
    from importlib.metadata import entry_points

from eigenbound import utils
from eigenbound.types import Point

PLUGIN_GROUP = "eigenbound.plugins.manifolds"


class RadiusOutOfRangeError(ValueError):
    """A radius outside of (0, r_inj) or the range allowed for an operation."""


class UnknownManifoldError(ValueError):
    """No builtin or plugin manifold is registered under the requested id."""


class VolumeGeometry(metaclass=ABCMeta):
    """Radial volume data of a manifold whose geodesic balls depend only on radius.

    ``h_at(r)`` is the measure of the geodesic sphere of radius r, ``g_at`` its
    logarithmic derivative h'/h and ``c_at(r) = g(r) - (n - 1) / r`` the
    correction, which vanishes at 0.
    """

    def __init__(self, n: int, r_inj: float):
        self.n = n
        self.r_inj = r_inj

    @abstractmethod
    def h_at(self, r):
        """Surface measure of the geodesic sphere of radius r."""

    @abstractmethod
    def g_at(self, r):
        """Logarithmic derivative of h."""

    @abstractmethod
    def c_at(self, r):
        """g(r) - (n - 1) / r, continuous at 0 with value 0."""

    @abstractmethod
    def ball_volume_at(self, r):
        """Closed-form volume of the geodesic ball of radius r."""

    @property
    def mean_radius_limit(self) -> float:
        """Largest radius on which g stays positive and spheres stay embedded."""
        return self.r_inj

    def check_radius(self, r, limit: Optional[float] = None, allow_zero=False):
        limit = self.r_inj if limit is None else limit
        r = np.asarray(r, dtype=np.float64)
        low_ok = r >= 0 if allow_zero else r > 0
        if not np.all(low_ok & (r < limit)):
            raise RadiusOutOfRangeError(
                f"Radius {r} is outside of {'[' if allow_zero else '('}0, {limit})."
            )
        return r

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, r_inj={self.r_inj})"


@dataclasses.dataclass(frozen=True)
class GeodesicSphereQuadrature:
    """Nodes on a geodesic sphere and positive weights summing to h(radius)."""

    center: Point
    radius: float
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def average(self, values: np.ndarray) -> float:
        return self.integrate(values) / float(np.sum(self.weights))

    def __len__(self):
        return len(self.weights)


@utils.abstract_classattributes("name", "n", "total_volume")
class ModelManifold(metaclass=ABCMeta):
    """Abstract base class for the exact model manifolds.

    Points are numpy arrays with the point coordinates on the last axis, so a
    batch of points has shape ``(..., ambient_dim)``.
    """

    name: str = NotImplemented  # Plugin id of this manifold.
    n: int = NotImplemented  # Intrinsic dimension.
    total_volume: float = NotImplemented

    def __init__(self, geometry: VolumeGeometry):
        self.geometry = geometry

    @property
    @abstractmethod
    def ambient_dim(self) -> int:
        """Number of coordinates of a point."""

    @abstractmethod
    def default_center(self) -> Point:
        """A canonical base point (the pole of zonal families on spheres)."""

    @abstractmethod
    def distance(self, p: Point, q: Point) -> np.ndarray:
        """Geodesic distance between (batches of) points."""

    @abstractmethod
    def geodesic_sphere(
        self, center: Point, r: float, m: int
    ) -> GeodesicSphereQuadrature:
        """Quadrature on the geodesic sphere of radius r around center."""

    @abstractmethod
    def chart(self, center: Point) -> Callable[[np.ndarray], np.ndarray]:
        """Map local coordinates of shape (..., n) around center to points."""

    @abstractmethod
    def scan_grid(self, size: int) -> np.ndarray:
        """A coarse grid of points covering the manifold, shape (count, ambient_dim)."""

    @abstractmethod
    def random_points(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Uniformly distributed points."""

    @abstractmethod
    def laplacian(self, f, points: np.ndarray, step: float) -> np.ndarray:
        """Second order finite-difference Laplace-Beltrami operator of f at points."""

    @abstractmethod
    def l2_quadrature(self, f, resolution: int) -> float:
        """The integral of f^2 over the manifold by tensor-product quadrature."""

    def correction_k(self, r):
        """k(r) = (n - 1)/r - g(r), the negated correction, for 0 < r < r_inj."""
        r = self.geometry.check_radius(r)
        return -self.geometry.c_at(r)

    def __repr__(self):
        return f"{type(self).__name__}(name={self.name!r})"


def builtin_manifolds():
    from eigenbound.manifolds.flat import EuclideanPatch, FlatTorus
    from eigenbound.manifolds.sphere import RoundSphere2, RoundSphere3

    return {
        cls.name: cls for cls in (FlatTorus, EuclideanPatch, RoundSphere2, RoundSphere3)
    }


def get_manifold_class(manifold_id: str):
    """Get a manifold class by id from the builtins or installed plugins.

    Parameters
    ----------
    manifold_id
        Id of the manifold, builtins are ``t2``, ``s2``, ``s3`` and ``e2``.

    Returns
    -------
    type
        A subclass of `ModelManifold`, possibly defined in a user installed plugin.
    """
    builtins = builtin_manifolds()
    if manifold_id in builtins:
        return builtins[manifold_id]
    discovered_plugins = entry_points(group=PLUGIN_GROUP)
    if manifold_id not in discovered_plugins.names:
        raise UnknownManifoldError(
            f"Unknown manifold {manifold_id!r}, expected one of "
            f"{sorted(set(builtins) | set(discovered_plugins.names))}"
        )
    return discovered_plugins[manifold_id].load()


@functools.lru_cache(maxsize=None)
def make_manifold(manifold_id: str) -> ModelManifold:
    """Build (and cache) the model manifold registered under ``manifold_id``."""
    manifold = get_manifold_class(manifold_id)()
    logging.getLogger("eigenbound").debug(f"Built manifold {manifold}")
    return manifold


def geodesic_sphere(
    manifold: ModelManifold, center: Point, r: float, m: int
) -> GeodesicSphereQuadrature:
    return manifold.geodesic_sphere(center, r, m)


def correction_k(manifold: ModelManifold, r):
    return manifold.correction_k(r)


def l2_norm(manifold: ModelManifold, f, resolution: Optional[int] = None, exact=True):
    """The L^2(M) norm of f.

    Catalog eigenfunctions carry their exact squared norm which is returned
    directly unless ``exact`` is False; anything else is integrated with the
    manifold's tensor-product quadrature.

    Parameters
    ----------
    manifold
        The manifold f lives on.
    f
        A callable on batches of points, usually an `Eigenfunction`.
    resolution
        Number of quadrature nodes per polar direction, chosen from the
        frequency of f when None.
    exact
        Use the closed form of catalog families when available.
    """
    norm_squared = getattr(f, "norm_squared", None)
    if exact and norm_squared is not None:
        return math.sqrt(norm_squared)
    if resolution is None:
        lam = getattr(f, "lam", 0.0)
        resolution = max(64, 2 * math.ceil(lam) + 16)
    return math.sqrt(manifold.l2_quadrature(f, resolution))


def ball_volume(
    manifold: ModelManifold,
    center: Point,
    r: float,
    m: int = 64,
    radial_nodes: int = 32,
) -> float:
    """Volume of the geodesic ball from sphere quadratures over the radius."""
    manifold.geometry.check_radius(r)
    x, w = np.polynomial.legendre.leggauss(radial_nodes)
    radii = r * (x + 1) / 2
    areas = np.array(
        [np.sum(manifold.geodesic_sphere(center, rho, m).weights) for rho in radii]
    )
    return float(np.dot(w, areas) * r / 2)


def laplacian(
    manifold: ModelManifold, f, points: np.ndarray, step: float
) -> np.ndarray:
    return manifold.laplacian(f, points, step)


@dataclasses.dataclass(frozen=True)
class ResidualStudy:
    """Max-norm errors of a discrete eigen equation for a sequence of halved steps."""

    steps: np.ndarray
    errors: np.ndarray

    @property
    def orders(self) -> np.ndarray:
        return np.log(self.errors[:-1] / self.errors[1:]) / np.log(
            self.steps[:-1] / self.steps[1:]
        )


def eigen_residual(
    manifold: ModelManifold,
    eigenfunction,
    points: np.ndarray,
    steps=(0.04, 0.02, 0.01),
) -> ResidualStudy:
    """Measure max |Delta_h psi + lambda^2 psi| over points for each step."""
    values = eigenfunction(points)
    errors = [
        np.max(
            np.abs(
                manifold.laplacian(eigenfunction, points, step)
                + eigenfunction.lam**2 * values
            )
        )
        for step in steps
    ]
    return ResidualStudy(
        steps=np.asarray(steps, dtype=np.float64), errors=np.asarray(errors)
    )

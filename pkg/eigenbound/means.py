"""Spherical means over geodesic spheres and the checks built on them."""

import dataclasses
import logging
import math
from typing import Optional

import numpy as np
import scipy.integrate

from eigenbound import utils
from eigenbound.manifolds import ModelManifold, VolumeGeometry
from eigenbound.types import Point

MODES = ("eigen", "square")
PLATEAU_TOLERANCE = 1e-12
MIN_GRID_POINTS = 5


class GridError(ValueError):
    """A radius grid unusable for finite differences."""


@dataclasses.dataclass(frozen=True)
class MeanProfile:
    """Spherical means I(center, r_i) of |f|^q on a uniform grid r_i = i * step.

    q = 1 keeps the sign of f. ``origin_value`` is f(center)^q, the exact limit
    of the means at r = 0.
    """

    manifold: str
    center: Point
    power: float
    radii: np.ndarray
    values: np.ndarray
    node_count: int
    origin_value: float

    @property
    def step(self) -> float:
        return float(self.radii[1] - self.radii[0])

    def with_origin(self):
        """Radii and values with the r = 0 point prepended."""
        return (
            np.concatenate([[0.0], self.radii]),
            np.concatenate([[self.origin_value], self.values]),
        )


@dataclasses.dataclass(frozen=True)
class MaxLocation:
    point: Point
    value: float
    plateau: bool


def default_node_count(lam: float, r_max: float) -> int:
    """Sphere nodes that resolve the oscillation of a frequency lam up to r_max."""
    return max(256, 8 * math.ceil(lam * r_max))


def _power(values, q: float):
    return values if q == 1 else np.abs(values) ** q


def spherical_mean(
    manifold: ModelManifold,
    f,
    x: Point,
    r: float,
    m: Optional[int] = None,
    power: float = 1,
) -> float:
    """Average of |f|^power (f itself for power 1) over the geodesic sphere."""
    if m is None:
        m = default_node_count(getattr(f, "lam", 0.0), r)
    quadrature = manifold.geodesic_sphere(x, r, m)
    return quadrature.average(_power(f(quadrature.nodes), power))


def mean_profile(
    manifold: ModelManifold,
    f,
    x: Point,
    power: float = 1,
    r_max: float = 0.1,
    grid_size: Optional[int] = None,
    m: Optional[int] = None,
) -> MeanProfile:
    """Means of |f|^power on the grid r_i = i * r_max / grid_size, i = 1..grid_size.

    Raises
    ------
    ValueError
        If power < 1.
    RadiusOutOfRangeError
        If r_max is not inside (0, r_inj).
    """
    if power < 1:
        raise ValueError(f"Mean profiles need power >= 1, got {power}.")
    manifold.geometry.check_radius(r_max)
    grid_size = grid_size or utils.EnvVarConstants.PROFILE_POINTS
    if m is None:
        m = default_node_count(getattr(f, "lam", 0.0), r_max)
    radii = r_max * np.arange(1, grid_size + 1) / grid_size
    values = np.array(
        [spherical_mean(manifold, f, x, r, m, power=power) for r in radii]
    )
    origin_value = float(_power(np.asarray(f(np.asarray(x, dtype=np.float64))), power))
    return MeanProfile(
        manifold=manifold.name,
        center=np.asarray(x, dtype=np.float64),
        power=power,
        radii=radii,
        values=values,
        node_count=m,
        origin_value=origin_value,
    )


def extrapolate_origin(profile: MeanProfile, order: int = 4) -> float:
    """Estimate I(0) from the first points by a fit in r^2 (means are even in r)."""
    count = order // 2 + 1
    radii, values = profile.radii[:count], profile.values[:count]
    coefficients = np.polynomial.polynomial.polyfit(radii**2, values, count - 1)
    return float(coefficients[0])


def _check_grid(radii: np.ndarray) -> float:
    if len(radii) < MIN_GRID_POINTS:
        raise GridError(
            f"Finite differences need at least {MIN_GRID_POINTS} radii, "
            f"got {len(radii)}."
        )
    step = radii[0]
    if not np.allclose(np.diff(radii), step, rtol=1e-9, atol=0):
        raise GridError("Radius grid must be uniform and start at one step from 0.")
    return float(step)


def radial_derivatives(profile: MeanProfile):
    """I' and I'' at the profile radii.

    Centered differences use I(0) at the left end, where the even extension
    I(-h) = I(h) makes the stencil symmetric; the right end is one-sided and
    second order.
    """
    step = _check_grid(profile.radii)
    _, values = profile.with_origin()
    first = np.gradient(values, step, edge_order=2)[1:]
    second = np.empty_like(values)
    second[1:-1] = (values[2:] - 2 * values[1:-1] + values[:-2]) / step**2
    second[-1] = (
        2 * values[-1] - 5 * values[-2] + 4 * values[-3] - values[-4]
    ) / step**2
    return first, second[1:]


def epd_residual(
    profile: MeanProfile, geometry: VolumeGeometry, lam: float, mode: str
) -> np.ndarray:
    """The Euler-Poisson-Darboux expression of a mean profile.

    Parameters
    ----------
    profile
        Means of psi (mode ``eigen``) or psi^2 (mode ``square``).
    geometry
        Radial volume data of the manifold.
    lam
        Frequency of psi.
    mode
        ``eigen`` returns I'' + g I' + lam^2 I, which vanishes; ``square``
        returns I'' + g I' + 2 lam^2 I, which is non-negative.

    Returns
    -------
    np.ndarray
        The residual at each profile radius.
    """
    if mode not in MODES:
        raise ValueError(f"Unknown EPD mode {mode!r}, expected one of {MODES}.")
    first, second = radial_derivatives(profile)
    factor = 1.0 if mode == "eigen" else 2.0
    return (
        second
        + geometry.g_at(profile.radii) * first
        + factor * lam**2 * profile.values
    )


def divergence_identity_check(
    manifold: ModelManifold,
    f,
    x: Point,
    r: float,
    m: Optional[int] = None,
    step: float = 1e-3,
) -> float:
    """Relative gap in  int_0^r Delta I(rho) h(rho) d rho = h(r) I'(r).

    Delta I is replaced by -lam^2 I, valid for eigenfunctions since the
    Laplacian commutes with spherical means on the model manifolds.
    """
    lam = f.lam
    count = int(round(r / step))
    if count < MIN_GRID_POINTS:
        raise GridError(f"Step {step} is too coarse for radius {r}.")
    step = r / count
    # One point past r for the centered derivative.
    profile = mean_profile(
        manifold, f, x, power=1, r_max=r + step, grid_size=count + 1, m=m
    )
    radii, values = profile.with_origin()
    lhs = scipy.integrate.simpson(
        -(lam**2) * values[: count + 1] * manifold.geometry.h_at(radii[: count + 1]),
        x=radii[: count + 1],
    )
    slope = (values[count + 1] - values[count - 1]) / (2 * step)
    rhs = float(manifold.geometry.h_at(r)) * slope
    scale = 1e-8 * float(np.max(np.abs(values))) * float(manifold.geometry.h_at(r))
    error = abs(lhs - rhs) / (abs(rhs) + scale + np.finfo(float).tiny)
    logging.getLogger("eigenbound").debug(
        f"Divergence identity at r={r}: lhs={lhs:.6e}, rhs={rhs:.6e}, error={error:.3e}"
    )
    return float(error)


def mean_linear_ratio(
    manifold: ModelManifold, f, x: Point, r: float, m: Optional[int] = None
) -> float:
    """2 (I_f(x, r) / f(x))^2, equal to 2 J0(lam r)^2 for flat single frequencies."""
    center_value = float(f(np.asarray(x, dtype=np.float64)))
    return 2 * (spherical_mean(manifold, f, x, r, m) / center_value) ** 2


def _local_derivatives(F, y0, delta):
    """Central finite-difference gradient and Hessian of F at y0."""
    dim = len(y0)
    eye = np.eye(dim) * delta
    f0 = F(y0)
    gradient = np.array([(F(y0 + e) - F(y0 - e)) / (2 * delta) for e in eye])
    hessian = np.empty((dim, dim))
    for i in range(dim):
        hessian[i, i] = (F(y0 + eye[i]) - 2 * f0 + F(y0 - eye[i])) / delta**2
        for j in range(i + 1, dim):
            hessian[i, j] = hessian[j, i] = (
                F(y0 + eye[i] + eye[j])
                - F(y0 + eye[i] - eye[j])
                - F(y0 - eye[i] + eye[j])
                + F(y0 - eye[i] - eye[j])
            ) / (4 * delta**2)
    return f0, gradient, hessian


def refine_max(
    manifold: ModelManifold, f, seed: Point, delta: float, iterations: int = 40
):
    """Newton ascent of |f| in exponential or flat charts.

    Only steps that increase |f| are accepted.
    """
    point = np.asarray(seed, dtype=np.float64)
    best = abs(float(f(point)))
    for _ in range(iterations):
        chart = manifold.chart(point)

        def F(y):
            return abs(float(f(chart(y))))

        _, gradient, hessian = _local_derivatives(F, np.zeros(manifold.n), delta)
        if np.all(np.linalg.eigvalsh(hessian) < 0):
            move = -np.linalg.solve(hessian, gradient)
        else:
            move = gradient * delta / (np.linalg.norm(gradient) + np.finfo(float).tiny)
        improved = False
        for _ in range(20):
            candidate = chart(move)
            value = abs(float(f(candidate)))
            if value > best:
                point, best, improved = candidate, value, True
                break
            move = move / 2
        if not improved or np.linalg.norm(move) < 1e-13:
            break
    return point, best


def locate_max(
    manifold: ModelManifold, f, coarse_size: Optional[int] = None
) -> MaxLocation:
    """Find a point where |f| is maximal: coarse grid scan then local refinement.

    Known peak locations of catalog eigenfunctions (``f.peak_candidates``) are
    added to the seeds.  ``plateau`` is set when two or more scan points tie
    for the maximum within 1e-12.
    """
    coarse_size = coarse_size or utils.EnvVarConstants.SCAN_SIZE
    grid = manifold.scan_grid(coarse_size)
    values = np.abs(f(grid))
    top = float(np.max(values))
    plateau = int(np.sum(values >= top - PLATEAU_TOLERANCE)) >= 2
    seeds = [grid[int(np.argmax(values))]]
    candidates = getattr(f, "peak_candidates", None)
    if candidates is not None and np.size(candidates):
        seeds.extend(candidates)
    lam = max(getattr(f, "lam", 1.0), 1.0)
    # Grid spacing sets how far the coarse maximum can be from the true one.
    delta = min(1e-3, 0.1 / lam)
    best_point, best_value = None, -np.inf
    for seed in seeds:
        point, value = refine_max(manifold, f, seed, delta)
        if value > best_value:
            best_point, best_value = point, value
    if plateau:
        logging.getLogger("eigenbound").debug(
            f"Maximum of |f| on {manifold.name} is attained at several scan points."
        )
    return MaxLocation(point=best_point, value=best_value, plateau=plateau)

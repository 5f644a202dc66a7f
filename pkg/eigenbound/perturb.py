"""The rescaled radial equation and its perturbation series around the Bessel profile.

With rho = r sqrt(2) lam and eps = 1 / (sqrt(2) lam) the equation
J'' + g J' + 2 lam^2 J = 0 becomes

    K'' + ((n - 1) / rho) K' + K = eps k(eps rho) K',   k(r) = (n - 1) / r - g(r),

whose solution is expanded as K = K(0) sum_n eps^n v_n with v_0 the Bessel
profile and v_(n+1) solving the same operator forced by k v_n'.
"""

import dataclasses
import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.integrate
import scipy.interpolate
import scipy.optimize

from eigenbound import odecmp, specialfun, utils
from eigenbound.manifolds import VolumeGeometry

RHO_MAX = 1.5
MAX_ORDER = 12
LAMBDA_MIN = 10.0
LAMBDA_SWEEP = (10.0, 25.0, 50.0, 100.0, 200.0)
KAPPA_THRESHOLD = 0.75
KAPPA_SCAN_STEP = 0.05
SOLVE_STEP = 1e-3


class RescaleRangeError(ValueError):
    """The rescaled interval leaves the range where the geometry is valid."""


@dataclasses.dataclass(frozen=True)
class RescaledProblem:
    """K'' + ((n - 1)/rho) K' + K = epsilon k_at(rho) K' on [0, rho_max]."""

    n: int
    epsilon: float
    k_at: Callable[[np.ndarray], np.ndarray] = dataclasses.field(repr=False)
    rho_max: float
    k_sup: float
    lam: Optional[float] = None

    def g_coeff(self, rho):
        rho = np.asarray(rho, dtype=np.float64)
        return (self.n - 1) / rho - self.epsilon * self.k_at(rho)

    def ivp(self, u0: float = 1.0) -> odecmp.SingularIvp:
        return odecmp.SingularIvp(
            g_coeff=self.g_coeff,
            h_coeff=lambda rho: np.ones_like(np.asarray(rho, dtype=np.float64)),
            u0=u0,
            du0=0.0,
            x_end=self.rho_max,
            alpha=-1.0,
        )


def _sup_on(fn, rho_max, samples=1001) -> float:
    return float(np.max(np.abs(fn(np.linspace(0.0, rho_max, samples)))))


def rescale(
    geometry: VolumeGeometry, lam: float, rho_max: float = RHO_MAX
) -> RescaledProblem:
    """Substitute r = eps rho exactly, with k composed on the original radius.

    Raises
    ------
    RescaleRangeError
        If eps * rho_max leaves the radius range of the geometry.
    """
    if lam <= 0:
        raise ValueError(f"Rescaling needs lam > 0, got {lam}.")
    epsilon = 1.0 / (math.sqrt(2) * lam)
    if epsilon * rho_max >= geometry.mean_radius_limit:
        raise RescaleRangeError(
            f"lam = {lam} is too small: radius {epsilon * rho_max:.4g} exceeds "
            f"{geometry.mean_radius_limit:.4g}."
        )

    def k_at(rho):
        return -geometry.c_at(epsilon * np.asarray(rho, dtype=np.float64))

    return RescaledProblem(
        n=geometry.n,
        epsilon=epsilon,
        k_at=k_at,
        rho_max=rho_max,
        k_sup=_sup_on(k_at, rho_max),
        lam=lam,
    )


def frozen_problem(
    n: int, k: Callable = None, epsilon: float = 0.1, rho_max: float = RHO_MAX
) -> RescaledProblem:
    """A rescaled problem with an eps-independent correction, by default k = rho."""
    k = k or (lambda rho: np.asarray(rho, dtype=np.float64))
    return RescaledProblem(
        n=specialfun.check_dimension(n),
        epsilon=epsilon,
        k_at=k,
        rho_max=rho_max,
        k_sup=_sup_on(k, rho_max),
    )


@dataclasses.dataclass(frozen=True)
class PerturbationSeries:
    """v_0..v_N and their derivatives on a common rho grid.

    ``residuals[n]`` is the max difference between v_n and an independent
    solve of its defining IVP.
    """

    order: int
    epsilon: float
    grid: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    residuals: np.ndarray

    @property
    def sup_norms(self) -> np.ndarray:
        return np.max(np.abs(self.values), axis=1)

    @property
    def derivative_sup_norms(self) -> np.ndarray:
        return np.max(np.abs(self.derivatives), axis=1)

    @staticmethod
    def _ratios(norms):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(norms[:-1] > 0, norms[1:] / norms[:-1], np.nan)

    @property
    def norm_ratios(self) -> np.ndarray:
        return self._ratios(self.sup_norms)

    @property
    def derivative_norm_ratios(self) -> np.ndarray:
        return self._ratios(self.derivative_sup_norms)

    def partial_sum(self, order: Optional[int] = None) -> np.ndarray:
        order = self.order if order is None else order
        weights = self.epsilon ** np.arange(order + 1)
        return weights @ self.values[: order + 1]


def _cumulative(integrand, grid):
    return scipy.integrate.cumulative_simpson(integrand, x=grid, initial=0)


def _next_term(pair, grid, k, v, dv, dk=None):
    """One step of the variation-of-parameters recursion, v_(n+1) from v_n.

    Integrands use the factored quotients y/W so they stay bounded at 0.
    """
    positive = grid > 0
    x = grid[positive]
    y1, dy1 = pair.y1_at(grid), pair.dy1_at(grid)
    y2 = np.zeros_like(grid)
    dy2 = np.zeros_like(grid)
    y2[positive], dy2[positive] = pair.y2_at(x), pair.dy2_at(x)
    a, b = pair.y1_over_w(grid), pair.y2_over_w(grid)
    if dk is None:
        forcing = k * dv
        big_a = _cumulative(a * forcing, grid)
        big_b = _cumulative(b * forcing, grid)
        value = y2 * big_a - y1 * big_b
        derivative = dy2 * big_a - dy1 * big_b
    else:
        # Integrated by parts: the boundary terms cancel since y2 a = y1 b.
        da = pair.d_y1_over_w(grid)
        db = np.zeros_like(grid)
        db[positive] = pair.d_y2_over_w(x)
        tilde_a = _cumulative((da * k + a * dk) * v, grid)
        tilde_b = _cumulative((db * k + b * dk) * v, grid)
        value = -y2 * tilde_a + y1 * tilde_b
        derivative = -dy2 * tilde_a + dy1 * tilde_b + k * v
    value[~positive] = 0.0
    derivative[~positive] = 0.0
    return value, derivative


def _verify_term(problem, grid, forcing, u0, value) -> float:
    """Max |v - w| with w an independent RK4 solve of L w = forcing."""
    spline = scipy.interpolate.CubicSpline(grid, forcing)
    ivp = odecmp.SingularIvp(
        g_coeff=lambda rho: (problem.n - 1) / np.asarray(rho, dtype=np.float64),
        h_coeff=lambda rho: np.ones_like(np.asarray(rho, dtype=np.float64)),
        forcing=spline,
        u0=u0,
        du0=0.0,
        x_end=problem.rho_max,
    )
    solution = odecmp.solve_ivp(ivp, SOLVE_STEP)
    return float(np.max(np.abs(solution(grid) - value)))


def compute_vn(
    problem: RescaledProblem,
    order: Optional[int] = None,
    points: Optional[int] = None,
    integration_by_parts: bool = False,
    verify: bool = True,
) -> PerturbationSeries:
    """Build v_0..v_order on a uniform grid of [0, rho_max].

    Parameters
    ----------
    problem
        The rescaled problem providing n, epsilon and k.
    order
        Highest term N, at most 12.
    points
        Grid size.
    integration_by_parts
        Use the rewritten recursion that integrates v_n instead of v_n'.
    verify
        Solve each term's IVP independently and record the discrepancy.
    """
    order = utils.EnvVarConstants.SERIES_ORDER if order is None else order
    points = points or utils.EnvVarConstants.SERIES_POINTS
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"Series order must be in [0, {MAX_ORDER}], got {order}.")
    pair = specialfun.fundamental_pair(problem.n)
    grid = np.linspace(0.0, problem.rho_max, points)
    k = problem.k_at(grid)
    dk = np.gradient(k, grid, edge_order=2) if integration_by_parts else None
    values = [specialfun.v0_profile(problem.n, grid)]
    derivatives = [specialfun.v0_derivative(problem.n, grid)]
    residuals = [
        _verify_term(problem, grid, np.zeros_like(grid), 1.0, values[0])
        if verify
        else math.nan
    ]
    for _ in range(order):
        value, derivative = _next_term(pair, grid, k, values[-1], derivatives[-1], dk)
        if verify:
            residuals.append(
                _verify_term(problem, grid, k * derivatives[-1], 0.0, value)
            )
        else:
            residuals.append(math.nan)
        values.append(value)
        derivatives.append(derivative)
    logging.getLogger("eigenbound").debug(
        f"Series to order {order} at eps={problem.epsilon:.4g}, "
        f"residuals {np.round(residuals, 12)}"
    )
    return PerturbationSeries(
        order=order,
        epsilon=problem.epsilon,
        grid=grid,
        values=np.array(values),
        derivatives=np.array(derivatives),
        residuals=np.array(residuals),
    )


@dataclasses.dataclass(frozen=True)
class SeriesValidation:
    """Sup errors of the partial sums S_0..S_N against a direct solve."""

    epsilon: float
    errors: np.ndarray

    @property
    def sup_error(self) -> float:
        return float(self.errors[-1])


def direct_solution(
    problem: RescaledProblem, step: float = SOLVE_STEP
) -> odecmp.OdeSolution:
    return odecmp.solve_ivp(problem.ivp(), step)


def assemble_and_validate(
    series: PerturbationSeries, problem: RescaledProblem
) -> SeriesValidation:
    """Compare every partial sum with the direct solve of the rescaled equation."""
    direct = direct_solution(problem)(series.grid)
    errors = np.array(
        [
            np.max(np.abs(series.partial_sum(order) - direct))
            for order in range(series.order + 1)
        ]
    )
    return SeriesValidation(epsilon=series.epsilon, errors=errors)


@dataclasses.dataclass(frozen=True)
class OrderSweep:
    order: int
    epsilons: np.ndarray
    errors: np.ndarray
    slope: float


def order_sweep(
    problems: Sequence[RescaledProblem], order: int, points: Optional[int] = None
) -> OrderSweep:
    """Fit log ||S_N - K|| against log eps over a family of problems."""
    epsilons, errors = [], []
    for problem in problems:
        series = compute_vn(problem, order, points=points, verify=False)
        epsilons.append(problem.epsilon)
        errors.append(assemble_and_validate(series, problem).sup_error)
    epsilons, errors = np.array(epsilons), np.array(errors)
    slope = float(np.polyfit(np.log(epsilons), np.log(errors), 1)[0])
    return OrderSweep(order=order, epsilons=epsilons, errors=errors, slope=slope)


@dataclasses.dataclass(frozen=True)
class KappaResult:
    """Largest kappa with v_0 >= threshold on (0, kappa).

    Thresholds of 1 or more are degenerate.
    """

    n: int
    threshold: float
    kappa_star: float
    degenerate: bool = False


def kappa_scan(n: int, threshold: float = KAPPA_THRESHOLD) -> KappaResult:
    """Scan v_0 outwards from 0 and bisect the first crossing of ``threshold``."""
    specialfun.check_dimension(n)
    if threshold <= 0:
        raise ValueError(f"Threshold must be positive, got {threshold}.")
    if threshold >= 1:
        return KappaResult(n=n, threshold=threshold, kappa_star=0.0, degenerate=True)

    def gap(rho):
        return specialfun.v0_profile(n, rho) - threshold

    right = KAPPA_SCAN_STEP
    while gap(right) >= 0:
        right += KAPPA_SCAN_STEP
    kappa = scipy.optimize.bisect(gap, right - KAPPA_SCAN_STEP, right, xtol=1e-12)
    return KappaResult(n=n, threshold=threshold, kappa_star=float(kappa))


def half_bound_certify(
    geometry: VolumeGeometry,
    lam: float,
    kappa: Optional[float] = None,
    step: float = SOLVE_STEP,
) -> float:
    """min of J / J(0) - 1/2 over r in (0, kappa / (sqrt(2) lam)).

    Solved in the rescaled variable, where the flat case is exactly v_0 and
    the margin is v_0(kappa) - 1/2.
    """
    kappa = utils.EnvVarConstants.KAPPA if kappa is None else kappa
    if kappa / lam >= geometry.mean_radius_limit:
        raise RescaleRangeError(
            f"kappa / lam = {kappa / lam:.4g} is out of the geometric range."
        )
    problem = rescale(geometry, lam, rho_max=kappa)
    solution = odecmp.solve_ivp(problem.ivp(), step)
    return float(np.min(solution.u[1:]) - 0.5)


def roundtrip_discrepancy(
    geometry: VolumeGeometry,
    lam: float,
    rho_max: float = RHO_MAX,
    step: float = SOLVE_STEP,
) -> float:
    """Max |J(eps rho) - K(rho)| between the direct and the rescaled radial solve."""
    problem = rescale(geometry, lam, rho_max=rho_max)
    rescaled = odecmp.solve_ivp(problem.ivp(), step)
    x_end = problem.epsilon * rho_max
    direct = odecmp.solve_ivp(
        odecmp.radial_problem(geometry, lam, factor=2.0, x_end=x_end),
        step * problem.epsilon,
    )
    rho = rescaled.grid[1:]
    return float(np.max(np.abs(direct(problem.epsilon * rho) - rescaled.u[1:])))

"""Singular second-order IVPs and the comparison principle for Lu = u'' + g u' + h u.

The coefficient g may be singular at 0 like x^alpha with alpha >= -1.  The
solver starts from a Frobenius/Taylor series of the regular solution about 0
and continues with a compiled classical Runge-Kutta sweep.
"""

import dataclasses
import enum
import logging
import math
from typing import Callable, Optional

import numba as nb
import numpy as np
import scipy.interpolate

BLOW_UP = 1e12
START_DEGREE = 6
FIT_DEGREE = 7
START_INTERVAL = 0.05
MATCH_TOLERANCE = 1e-10
BARRIER_LIMIT = 2.0**60


class InconsistentInitialDataError(ValueError):
    """Initial data that no solution regular at the singular point can take."""


class IvpBlowUpError(RuntimeError):
    """The solution left the representable range."""


class BarrierSearchError(RuntimeError):
    """No admissible barrier constant below the search limit."""


def zero(x):
    return np.zeros_like(np.asarray(x, dtype=np.float64))


def sample(fn, x) -> np.ndarray:
    """fn(x) as a contiguous float array of the shape of x, scalars broadcast."""
    x = np.asarray(x, dtype=np.float64)
    return np.ascontiguousarray(np.broadcast_to(fn(x), x.shape), dtype=np.float64)


@dataclasses.dataclass(frozen=True)
class SingularIvp:
    """u'' + g_coeff u' + h_coeff u = forcing on (0, x_end], u(0) = u0, u'(0) = du0.

    ``alpha`` is the exponent of the singularity of g_coeff at 0 (g ~ x^alpha);
    alpha >= 0 means g is regular there.
    """

    g_coeff: Callable[[np.ndarray], np.ndarray]
    h_coeff: Callable[[np.ndarray], np.ndarray]
    forcing: Callable[[np.ndarray], np.ndarray] = zero
    u0: float = 1.0
    du0: float = 0.0
    x_end: float = 1.0
    alpha: float = -1.0

    def __post_init__(self):
        if self.alpha < -1:
            raise ValueError(f"Singular exponent must be >= -1, got {self.alpha}.")
        if self.x_end <= 0:
            raise ValueError(f"Right endpoint must be positive, got {self.x_end}.")


def apply_operator(g_coeff, h_coeff, grid, u, du=None) -> np.ndarray:
    """L u = u'' + g u' + h u on a sampled function by finite differences.

    The value at x = 0, where g is singular, is nan.
    """
    grid = np.asarray(grid, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if du is None:
        du = np.gradient(u, grid, edge_order=2)
    ddu = np.gradient(du, grid, edge_order=2)
    # Three-point second differences in the interior, exact for quadratics.
    left, right = np.diff(grid)[:-1], np.diff(grid)[1:]
    slopes = (u[2:] - u[1:-1]) / right - (u[1:-1] - u[:-2]) / left
    ddu[1:-1] = 2 * slopes / (left + right)
    out = np.full_like(u, np.nan)
    positive = grid > 0
    x = grid[positive]
    out[positive] = (
        ddu[positive]
        + sample(g_coeff, x) * du[positive]
        + sample(h_coeff, x) * u[positive]
    )
    return out


@dataclasses.dataclass(frozen=True)
class OdeSolution:
    """Samples of a solution on an increasing grid in [0, X].

    ``l_image`` holds L u at the grid points (nan at a singular 0) and
    ``residual`` a max-norm estimate of how far the samples are from solving
    their equation.
    """

    grid: np.ndarray
    u: np.ndarray
    du: np.ndarray
    step: float
    l_image: np.ndarray
    residual: float

    @classmethod
    def from_samples(cls, grid, u, g_coeff, h_coeff, du=None, forcing=zero):
        """Wrap measured samples (e.g. a mean profile) so it can enter a certificate."""
        grid = np.asarray(grid, dtype=np.float64)
        u = np.asarray(u, dtype=np.float64)
        if du is None:
            du = np.gradient(u, grid, edge_order=2)
        l_image = apply_operator(g_coeff, h_coeff, grid, u, du)
        residual = float(
            np.nanmax(np.abs(l_image - sample(forcing, grid)), initial=0.0)
        )
        return cls(
            grid=grid,
            u=u,
            du=np.asarray(du, dtype=np.float64),
            step=float(np.max(np.diff(grid))),
            l_image=l_image,
            residual=residual,
        )

    def __call__(self, x):
        return scipy.interpolate.CubicHermiteSpline(self.grid, self.u, self.du)(x)

    def derivative(self, x):
        spline = scipy.interpolate.CubicHermiteSpline(self.grid, self.u, self.du)
        return spline.derivative()(x)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.u)))


def frobenius_coefficients(
    problem: SingularIvp, delta: float, degree: int = START_DEGREE
) -> np.ndarray:
    """Taylor coefficients c_0..c_degree of the regular solution about 0.

    x g, h and the forcing are replaced by Chebyshev fits on [0, delta]; the
    coefficients then follow from x u'' + (x g) u' + x h u = x f order by order.
    """
    angles = (2 * np.arange(FIT_DEGREE + 1) + 1) * math.pi / (2 * FIT_DEGREE + 2)
    nodes = 0.5 * delta * (1 + np.cos(angles))

    def power_series(values):
        fit = np.polynomial.chebyshev.Chebyshev.fit(
            nodes, values, FIT_DEGREE, domain=[0, delta]
        )
        coef = fit.convert(kind=np.polynomial.Polynomial).coef
        if len(coef) < degree + 2:
            return np.pad(coef, (0, degree + 2 - len(coef)))
        return coef

    p = power_series(nodes * sample(problem.g_coeff, nodes))
    h = power_series(sample(problem.h_coeff, nodes))
    f = power_series(sample(problem.forcing, nodes))
    if problem.alpha >= 0:
        p[0] = 0.0
    p0 = p[0]
    if abs(p0) > MATCH_TOLERANCE and abs(problem.du0) > MATCH_TOLERANCE:
        raise InconsistentInitialDataError(
            "The regular solution at a singular point has u'(0) = 0, "
            f"got {problem.du0}."
        )
    c = np.zeros(degree + 1)
    c[0] = problem.u0
    if degree >= 1:
        c[1] = problem.du0 if abs(p0) <= MATCH_TOLERANCE else 0.0
    for m in range(1, degree):
        total = f[m - 1]
        total -= sum(p[j] * (m + 1 - j) * c[m + 1 - j] for j in range(1, m + 1))
        total -= sum(h[j] * c[m - 1 - j] for j in range(0, m))
        c[m + 1] = total / ((m + 1) * (m + p0))
    return c


@nb.jit(nopython=True)
def _rk4_sweep(u_start, du_start, step, g, h, f, limit):
    """Classical RK4 for u'' = f - g u' - h u, coefficients on the half-step grid."""
    count = (g.size - 1) // 2
    u = np.empty(count + 1)
    du = np.empty(count + 1)
    u[0] = u_start
    du[0] = du_start
    for i in range(count):
        a, b, c = 2 * i, 2 * i + 1, 2 * i + 2
        k1u = du[i]
        k1v = f[a] - g[a] * du[i] - h[a] * u[i]
        um = u[i] + 0.5 * step * k1u
        vm = du[i] + 0.5 * step * k1v
        k2u = vm
        k2v = f[b] - g[b] * vm - h[b] * um
        um = u[i] + 0.5 * step * k2u
        vm = du[i] + 0.5 * step * k2v
        k3u = vm
        k3v = f[b] - g[b] * vm - h[b] * um
        ue = u[i] + step * k3u
        ve = du[i] + step * k3v
        k4u = ve
        k4v = f[c] - g[c] * ve - h[c] * ue
        u[i + 1] = u[i] + step / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        du[i + 1] = du[i] + step / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if abs(u[i + 1]) > limit:
            return u, du, i + 1
    return u, du, -1


def solve_ivp(
    problem: SingularIvp,
    step: float,
    x_end: Optional[float] = None,
    start: Optional[float] = None,
) -> OdeSolution:
    """Solve a singular IVP with a series start and fixed-step RK4.

    Parameters
    ----------
    problem
        The initial value problem.
    step
        Requested step; the actual step divides [x0, x_end] evenly.
    x_end
        Right endpoint, defaults to ``problem.x_end``.
    start
        Point x0 where the series start hands over to RK4. Defaults to
        min(max(10 step, 1e-3), x_end / 2); a fixed value keeps the start
        error out of step refinement studies.

    Returns
    -------
    OdeSolution
        Samples on [0, x0, x0 + step, ..., x_end].

    Raises
    ------
    InconsistentInitialDataError
        If u'(0) != 0 where the singular point forces the regular branch.
    IvpBlowUpError
        If |u| exceeds 1e12.
    """
    logger = logging.getLogger("eigenbound")
    if step <= 0:
        raise ValueError(f"Step must be positive, got {step}.")
    x_end = problem.x_end if x_end is None else x_end
    x0 = min(max(10 * step, 1e-3), x_end / 2) if start is None else start
    if not 0 < x0 < x_end:
        raise ValueError(f"Series start must lie in (0, {x_end:g}), got {x0}.")
    if -1 < problem.alpha < 0:
        logger.warning(
            f"Singular exponent {problem.alpha} has no power series start, "
            "using a linear start."
        )
        u_start = problem.u0 + problem.du0 * x0
        du_start = problem.du0
    else:
        c = frobenius_coefficients(problem, max(START_INTERVAL, x0))
        powers = np.arange(len(c))
        u_start = float(np.sum(c * x0**powers))
        du_start = float(np.sum(powers[1:] * c[1:] * x0 ** (powers[1:] - 1)))
    count = max(math.ceil((x_end - x0) / step), 1)
    h_step = (x_end - x0) / count
    half_grid = x0 + 0.5 * h_step * np.arange(2 * count + 1)
    half_grid[-1] = x_end
    u, du, blown = _rk4_sweep(
        u_start,
        du_start,
        h_step,
        sample(problem.g_coeff, half_grid),
        sample(problem.h_coeff, half_grid),
        sample(problem.forcing, half_grid),
        BLOW_UP,
    )
    if blown >= 0:
        raise IvpBlowUpError(
            f"|u| exceeded {BLOW_UP:g} at x = {half_grid[2 * blown]:.6g}."
        )
    logger.debug(
        f"Series start at x0={x0:.3g}, "
        f"{count} RK4 steps of {h_step:.3g} to {x_end:.6g}."
    )
    grid = np.concatenate([[0.0], half_grid[::2]])
    u = np.concatenate([[problem.u0], u])
    du = np.concatenate([[problem.du0], du])
    # The equation holds by construction; finite differences measure the samples.
    uniform = slice(1, None)
    measured = apply_operator(
        problem.g_coeff, problem.h_coeff, grid[uniform], u[uniform], du[uniform]
    )
    forcing = sample(problem.forcing, grid[uniform])
    residual = float(np.max(np.abs(measured[1:-1] - forcing[1:-1]), initial=0.0))
    l_image = np.concatenate([[np.nan], sample(problem.forcing, grid[1:])])
    return OdeSolution(
        grid=grid, u=u, du=du, step=h_step, l_image=l_image, residual=residual
    )


def observed_order(errors, steps) -> np.ndarray:
    """log(e_i / e_(i+1)) / log(s_i / s_(i+1)) for successive refinements."""
    errors = np.asarray(errors, dtype=np.float64)
    steps = np.asarray(steps, dtype=np.float64)
    return np.log(errors[:-1] / errors[1:]) / np.log(steps[:-1] / steps[1:])


class ComparisonOutcome(enum.Enum):
    PASSED = "passed"
    FAILED = "failed"
    HYPOTHESES_NOT_MET = "hypotheses_not_met"


@dataclasses.dataclass(frozen=True)
class ComparisonCertificate:
    outcome: ComparisonOutcome
    margin: float
    ratio_excess: float
    matched: bool
    tolerance: float
    detail: str = ""
    hypothesis_tolerance: float = math.nan

    @property
    def passed(self) -> bool:
        return self.outcome is ComparisonOutcome.PASSED


def comparison_certificate(
    u: OdeSolution,
    phi: OdeSolution,
    tol: Optional[float] = None,
    hypothesis_tol: Optional[float] = None,
) -> ComparisonCertificate:
    """Numerically certify the comparison principle for u against phi.

    u is a supersolution (Lu >= 0) and phi a positive subsolution (L phi <= 0).

    With matched data u(0) = phi(0), u'(0) = phi'(0) the certificate asserts
    min(u - phi) >= -tol * max|phi|.  In every case it asserts that u / phi has
    no interior positive maximum above its boundary values by more than tol.
    Failing hypotheses give ``HYPOTHESES_NOT_MET`` rather than a verdict.
    """
    tol = 1e-8 * (1 + u.sup_norm) if tol is None else tol
    hypothesis_tol = tol if hypothesis_tol is None else hypothesis_tol
    inside = (u.grid > 0) & (u.grid <= phi.grid[-1])
    x = u.grid[inside]
    u_values = u.u[inside]
    phi_values = phi(x)
    matched = bool(
        abs(u.u[0] - phi.u[0]) <= MATCH_TOLERANCE
        and abs(u.du[0] - phi.du[0]) <= MATCH_TOLERANCE
    )
    problems = []
    if np.nanmin(u.l_image) < -hypothesis_tol:
        problems.append(f"min Lu = {np.nanmin(u.l_image):.3e} < -tol")
    if np.nanmax(phi.l_image) > hypothesis_tol:
        problems.append(f"max L phi = {np.nanmax(phi.l_image):.3e} > tol")
    if np.min(phi_values) <= 0:
        problems.append("phi is not positive")
    margin = float(np.min(u_values - phi_values))
    if problems:
        return ComparisonCertificate(
            outcome=ComparisonOutcome.HYPOTHESES_NOT_MET,
            margin=margin,
            ratio_excess=math.nan,
            matched=matched,
            tolerance=tol,
            detail="; ".join(problems),
            hypothesis_tolerance=hypothesis_tol,
        )
    ratio = u_values / phi_values
    boundary = max(ratio[0], ratio[-1])
    interior = ratio[1:-1]
    excess = float(np.max(interior) - boundary) if interior.size else 0.0
    failures = []
    if excess > tol and np.max(interior) > 0:
        failures.append(
            f"u / phi has an interior maximum {excess:.3e} above its boundary values"
        )
    if matched and margin < -tol * float(np.max(np.abs(phi_values))):
        failures.append(f"u - phi reaches {margin:.3e}")
    return ComparisonCertificate(
        outcome=ComparisonOutcome.FAILED if failures else ComparisonOutcome.PASSED,
        margin=margin,
        ratio_excess=excess,
        matched=matched,
        tolerance=tol,
        detail="; ".join(failures),
        hypothesis_tolerance=hypothesis_tol,
    )


@dataclasses.dataclass(frozen=True)
class Barrier:
    """An auxiliary function with one-signed L-image.

    ``hopf`` is v(x) = exp(-M (x - x0)) - 1, positive before x0 and
    non-positive after it; ``growth`` is v(x) = exp(x) - x - 1.
    """

    kind: str
    m: float = math.nan
    x0: float = math.nan
    least_m: Optional[float] = None
    sufficient_m: Optional[float] = None

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "hopf":
            return np.exp(-self.m * (x - self.x0)) - 1
        return np.expm1(x) - x

    def first(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "hopf":
            return -self.m * np.exp(-self.m * (x - self.x0))
        return np.expm1(x)

    def second(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "hopf":
            return self.m**2 * np.exp(-self.m * (x - self.x0))
        return np.exp(x)

    def l_image(self, g_coeff, h_coeff, x):
        return (
            self.second(x)
            + sample(g_coeff, x) * self.first(x)
            + sample(h_coeff, x) * self.value(x)
        )

    def invariants_hold(self, x_end: float, samples: int = 2001) -> bool:
        x = np.linspace(0.0, x_end, samples)
        if self.kind == "hopf":
            after = x[x >= self.x0]
            return bool(
                abs(self.value(self.x0)) < 1e-15
                and np.all(self.value(after) <= 0)
                and np.all(self.second(x) > 0)
            )
        return bool(
            np.all(self.value(x) >= 0)
            and np.all(self.second(x) > 0)
            and self.value(0.0) == 0
            and self.first(0.0) == 0
        )


def _least_admissible_m(g_coeff, h_coeff, a, x0, samples=2001):
    x = np.linspace(a, x0, samples)
    g = sample(g_coeff, x)
    h = sample(h_coeff, x)

    def admissible(m):
        e = np.exp(-m * (x - x0))
        return bool(np.all(m * m * e - m * g * e + h * (e - 1) >= 0))

    hi = 1.0
    while not admissible(hi):
        hi *= 2
        if hi > BARRIER_LIMIT:
            raise BarrierSearchError(f"No admissible M below 2^60 on [{a}, {x0}].")
    lo = hi / 2
    while admissible(lo):
        if lo < 1e-12:
            return lo
        hi, lo = lo, lo / 2
    while hi - lo > 1e-10 * hi:
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if admissible(mid) else (mid, hi)
    return hi


def make_barrier(
    kind: str,
    m: Optional[float] = None,
    x0: Optional[float] = None,
    g_coeff=None,
    h_coeff=None,
    interval_start: Optional[float] = None,
) -> Barrier:
    """Build a hopf or growth barrier.

    For ``hopf`` with coefficients and an ``interval_start`` a, the least M
    making Lv >= 0 on [a, x0] (grid search: doubling then bisection) and the
    sufficient bound (max g + sqrt(max g^2 + 4 max |h|)) / 2 are reported.
    When m is None the least admissible M is used.
    """
    if kind == "growth":
        return Barrier(kind="growth")
    if kind != "hopf":
        raise ValueError(f"Unknown barrier kind {kind!r}, expected hopf or growth.")
    if x0 is None or x0 <= 0:
        raise ValueError("A hopf barrier needs x0 > 0.")
    least = sufficient = None
    if g_coeff is not None and h_coeff is not None and interval_start is not None:
        least = _least_admissible_m(g_coeff, h_coeff, interval_start, x0)
        x = np.linspace(interval_start, x0, 2001)
        g_max = float(np.max(np.abs(sample(g_coeff, x))))
        h_max = float(np.max(np.abs(sample(h_coeff, x))))
        sufficient = (g_max + math.sqrt(g_max**2 + 4 * h_max)) / 2
    m = least if m is None else m
    if m is None or m <= 0:
        raise ValueError("A hopf barrier needs M > 0.")
    return Barrier(kind="hopf", m=m, x0=x0, least_m=least, sufficient_m=sufficient)


def radial_problem(
    geometry,
    lam: float,
    factor: float = 2.0,
    u0: float = 1.0,
    x_end: float = 1.0,
) -> SingularIvp:
    """J'' + g J' + factor lam^2 J = 0 with J(0) = u0, J'(0) = 0."""

    def h_coeff(x):
        return np.full_like(np.asarray(x, dtype=np.float64), factor * lam**2)

    return SingularIvp(
        g_coeff=geometry.g_at,
        h_coeff=h_coeff,
        u0=u0,
        du0=0.0,
        x_end=x_end,
        alpha=-1.0,
    )

"""Bessel, Legendre and radial Bessel-profile functions written from scratch.

Only the four orders that appear as (n - 2) / 2 for n in {2, 3, 4, 5} are
supported by the public Bessel functions.  Evaluation is split at
``SERIES_CUTOFF``: the power series (and, for Y of integer order, the
logarithmic series) below it, the Hankel asymptotic expansion above it.
Half-integer orders use their closed trigonometric forms wherever those are
well conditioned.
"""

import dataclasses
import functools
import math
from typing import Tuple

import numba as nb
import numpy as np

EULER_GAMMA = 0.57721566490153286061
SERIES_CUTOFF = 12.0
SUPPORTED_ORDERS = (0.0, 0.5, 1.0, 1.5)
SUPPORTED_DIMENSIONS = (2, 3, 4, 5)
# x^(n-1) * W(y1, y2, x) for the fundamental pair of every supported dimension.
WRONSKIAN_CONSTANT = 2.0 / math.pi
# Below this argument the closed half-integer forms lose digits to cancellation.
_CLOSED_FORM_MIN = 1.0


class UnsupportedOrderError(ValueError):
    """A Bessel order outside of {0, 1/2, 1, 3/2}."""


class UnsupportedDimensionError(ValueError):
    """A dimension outside of {2, 3, 4, 5}."""


def scalarize(func):
    """Return a python float when the first argument was a scalar."""

    @functools.wraps(func)
    def wrapped(*args, **kwargs):
        *head, x = args
        scalar = np.isscalar(x) or np.ndim(x) == 0
        result = func(*head, np.atleast_1d(np.asarray(x, dtype=np.float64)), **kwargs)
        return float(result[0]) if scalar else result

    return wrapped


@dataclasses.dataclass(frozen=True)
class BesselOrder:
    nu: float

    def __post_init__(self):
        if float(self.nu) not in SUPPORTED_ORDERS:
            raise UnsupportedOrderError(
                f"Bessel order {self.nu} is not one of {SUPPORTED_ORDERS}"
            )
        object.__setattr__(self, "nu", float(self.nu))

    @classmethod
    def from_dimension(cls, n: int) -> "BesselOrder":
        check_dimension(n)
        return cls((n - 2) / 2)

    @property
    def is_integer(self) -> bool:
        return self.nu.is_integer()

    @property
    def is_half_integer(self) -> bool:
        return not self.is_integer


def check_dimension(n: int) -> int:
    if n not in SUPPORTED_DIMENSIONS:
        raise UnsupportedDimensionError(
            f"Dimension {n} is not one of {SUPPORTED_DIMENSIONS}"
        )
    return n


def _as_order(order) -> BesselOrder:
    return order if isinstance(order, BesselOrder) else BesselOrder(order)


def _series_terms(x: np.ndarray) -> int:
    return int(40 + 2 * float(np.max(x, initial=0.0)))


def scaled_j_series(nu: float, x: np.ndarray) -> np.ndarray:
    """x^(-nu) J_nu(x) from its power series; finite (and exact) at x = 0."""
    x = np.asarray(x, dtype=np.float64)
    q = -((x / 2) ** 2)
    term = np.full_like(x, 1.0 / (2.0**nu * math.gamma(nu + 1)))
    total = term.copy()
    for m in range(1, _series_terms(x)):
        term = term * q / (m * (m + nu))
        total += term
    return total


@scalarize
def bessel_j_series(nu: float, x: np.ndarray) -> np.ndarray:
    """Truncated power series of J_nu for any real nu >= 0."""
    return x**nu * scaled_j_series(nu, x)


def _hankel_pq(nu: float, x: np.ndarray):
    """The P and Q sums of the Hankel expansion, truncated at their smallest term."""
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 80):
        new_term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        # Stop each point once the asymptotic series starts to diverge.
        active &= np.abs(new_term) < np.abs(term)
        new_term = np.where(active, new_term, 0.0)
        if not active.any():
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q += sign * new_term
        else:
            p += sign * new_term
        term = np.where(active, new_term, term)
    return p, q


def hankel_expansion(nu: float, x) -> Tuple[np.ndarray, np.ndarray]:
    """Return (J_nu(x), Y_nu(x)) from the large-argument expansion, any nu >= 0."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(x <= 0):
        raise ValueError("The Hankel expansion needs positive arguments.")
    return _hankel_j(nu, x), _hankel_y(nu, x)


def _hankel_j(nu, x):
    p, q = _hankel_pq(nu, x)
    chi = x - (nu / 2 + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _hankel_y(nu, x):
    p, q = _hankel_pq(nu, x)
    chi = x - (nu / 2 + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.sin(chi) + q * np.cos(chi))


def _piecewise(x, small, large, cutoff=SERIES_CUTOFF):
    out = np.empty_like(x)
    below = x <= cutoff
    if below.any():
        out[below] = small(x[below])
    if (~below).any():
        out[~below] = large(x[~below])
    return out


def _bessel_j_any(nu: float, x: np.ndarray) -> np.ndarray:
    return _piecewise(
        x, lambda s: s**nu * scaled_j_series(nu, s), lambda s: _hankel_j(nu, s)
    )


def _closed_j(nu: float, x: np.ndarray) -> np.ndarray:
    amplitude = np.sqrt(2.0 / (math.pi * x))
    if nu == 0.5:
        return amplitude * np.sin(x)
    return amplitude * (np.sin(x) / x - np.cos(x))


def _closed_y(nu: float, x: np.ndarray) -> np.ndarray:
    amplitude = np.sqrt(2.0 / (math.pi * x))
    if nu == 0.5:
        return -amplitude * np.cos(x)
    return -amplitude * (np.cos(x) / x + np.sin(x))


def _y_log_series(n: int, x: np.ndarray) -> np.ndarray:
    """Y_n for n in {0, 1} from the logarithmic series."""
    half = x / 2
    q = -(half**2)
    finite = np.zeros_like(x) if n == 0 else -1.0 / (math.pi * half)
    log_part = (2.0 / math.pi) * np.log(half) * (x**n * scaled_j_series(n, x))
    term = half**n / math.factorial(n)
    psi_k = -EULER_GAMMA
    psi_nk = -EULER_GAMMA + sum(1.0 / j for j in range(1, n + 1))
    total = (psi_k + psi_nk) * term
    for k in range(1, _series_terms(x)):
        term = term * q / (k * (n + k))
        psi_k += 1.0 / k
        psi_nk += 1.0 / (n + k)
        total = total + (psi_k + psi_nk) * term
    return finite + log_part - total / math.pi


@scalarize
def bessel_j(order, x: np.ndarray) -> np.ndarray:
    """Bessel function of the first kind J_nu(x) for x >= 0.

    Parameters
    ----------
    order : BesselOrder or float
        One of 0, 1/2, 1, 3/2.
    x : float or np.ndarray
        Non-negative argument(s).

    Raises
    ------
    UnsupportedOrderError
        If the order is not supported.
    ValueError
        If any argument is negative.
    """
    nu = _as_order(order).nu
    if np.any(x < 0):
        raise ValueError("bessel_j is only defined here for x >= 0.")
    if nu.is_integer():
        return _bessel_j_any(nu, x)
    return _piecewise(
        x,
        lambda s: s**nu * scaled_j_series(nu, s),
        lambda s: _closed_j(nu, s),
        cutoff=_CLOSED_FORM_MIN,
    )


@scalarize
def bessel_y(order, x: np.ndarray) -> np.ndarray:
    """Bessel function of the second kind Y_nu(x) for x > 0.

    Integer orders use the logarithmic series below ``SERIES_CUTOFF`` and the
    Hankel expansion above; half-integer orders use the closed forms.
    """
    nu = _as_order(order).nu
    if np.any(x <= 0):
        raise ValueError("bessel_y is singular at x <= 0.")
    if nu.is_integer():
        return _piecewise(
            x, lambda s: _y_log_series(int(nu), s), lambda s: _hankel_y(nu, s)
        )
    return _closed_y(nu, x)


def _bessel_y_next(nu: float, x: np.ndarray) -> np.ndarray:
    """Y_(nu + 1) by upward recurrence, which is stable for the second kind."""
    if nu + 1 in SUPPORTED_ORDERS:
        return bessel_y(nu + 1, x)
    return (2 * nu / x) * bessel_y(nu, x) - bessel_y(nu - 1, x)


@dataclasses.dataclass(frozen=True)
class FundamentalPair:
    """y1 = x^-nu J_nu, y2 = x^-nu Y_nu solving u'' + ((n - 1)/x) u' + u = 0.

    Quotients by the Wronskian are provided in factored form: W(x) equals
    ``WRONSKIAN_CONSTANT * x^(1 - n)`` so y/W is y * x^(n - 1) up to a constant
    and stays bounded at the singular endpoint.
    """

    n: int
    order: BesselOrder

    @property
    def nu(self) -> float:
        return self.order.nu

    def y1_at(self, x):
        x = np.asarray(x, dtype=np.float64)
        return _piecewise(
            np.atleast_1d(x),
            lambda s: scaled_j_series(self.nu, s),
            lambda s: _hankel_j(self.nu, s) * s ** (-self.nu),
        ).reshape(x.shape)

    def dy1_at(self, x):
        x = np.asarray(x, dtype=np.float64)
        nu1 = self.nu + 1
        return _piecewise(
            np.atleast_1d(x),
            lambda s: -s * scaled_j_series(nu1, s),
            lambda s: -_hankel_j(nu1, s) * s ** (-self.nu),
        ).reshape(x.shape)

    def y2_at(self, x):
        x = np.asarray(x, dtype=np.float64)
        return x ** (-self.nu) * bessel_y(self.order, x)

    def dy2_at(self, x):
        x = np.asarray(x, dtype=np.float64)
        return -(x ** (-self.nu)) * _bessel_y_next(self.nu, np.atleast_1d(x)).reshape(
            x.shape
        )

    def wronskian_at(self, x):
        return self.y1_at(x) * self.dy2_at(x) - self.dy1_at(x) * self.y2_at(x)

    def y1_over_w(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.y1_at(x) * x ** (self.n - 1) / WRONSKIAN_CONSTANT

    def y2_over_w(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros_like(x)
        positive = x > 0
        out[positive] = (
            bessel_y(self.order, x[positive])
            * x[positive] ** (self.nu + 1)
            / WRONSKIAN_CONSTANT
        )
        return out

    def d_y1_over_w(self, x):
        x = np.asarray(x, dtype=np.float64)
        return (
            self.dy1_at(x) * x ** (self.n - 1)
            + (self.n - 1) * self.y1_at(x) * x ** (self.n - 2)
        ) / WRONSKIAN_CONSTANT

    def d_y2_over_w(self, x):
        """Derivative of y2/W; singular (like log x) at 0 when n = 2, so x > 0 only."""
        x = np.asarray(x, dtype=np.float64)
        if np.any(x <= 0):
            raise ValueError("d(y2/W)/dx is only evaluated at x > 0.")
        return (
            self.dy2_at(x) * x ** (self.n - 1)
            + (self.n - 1) * self.y2_at(x) * x ** (self.n - 2)
        ) / WRONSKIAN_CONSTANT


@functools.lru_cache(maxsize=None)
def fundamental_pair(n: int) -> FundamentalPair:
    """The Bessel fundamental pair for the radial Laplacian in dimension n."""
    return FundamentalPair(n=check_dimension(n), order=BesselOrder.from_dimension(n))


@nb.jit(nopython=True)
def _legendre_recurrence(degree, t):
    out = np.empty(t.size)
    for i in range(t.size):
        p_prev = 1.0
        p = t[i]
        if degree == 0:
            p = 1.0
        for l in range(2, degree + 1):
            p_next = ((2 * l - 1) * t[i] * p - (l - 1) * p_prev) / l
            p_prev = p
            p = p_next
        out[i] = p
    return out


@nb.jit(nopython=True)
def _chebyshev_u_recurrence(degree, t):
    out = np.empty(t.size)
    for i in range(t.size):
        u_prev = 1.0
        u = 2.0 * t[i]
        if degree == 0:
            u = 1.0
        for l in range(2, degree + 1):
            u_next = 2.0 * t[i] * u - u_prev
            u_prev = u
            u = u_next
        out[i] = u
    return out


def _check_unit_interval(t, name="t"):
    t = np.asarray(t, dtype=np.float64)
    if np.any(np.abs(t) > 1 + 1e-12):
        raise ValueError(f"{name} must lie in [-1, 1].")
    return np.clip(t, -1.0, 1.0)


def _check_degree(l) -> int:
    if int(l) != l or l < 0:
        raise ValueError(f"Degree must be a non-negative integer, got {l}.")
    return int(l)


def legendre(l: int, t):
    """Legendre polynomial P_l(t) by upward three-term recurrence."""
    l = _check_degree(l)
    t = _check_unit_interval(t)
    flat = np.ascontiguousarray(t.ravel())
    values = _legendre_recurrence(l, flat).reshape(t.shape)
    return float(values) if values.ndim == 0 else values


def chebyshev_u_normalized(l: int, t):
    """U_l(t) / (l + 1) = sin((l + 1) theta) / ((l + 1) sin theta), t = cos theta."""
    l = _check_degree(l)
    t = _check_unit_interval(t)
    flat = np.ascontiguousarray(t.ravel())
    values = (_chebyshev_u_recurrence(l, flat) / (l + 1)).reshape(t.shape)
    return float(values) if values.ndim == 0 else values


def _v0_scale(n: int) -> float:
    nu = BesselOrder.from_dimension(n).nu
    return 2.0**nu * math.gamma(nu + 1)


def v0_profile(n: int, rho):
    """The normalized regular solution of v'' + ((n-1)/rho) v' + v = 0, v(0) = 1."""
    rho = np.asarray(rho, dtype=np.float64)
    if np.any(rho < 0):
        raise ValueError("v0_profile needs rho >= 0.")
    values = _v0_scale(n) * fundamental_pair(n).y1_at(rho)
    return float(values) if values.ndim == 0 else values


def v0_derivative(n: int, rho):
    """d v0 / d rho, equal to -c rho^-nu J_(nu+1)(rho)."""
    rho = np.asarray(rho, dtype=np.float64)
    if np.any(rho < 0):
        raise ValueError("v0_derivative needs rho >= 0.")
    values = _v0_scale(n) * fundamental_pair(n).dy1_at(rho)
    return float(values) if values.ndim == 0 else values

"""Exact Laplace-Beltrami eigenfunction families on the model manifolds."""

import dataclasses
import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from eigenbound import specialfun
from eigenbound.manifolds import ModelManifold
from eigenbound.manifolds.flat import SIDE, FlatTorus
from eigenbound.manifolds.sphere import RoundSphere

FAMILIES = ("zonal", "freq", "trig", "constant")


class UnsupportedFamilyError(ValueError):
    """The family is not defined on the requested manifold."""


@dataclasses.dataclass(frozen=True)
class Eigenfunction:
    """A function psi with -Delta psi = lam^2 psi on a model manifold.

    ``peak_candidates`` are points where |psi| is known to attain its maximum,
    used to seed the maximum search. ``norm_squared`` is the exact L^2 norm
    squared, or None when only quadrature can provide it.
    """

    manifold: str
    family: str
    index: Tuple[int, ...]
    lam: float
    evaluate: Callable[[np.ndarray], np.ndarray] = dataclasses.field(
        repr=False, compare=False
    )
    norm_squared: Optional[float] = None
    peak_candidates: np.ndarray = dataclasses.field(
        default_factory=lambda: np.empty((0, 0)), repr=False, compare=False
    )

    def __call__(self, points):
        return self.evaluate(np.asarray(points, dtype=np.float64))

    eval_at = __call__

    @property
    def index_label(self) -> str:
        return ":".join(str(i) for i in self.index)


@dataclasses.dataclass(frozen=True)
class Zonal:
    """P_l(cos theta) on S^2 or U_l(cos theta) / (l + 1) on S^3 around a pole."""

    l: int
    pole: Optional[Sequence[float]] = None

    def build(self, manifold: ModelManifold) -> Eigenfunction:
        if not isinstance(manifold, RoundSphere):
            raise UnsupportedFamilyError(
                f"Zonal functions need a sphere, not {manifold.name}."
            )
        if int(self.l) != self.l or self.l < 0:
            raise ValueError(
                f"Zonal degree must be a non-negative integer, got {self.l}."
            )
        l = int(self.l)
        if self.pole is None:
            pole = manifold.default_center()
        else:
            pole = manifold.normalize(self.pole)
        if manifold.n == 2:
            profile = specialfun.legendre
            lam = math.sqrt(l * (l + 1))
            norm_squared = 4 * math.pi / (2 * l + 1)
        else:
            profile = specialfun.chebyshev_u_normalized
            lam = math.sqrt(l * (l + 2))
            norm_squared = 2 * math.pi**2 / (l + 1) ** 2

        def evaluate(points):
            return profile(l, np.clip(points @ pole, -1.0, 1.0))

        return Eigenfunction(
            manifold=manifold.name,
            family="zonal",
            index=(l,),
            lam=lam,
            evaluate=evaluate,
            norm_squared=norm_squared,
            peak_candidates=np.stack([pole, -pole]),
        )


def _check_lattice(k) -> np.ndarray:
    k = np.asarray(k, dtype=np.float64)
    if k.shape != (2,) or not np.allclose(k, np.round(k)):
        raise ValueError(f"Torus frequencies must be integer 2-vectors, got {k}.")
    return np.round(k)


@dataclasses.dataclass(frozen=True)
class Frequency:
    """cos(k . x + phase) on the torus, k an integer vector."""

    k: Sequence[int]
    phase: float = 0.0

    def build(self, manifold: ModelManifold) -> Eigenfunction:
        if not isinstance(manifold, FlatTorus):
            raise UnsupportedFamilyError(
                f"Frequencies need the torus, not {manifold.name}."
            )
        k = _check_lattice(self.k)
        lam = float(np.linalg.norm(k))
        if lam == 0:
            return Constant(math.cos(self.phase)).build(manifold)
        phase = float(self.phase)

        def evaluate(points):
            return np.cos(points @ k + phase)

        # k . x + phase in {0, pi}; one solution of each along k.
        peaks = np.outer(np.array([-phase, math.pi - phase]), k / lam**2)
        return Eigenfunction(
            manifold=manifold.name,
            family="freq",
            index=tuple(int(i) for i in k),
            lam=lam,
            evaluate=evaluate,
            norm_squared=SIDE**2 / 2,
            peak_candidates=manifold.wrap(peaks),
        )


@dataclasses.dataclass(frozen=True)
class TrigCombination:
    """Sum of amplitude * cos(k . x + phase) over torus frequencies of equal length."""

    terms: Sequence[Tuple[Sequence[int], float, float]]

    def build(self, manifold: ModelManifold) -> Eigenfunction:
        if not isinstance(manifold, FlatTorus):
            raise UnsupportedFamilyError(
                f"Trig combinations need the torus, not {manifold.name}."
            )
        if not self.terms:
            raise ValueError("A trig combination needs at least one term.")
        ks = np.stack([_check_lattice(k) for k, _, _ in self.terms])
        amplitudes = np.array([a for _, a, _ in self.terms], dtype=np.float64)
        phases = np.array([p for _, _, p in self.terms], dtype=np.float64)
        lengths = np.linalg.norm(ks, axis=-1)
        if not np.allclose(lengths, lengths[0]) or lengths[0] == 0:
            raise ValueError(
                "Trig combinations need nonzero frequencies of equal length."
            )

        def evaluate(points):
            return np.cos(points @ ks.T + phases) @ amplitudes

        # cos(k.x + a) and cos(k'.x + b) are orthogonal unless k' = +-k.
        keys = {tuple(k if (k[0], k[1]) > (0, 0) else -k) for k in ks}
        exact = len(keys) == len(ks)
        return Eigenfunction(
            manifold=manifold.name,
            family="trig",
            index=tuple(int(i) for i in ks.ravel()),
            lam=float(lengths[0]),
            evaluate=evaluate,
            norm_squared=float(np.sum(amplitudes**2)) * SIDE**2 / 2 if exact else None,
        )


@dataclasses.dataclass(frozen=True)
class Constant:
    value: float = 1.0

    def build(self, manifold: ModelManifold) -> Eigenfunction:
        value = float(self.value)

        def evaluate(points):
            return np.full(points.shape[:-1], value)

        return Eigenfunction(
            manifold=manifold.name,
            family="constant",
            index=(0,),
            lam=0.0,
            evaluate=evaluate,
            norm_squared=value**2 * manifold.total_volume,
            peak_candidates=manifold.default_center()[None, :],
        )


def eigenfunction(manifold: ModelManifold, member) -> Eigenfunction:
    """Build the catalog eigenfunction described by ``member`` on ``manifold``.

    Parameters
    ----------
    manifold
        A model manifold.
    member : Zonal, Frequency, TrigCombination or Constant
        Which family member to build.
    """
    return member.build(manifold)


def family_member(manifold: ModelManifold, family: str, index: int) -> Eigenfunction:
    """The sweep member of a family.

    That is degree ``index`` for zonal and k = (index, 0) for freq.
    """
    if family == "zonal":
        return eigenfunction(manifold, Zonal(index))
    if family == "freq":
        return eigenfunction(manifold, Frequency((index, 0)))
    if family == "constant":
        return eigenfunction(manifold, Constant())
    raise UnsupportedFamilyError(
        f"Family {family!r} has no integer sweep, expected zonal, freq or constant."
    )

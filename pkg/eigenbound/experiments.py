"""Sweeps over eigenfunction families measuring both sides of the sup-norm bound."""

import dataclasses
import functools
import logging
import math
from typing import Dict, Iterable, List, Optional

import numpy as np

from eigenbound import async_utils, means, odecmp, perturb, utils
from eigenbound.eigenfunctions import Eigenfunction, family_member
from eigenbound.manifolds import ModelManifold, RadiusOutOfRangeError, l2_norm
from eigenbound.records import ExperimentRecord, sort_records

CENTER_MODES = ("max", "random")


def _concurrency(max_concurrency: Optional[int]) -> int:
    if max_concurrency is None:
        return utils.EnvVarConstants.MAX_CONCURRENCY
    return max_concurrency


def _sweep(
    experiment: str,
    manifold: ModelManifold,
    family: str,
    indices: Iterable[int],
    measure,
    max_concurrency=None,
) -> List[ExperimentRecord]:
    """Build each family member and measure it, concurrently, sorted for output."""
    indices = list(indices)
    if not indices:
        logging.getLogger("eigenbound").warning(
            f"Empty index range for {manifold.name}/{family}, nothing to measure."
        )
        return []
    members = {index: family_member(manifold, family, index) for index in indices}
    results = async_utils.map_blocking(members, measure, _concurrency(max_concurrency))
    return sort_records(
        dataclasses.replace(record, experiment=experiment)
        for record in results.values()
    )


def _base_record(psi: Eigenfunction, **kwargs) -> ExperimentRecord:
    return ExperimentRecord(
        manifold=psi.manifold,
        family=psi.family,
        index=psi.index_label,
        lam=psi.lam,
        **kwargs,
    )


def _excluded(psi: Eigenfunction, **kwargs) -> ExperimentRecord:
    logging.getLogger("eigenbound").info(
        f"Excluding {psi.manifold}/{psi.family}/{psi.index_label}: "
        "lambda = 0 has no normalization."
    )
    return _base_record(psi, excluded=True, **kwargs)


def _center(manifold, psi, center_mode: str, seed: int):
    location = means.locate_max(manifold, psi)
    if center_mode == "max":
        return location.point, location.value
    if center_mode == "random":
        rng = np.random.default_rng([seed, *(abs(i) for i in psi.index)])
        return manifold.random_points(rng, 1)[0], location.value
    raise ValueError(
        f"Unknown center mode {center_mode!r}, expected one of {CENTER_MODES}."
    )


def _sphere_radius(manifold: ModelManifold, psi: Eigenfunction, kappa: float) -> float:
    r = kappa / psi.lam
    if r >= manifold.geometry.r_inj:
        raise RadiusOutOfRangeError(
            f"kappa / lambda = {r:.4g} is not below the injectivity radius "
            f"{manifold.geometry.r_inj:.4g}."
        )
    return r


def hormander_record(manifold: ModelManifold, psi: Eigenfunction) -> ExperimentRecord:
    """||psi||_inf lambda^-(n-1)/2 / ||psi||_2, the sup norm from the maximum search."""
    if psi.lam == 0:
        return _excluded(psi)
    sup = means.locate_max(manifold, psi).value
    norm = l2_norm(manifold, psi)
    ratio = sup * psi.lam ** (-(manifold.n - 1) / 2) / norm
    return _base_record(psi, hormander_ratio=ratio, sup_norm=sup, l2_norm=norm)


def restriction_record(
    manifold: ModelManifold,
    psi: Eigenfunction,
    kappa: float,
    p: float = 2.0,
    m: Optional[int] = None,
    center_mode: str = "max",
    seed: int = 0,
) -> ExperimentRecord:
    """L^p norm of psi on the geodesic sphere of radius kappa / lambda around a maximum.

    The raw ratio uses the unnormalized surface measure; the normalized one
    divides by h(kappa / lambda)^(1/p).
    """
    if p < 2:
        raise ValueError(f"Restriction exponent must be >= 2, got {p}.")
    if psi.lam == 0:
        return _excluded(psi, kappa=kappa, p=p)
    r = _sphere_radius(manifold, psi, kappa)
    center, sup = _center(manifold, psi, center_mode, seed)
    m = m or means.default_node_count(psi.lam, r)
    sphere = manifold.geodesic_sphere(center, r, m)
    values = np.abs(psi(sphere.nodes))
    norm = l2_norm(manifold, psi)
    lp = sphere.integrate(values**p) ** (1 / p)
    l2_gamma = math.sqrt(sphere.integrate(values**2))
    h = float(manifold.geometry.h_at(r))
    raw = lp * psi.lam ** (-(manifold.n - 1) * (p - 2) / (2 * p)) / norm
    return _base_record(
        psi,
        kappa=kappa,
        p=p,
        restriction_ratio=raw,
        restriction_normalized=raw / h ** (1 / p),
        reconstructed_constant=math.sqrt(2 / h) * l2_gamma / norm,
        sup_norm=sup,
        l2_norm=norm,
    )


def equivalence_record(
    manifold: ModelManifold,
    psi: Eigenfunction,
    kappa: float,
    m: Optional[int] = None,
    center_mode: str = "max",
    seed: int = 0,
) -> ExperimentRecord:
    """2 I_(psi^2)(x, kappa / lambda) / ||psi||_inf^2, at least 1 near a maximum.

    Constants have no natural radius, they are averaged at radius kappa.
    """
    r = kappa if psi.lam == 0 else _sphere_radius(manifold, psi, kappa)
    center, sup = _center(manifold, psi, center_mode, seed)
    square_mean = means.spherical_mean(manifold, psi, center, r, m, power=2)
    center_value = float(psi(center))
    linear = math.nan
    if center_value != 0:
        linear = means.mean_linear_ratio(manifold, psi, center, r, m)
    record = _base_record(
        psi,
        kappa=kappa,
        equiv_ratio=2 * square_mean / sup**2,
        linear_ratio=linear,
        sup_norm=sup,
    )
    if psi.lam > 0:
        norm = l2_norm(manifold, psi)
        record.l2_norm = norm
        # sqrt(2 / h) ||psi||_(L^2(gamma)) with ||psi||^2_(L^2(gamma)) = h I_(psi^2)
        record.reconstructed_constant = math.sqrt(2 * square_mean) / norm
        record.half_bound_margin = perturb.half_bound_certify(
            manifold.geometry, psi.lam, kappa
        )
    return record


def run_hormander(
    manifold, family, indices, max_concurrency=None
) -> List[ExperimentRecord]:
    measure = functools.partial(hormander_record, manifold)
    return _sweep("hormander", manifold, family, indices, measure, max_concurrency)


def run_restriction(
    manifold,
    family,
    indices,
    kappa=None,
    p=2.0,
    m=None,
    center_mode="max",
    seed=0,
    max_concurrency=None,
) -> List[ExperimentRecord]:
    kappa = utils.EnvVarConstants.KAPPA if kappa is None else kappa
    measure = functools.partial(
        restriction_record,
        manifold,
        kappa=kappa,
        p=p,
        m=m,
        center_mode=center_mode,
        seed=seed,
    )
    return _sweep("restriction", manifold, family, indices, measure, max_concurrency)


def run_equivalence(
    manifold,
    family,
    indices,
    kappa=None,
    m=None,
    center_mode="max",
    seed=0,
    max_concurrency=None,
) -> List[ExperimentRecord]:
    kappa = utils.EnvVarConstants.KAPPA if kappa is None else kappa
    measure = functools.partial(
        equivalence_record,
        manifold,
        kappa=kappa,
        m=m,
        center_mode=center_mode,
        seed=seed,
    )
    return _sweep("equivalence", manifold, family, indices, measure, max_concurrency)


def bessel_comparison(
    manifold: ModelManifold,
    psi: Eigenfunction,
    kappa: float,
    grid_size: Optional[int] = None,
    m: Optional[int] = None,
) -> odecmp.ComparisonCertificate:
    """Certify I_(psi^2)(x, r) >= J(r) on (0, kappa / lambda] around a maximum of |psi|.

    J solves J'' + g J' + 2 lambda^2 J = 0 with J(0) = I(0), J'(0) = 0; it is
    obtained from the rescaled equation and mapped back with r = eps rho.
    """
    r_max = _sphere_radius(manifold, psi, kappa)
    center = means.locate_max(manifold, psi).point
    profile = means.mean_profile(
        manifold, psi, center, power=2, r_max=r_max, grid_size=grid_size, m=m
    )
    radii, values = profile.with_origin()
    du = np.gradient(values, radii, edge_order=2)
    du[0] = 0.0  # means are even in r
    two_lam_sq = 2 * psi.lam**2
    u = odecmp.OdeSolution.from_samples(
        radii,
        values,
        manifold.geometry.g_at,
        lambda x: np.full_like(x, two_lam_sq),
        du=du,
    )
    problem = perturb.rescale(manifold.geometry, psi.lam, rho_max=kappa * math.sqrt(2))
    k = odecmp.solve_ivp(problem.ivp(u0=profile.origin_value), perturb.SOLVE_STEP)
    eps = problem.epsilon
    phi = odecmp.OdeSolution(
        grid=eps * k.grid,
        u=k.u,
        du=k.du / eps,
        step=eps * k.step,
        l_image=k.l_image / eps**2,
        residual=k.residual / eps**2,
    )
    return odecmp.comparison_certificate(
        u, phi, tol=1e-6, hypothesis_tol=1e-6 * psi.lam**2 * profile.origin_value
    )


def run_comparison(
    manifold, family, indices, kappa=None, max_concurrency=None
) -> Dict[int, odecmp.ComparisonCertificate]:
    kappa = utils.EnvVarConstants.KAPPA if kappa is None else kappa
    indices = list(indices)
    members = {index: family_member(manifold, family, index) for index in indices}
    measure = functools.partial(bessel_comparison, manifold, kappa=kappa)
    return async_utils.map_blocking(members, measure, _concurrency(max_concurrency))


@dataclasses.dataclass(frozen=True)
class SeriesReport:
    lam: float
    epsilon: float
    k_sup: float
    sup_norms: np.ndarray
    derivative_sup_norms: np.ndarray
    norm_ratios: np.ndarray
    derivative_norm_ratios: np.ndarray
    residuals: np.ndarray
    errors: np.ndarray

    def serialize(self):
        return dataclasses.asdict(self)


def series_report(
    manifold: ModelManifold,
    lam: float,
    order: Optional[int] = None,
    points: Optional[int] = None,
) -> SeriesReport:
    problem = perturb.rescale(manifold.geometry, lam)
    series = perturb.compute_vn(problem, order, points=points)
    validation = perturb.assemble_and_validate(series, problem)
    return SeriesReport(
        lam=lam,
        epsilon=problem.epsilon,
        k_sup=problem.k_sup,
        sup_norms=series.sup_norms,
        derivative_sup_norms=series.derivative_sup_norms,
        norm_ratios=series.norm_ratios,
        derivative_norm_ratios=series.derivative_norm_ratios,
        residuals=series.residuals,
        errors=validation.errors,
    )


def run_series(
    manifold,
    lams=perturb.LAMBDA_SWEEP,
    order=None,
    points=None,
    max_concurrency=None,
) -> List[SeriesReport]:
    """Perturbation series for each lambda, the terms of one series in sequence."""
    measure = functools.partial(series_report, manifold, order=order, points=points)
    results = async_utils.map_blocking(
        {lam: lam for lam in lams}, measure, _concurrency(max_concurrency)
    )
    return [results[lam] for lam in sorted(results)]

"""The acceptance suite: each numerical claim of the bound checked against an oracle."""

import dataclasses
import functools
import io
import logging
import math
import os
import statistics
from collections import OrderedDict
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from eigenbound import experiments, means, odecmp, perturb, specialfun, utils
from eigenbound.eigenfunctions import Frequency, Zonal
from eigenbound.manifolds import l2_norm, make_manifold
from eigenbound.records import CheckResult, ExperimentRecord, Report, write_csv

J0_AT_ONE = 0.7651976865579666
HORMANDER_LIMIT = 1 / math.sqrt(2 * math.pi)

CHECKS: "OrderedDict[str, Callable]" = OrderedDict()


def check(name: str):
    """Register an acceptance check; checks run in registration order."""

    def register(fn):
        CHECKS[name] = fn
        return fn

    return register


@dataclasses.dataclass
class SuiteConfig:
    kappa: float = dataclasses.field(
        default_factory=lambda: utils.EnvVarConstants.KAPPA
    )
    p: float = 2.0
    order: int = dataclasses.field(
        default_factory=lambda: utils.EnvVarConstants.SERIES_ORDER
    )
    nodes: Optional[int] = None
    lmin: int = 10
    lmax: int = 200
    lstep: int = 10
    kmin: int = 5
    kmax: int = 25
    kstep: int = 5
    lams: Sequence[float] = perturb.LAMBDA_SWEEP
    center: str = "max"
    seed: int = 0
    out: Optional[str] = None

    @property
    def zonal_indices(self) -> List[int]:
        return list(range(self.lmin, self.lmax + 1, self.lstep))

    @property
    def freq_indices(self) -> List[int]:
        return list(range(self.kmin, self.kmax + 1, self.kstep))

    def serialize(self) -> Dict[str, Any]:
        config = dataclasses.asdict(self)
        config["lams"] = list(self.lams)
        return config


class SuiteContext:
    """Sweeps shared between checks, computed on first use.

    A sweep that raises does so inside every check that needs it, so the
    failure is recorded per check.
    """

    def __init__(self, config: SuiteConfig):
        self.config = config
        self.s2 = make_manifold("s2")
        self.t2 = make_manifold("t2")

    @property
    def small_zonal(self) -> List[int]:
        return [l for l in self.config.zonal_indices if l <= 100]

    def members(self):
        """(manifold, eigenfunction) pairs of the EPD and comparison sweeps."""
        pairs = [(self.s2, Zonal(l).build(self.s2)) for l in self.small_zonal]
        pairs += [
            (self.t2, Frequency((k, 0)).build(self.t2))
            for k in self.config.freq_indices
        ]
        return pairs

    @functools.cached_property
    def hormander(self) -> List[ExperimentRecord]:
        return experiments.run_hormander(self.s2, "zonal", self.config.zonal_indices)

    def restriction(self, p: float) -> List[ExperimentRecord]:
        return experiments.run_restriction(
            self.s2,
            "zonal",
            self.config.zonal_indices,
            kappa=self.config.kappa,
            p=p,
            m=self.config.nodes,
            center_mode=self.config.center,
            seed=self.config.seed,
        )

    @functools.cached_property
    def restriction_p(self) -> List[ExperimentRecord]:
        return self.restriction(self.config.p)

    @functools.cached_property
    def equivalence(self) -> List[ExperimentRecord]:
        kwargs = dict(
            kappa=self.config.kappa,
            m=self.config.nodes,
            center_mode=self.config.center,
            seed=self.config.seed,
        )
        zonal = experiments.run_equivalence(
            self.s2, "zonal", self.config.zonal_indices, **kwargs
        )
        freq = experiments.run_equivalence(
            self.t2, "freq", self.config.freq_indices, **kwargs
        )
        return zonal + freq

    def sweeps(self) -> Dict[str, List[ExperimentRecord]]:
        """Whichever sweeps the checks managed to compute."""
        found = {}
        for name, attribute in (
            ("hormander", "hormander"),
            ("restriction", "restriction_p"),
            ("equivalence", "equivalence"),
        ):
            if attribute in self.__dict__:
                found[name] = self.__dict__[attribute]
        return found


def _result(name, worst, tolerance, detail="", passed=None) -> CheckResult:
    """A check result with margin = tolerance - worst.

    ``worst`` is the measured value on the failing side of ``tolerance``.
    """
    margin = tolerance - worst
    return CheckResult(
        name=name,
        passed=bool(margin >= 0) if passed is None else bool(passed),
        margin=float(margin),
        tolerance=float(tolerance),
        detail=detail,
    )


def _vacuous(name: str, what: str) -> CheckResult:
    logging.getLogger("eigenbound").warning(
        f"Check {name} has an empty {what}, passing vacuously."
    )
    return CheckResult(
        name=name,
        passed=True,
        margin=math.nan,
        tolerance=math.nan,
        detail=f"empty {what}",
    )


@check("special_functions")
def special_functions(context: SuiteContext) -> CheckResult:
    j0_error = abs(specialfun.bessel_j(0, 1.0) - J0_AT_ONE)
    x = np.geomspace(0.01, 10.0, 200)
    wronskian = x * (
        specialfun.bessel_j(1, x) * specialfun.bessel_y(0, x)
        - specialfun.bessel_j(0, x) * specialfun.bessel_y(1, x)
    )
    wronskian_error = float(np.max(np.abs(wronskian - specialfun.WRONSKIAN_CONSTANT)))
    half = np.linspace(0.1, 8.0, 80)
    closed_error = max(
        float(
            np.max(
                np.abs(
                    specialfun.bessel_j(nu, half)
                    - specialfun.bessel_j_series(nu, half)
                )
            )
        )
        for nu in (0.5, 1.5)
    )
    margins = [1e-12 - j0_error, 1e-8 - wronskian_error, 1e-12 - closed_error]
    return CheckResult(
        name="special_functions",
        passed=min(margins) >= 0,
        margin=min(margins),
        tolerance=1e-12,
        detail=(
            f"J0(1) error {j0_error:.2e}, x W error {wronskian_error:.2e}, "
            f"half-integer error {closed_error:.2e}"
        ),
    )


@check("flat_mean_value")
def flat_mean_value(context: SuiteContext) -> CheckResult:
    rng = np.random.default_rng(context.config.seed)
    torus = context.t2
    worst = 0.0
    for _ in range(10):
        k = np.zeros(2)
        while not 0 < np.linalg.norm(k) <= 12:
            k = rng.integers(-8, 9, size=2).astype(np.float64)
        x0 = torus.random_points(rng, 1)[0]
        r = rng.uniform(0.01, 0.4)

        def f(points, k=k):
            return np.cos(points @ k)

        mean = means.spherical_mean(torus, f, x0, r, m=512)
        expected = math.cos(k @ x0) * specialfun.bessel_j(0, np.linalg.norm(k) * r)
        worst = max(worst, abs(mean - expected))
    return _result(
        "flat_mean_value",
        worst,
        1e-8,
        f"max error {worst:.2e} over 10 random (k, x0, r)",
    )


def _epd_order(manifold, psi) -> float:
    center = means.locate_max(manifold, psi).point
    sizes = (16, 32, 64)
    errors, steps = [], []
    for size in sizes:
        profile = means.mean_profile(
            manifold, psi, center, power=1, r_max=1 / psi.lam, grid_size=size
        )
        residual = means.epd_residual(profile, manifold.geometry, psi.lam, "eigen")
        errors.append(float(np.max(np.abs(residual))))
        steps.append(profile.step)
    return float(np.min(odecmp.observed_order(errors, steps)))


@check("epd")
def epd(context: SuiteContext) -> CheckResult:
    orders = [
        _epd_order(context.t2, Frequency((5, 0)).build(context.t2)),
        _epd_order(context.s2, Zonal(10).build(context.s2)),
    ]
    worst_gap = 0.0
    for manifold, psi in context.members():
        center = means.locate_max(manifold, psi).point
        profile = means.mean_profile(
            manifold,
            psi,
            center,
            power=2,
            r_max=context.config.kappa / psi.lam,
            grid_size=512,
        )
        # The last radius carries a one-sided stencil.
        residual = means.epd_residual(
            profile, manifold.geometry, psi.lam, "square"
        )[:-1]
        gap = -float(np.min(residual)) / (psi.lam**2 * profile.origin_value)
        worst_gap = max(worst_gap, gap)
    order_margin = min(orders) - 1.8
    inequality_margin = 1e-6 - worst_gap
    return CheckResult(
        name="epd",
        passed=order_margin >= 0 and inequality_margin >= 0,
        margin=min(order_margin, inequality_margin),
        tolerance=1e-6,
        detail=(
            f"observed orders {np.round(orders, 3).tolist()}, "
            f"worst normalized negative part {worst_gap:.2e}"
        ),
    )


def fabricated_violation(
    geometry, dip: float = 1e-3
) -> odecmp.ComparisonCertificate:
    """Certificate of a profile pushed below the comparison function.

    The samples keep the L-image of the comparison function, so the
    hypotheses hold and only the margin can reveal the violation.
    """
    phi = odecmp.solve_ivp(odecmp.radial_problem(geometry, 5.0, x_end=0.2), 1e-4)
    bump = dip * np.sin(math.pi * phi.grid / phi.grid[-1]) ** 2
    return odecmp.comparison_certificate(
        dataclasses.replace(phi, u=phi.u - bump), phi
    )


@check("comparison")
def comparison(context: SuiteContext) -> CheckResult:
    failures, worst = [], math.inf
    for manifold, psi in context.members():
        certificate = experiments.bessel_comparison(
            manifold, psi, context.config.kappa
        )
        worst = min(worst, certificate.margin)
        if not (certificate.passed and certificate.matched):
            failures.append(
                f"{manifold.name}/{psi.family}/{psi.index_label}: "
                f"{certificate.outcome.value} {certificate.detail}"
            )
    violation = fabricated_violation(context.t2.geometry)
    caught = violation.outcome is odecmp.ComparisonOutcome.FAILED
    if not (caught and violation.margin < 0):
        failures.append(
            f"a fabricated violation gave {violation.outcome.value} "
            f"with margin {violation.margin:.3e}"
        )
    if not failures and math.isinf(worst):
        return _vacuous("comparison", "sweep")
    return CheckResult(
        name="comparison",
        passed=not failures,
        margin=float(worst),
        tolerance=1e-6,
        detail="; ".join(failures),
    )


@check("kappa_scan")
def kappa_scan(context: SuiteContext) -> CheckResult:
    planar = perturb.kappa_scan(2)
    spatial = perturb.kappa_scan(3)
    value_error = abs(
        specialfun.v0_profile(2, planar.kappa_star) - perturb.KAPPA_THRESHOLD
    )
    margins = [
        min(planar.kappa_star - 1.00, 1.06 - planar.kappa_star),
        min(spatial.kappa_star - 1.24, 1.30 - spatial.kappa_star),
        1e-10 - value_error,
    ]
    return CheckResult(
        name="kappa_scan",
        passed=min(margins) >= 0,
        margin=min(margins),
        tolerance=1e-10,
        detail=(
            f"kappa*(2) = {planar.kappa_star:.12f}, "
            f"kappa*(3) = {spatial.kappa_star:.12f}"
        ),
    )


@check("half_bound")
def half_bound(context: SuiteContext) -> CheckResult:
    kappa = context.config.kappa
    margins = {}
    for manifold_id in ("t2", "s2", "s3"):
        geometry = make_manifold(manifold_id).geometry
        for lam in context.config.lams:
            margins[f"{manifold_id}@{lam:g}"] = perturb.half_bound_certify(
                geometry, lam, kappa
            )
    if not margins:
        return _vacuous("half_bound", "lambda sweep")
    flat_profile = specialfun.v0_profile(2, np.linspace(0.0, kappa, 4097))
    expected = float(np.min(flat_profile)) - 0.5
    flat_errors = [
        abs(m - expected) for key, m in margins.items() if key.startswith("t2@")
    ]
    flat_error = max(flat_errors, default=0.0)
    worst_key = min(margins, key=margins.get)
    worst = margins[worst_key]
    return CheckResult(
        name="half_bound",
        passed=worst >= 0 and flat_error <= 1e-8,
        margin=float(worst),
        tolerance=1e-8,
        detail=(
            f"smallest margin {worst:.6g} at {worst_key}, "
            f"flat margin error {flat_error:.2e}"
        ),
    )


@check("perturbation_series")
def perturbation_series(context: SuiteContext) -> CheckResult:
    order = context.config.order
    frozen = perturb.order_sweep(
        [perturb.frozen_problem(2, epsilon=e) for e in (0.4, 0.2, 0.1, 0.05)], order
    )
    details = [f"frozen slope {frozen.slope:.3f} at N={order}"]
    margins = [frozen.slope - (order + 0.5)]
    lams = [lam for lam in context.config.lams if lam >= 25]
    s2 = context.s2.geometry
    if len(lams) >= 2:
        sweep = perturb.order_sweep([perturb.rescale(s2, lam) for lam in lams], 0)
        margins.append(sweep.slope - 0.5)
        details.append(f"s2 slope {sweep.slope:.3f} at N=0")
    if lams:
        residual, ratio = 0.0, 0.0
        for lam in lams:
            series = perturb.compute_vn(perturb.rescale(s2, lam), order)
            residual = max(residual, float(np.max(series.residuals)))
            ratio = max(ratio, float(np.nanmax(series.norm_ratios, initial=0.0)))
        margins += [1e-6 - residual, 5 - ratio]
        details.append(f"max term residual {residual:.2e}, max norm ratio {ratio:.3f}")
    if 50.0 in context.config.lams:
        problem = perturb.rescale(s2, 50.0)
        series = perturb.compute_vn(problem, 1, verify=False)
        errors = perturb.assemble_and_validate(series, problem).errors
        margins.append(errors[0] / errors[1] - 10)
        details.append(
            f"N=0 to N=1 error drop {errors[0] / errors[1]:.3g} at lambda=50"
        )
    return CheckResult(
        name="perturbation_series",
        passed=min(margins) >= 0,
        margin=float(min(margins)),
        tolerance=1e-6,
        detail=", ".join(details),
    )


@check("hormander")
def hormander(context: SuiteContext) -> CheckResult:
    psi = Zonal(200).build(context.s2)
    record = experiments.hormander_record(context.s2, psi)
    saturation = abs(record.hormander_ratio / HORMANDER_LIMIT - 1)
    norm_gap = 0.0
    members = [psi] + [
        Zonal(l).build(context.s2) for l in context.config.zonal_indices if l > 0
    ]
    for member in members:
        exact = l2_norm(context.s2, member)
        quadrature = l2_norm(context.s2, member, exact=False)
        norm_gap = max(norm_gap, abs(quadrature / exact - 1))
    sweep = [r.hormander_ratio for r in context.hormander if not r.excluded]
    sweep_max = max(sweep, default=math.nan)
    return CheckResult(
        name="hormander",
        passed=saturation <= 0.02 and norm_gap <= 1e-8,
        margin=min(0.02 - saturation, 1e-8 - norm_gap),
        tolerance=0.02,
        detail=(
            f"ratio {record.hormander_ratio:.6f} at l=200, "
            f"sweep maximum {sweep_max:.6f}, quadrature norm gap {norm_gap:.2e}"
        ),
    )


def _spread(records: Sequence[ExperimentRecord], field: str) -> float:
    values = [getattr(r, field) for r in records if not r.excluded]
    if any(not (math.isfinite(v) and v > 0) for v in values):
        return math.inf
    return max(values) / statistics.median(values)


@check("restriction")
def restriction(context: SuiteContext) -> CheckResult:
    records = context.restriction_p
    if not records:
        return _vacuous("restriction", "index range")
    spread = _spread(records, "restriction_ratio")
    spread_p4 = _spread(context.restriction(4.0), "restriction_ratio")
    worst = max(spread, spread_p4)
    return _result(
        "restriction",
        worst,
        2.0,
        f"max / median {spread:.4f} at p={context.config.p:g}, "
        f"{spread_p4:.4f} at p=4",
    )


@check("equivalence")
def equivalence(context: SuiteContext) -> CheckResult:
    records = [r for r in context.equivalence if math.isfinite(r.equiv_ratio)]
    if not records:
        return _vacuous("equivalence", "index range")
    kappa = context.config.kappa
    lowest = min(r.equiv_ratio for r in records)
    flat = [r for r in records if r.manifold == "t2"]
    linear_expected = 2 * specialfun.bessel_j(0, kappa) ** 2
    square_expected = 1 + specialfun.bessel_j(0, 2 * kappa)
    flat_error = max(
        (
            max(
                abs(r.linear_ratio - linear_expected),
                abs(r.equiv_ratio - square_expected),
            )
            for r in flat
        ),
        default=0.0,
    )
    return CheckResult(
        name="equivalence",
        passed=lowest >= 1 - 1e-6 and flat_error <= 1e-8,
        margin=float(lowest - 1),
        tolerance=1e-6,
        detail=(
            f"smallest 2 I / sup^2 = {lowest:.9f}, "
            f"flat identity error {flat_error:.2e}"
        ),
    )


@check("determinism")
def determinism(context: SuiteContext) -> CheckResult:
    indices = context.config.zonal_indices[:3]
    outputs = []
    for _ in range(2):
        buffer = io.StringIO()
        write_csv(experiments.run_hormander(context.s2, "zonal", indices), buffer)
        outputs.append(buffer.getvalue())
    identical = outputs[0] == outputs[1]
    return CheckResult(
        name="determinism",
        passed=identical,
        margin=0.0 if identical else -1.0,
        tolerance=0.0,
        detail=(
            "CSV output identical across runs"
            if identical
            else "CSV output differs between runs"
        ),
    )


def run_check(name: str, context: SuiteContext) -> CheckResult:
    logger = logging.getLogger("eigenbound")
    try:
        result = CHECKS[name](context)
    except Exception as e:
        result = CheckResult(
            name=name,
            passed=False,
            margin=math.nan,
            tolerance=math.nan,
            detail=f"{type(e).__name__}: {e}",
        )
    if result.passed:
        logger.info(f"Check {name} passed (margin {result.margin:.3g}).")
    else:
        logger.error(f"Check {name} failed: {result.detail}")
    return result


def run_suite(
    config: Optional[SuiteConfig] = None, names: Optional[Sequence[str]] = None
) -> Report:
    """Run the acceptance checks and collect their records into a report."""
    config = config or SuiteConfig()
    context = SuiteContext(config)
    if not config.zonal_indices and not config.freq_indices:
        logging.getLogger("eigenbound").warning(
            "Empty index range, sweep checks pass vacuously."
        )
    names = list(CHECKS) if names is None else list(names)
    checks = [run_check(name, context) for name in names]
    sweeps = context.sweeps()
    records = [record for sweep in sweeps.values() for record in sweep]
    report = Report(config=config.serialize(), checks=checks, records=records)
    if config.out is not None:
        write_outputs(report, sweeps, config.out)
    return report


def write_outputs(
    report: Report, sweeps: Dict[str, List[ExperimentRecord]], out: str
):
    """Write report.json plus one CSV per experiment in ``out``.

    Every experiment gets a file, if only a header.
    """
    os.makedirs(out, exist_ok=True)
    report.write(os.path.join(out, "report.json"))
    for name in ("hormander", "restriction", "equivalence"):
        write_csv(sweeps.get(name, []), os.path.join(out, f"{name}.csv"))

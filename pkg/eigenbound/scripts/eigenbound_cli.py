"""Command line harness for the eigenfunction sweeps and the acceptance suite."""

import argparse
import json
import logging
import sys

from colorama import Fore, Style

import eigenbound
from eigenbound import experiments, perturb, records, suite, utils
from eigenbound.eigenfunctions import FAMILIES, UnsupportedFamilyError
from eigenbound.manifolds import (
    RadiusOutOfRangeError,
    UnknownManifoldError,
    make_manifold,
)
from eigenbound.scripts import configure_logging

MANIFOLD_DIMENSIONS = {"t2": 2, "e2": 2, "s2": 2, "s3": 3}


class ConfigurationError(ValueError):
    """Flags that describe no valid experiment."""


def add_sweep_args(parser, kappa=False, p=False, center=False):
    parser.add_argument(
        "--manifold", default="s2", help="Model manifold id (t2, s2, s3 or a plugin)."
    )
    parser.add_argument(
        "--family",
        choices=FAMILIES,
        default="zonal",
        help="Eigenfunction family to sweep.",
    )
    parser.add_argument("--lmin", type=int, default=10, help="Smallest zonal degree.")
    parser.add_argument("--lmax", type=int, default=200, help="Largest zonal degree.")
    parser.add_argument(
        "--lstep", type=int, default=10, help="Stride of the zonal degrees."
    )
    parser.add_argument(
        "--kmin", type=int, default=1, help="Smallest torus frequency |k|."
    )
    parser.add_argument(
        "--kmax", type=int, default=25, help="Largest torus frequency |k|."
    )
    parser.add_argument("--out", default="-", help="Output path, - for stdout.")
    parser.add_argument(
        "--format", choices=["csv", "json"], default="csv", help="Output format."
    )
    if kappa:
        parser.add_argument(
            "--kappa",
            type=float,
            default=None,
            help="Sphere radius in units of 1 / lambda.",
        )
        parser.add_argument(
            "--nodes",
            type=int,
            default=None,
            help="Quadrature nodes on each geodesic sphere.",
        )
    if p:
        parser.add_argument(
            "--p",
            type=float,
            default=2.0,
            help="Exponent of the L^p(gamma) norm, at least 2.",
        )
    if center:
        parser.add_argument(
            "--center",
            choices=experiments.CENTER_MODES,
            default="max",
            help="Center geodesic spheres at a maximum or at a seeded random point.",
        )
        parser.add_argument(
            "--seed", type=int, default=0, help="Seed of the random centers."
        )


def parse_args(argv=None):
    parser = argparse.ArgumentParser(
        description="eigenbound: sup norms of eigenfunctions from spherical means"
    )
    subparsers = parser.add_subparsers(title="Commands", dest="command")
    subparsers.required = True

    hormander_parser = subparsers.add_parser(
        "hormander", help="Sup norm ratios ||psi||_inf lambda^-(n-1)/2 / ||psi||_2."
    )
    add_sweep_args(hormander_parser)
    hormander_parser.set_defaults(func=hormander)

    restrict_parser = subparsers.add_parser(
        "restrict", help="L^p norms on geodesic spheres of radius kappa / lambda."
    )
    add_sweep_args(restrict_parser, kappa=True, p=True, center=True)
    restrict_parser.set_defaults(func=restrict)

    equiv_parser = subparsers.add_parser(
        "equiv",
        help="2 I(x, kappa / lambda) / ||psi||_inf^2 and the half-bound margin.",
    )
    add_sweep_args(equiv_parser, kappa=True, center=True)
    equiv_parser.set_defaults(func=equiv)

    kappa_parser = subparsers.add_parser(
        "kappa", help="Largest kappa keeping the Bessel profile above a threshold."
    )
    kappa_parser.add_argument(
        "--manifold", default=None, help="Only the dimension of this manifold."
    )
    kappa_parser.add_argument(
        "--threshold",
        type=float,
        default=perturb.KAPPA_THRESHOLD,
        help="Level of the profile.",
    )
    kappa_parser.set_defaults(func=kappa)

    series_parser = subparsers.add_parser(
        "series", help="Perturbation series around the Bessel profile."
    )
    series_parser.add_argument("--manifold", default="s2", help="Model manifold id.")
    series_parser.add_argument(
        "--order", type=int, default=None, help="Highest series term N."
    )
    series_parser.add_argument(
        "--lams",
        type=float,
        nargs="+",
        default=list(perturb.LAMBDA_SWEEP),
        help="Frequencies to expand at.",
    )
    series_parser.add_argument(
        "--points", type=int, default=None, help="Size of the rho grid."
    )
    series_parser.add_argument("--out", default="-", help="Output path, - for stdout.")
    series_parser.set_defaults(func=series)

    suite_parser = subparsers.add_parser("suite", help="Run every acceptance check.")
    suite_parser.add_argument(
        "--kappa",
        type=float,
        default=None,
        help="Sphere radius in units of 1 / lambda.",
    )
    suite_parser.add_argument(
        "--p", type=float, default=2.0, help="Exponent of the restriction sweep."
    )
    suite_parser.add_argument(
        "--order", type=int, default=None, help="Highest series term N."
    )
    suite_parser.add_argument(
        "--nodes",
        type=int,
        default=None,
        help="Quadrature nodes on each geodesic sphere.",
    )
    suite_parser.add_argument(
        "--lmin", type=int, default=10, help="Smallest zonal degree."
    )
    suite_parser.add_argument(
        "--lmax", type=int, default=200, help="Largest zonal degree."
    )
    suite_parser.add_argument(
        "--lstep", type=int, default=10, help="Stride of the zonal degrees."
    )
    suite_parser.add_argument(
        "--kmin", type=int, default=5, help="Smallest torus frequency."
    )
    suite_parser.add_argument(
        "--kmax", type=int, default=25, help="Largest torus frequency."
    )
    suite_parser.add_argument(
        "--kstep", type=int, default=5, help="Stride of the torus frequencies."
    )
    suite_parser.add_argument(
        "--lams",
        type=float,
        nargs="+",
        default=list(perturb.LAMBDA_SWEEP),
        help="Frequencies of the half-bound and series checks.",
    )
    suite_parser.add_argument(
        "--center",
        choices=experiments.CENTER_MODES,
        default="max",
        help="Centering of geodesic spheres.",
    )
    suite_parser.add_argument(
        "--seed", type=int, default=0, help="Seed of random draws."
    )
    suite_parser.add_argument(
        "--out", default=None, help="Directory for report.json and the CSV tables."
    )
    suite_parser.set_defaults(func=run_suite)

    return parser.parse_args(argv)


def _manifold(manifold_id):
    try:
        return make_manifold(manifold_id)
    except UnknownManifoldError as e:
        raise ConfigurationError(str(e)) from e


def _indices(args):
    if args.family == "zonal":
        if args.lmin < 0 or args.lstep < 1:
            raise ConfigurationError("Zonal degrees need --lmin >= 0 and --lstep >= 1.")
        return range(args.lmin, args.lmax + 1, args.lstep)
    if args.family == "freq":
        if args.kmin < 0:
            raise ConfigurationError("Torus frequencies need --kmin >= 0.")
        return range(args.kmin, args.kmax + 1)
    if args.family == "constant":
        return [0]
    raise ConfigurationError(f"Family {args.family} has no integer sweep.")


def _kappa(args) -> float:
    kappa = utils.EnvVarConstants.KAPPA if args.kappa is None else args.kappa
    if kappa <= 0:
        raise ConfigurationError(f"--kappa must be positive, got {kappa}.")
    return kappa


def _stdout_or(path):
    return sys.stdout if path in (None, "-") else path


def write_records(args, sweep):
    if args.format == "csv":
        records.write_csv(sweep, _stdout_or(args.out))
    else:
        config = {key: value for key, value in vars(args).items() if key != "func"}
        records.Report(config=config, records=sweep).write(_stdout_or(args.out))


def hormander(args):
    sweep = experiments.run_hormander(
        _manifold(args.manifold), args.family, _indices(args)
    )
    write_records(args, sweep)
    return 0


def restrict(args):
    if args.p < 2:
        raise ConfigurationError(f"--p must be at least 2, got {args.p}.")
    sweep = experiments.run_restriction(
        _manifold(args.manifold),
        args.family,
        _indices(args),
        kappa=_kappa(args),
        p=args.p,
        m=args.nodes,
        center_mode=args.center,
        seed=args.seed,
    )
    write_records(args, sweep)
    return 0


def equiv(args):
    sweep = experiments.run_equivalence(
        _manifold(args.manifold),
        args.family,
        _indices(args),
        kappa=_kappa(args),
        m=args.nodes,
        center_mode=args.center,
        seed=args.seed,
    )
    write_records(args, sweep)
    return 0


def kappa(args):
    if args.manifold is None:
        dimensions = sorted(set(MANIFOLD_DIMENSIONS.values()))
    else:
        dimensions = [_manifold(args.manifold).n]
    results = [perturb.kappa_scan(n, args.threshold) for n in dimensions]
    for result in results:
        payload = dict(
            n=result.n,
            threshold=result.threshold,
            kappa_star=result.kappa_star,
            degenerate=result.degenerate,
        )
        print(json.dumps(payload))
    return 0


def series(args):
    manifold = _manifold(args.manifold)
    reports = experiments.run_series(
        manifold, lams=args.lams, order=args.order, points=args.points
    )
    payload = {
        "version": eigenbound.__version__,
        "manifold": manifold.name,
        "series": [report.serialize() for report in reports],
    }
    text = json.dumps(
        records.finite_or_none(payload),
        indent=4,
        sort_keys=True,
        cls=records.ReportEncoder,
    )
    if args.out in (None, "-"):
        print(text)
    else:
        with open(args.out, "w") as f:
            f.write(text)
    return 0


def print_check(result: records.CheckResult):
    color, status = (Fore.GREEN, "PASS") if result.passed else (Fore.RED, "FAIL")
    print(
        f"{Style.BRIGHT}{color}{status}{Style.RESET_ALL} {result.name}: "
        f"margin {result.margin:.3g} {result.detail}"
    )


def run_suite(args):
    config = suite.SuiteConfig(
        kappa=_kappa(args),
        p=args.p,
        order=utils.EnvVarConstants.SERIES_ORDER if args.order is None else args.order,
        nodes=args.nodes,
        lmin=args.lmin,
        lmax=args.lmax,
        lstep=args.lstep,
        kmin=args.kmin,
        kmax=args.kmax,
        kstep=args.kstep,
        lams=tuple(args.lams),
        center=args.center,
        seed=args.seed,
        out=args.out,
    )
    if config.p < 2:
        raise ConfigurationError(f"--p must be at least 2, got {config.p}.")
    report = suite.run_suite(config)
    for result in report.checks:
        print_check(result)
    return 0 if report.passed else 1


def main(argv=None):
    configure_logging("eigenbound")
    args = parse_args(argv)
    logger = logging.getLogger("eigenbound")
    try:
        status = args.func(args)
    except (
        ConfigurationError,
        UnsupportedFamilyError,
        RadiusOutOfRangeError,
        perturb.RescaleRangeError,
    ) as e:
        logger.error(f"Configuration error: {e}")
        status = 2
    sys.exit(status)


if __name__ == "__main__":
    main()

"""Tests for experiments.py"""

import logging
import math

import numpy as np
import pytest

from eigenbound import experiments, specialfun
from eigenbound.eigenfunctions import Constant, Frequency, Zonal
from eigenbound.manifolds import RadiusOutOfRangeError, make_manifold

KAPPA = 1.0


@pytest.fixture
def s2():
    return make_manifold("s2")


@pytest.fixture
def t2():
    return make_manifold("t2")


def test_hormander_record(s2, quick_env):
    psi = Zonal(10).build(s2)
    record = experiments.hormander_record(s2, psi)
    expected = 110 ** (-1 / 4) / math.sqrt(4 * math.pi / 21)
    assert record.hormander_ratio == pytest.approx(expected, rel=1e-10)
    assert record.sup_norm == pytest.approx(1.0)
    assert record.index == "10"


def test_constant_is_excluded(s2, quick_env):
    record = experiments.hormander_record(s2, Constant().build(s2))
    assert record.excluded
    assert math.isnan(record.hormander_ratio)


def test_run_hormander_sorted(s2, quick_env):
    sweep = experiments.run_hormander(s2, "zonal", [20, 0, 10])
    assert [r.index for r in sweep] == ["0", "10", "20"]
    assert all(r.experiment == "hormander" for r in sweep)
    assert sweep[0].excluded and not sweep[1].excluded


def test_hormander_ratio_approaches_limit(s2, quick_env):
    sweep = experiments.run_hormander(s2, "zonal", range(50, 201, 10))
    ratios = np.array([record.hormander_ratio for record in sweep])
    distance = ratios - 1 / math.sqrt(2 * math.pi)
    assert np.all(distance > 0)
    assert np.all(np.diff(distance) < 0)
    assert distance[-1] < distance[0] / 2


def test_empty_sweep_warns(s2, caplog):
    with caplog.at_level(logging.WARNING, logger="eigenbound"):
        assert experiments.run_hormander(s2, "zonal", range(10, 5)) == []
    assert "Empty index range" in caplog.text


def test_flat_restriction(t2, quick_env):
    psi = Frequency((5, 0)).build(t2)
    record = experiments.restriction_record(t2, psi, KAPPA, p=2.0)
    h = 2 * math.pi * KAPPA / 5
    square_mean = (1 + specialfun.bessel_j(0, 2 * KAPPA)) / 2
    norm = math.sqrt(2) * math.pi
    assert record.restriction_ratio == pytest.approx(
        math.sqrt(h * square_mean) / norm, rel=1e-9
    )
    assert record.restriction_normalized == pytest.approx(
        math.sqrt(square_mean) / norm, rel=1e-9
    )
    assert record.reconstructed_constant == pytest.approx(
        math.sqrt(2 * square_mean) / norm, rel=1e-9
    )
    assert record.p == 2.0 and record.kappa == KAPPA


def test_zonal_restriction_on_sphere(s2, quick_env):
    psi = Zonal(100).build(s2)
    record = experiments.restriction_record(s2, psi, KAPPA, p=2.0)
    r = KAPPA / math.sqrt(100 * 101)
    circle = 2 * math.pi * math.sin(r) * specialfun.legendre(100, math.cos(r)) ** 2
    assert record.restriction_ratio == pytest.approx(
        math.sqrt(circle) / record.l2_norm, rel=1e-8
    )
    assert record.l2_norm == pytest.approx(math.sqrt(4 * math.pi / 201))


def test_restriction_exponent(t2):
    with pytest.raises(ValueError):
        experiments.restriction_record(t2, Frequency((5, 0)).build(t2), KAPPA, p=1.5)


def test_restriction_radius_out_of_range(s2, quick_env):
    with pytest.raises(RadiusOutOfRangeError):
        experiments.restriction_record(s2, Zonal(1).build(s2), 5.0)


def test_random_centers_are_seeded(s2, quick_env):
    psi = Zonal(20).build(s2)
    first = experiments.restriction_record(s2, psi, KAPPA, center_mode="random", seed=3)
    second = experiments.restriction_record(
        s2, psi, KAPPA, center_mode="random", seed=3
    )
    at_max = experiments.restriction_record(s2, psi, KAPPA)
    assert first.restriction_ratio == second.restriction_ratio
    assert first.restriction_ratio != at_max.restriction_ratio


def test_unknown_center_mode(s2, quick_env):
    with pytest.raises(ValueError):
        experiments.restriction_record(
            s2, Zonal(20).build(s2), KAPPA, center_mode="min"
        )


def test_flat_equivalence(t2, quick_env):
    psi = Frequency((5, 0)).build(t2)
    record = experiments.equivalence_record(t2, psi, KAPPA)
    j0 = specialfun.bessel_j(0, KAPPA)
    assert record.equiv_ratio == pytest.approx(
        1 + specialfun.bessel_j(0, 2 * KAPPA), abs=1e-9
    )
    assert record.linear_ratio == pytest.approx(2 * j0**2, abs=1e-9)
    assert record.half_bound_margin == pytest.approx(j0 - 0.5, abs=1e-8)
    assert record.reconstructed_constant == pytest.approx(
        math.sqrt(1 + specialfun.bessel_j(0, 2 * KAPPA)) / (math.sqrt(2) * math.pi),
        rel=1e-9,
    )


def test_constant_equivalence(t2, quick_env):
    record = experiments.equivalence_record(t2, Constant().build(t2), KAPPA)
    assert record.equiv_ratio == pytest.approx(2.0)
    assert math.isnan(record.half_bound_margin)


def test_zonal_equivalence_lower_bound(s2, quick_env):
    sweep = experiments.run_equivalence(s2, "zonal", [10, 40], kappa=KAPPA)
    for record in sweep:
        assert record.equiv_ratio >= 1
        assert record.half_bound_margin > 0
        assert record.experiment == "equivalence"


@pytest.mark.parametrize(
    "manifold_id,member", [("s2", Zonal(10)), ("t2", Frequency((5, 0)))]
)
def test_bessel_comparison_passes(manifold_id, member, quick_env):
    manifold = make_manifold(manifold_id)
    psi = member.build(manifold)
    certificate = experiments.bessel_comparison(manifold, psi, KAPPA)
    assert certificate.matched
    assert certificate.hypothesis_tolerance == pytest.approx(1e-6 * psi.lam**2)
    assert certificate.passed, certificate.detail


def test_run_comparison_keys(t2, quick_env):
    certificates = experiments.run_comparison(t2, "freq", [5, 10], kappa=KAPPA)
    assert set(certificates) == {5, 10}


def test_flat_series_report(t2, quick_env):
    report = experiments.series_report(t2, 10.0, order=2, points=1025)
    assert report.k_sup == 0.0
    assert report.epsilon == pytest.approx(1 / (10 * math.sqrt(2)))
    assert report.sup_norms[0] == pytest.approx(1.0)
    assert np.max(report.errors) <= 1e-7
    assert set(report.serialize()) >= {
        "lam",
        "epsilon",
        "k_sup",
        "sup_norms",
        "errors",
        "residuals",
    }


def test_run_series_sorted(s2, quick_env):
    reports = experiments.run_series(s2, lams=(100.0, 50.0), order=1, points=1025)
    assert [r.lam for r in reports] == [50.0, 100.0]
    for report in reports:
        assert report.errors[1] < report.errors[0]

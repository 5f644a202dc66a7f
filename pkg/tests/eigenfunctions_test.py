"""Tests for eigenfunctions.py"""

import math

import numpy as np
import pytest

from eigenbound import eigenfunctions
from eigenbound.eigenfunctions import (
    Constant,
    Frequency,
    TrigCombination,
    Zonal,
    eigenfunction,
)
from eigenbound.manifolds import make_manifold


@pytest.mark.parametrize("l", [0, 1, 10, 57])
def test_s2_zonal(l):
    psi = eigenfunction(make_manifold("s2"), Zonal(l))
    assert psi.lam == pytest.approx(math.sqrt(l * (l + 1)))
    assert psi.norm_squared == pytest.approx(4 * math.pi / (2 * l + 1))
    assert psi(np.array([0.0, 0.0, 1.0])) == pytest.approx(1.0)
    assert psi(np.array([0.0, 0.0, -1.0])) == pytest.approx((-1) ** l)


@pytest.mark.parametrize("l", [0, 3, 20])
def test_s3_zonal(l):
    psi = eigenfunction(make_manifold("s3"), Zonal(l))
    assert psi.lam == pytest.approx(math.sqrt(l * (l + 2)))
    assert psi.norm_squared == pytest.approx(2 * math.pi**2 / (l + 1) ** 2)
    assert psi(np.array([0.0, 0.0, 0.0, 1.0])) == pytest.approx(1.0)


def test_zonal_custom_pole():
    psi = eigenfunction(make_manifold("s2"), Zonal(4, pole=(2.0, 0.0, 0.0)))
    assert psi(np.array([1.0, 0.0, 0.0])) == pytest.approx(1.0)
    np.testing.assert_allclose(psi.peak_candidates[0], [1.0, 0.0, 0.0])


def test_zonal_needs_sphere():
    with pytest.raises(eigenfunctions.UnsupportedFamilyError):
        eigenfunction(make_manifold("t2"), Zonal(3))


def test_zonal_degree_must_be_integer():
    with pytest.raises(ValueError):
        eigenfunction(make_manifold("s2"), Zonal(2.5))


def test_frequency(data_generator):
    torus = make_manifold("t2")
    k = data_generator.random_frequency()
    psi = eigenfunction(torus, Frequency(k, phase=0.3))
    assert psi.lam == pytest.approx(float(np.linalg.norm(k)))
    assert psi.norm_squared == pytest.approx(2 * math.pi**2)
    np.testing.assert_allclose(np.abs(psi(psi.peak_candidates)), 1.0, atol=1e-12)


def test_frequency_index_label():
    psi = eigenfunction(make_manifold("t2"), Frequency((3, -4)))
    assert psi.index == (3, -4)
    assert psi.index_label == "3:-4"


def test_zero_frequency_is_constant():
    psi = eigenfunction(make_manifold("t2"), Frequency((0, 0)))
    assert psi.family == "constant"
    assert psi.lam == 0.0


def test_frequency_must_be_lattice_vector():
    with pytest.raises(ValueError):
        eigenfunction(make_manifold("t2"), Frequency((0.5, 1)))


def test_frequency_needs_torus():
    with pytest.raises(eigenfunctions.UnsupportedFamilyError):
        eigenfunction(make_manifold("s2"), Frequency((1, 0)))


def test_trig_combination_norm():
    torus = make_manifold("t2")
    psi = eigenfunction(
        torus, TrigCombination([((3, 4), 1.0, 0.0), ((5, 0), 2.0, 1.0)])
    )
    assert psi.lam == pytest.approx(5.0)
    assert psi.norm_squared == pytest.approx(5 * 2 * math.pi**2)
    quadrature = torus.l2_quadrature(psi, 64)
    assert quadrature == pytest.approx(psi.norm_squared, rel=1e-10)


def test_trig_combination_opposite_frequencies_have_no_exact_norm():
    psi = eigenfunction(
        make_manifold("t2"), TrigCombination([((3, 4), 1.0, 0.0), ((-3, -4), 1.0, 0.5)])
    )
    assert psi.norm_squared is None


def test_trig_combination_unequal_lengths():
    with pytest.raises(ValueError):
        eigenfunction(
            make_manifold("t2"),
            TrigCombination([((3, 4), 1.0, 0.0), ((1, 0), 1.0, 0.0)]),
        )


def test_constant(manifold):
    psi = eigenfunction(manifold, Constant(2.0))
    assert psi.lam == 0.0
    assert psi.index_label == "0"
    assert psi.norm_squared == pytest.approx(4 * manifold.total_volume)
    np.testing.assert_array_equal(
        psi(manifold.random_points(np.random.default_rng(0), 3)), 2.0
    )


def test_family_member():
    s2 = make_manifold("s2")
    t2 = make_manifold("t2")
    assert eigenfunctions.family_member(s2, "zonal", 7).index == (7,)
    assert eigenfunctions.family_member(t2, "freq", 7).index == (7, 0)
    assert eigenfunctions.family_member(t2, "constant", 0).lam == 0.0


def test_family_member_unknown_family():
    with pytest.raises(eigenfunctions.UnsupportedFamilyError):
        eigenfunctions.family_member(make_manifold("t2"), "trig", 3)


def test_eval_at_alias():
    psi = eigenfunction(make_manifold("s2"), Zonal(2))
    assert psi.eval_at(np.array([0.0, 0.0, 1.0])) == psi(np.array([0.0, 0.0, 1.0]))

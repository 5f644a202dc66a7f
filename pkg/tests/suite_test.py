"""Tests for suite.py"""

import json
import math
import os

import pytest

from eigenbound import odecmp, records, suite
from eigenbound.manifolds import make_manifold


def test_check_order():
    assert list(suite.CHECKS) == [
        "special_functions",
        "flat_mean_value",
        "epd",
        "comparison",
        "kappa_scan",
        "half_bound",
        "perturbation_series",
        "hormander",
        "restriction",
        "equivalence",
        "determinism",
    ]


def test_config_defaults():
    config = suite.SuiteConfig()
    assert config.zonal_indices == list(range(10, 201, 10))
    assert config.freq_indices == [5, 10, 15, 20, 25]
    serialized = config.serialize()
    assert serialized["lams"] == [10.0, 25.0, 50.0, 100.0, 200.0]
    assert serialized["out"] is None


def test_cheap_checks_pass():
    report = suite.run_suite(
        names=["special_functions", "flat_mean_value", "kappa_scan"]
    )
    assert [check.name for check in report.checks] == [
        "special_functions",
        "flat_mean_value",
        "kappa_scan",
    ]
    assert report.passed
    assert report.records == []


def test_half_bound_check_passes():
    report = suite.run_suite(
        suite.SuiteConfig(lams=(25.0, 100.0)), names=["half_bound"]
    )
    assert report.passed
    assert report.checks[0].margin > 0


def test_half_bound_without_lambdas_is_vacuous():
    result = suite.run_check(
        "half_bound", suite.SuiteContext(suite.SuiteConfig(lams=()))
    )
    assert result.passed
    assert math.isnan(result.margin)


def test_check_that_raises_fails(monkeypatch):
    def boom(context):
        raise RuntimeError("no convergence")

    monkeypatch.setitem(suite.CHECKS, "boom", boom)
    result = suite.run_check("boom", suite.SuiteContext(suite.SuiteConfig()))
    assert not result.passed
    assert math.isnan(result.margin)
    assert "RuntimeError: no convergence" in result.detail


def test_empty_restriction_is_vacuous():
    config = suite.SuiteConfig(lmin=30, lmax=20)
    result = suite.run_check("restriction", suite.SuiteContext(config))
    assert result.passed
    assert result.detail == "empty index range"


def test_write_outputs_without_sweeps(tmp_path):
    report = records.Report(config={"kappa": 1.0})
    out = os.path.join(tmp_path, "run")
    suite.write_outputs(report, {}, out)
    assert sorted(os.listdir(out)) == [
        "equivalence.csv",
        "hormander.csv",
        "report.json",
        "restriction.csv",
    ]
    with open(os.path.join(out, "hormander.csv")) as f:
        assert f.read() == ",".join(records.CSV_COLUMNS) + "\n"
    with open(os.path.join(out, "report.json")) as f:
        assert json.load(f)["config"] == {"kappa": 1.0}


def test_determinism_check(quick_env):
    config = suite.SuiteConfig(lmin=10, lmax=30)
    result = suite.run_check("determinism", suite.SuiteContext(config))
    assert result.passed


def test_sweep_records_reach_outputs(tmp_path, quick_env):
    config = suite.SuiteConfig(lmin=10, lmax=30, out=str(tmp_path))
    report = suite.run_suite(config, names=["restriction"])
    assert report.passed
    assert {r.experiment for r in report.records} == {"restriction"}
    with open(os.path.join(tmp_path, "restriction.csv")) as f:
        assert len(f.read().splitlines()) == 4


def test_fabricated_violation_fails_on_margin():
    certificate = suite.fabricated_violation(make_manifold("t2").geometry)
    assert certificate.outcome is odecmp.ComparisonOutcome.FAILED
    assert certificate.matched
    assert certificate.margin == pytest.approx(-1e-3, rel=1e-2)
    assert "u - phi reaches" in certificate.detail


def test_comparison_check_passes(quick_env):
    config = suite.SuiteConfig(lmin=10, lmax=10, kmin=5, kmax=5)
    result = suite.run_check("comparison", suite.SuiteContext(config))
    assert result.passed, result.detail


def test_epd_check_passes_for_high_degrees():
    config = suite.SuiteConfig(lmin=40, lmax=100, lstep=60, kmin=5, kmax=5)
    result = suite.run_check("epd", suite.SuiteContext(config))
    assert result.passed, result.detail


@pytest.mark.slow
def test_full_suite_passes(tmp_path):
    config = suite.SuiteConfig(
        lmax=100, kmax=15, lams=(25.0, 50.0, 100.0), out=str(tmp_path)
    )
    report = suite.run_suite(config)
    failed = [f"{c.name}: {c.detail}" for c in report.checks if not c.passed]
    assert not failed
    with open(os.path.join(tmp_path, "report.json")) as f:
        payload = json.load(f)
    assert all(check["pass"] for check in payload["checks"])
    assert payload["constants"]["equiv_ratio"] is not None

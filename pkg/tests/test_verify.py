import math

import pytest

from scripts.contour import LoopSpec
from scripts.errors import DegenerateError
from scripts.hfront import helicoidal_front
from scripts.mesh_io import DomainSpec
from scripts.mexpr import parse_expr
from scripts.ribaucour import build_pair
from scripts.riccati import closed_form_solution
from scripts.verify import (
    _collect,
    _tiers,
    all_passed,
    check_hyperboloid,
    check_minimal,
    check_monodromy,
    check_periods,
    print_reports,
    run_front_suite,
    run_suite,
)
from scripts.weierstrass import INFINITY, WeierstrassData

CUBE_ROOT_2 = 2 ** (1 / 3)
EXACT_CHECKS = ("riccati", "hopf", "frontal_data", "hyperboloid", "symmetry", "envelope_roundtrip")


@pytest.fixture
def catenoid():
    return WeierstrassData(parse_expr("z^-2"), parse_expr("z"), (0, INFINITY))


@pytest.fixture
def pair(catenoid):
    return build_pair(catenoid, closed_form_solution("catenoid", {"m": 3, "C": 2}), 2)


@pytest.fixture
def domain():
    return DomainSpec("annulus", (0.5, 2.0), punctures=(0,))


def by_name(reports):
    return {report.name: report for report in reports}


def test_collect_counts_failures():
    def at(item):
        if item == 0:
            raise DegenerateError("zero")
        if item == 1:
            return None
        return 1e-3 * item

    report = _collect("demo", 1.0, [0, 1, 2, 3], at)
    assert report.points_tested == 2
    assert report.failures == 1
    assert math.isinf(report.max_residual)
    assert not report.passed
    assert "first_failure" in report.details


def test_collect_without_failures():
    report = _collect("demo", 1e-2, [2, 3], lambda item: 1e-3 * item)
    assert report.passed
    assert report.max_residual == pytest.approx(3e-3)
    assert report.as_dict()["points_tested"] == 2


def test_tiers_scale():
    tiers = _tiers({"algebraic": 1e-8}, 10.0)
    assert tiers["algebraic"] == pytest.approx(1e-7)
    assert tiers["quadrature"] == pytest.approx(1e-5)
    assert tiers["finite_difference"] == pytest.approx(1e-2)


def test_catenoid_is_minimal(catenoid):
    report = check_minimal(catenoid, [0.7 + 0.2j, 1.4 - 0.9j, -0.8 + 0.8j])
    assert report.passed, report.as_dict()


def test_run_suite(pair, domain):
    loops = [LoopSpec(0, 0.1), LoopSpec(CUBE_ROOT_2, 0.1)]
    reports = run_suite(pair, domain, loops, seed=11, count=6, progress=False)
    names = [report.name for report in reports]
    assert names == sorted(names)
    assert {"periods", "monodromy", "sphere_congruence", "minimal_transformed"} <= set(names)
    reports = by_name(reports)
    for name in EXACT_CHECKS + ("periods", "monodromy"):
        assert reports[name].passed, reports[name].as_dict()


def test_hyperboloid_reports_absolute_residual():
    report = check_hyperboloid(helicoidal_front(3), [1.0, 1.2 + 0.3j, 0.8 - 0.2j])
    assert report.passed
    assert 0 <= report.details["max_absolute"] < 1e-11
    assert report.max_residual <= report.details["max_absolute"]


def test_tiny_tolerances_fail(pair, domain):
    reports = by_name(run_suite(pair, domain, seed=11, count=4, progress=False, tol_scale=1e-12))
    assert not reports["sphere_congruence"].passed
    assert not all_passed(reports.values())


def test_front_suite():
    front = helicoidal_front(3)
    domain = DomainSpec("annulus", (0.3, 3.0), punctures=(0,))
    reports = by_name(run_front_suite(front, domain, [LoopSpec(0, 1.0)], seed=3, count=5, progress=False))
    assert set(reports) == {"envelope_roundtrip", "flatness", "form_relations", "hyperboloid", "periods",
                            "symmetry", "xi_product"}
    for name in ("hyperboloid", "symmetry", "envelope_roundtrip", "xi_product", "periods"):
        assert reports[name].passed, reports[name].as_dict()


def test_non_integer_exponent_fails_monodromy(catenoid):
    pair = build_pair(catenoid, closed_form_solution("catenoid", {"m": 2.5, "C": 2}), (2.5 ** 2 - 1) / 4)
    loops = [LoopSpec(0, 0.5)]
    assert not check_monodromy(pair, loops).passed


def test_print_reports(pair, capsys):
    print_reports([check_periods(pair, [LoopSpec(0, 0.1)])])
    out = capsys.readouterr().out
    assert out.startswith("PASS periods")

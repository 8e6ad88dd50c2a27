import pytest

from scripts.ends import (
    CATENOID_TYPE,
    EXTENDS_REGULARLY,
    PLANAR_EMBEDDED,
    PLANAR_NONEMBEDDED,
    UNCLASSIFIED,
    _decide,
    classify_end,
    classify_ends,
    normalized_local_data,
)
from scripts.mexpr import eval_expr, parse_expr
from scripts.ribaucour import build_pair
from scripts.riccati import closed_form_solution
from scripts.weierstrass import INFINITY, WeierstrassData

CUBE_ROOT_2 = 2 ** (1 / 3)
UNIT_ROOTS = (1, -0.5 + 0.8660254037844386j, -0.5 - 0.8660254037844386j)


def catenoid_pair(C):
    W = WeierstrassData(parse_expr("z^-2"), parse_expr("z"), (0, INFINITY))
    return build_pair(W, closed_form_solution("catenoid", {"m": 3, "C": C}), 2)


@pytest.fixture
def trinoid_pair():
    W = WeierstrassData(parse_expr("1/(z^3-1)^2"), parse_expr("z^2"), UNIT_ROOTS, 0.5)
    return build_pair(W, closed_form_solution("trinoid"), 5)


def tags_by_point(classes):
    return {("inf" if end.point == INFINITY else complex(round(end.point.real, 6), round(end.point.imag, 6))): end.tag
            for end in classes}


def test_catenoid_with_planar_ends():
    classes = classify_ends(catenoid_pair(2))
    assert len(classes) == 5
    tags = [end.tag for end in classes]
    assert tags.count(PLANAR_EMBEDDED) == 3
    assert tags.count(CATENOID_TYPE) == 2
    for end in classes:
        if end.tag == PLANAR_EMBEDDED:
            assert abs(abs(end.point) - CUBE_ROOT_2) < 1e-6
            assert end.orders == (1, 0, 1)
    by_point = tags_by_point(classes)
    assert by_point[0j] == CATENOID_TYPE
    assert by_point["inf"] == CATENOID_TYPE


def test_catenoid_linear_solution():
    classes = classify_ends(catenoid_pair(0))
    assert [end.tag for end in classes] == [CATENOID_TYPE, CATENOID_TYPE]


def test_trinoid_ends(trinoid_pair):
    classes = classify_ends(trinoid_pair)
    tags = [end.tag for end in classes]
    assert tags.count(CATENOID_TYPE) == 3
    assert tags.count(PLANAR_NONEMBEDDED) == 1
    at_zero = next(end for end in classes if abs(end.point) < 1e-6)
    assert at_zero.tag == PLANAR_NONEMBEDDED
    assert at_zero.orders == (2, 0, 2)


def test_trinoid_end_at_infinity(trinoid_pair):
    end = classify_end(trinoid_pair, INFINITY)
    assert end.tag == PLANAR_NONEMBEDDED
    assert end.as_dict()["point"] == "inf"


def test_normalized_data_vanish_at_point(trinoid_pair):
    for z0 in UNIT_ROOTS + (INFINITY,):
        f, g, h, point = normalized_local_data(trinoid_pair.W, trinoid_pair.h, z0)
        assert abs(eval_expr(g, point)) < 1e-12


def test_end_as_dict():
    end = classify_end(catenoid_pair(2), 0)
    assert end.as_dict() == {"point": [0.0, 0.0], "tag": CATENOID_TYPE, "orders": [1, -2, 1]}


@pytest.mark.parametrize(
    "orders, tag",
    [
        ((1, 0, 0), EXTENDS_REGULARLY),
        ((1, 0, 1), PLANAR_EMBEDDED),
        ((2, 0, 2), PLANAR_NONEMBEDDED),
        ((3, 0, 1), UNCLASSIFIED),
        ((1, -2, 1), CATENOID_TYPE),
        ((2, -2, 2), PLANAR_NONEMBEDDED),
    ],
)
def test_decision_table(orders, tag):
    assert _decide(*orders) == tag

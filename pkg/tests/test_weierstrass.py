import math

import numpy as np
import pytest

from scripts.contour import PathSpec
from scripts.errors import ConfigError, PathError
from scripts.mexpr import parse_expr
from scripts.weierstrass import (
    INFINITY,
    WeierstrassData,
    chart_at_infinity,
    gauss_curv,
    gauss_normal,
    immerse,
    immerse_near,
    inverse_stereographic,
    metric_factor,
    rotate_sphere,
    scaled,
    stereographic,
)


@pytest.fixture
def catenoid():
    return WeierstrassData(parse_expr("z^-2"), parse_expr("z"), (0, INFINITY))


def catenoid_point(r, theta):
    radius = 0.5 * (r + 1 / r)
    return np.array([1 - radius * math.cos(theta), -radius * math.sin(theta), math.log(r)])


@pytest.mark.parametrize("z", [2.0, 0.5j, 1.5 * np.exp(2.5j), 0.7 * np.exp(-1.1j)])
def test_catenoid_immersion(catenoid, z):
    r, theta = abs(z), np.angle(z)
    np.testing.assert_allclose(immerse(catenoid, z), catenoid_point(r, theta), atol=1e-10)


def test_base_point_maps_to_base_value(catenoid):
    np.testing.assert_array_equal(immerse(catenoid, 1.0), [0.0, 0.0, 0.0])


def test_explicit_path_must_start_at_base(catenoid):
    with pytest.raises(PathError):
        immerse(catenoid, 2.0, path=PathSpec.polyline([1.5, 2.0]))


def test_immerse_near_continues_from_known_point(catenoid):
    Z = immerse(catenoid, 2.0)
    (near,) = immerse_near(catenoid, 2.0, Z, [0.01 + 0.01j])
    np.testing.assert_allclose(near, immerse(catenoid, 2.01 + 0.01j), atol=1e-10)


@pytest.mark.parametrize(
    "g, n",
    [
        (1, [1, 0, 0]),
        (0, [0, 0, -1]),
        (2, [0.8, 0, 0.6]),
        (1j, [0, 1, 0]),
        (INFINITY, [0, 0, 1]),
    ],
)
def test_inverse_stereographic(g, n):
    np.testing.assert_allclose(inverse_stereographic(g), n, atol=1e-15)


@pytest.mark.parametrize("g", [0.3 - 0.2j, 5 + 7j, -1e3j])
def test_stereographic_inverts(g):
    assert stereographic(inverse_stereographic(g)) == pytest.approx(g, rel=1e-9)
    assert np.linalg.norm(inverse_stereographic(g)) == pytest.approx(1.0)


def test_gauss_normal_at_pole_of_g():
    W = WeierstrassData(parse_expr("z"), parse_expr("1/z"), (0,))
    np.testing.assert_array_equal(gauss_normal(W, 0.0), [0.0, 0.0, 1.0])


def test_catenoid_neck_metric_and_curvature(catenoid):
    assert metric_factor(catenoid, 1.0) == pytest.approx(1.0)
    assert gauss_curv(catenoid, 1.0) == pytest.approx(-1.0)
    z = 0.6 + 0.3j
    r2 = abs(z) ** 2
    assert gauss_curv(catenoid, z) == pytest.approx(-16 * r2 ** 2 / (1 + r2) ** 4)


def test_curvature_at_pole_of_g_uses_rotated_data():
    W = WeierstrassData(parse_expr("z^2"), parse_expr("z^-1"), (0,))
    # rotated data (-1, z) are Enneper's
    assert gauss_curv(W, 0.0) == pytest.approx(-16.0)
    assert metric_factor(W, 0.0) == pytest.approx(0.25)


def test_chart_at_infinity_gives_same_surface(catenoid):
    chart = chart_at_infinity(catenoid)
    assert chart.base_point == 1
    assert chart.punctures[0] == INFINITY and chart.punctures[1] == 0
    np.testing.assert_allclose(immerse(chart, 0.5), immerse(catenoid, 2.0), atol=1e-10)


def test_rotate_sphere_turns_the_surface(catenoid):
    rotated = rotate_sphere(catenoid)
    z = 1.3 + 0.4j
    x1, x2, x3 = immerse(catenoid, z)
    np.testing.assert_allclose(immerse(rotated, z), [x1, -x2, -x3], atol=1e-10)


def test_scaled_is_a_homothety(catenoid):
    z = 0.8 - 0.6j
    np.testing.assert_allclose(immerse(scaled(catenoid, 8.0), z), 8.0 * immerse(catenoid, z), atol=1e-9)
    with pytest.raises(ConfigError):
        scaled(catenoid, 1j)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"punctures": (1,)},
        {"base_point": INFINITY},
        {"base_value": (0, 0)},
    ],
)
def test_invalid_data(kwargs):
    with pytest.raises(ConfigError):
        WeierstrassData(parse_expr("z^-2"), parse_expr("z"), **kwargs)


def test_data_must_be_expressions():
    with pytest.raises(ConfigError):
        WeierstrassData("z^-2", parse_expr("z"))

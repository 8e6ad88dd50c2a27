import cmath
import math

import numpy as np
import pytest

from scripts.contour import (
    ArcSegment,
    LineSegment,
    LoopSpec,
    PathSpec,
    find_poles,
    find_zeros,
    integrate_fixed,
    integrate_parameter,
    integrate_path,
    local_order,
    loop_integral,
    merge_points,
    radial_circular_path,
    route_path,
)
from scripts.errors import ConfigError, NumericalError, OrderError, PathError, QuadratureError
from scripts.mexpr import parse_expr

CUBE_ROOT_2 = 2 ** (1 / 3)


def test_line_integral_of_polynomial():
    path = PathSpec.polyline([0, 1 + 1j])
    assert integrate_path(parse_expr("z^2"), path) == pytest.approx((1 + 1j) ** 3 / 3, rel=1e-13)


def test_componentwise_integration_returns_array():
    path = PathSpec.polyline([0, 1, 1 + 1j])
    values = integrate_path((parse_expr("1"), parse_expr("z")), path)
    assert values.shape == (2,)
    assert values[0] == pytest.approx(1 + 1j, rel=1e-13)
    assert values[1] == pytest.approx((1 + 1j) ** 2 / 2, rel=1e-13)


@pytest.mark.parametrize("orientation, expected", [(1, 2j * math.pi), (-1, -2j * math.pi)])
def test_residue_loop(orientation, expected):
    loop = LoopSpec(0, 1.0, orientation)
    assert loop_integral(parse_expr("1/z"), loop) == pytest.approx(expected, rel=1e-12)


def test_double_pole_has_no_residue():
    loop = LoopSpec(0.5, 0.3)
    assert abs(loop_integral(parse_expr("1/(z-0.5)^2"), loop)) < 1e-10


def test_path_through_pole_fails():
    with pytest.raises(NumericalError):
        integrate_path(parse_expr("1/z"), PathSpec.polyline([-1, 1]))


def test_subdivision_limit():
    with pytest.raises(QuadratureError):
        integrate_parameter(lambda t: np.sin(200 * t), tolerance=1e-14, max_subdivisions=2)


def test_non_finite_integrand():
    with pytest.raises(QuadratureError):
        integrate_parameter(lambda t: np.full_like(t, np.inf))


def test_fixed_rule():
    value = integrate_fixed(lambda z: z ** 2, 0, 1)
    assert value.shape == (1,)
    assert value[0] == pytest.approx(1 / 3, rel=1e-14)


@pytest.mark.parametrize(
    "text, z0, order",
    [
        ("z^3", 0, 3),
        ("z^-2", 0, -2),
        ("1/(z^3-1)^2", 1, -2),
        ("z^2*(z^3-1)", 0, 2),
        ("z^2*(z^3-1)", 1, 1),
        ("z+5", 0, 0),
    ],
)
def test_local_order(text, z0, order):
    assert local_order(parse_expr(text), z0) == order


def test_local_order_rejects_branch_points():
    with pytest.raises(OrderError):
        local_order(parse_expr("z^2.5"), 0)


def test_find_zeros_sorted_by_modulus_then_argument():
    zeros = find_zeros(parse_expr("z*(2-z^3)"))
    expected = [0, CUBE_ROOT_2] + [CUBE_ROOT_2 * cmath.exp(2j * math.pi * k / 3) for k in (1, 2)]
    assert len(zeros) == 4
    for found, want in zip(zeros, expected):
        assert found == pytest.approx(want, abs=1e-8)
    assert zeros[0] == 0


def test_find_poles_of_trinoid_data():
    poles = find_poles(parse_expr("1/(z^3-1)^2"))
    assert len(poles) == 3
    assert poles[0] == pytest.approx(1, abs=1e-8)


def test_find_zeros_skips_poles():
    # h of the m = 3, C = 2 catenoid: poles at the cube roots of -1/2 as well
    h = parse_expr("2*z*(2-z^3)/(4*z^3+4)")
    zeros = find_zeros(h)
    assert len(zeros) == 4
    assert zeros[0] == 0
    for z in zeros[1:]:
        assert abs(z) == pytest.approx(CUBE_ROOT_2, abs=1e-8)
    poles = find_poles(h)
    assert len(poles) == 3
    assert all(abs(p) == pytest.approx(1, abs=1e-8) for p in poles)


@pytest.mark.parametrize("z0", [0, 1, 0.5 + 0.5j])
def test_local_order_adds_under_products(z0):
    a, b = "z^2*(z-1)", "(z-0.5-0.5i)/z^3"
    product = parse_expr(f"({a})*({b})")
    assert local_order(product, z0) == local_order(parse_expr(a), z0) + local_order(parse_expr(b), z0)


def test_integral_adds_over_concatenated_paths():
    e = parse_expr("exp(z)/(z-3)")
    first = PathSpec((LineSegment(0, 1), ArcSegment(0, 1.0, 0.0, math.pi / 3)))
    second = PathSpec.polyline([first.end, 2j, -1 + 1j])
    joined = PathSpec(first.segments + second.segments)
    assert integrate_path(e, joined) == pytest.approx(integrate_path(e, first) + integrate_path(e, second), rel=1e-12)


def test_merge_points_keeps_one_infinity():
    inf = complex("inf")
    merged = merge_points((0, inf), (1e-9, 1, inf))
    assert len(merged) == 3
    assert merged[0] == 0 and cmath.isinf(merged[1]) and merged[2] == 1


def test_disjoint_segments_are_rejected():
    with pytest.raises(PathError):
        PathSpec((LineSegment(0, 1), LineSegment(2, 3)))


def test_reversed_path_negates_integral():
    path = PathSpec((LineSegment(1, 2), ArcSegment(0, 2.0, 0.0, math.pi / 2)))
    e = parse_expr("exp(z)/z")
    forward = integrate_path(e, path)
    backward = integrate_path(e, path.reversed())
    assert backward == pytest.approx(-forward, rel=1e-12)
    assert path.reversed().start == pytest.approx(2j)


def test_route_path_goes_round_obstacle_clockwise():
    path = route_path(-1, 1, obstacles=[0])
    assert path.start == -1 and path.end == pytest.approx(1)
    assert path.length == pytest.approx(2 - 0.1 + math.pi * 0.05, rel=1e-12)
    assert integrate_path(parse_expr("1/z"), path) == pytest.approx(-1j * math.pi, rel=1e-10)
    ts = np.linspace(0, 1, 101)
    for seg in path.segments:
        assert np.min(np.abs(seg.point(ts))) >= 0.05 - 1e-12


def test_route_path_ignores_far_and_infinite_obstacles():
    path = route_path(1, 2j, obstacles=[complex("inf"), 5])
    assert len(path.segments) == 1


def test_route_path_endpoint_on_obstacle():
    with pytest.raises(PathError):
        route_path(0, 1, obstacles=[1])


def test_radial_circular_path():
    path = radial_circular_path(2, 1j)
    assert path.end == pytest.approx(1j)
    assert path.length == pytest.approx(1 + math.pi / 2)


@pytest.mark.parametrize("radius, orientation", [(0, 1), (-1, 1), (1, 2)])
def test_invalid_loops(radius, orientation):
    with pytest.raises(ConfigError):
        LoopSpec(0, radius, orientation)

"""
Paths in the z-plane and the numerics that run along them: adaptive
Gauss-Legendre integration, loop integrals, local orders by the argument
principle, zero search, and obstacle-avoiding default paths.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from scripts.errors import ConfigError, OrderError, PathError, PoleSignal, QuadratureError
from scripts.mexpr import MeroExpr, diff_expr, eval_expr, reciprocal

QUADRATURE_TOLERANCE = 1e-12
MAX_SUBDIVISIONS = 4000
GAUSS_NODES = 15
ORDER_RADIUS = 1e-2


@dataclass(frozen=True)
class LineSegment:
    a: complex
    b: complex

    def point(self, t):
        return self.a + (self.b - self.a) * t

    def velocity(self, t):
        return (self.b - self.a) * np.ones_like(t, dtype=complex)

    @property
    def start(self):
        return complex(self.a)

    @property
    def end(self):
        return complex(self.b)

    @property
    def length(self):
        return abs(self.b - self.a)

    def reversed(self):
        return LineSegment(self.b, self.a)


@dataclass(frozen=True)
class ArcSegment:
    """Arc center + radius*exp(i(theta0 + delta*t)), t in [0, 1]; delta is the signed sweep."""

    center: complex
    radius: float
    theta0: float
    delta: float

    def point(self, t):
        return self.center + self.radius * np.exp(1j * (self.theta0 + self.delta * t))

    def velocity(self, t):
        return 1j * self.delta * self.radius * np.exp(1j * (self.theta0 + self.delta * t))

    @property
    def start(self):
        return complex(self.center + self.radius * cmath.exp(1j * self.theta0))

    @property
    def end(self):
        return complex(self.center + self.radius * cmath.exp(1j * (self.theta0 + self.delta)))

    @property
    def length(self):
        return self.radius * abs(self.delta)

    def reversed(self):
        return ArcSegment(self.center, self.radius, self.theta0 + self.delta, -self.delta)


@dataclass(frozen=True)
class PathSpec:
    segments: tuple = ()
    tolerance: float = 1e-9
    anchor: complex | None = None

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments and self.anchor is None:
            raise PathError("an empty path needs an anchor point")
        for previous, current in zip(self.segments, self.segments[1:]):
            gap = abs(previous.end - current.start)
            if gap > self.tolerance * (1 + abs(previous.end)):
                raise PathError(f"segments do not join: gap {gap:.3e} at {previous.end}")

    @classmethod
    def at(cls, z):
        return cls((), anchor=complex(z))

    @classmethod
    def polyline(cls, points, tolerance=1e-9):
        points = [complex(p) for p in points]
        if len(points) < 2:
            return cls.at(points[0])
        segments = [LineSegment(p, q) for p, q in zip(points, points[1:]) if p != q]
        if not segments:
            return cls.at(points[0])
        return cls(tuple(segments), tolerance)

    @property
    def start(self):
        return self.segments[0].start if self.segments else complex(self.anchor)

    @property
    def end(self):
        return self.segments[-1].end if self.segments else complex(self.anchor)

    @property
    def length(self):
        return sum(seg.length for seg in self.segments)

    def reversed(self):
        if not self.segments:
            return self
        return PathSpec(tuple(seg.reversed() for seg in reversed(self.segments)), self.tolerance)

    def concat(self, other):
        if not self.segments:
            return other
        if not other.segments:
            return self
        return PathSpec(self.segments + other.segments, max(self.tolerance, other.tolerance))


@dataclass(frozen=True)
class LoopSpec:
    center: complex
    radius: float
    orientation: int = 1

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0:
            raise ConfigError(f"loop radius must be positive, got {self.radius}")
        if self.orientation not in (1, -1):
            raise ConfigError(f"loop orientation must be +1 or -1, got {self.orientation}")

    @property
    def start(self):
        return self.center + self.radius

    def path(self):
        return PathSpec((ArcSegment(self.center, float(self.radius), 0.0, 2 * math.pi * self.orientation),))


# Quadrature --------------------------------------------------------------------

@lru_cache(maxsize=None)
def gauss_legendre(n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


@dataclass
class _Panel:
    a: float
    b: float
    value: np.ndarray = field(repr=False)
    size: float = 0.0


def _panel(fun, a, b, nodes, weights):
    half = 0.5 * (b - a)
    t = 0.5 * (a + b) + half * nodes
    values = np.atleast_2d(fun(t))
    return _Panel(a, b, half * (values @ weights), half * float(np.max(np.abs(values) @ weights)))


def integrate_parameter(fun, tolerance=QUADRATURE_TOLERANCE, max_subdivisions=MAX_SUBDIVISIONS,
                        nodes=GAUSS_NODES):
    """
    Integral over t in [0, 1] of ``fun(t)``, which returns shape (n,) or (k, n).

    Panels are bisected from a LIFO stack until the two halves agree with the
    parent panel to ``tolerance`` (relative, floored by the panel width).
    """
    x, w = gauss_legendre(nodes)
    stack = [_panel(fun, 0.0, 1.0, x, w)]
    total = np.zeros_like(stack[0].value)
    splits = 0
    while stack:
        parent = stack.pop()
        mid = 0.5 * (parent.a + parent.b)
        left = _panel(fun, parent.a, mid, x, w)
        right = _panel(fun, mid, parent.b, x, w)
        fine = left.value + right.value
        if not np.all(np.isfinite(fine)):
            raise QuadratureError(f"non-finite integrand on [{parent.a:.6g}, {parent.b:.6g}]")
        error = float(np.max(np.abs(fine - parent.value)))
        scale = max(float(np.max(np.abs(fine))), parent.b - parent.a)
        roundoff = 50 * np.finfo(float).eps * (left.size + right.size)
        if error <= max(tolerance * scale, roundoff):
            total = total + fine
            continue
        splits += 1
        if splits > max_subdivisions or parent.b - parent.a < 1e-14:
            raise QuadratureError(f"tolerance {tolerance:.1e} not reached after {splits} subdivisions")
        stack.append(right)
        stack.append(left)
    return total


def _as_exprs(e):
    if isinstance(e, MeroExpr):
        return (e,), True
    return tuple(e), False


def integrate_form(form, path, tolerance=QUADRATURE_TOLERANCE, max_subdivisions=MAX_SUBDIVISIONS,
                   nodes=GAUSS_NODES):
    """
    Integral along ``path`` of a 1-form given as ``form(z, dz)``, its value on the
    tangent vector dz at z. Forms that are not holomorphic use dz and conj(dz).
    """
    total = None
    for seg in path.segments:
        def integrand(t, seg=seg):
            return np.atleast_2d(form(seg.point(t), seg.velocity(t)))

        part = integrate_parameter(integrand, tolerance, max_subdivisions, nodes)
        total = part if total is None else total + part
    return total


def integrate_function(fun, path, tolerance=QUADRATURE_TOLERANCE, max_subdivisions=MAX_SUBDIVISIONS,
                       nodes=GAUSS_NODES):
    """Integral of ``fun(z) dz`` along ``path``; ``fun`` maps a z array to shape (n,) or (k, n)."""
    return integrate_form(lambda z, dz: np.atleast_2d(fun(z)) * dz, path, tolerance, max_subdivisions, nodes)


def integrate_path(e, path, tolerance=QUADRATURE_TOLERANCE, max_subdivisions=MAX_SUBDIVISIONS,
                   nodes=GAUSS_NODES):
    """Integral of e(z) dz along ``path``. A tuple of expressions integrates componentwise."""
    exprs, single = _as_exprs(e)

    def fun(z):
        return np.stack([eval_expr(x, z) for x in exprs])

    total = integrate_function(fun, path, tolerance, max_subdivisions, nodes)
    if total is None:
        total = np.zeros(len(exprs), dtype=complex)
    return complex(total[0]) if single else np.asarray(total, dtype=complex)


def loop_integral(e, loop, **kwargs):
    return integrate_path(e, loop.path(), **kwargs)


def integrate_fixed_form(form, a, b, nodes=20):
    """Fixed-order Gauss-Legendre of ``form(z, dz)`` along the straight segment a -> b; for short stencil hops."""
    x, w = gauss_legendre(nodes)
    t = 0.5 * (x + 1)
    z = a + (b - a) * t
    values = np.atleast_2d(form(z, (b - a) * np.ones_like(z, dtype=complex)))
    return 0.5 * (values @ w)


def integrate_fixed(fun, a, b, nodes=20):
    return integrate_fixed_form(lambda z, dz: np.atleast_2d(fun(z)) * dz, a, b, nodes)


# Orders and zeros -----------------------------------------------------------------

def local_order(e, z0, radius=ORDER_RADIUS, rounds=12, tolerance=1e-10):
    """
    Order of e at the finite point z0: positive for zeros, negative for poles.

    The winding integral is repeated on halved radii until two consecutive
    radii give the same integer.
    """
    de = diff_expr(e)
    z0 = complex(z0)

    def log_derivative(z):
        return eval_expr(de, z) / eval_expr(e, z)

    previous = None
    r = radius
    for _ in range(rounds):
        try:
            value = integrate_function(log_derivative, LoopSpec(z0, r).path(), tolerance=tolerance)
        except (PoleSignal, QuadratureError):
            previous = None
            r *= 0.5
            continue
        value = complex(value[0]) / (2j * math.pi)
        order = round(value.real)
        if abs(value - order) > 0.1:
            raise OrderError(f"non-integral winding {value:.4f} at z = {z0}")
        if previous == order:
            return order
        previous = order
        r *= 0.5
    raise OrderError(f"winding did not settle at z = {z0}")


def _snap(z):
    re_ = 0.0 if abs(z.real) < 1e-10 else z.real
    im_ = 0.0 if abs(z.imag) < 1e-10 else z.imag
    return complex(re_, im_)


def _sort_key(z):
    angle = math.atan2(z.imag, z.real) % (2 * math.pi)
    if angle > 2 * math.pi - 1e-9:
        angle = 0.0
    return round(abs(z), 9), round(angle, 9)


def find_zeros(e, radius=4.0, grid=17, iterations=60, tolerance=1e-9):
    """
    Zeros of e in the square |Re z|, |Im z| <= radius.

    Newton's method on u = e/e' (whose zeros are all simple) from a grid of
    seeds, run vectorised. u also vanishes at the poles of e, so a converged
    point is kept only when e is small there and smaller than 1/e. Results
    are deduplicated and sorted by modulus then argument.
    """
    de = diff_expr(e)
    d2e = diff_expr(de)
    inverse = reciprocal(e)
    axis = np.linspace(-radius, radius, grid)
    offset = (0.0123 + 0.0071j) * radius / grid
    z = (axis[:, None] + 1j * axis[None, :]).ravel() + offset
    with np.errstate(all="ignore"):
        for _ in range(iterations):
            f0 = eval_expr(e, z, strict=False)
            f1 = eval_expr(de, z, strict=False)
            f2 = eval_expr(d2e, z, strict=False)
            step = (f0 / f1) / (1 - f0 * f2 / f1 ** 2)
            candidate = z - step
            z = np.where(np.isfinite(candidate), candidate, z)
        f0 = eval_expr(e, z, strict=False)
        f1 = eval_expr(de, z, strict=False)
        r0 = np.nan_to_num(eval_expr(inverse, z, strict=False), nan=np.inf)
    good = (
        np.isfinite(f0)
        & (np.abs(f0) < np.abs(r0))
        & (np.abs(f0) <= tolerance * np.maximum(1.0, np.nan_to_num(np.abs(f1), posinf=1.0)))
        & (np.abs(z.real) <= radius * (1 + 1e-9))
        & (np.abs(z.imag) <= radius * (1 + 1e-9))
    )
    found = []
    for candidate in sorted((complex(x) for x in z[good]), key=_sort_key):
        if all(abs(candidate - kept) > 1e-6 for kept in found):
            found.append(candidate)
    return sorted((_snap(x) for x in found), key=_sort_key)


def find_poles(e, radius=4.0, **kwargs):
    return find_zeros(reciprocal(e), radius, **kwargs)


def merge_points(*groups, tolerance=1e-6):
    """Union of point lists without near-duplicates; order of first appearance."""
    merged = []
    for group in groups:
        for p in group:
            p = complex(p)
            if cmath.isinf(p):
                if not any(cmath.isinf(q) for q in merged):
                    merged.append(p)
                continue
            if all(cmath.isinf(q) or abs(p - q) > tolerance for q in merged):
                merged.append(p)
    return tuple(merged)


# Default paths --------------------------------------------------------------------

def _wrap(angle):
    angle = math.fmod(angle + math.pi, 2 * math.pi)
    if angle <= 0:
        angle += 2 * math.pi
    return angle - math.pi


def route_path(a, b, obstacles=(), exclusion=0.05):
    """
    Straight path a -> b that steps around each obstacle lying within its
    detour radius of the line, along the minor arc of that circle.

    The detour radius of obstacle p is min(exclusion, |p-a|/2, |p-b|/2); a line
    through p goes round clockwise.
    """
    a, b = complex(a), complex(b)
    finite = [complex(p) for p in obstacles if not cmath.isinf(complex(p))]
    for p in finite:
        if abs(p - a) < 1e-12 * (1 + abs(p)) or abs(p - b) < 1e-12 * (1 + abs(p)):
            raise PathError(f"path endpoint lies on the obstacle {p}")
    if a == b:
        return PathSpec.at(a)
    length = abs(b - a)
    direction = (b - a) / length
    hits = []
    for p in finite:
        local = (p - a) * direction.conjugate()
        r = min(exclusion, 0.5 * abs(p - a), 0.5 * abs(p - b))
        if 0 < local.real < length and abs(local.imag) < r:
            half_chord = math.sqrt(r * r - local.imag ** 2)
            hits.append((local.real - half_chord, local.real + half_chord, p, r, local.imag))
    hits.sort(key=lambda hit: hit[0])
    segments = []
    cursor = a
    last_exit = 0.0
    for s_in, s_out, p, r, lateral in hits:
        if s_in < last_exit + 1e-12:
            raise PathError(f"detours around obstacles overlap near {p}")
        entry = a + s_in * direction
        exit_ = a + s_out * direction
        if entry != cursor:
            segments.append(LineSegment(cursor, entry))
        theta_in = cmath.phase(entry - p)
        if lateral == 0:
            sweep = -math.pi
        else:
            sweep = _wrap(cmath.phase(exit_ - p) - theta_in)
        segments.append(ArcSegment(p, r, theta_in, sweep))
        cursor = segments[-1].end
        last_exit = s_out
    if cursor != b:
        segments.append(LineSegment(cursor, b))
    return PathSpec(tuple(segments))


def radial_circular_path(a, b, center=0j):
    """Radial segment from a to the circle |z - center| = |b - center|, then the short arc to b."""
    a, b, center = complex(a), complex(b), complex(center)
    if abs(a - center) < 1e-14 or abs(b - center) < 1e-14:
        raise PathError("radial path cannot start or end at its center")
    radius = abs(b - center)
    theta_a = cmath.phase(a - center)
    corner = center + radius * cmath.exp(1j * theta_a)
    segments = []
    if abs(corner - a) > 0:
        segments.append(LineSegment(a, corner))
    sweep = _wrap(cmath.phase(b - center) - theta_a)
    if sweep != 0:
        segments.append(ArcSegment(center, radius, theta_a, sweep))
    if not segments:
        return PathSpec.at(a)
    return PathSpec(tuple(segments))

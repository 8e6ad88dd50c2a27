"""
Minimal immersions from Weierstrass data (f dz, g) on C minus punctures.

Z(z) = base_value + Re of the integral of Phi = (1/2 (1-g^2) f, i/2 (1+g^2) f, f g) dz
from the base point, along a path that stays clear of the punctures.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from scripts.contour import QUADRATURE_TOLERANCE, integrate_fixed, integrate_path, route_path
from scripts.errors import ConfigError, PathError, PoleSignal
from scripts.mexpr import Const, MeroExpr, Var, diff_expr, div, eval_expr, mul, neg, power, reciprocal, substitute

INFINITY = complex(float("inf"), 0.0)


def is_infinity(z):
    return cmath.isinf(complex(z))


@dataclass(frozen=True)
class WeierstrassData:
    f: MeroExpr
    g: MeroExpr
    punctures: tuple = ()
    base_point: complex = 1 + 0j
    base_value: tuple = (0.0, 0.0, 0.0)
    exclusion_radius: float = 0.05

    def __post_init__(self):
        if not isinstance(self.f, MeroExpr) or not isinstance(self.g, MeroExpr):
            raise ConfigError("Weierstrass data f and g must be expressions")
        object.__setattr__(self, "punctures", tuple(complex(p) for p in self.punctures))
        object.__setattr__(self, "base_point", complex(self.base_point))
        object.__setattr__(self, "base_value", tuple(float(x) for x in self.base_value))
        if len(self.base_value) != 3:
            raise ConfigError("base_value must have three coordinates")
        if is_infinity(self.base_point):
            raise ConfigError("the base point must be finite")
        for p in self.finite_punctures:
            if abs(p - self.base_point) < 1e-12:
                raise ConfigError(f"the base point {self.base_point} is a puncture")

    @property
    def finite_punctures(self):
        return tuple(p for p in self.punctures if not is_infinity(p))


@lru_cache(maxsize=256)
def phi_forms(W):
    f, g = W.f, W.g
    g2 = power(g, 2)
    phi1 = mul(Const(0.5), mul(Const(1) - g2, f))
    phi2 = mul(Const(0.5j), mul(Const(1) + g2, f))
    phi3 = mul(f, g)
    return phi1, phi2, phi3


def default_path(W, z, obstacles=()):
    return route_path(W.base_point, z, W.punctures + tuple(obstacles), W.exclusion_radius)


def immerse(W, z, path=None, obstacles=(), tolerance=QUADRATURE_TOLERANCE):
    """Point of the minimal surface at z, integrated along ``path`` or the default path."""
    z = complex(z)
    if path is None:
        path = default_path(W, z, obstacles)
    elif abs(path.start - W.base_point) > 1e-9 * (1 + abs(W.base_point)) or abs(path.end - z) > 1e-9 * (1 + abs(z)):
        raise PathError(f"path must run from the base point {W.base_point} to {z}")
    if not path.segments:
        return np.array(W.base_value)
    values = integrate_path(phi_forms(W), path, tolerance=tolerance)
    return np.array(W.base_value) + values.real


def immerse_near(W, z, Z, offsets, nodes=20):
    """Points at z + d for each offset d, continued from the known value Z at z."""
    forms = phi_forms(W)

    def fun(zz):
        return np.stack([eval_expr(form, zz) for form in forms])

    z = complex(z)
    Z = np.asarray(Z, dtype=float)
    return np.array([Z + integrate_fixed(fun, z, z + d, nodes).real for d in offsets])


def inverse_stereographic(g):
    """Unit vector whose stereographic image (from the north pole) is g; inf goes to (0, 0, 1)."""
    g = complex(g)
    if cmath.isinf(g) or cmath.isnan(g):
        return np.array([0.0, 0.0, 1.0])
    if abs(g) <= 1:
        d = 1 + abs(g) ** 2
        return np.array([2 * g.real / d, 2 * g.imag / d, (abs(g) ** 2 - 1) / d])
    w = 1 / g
    d = 1 + abs(w) ** 2
    return np.array([2 * w.real / d, -2 * w.imag / d, (1 - abs(w) ** 2) / d])


def stereographic(n):
    n = np.asarray(n, dtype=float)
    if abs(1 - n[2]) < 1e-15:
        return INFINITY
    return complex(n[0], n[1]) / (1 - n[2])


def gauss_normal(W, z):
    try:
        g = eval_expr(W.g, z)
    except PoleSignal:
        return np.array([0.0, 0.0, 1.0])
    return inverse_stereographic(g)


def rotate_sphere(W):
    """The same surface turned by pi about the x1 axis: data (-g^2 f, 1/g)."""
    b1, b2, b3 = W.base_value
    return replace(
        W,
        f=neg(mul(power(W.g, 2), W.f)),
        g=reciprocal(W.g),
        base_value=(b1, -b2, -b3),
    )


def chart_at_infinity(W):
    """Data in the chart w = 1/z: f_w = -f(1/w)/w^2, g_w = g(1/w)."""
    w = Var()
    inv = div(Const(1), w)
    f_w = neg(div(substitute(W.f, inv), power(w, 2)))
    g_w = substitute(W.g, inv)
    punctures = tuple(0j if is_infinity(p) else (INFINITY if p == 0 else 1 / p) for p in W.punctures)
    return replace(W, f=f_w, g=g_w, punctures=punctures, base_point=1 / W.base_point)


def scaled(W, c):
    """Homothety by the real factor c: data (c f, g)."""
    if isinstance(c, complex) and c.imag != 0:
        raise ConfigError("a homothety factor must be real")
    c = float(np.real(c))
    return replace(W, f=mul(Const(c), W.f), base_value=tuple(c * x for x in W.base_value))


CONTINUITY_RADIUS = 1e-6


def _regular_chart(W, z):
    try:
        return eval_expr(W.f, z), eval_expr(W.g, z), eval_expr(diff_expr(W.g), z)
    except PoleSignal:
        R = rotate_sphere(W)
        return eval_expr(R.f, z), eval_expr(R.g, z), eval_expr(diff_expr(R.g), z)


def _invariant(W, z, formula):
    """``formula(f, g, g')`` at z; where even the rotated data hit a removable 0/0, the mean over a small ring."""
    try:
        return formula(*_regular_chart(W, z))
    except PoleSignal:
        ring = complex(z) + CONTINUITY_RADIUS * np.exp(0.5j * np.pi * np.arange(4))
        return float(np.mean([formula(*_regular_chart(W, p)) for p in ring]))


def _metric(f, g, dg):
    return 0.25 * (1 + abs(g) ** 2) ** 2 * abs(f) ** 2


def _curvature(f, g, dg):
    return -16 * abs(dg / f) ** 2 / (1 + abs(g) ** 2) ** 4


def metric_factor(W, z):
    return _invariant(W, z, _metric)


def gauss_curv(W, z):
    return _invariant(W, z, _curvature)


def immersion_evaluator(W, obstacles=()):
    def evaluate(z):
        return immerse(W, z, obstacles=obstacles), False

    return evaluate

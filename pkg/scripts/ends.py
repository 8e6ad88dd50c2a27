"""
Ends of the transformed surface.

At a puncture z0 the data are first brought to a chart where z0 is finite and
g(z0) = 0 (the chart w = 1/z at infinity, a rotation of the sphere at poles of
g, a Mobius normalisation elsewhere). The class then follows from the orders
of f, g and h at z0.
"""
from __future__ import annotations

from dataclasses import dataclass

from scripts.contour import local_order
from scripts.errors import PoleSignal
from scripts.mexpr import Const, Var, add, div, eval_expr, mul, neg, power, reciprocal, substitute
from scripts.weierstrass import is_infinity

EXTENDS_REGULARLY = "extends_regularly"
PLANAR_EMBEDDED = "planar_embedded"
PLANAR_NONEMBEDDED = "planar_nonembedded"
CATENOID_TYPE = "catenoid_type"
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class EndClass:
    tag: str
    orders: tuple  # (ord g, ord f, ord h) after normalisation
    point: complex

    def as_dict(self):
        point = "inf" if is_infinity(self.point) else [self.point.real, self.point.imag]
        return {"point": point, "tag": self.tag, "orders": list(self.orders)}


def _at_infinity(f, g, h):
    w = Var()
    inv = div(Const(1), w)
    return neg(div(substitute(f, inv), power(w, 2))), substitute(g, inv), substitute(h, inv)


def _rotated(f, g, h):
    # same surface turned by pi about the x1 axis; g~ = g + h turns with it
    return neg(mul(power(g, 2), f)), reciprocal(g), neg(div(h, mul(g, add(g, h))))


def _mobius(f, g, h, a):
    """Rotation of the sphere taking g(z0) = a to 0."""
    conj = a.conjugate()
    scale = 1 + abs(a) ** 2
    denominator = add(Const(1), mul(Const(conj), g))
    g_new = div(add(g, Const(-a)), denominator)
    f_new = mul(Const(1 / scale), mul(power(denominator, 2), f))
    h_new = div(mul(Const(scale), h), mul(add(Const(1), mul(Const(conj), add(g, h))), denominator))
    return f_new, g_new, h_new


def normalized_local_data(W, h, z0):
    """(f, g, h, point) in a chart where the point is finite and g vanishes there."""
    f, g = W.f, W.g
    if is_infinity(z0):
        f, g, h = _at_infinity(f, g, h)
        z0 = 0j
    z0 = complex(z0)
    try:
        a = eval_expr(g, z0)
    except PoleSignal:
        f, g, h = _rotated(f, g, h)
        a = eval_expr(g, z0)
    if abs(a) > 1e-12:
        f, g, h = _mobius(f, g, h, a)
    return f, g, h, z0


def _decide(ord_g, ord_f, ord_h):
    p = ord_g - 1  # order of g'
    if ord_f == 0:
        if ord_h <= 0:
            return EXTENDS_REGULARLY
        if p == 0 and ord_h == 1:
            return PLANAR_EMBEDDED
        if ord_g >= 2 and ord_h == ord_g:
            return PLANAR_NONEMBEDDED
        return UNCLASSIFIED
    if ord_f == -2 and ord_g == 1:
        return CATENOID_TYPE
    q = -2 - ord_f
    m = ord_h - 1
    if q >= 0 and p >= q + 1 and m >= 0:
        # planar end of the original surface
        if p == m:
            return PLANAR_NONEMBEDDED
        if m == q:
            if p > 2 * m + 1:
                return EXTENDS_REGULARLY
            pole = 2 * m + 2 - p
            if pole == 2:
                return PLANAR_EMBEDDED
            if pole > 2:
                return PLANAR_NONEMBEDDED
    return UNCLASSIFIED


def classify_end(pair, z0):
    """Class of the end of the transformed surface at the puncture z0 (finite or infinity)."""
    f, g, h, point = normalized_local_data(pair.W, pair.h, z0)
    ord_g = local_order(g, point)
    ord_f = local_order(f, point)
    ord_h = local_order(h, point)
    z0 = complex(z0)
    return EndClass(_decide(ord_g, ord_f, ord_h), (ord_g, ord_f, ord_h), z0)


def classify_ends(pair):
    return [classify_end(pair, p) for p in pair.W_tilde.punctures]

"""
Ribaucour transforms of minimal surfaces.

A solution h of dh = k h^2 f dz - dg turns the data (f, g) into
(g'/(k h^2), g + h). The two surfaces envelope a sphere congruence; the
congruence and the associated frontal come from the flat front with Gauss
maps (g, g + h).

Scale: the surfaces enveloping the congruence described by ``ribaucour_data``
are the ones with data (4k f, g) and (4k f~, g~), see ``normalized_weierstrass``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from scripts.contour import find_poles, find_zeros, merge_points
from scripts.errors import DegenerateError, PoleSignal, RiccatiError
from scripts.hfront import FlatFrontData, xi_norms
from scripts.mexpr import Const, MeroExpr, add, diff_expr, div, eval_expr, mul, neg, power
from scripts.riccati import RiccatiSolution, check_k, residual, residual_terms
from scripts.weierstrass import WeierstrassData, gauss_normal, immerse, scaled

SEARCH_RADIUS = 4.0


@dataclass(frozen=True)
class RibaucourData:
    rho: float
    phi: float


@dataclass(frozen=True)
class RibaucourPair:
    W: WeierstrassData
    W_tilde: WeierstrassData
    h: MeroExpr
    k: float

    @cached_property
    def h_poles(self):
        return tuple(find_poles(self.h, SEARCH_RADIUS))

    @cached_property
    def front(self):
        return flat_front_of_pair(self)

    @cached_property
    def normalized(self):
        return normalized_weierstrass(self)


def _solution_expr(h):
    if isinstance(h, RiccatiSolution):
        if h.kind == "sampled":
            raise RiccatiError("a sampled solution cannot be transformed; a closed form is needed")
        return h.expr
    if not isinstance(h, MeroExpr):
        raise RiccatiError(f"h must be an expression, got {type(h).__name__}")
    return h


def _check_nonzero(h, W):
    if isinstance(h, Const) and h.value == 0:
        raise RiccatiError("h must not vanish identically")
    probes = [W.base_point, W.base_point + 0.37 + 0.21j, 0.61 - 0.43j]
    values = []
    for z in probes:
        try:
            values.append(abs(eval_expr(h, z)))
        except PoleSignal:
            values.append(1.0)
    if max(values) == 0:
        raise RiccatiError("h must not vanish identically")


def transform(W, h, k, search_radius=SEARCH_RADIUS):
    """Transformed data (g'/(k h^2), g + h); punctures gain the zeros of h."""
    k = check_k(k)
    h = _solution_expr(h)
    _check_nonzero(h, W)
    f_tilde = div(diff_expr(W.g), mul(Const(k), power(h, 2)))
    g_tilde = add(W.g, h)
    punctures = merge_points(W.punctures, find_zeros(h, search_radius))
    if abs(eval_expr(h, W.base_point)) < 1e-12:
        raise DegenerateError(f"the base point {W.base_point} is a zero of h")
    return WeierstrassData(f_tilde, g_tilde, punctures, W.base_point, (0.0, 0.0, 0.0), W.exclusion_radius)


def inverse_transform(W_tilde, h, k, search_radius=SEARCH_RADIUS):
    """The transform by -h, which undoes ``transform``."""
    return transform(W_tilde, neg(_solution_expr(h)), k, search_radius)


def build_pair(W, h, k, validate=True, search_radius=SEARCH_RADIUS):
    """The pair (W, W~) for the solution h; ``validate`` checks the Riccati residual near the base point."""
    k = check_k(k)
    h = _solution_expr(h)
    if validate:
        expr = residual(W, k, h)
        terms = residual_terms(W, k, h)
        for z in (W.base_point, W.base_point * (1 + 0.05j)):
            scale = 1 + sum(abs(eval_expr(t, z)) for t in terms)
            if abs(eval_expr(expr, z)) > 1e-8 * scale:
                raise RiccatiError(f"h does not solve the Riccati equation at z = {z}")
    return RibaucourPair(W, transform(W, h, k, search_radius), h, k)


def normalized_weierstrass(pair):
    """The data (4k f, g) and (4k f~, g~) of the surfaces the congruence touches."""
    return scaled(pair.W, 4 * pair.k), scaled(pair.W_tilde, 4 * pair.k)


def flat_front_of_pair(pair):
    """Flat front with G+ = g, G- = g + h, c0 = 1, c1 = -h(z_b)."""
    W, W_tilde = pair.W, pair.W_tilde
    obstacles = merge_points(W_tilde.punctures, pair.h_poles)
    c1 = -eval_expr(pair.h, W.base_point)
    return FlatFrontData(W.g, W_tilde.g, W.base_point, 1, c1, obstacles, W.exclusion_radius)


def ribaucour_data(pair, z, path=None):
    """rho = -|xi+|^2 / (1 + |g|^2), phi = -(1 + |g~|^2) / |xi-|^2."""
    xi_plus_sq, xi_minus_sq = xi_norms(pair.front, z, path, paired=True)
    g = eval_expr(pair.W.g, z)
    g_tilde = eval_expr(pair.W_tilde.g, z)
    return RibaucourData(-xi_plus_sq / (1 + abs(g) ** 2), -(1 + abs(g_tilde) ** 2) / xi_minus_sq)


def associated_frontal(pair, z, data=None):
    """X_Z = (phi/2)(N - N~)."""
    N = gauss_normal(pair.W, z)
    N_tilde = gauss_normal(pair.W_tilde, z)
    if np.linalg.norm(N - N_tilde) < 1e-12:
        raise DegenerateError(f"N = N~ at z = {z}")
    data = data or ribaucour_data(pair, z)
    return 0.5 * data.phi * (N - N_tilde)


def radius_function(data):
    """tau = -phi / rho, the signed radius of the congruence."""
    if data.rho == 0:
        raise DegenerateError("rho vanishes: the congruence radius is undefined")
    return -data.phi / data.rho


def sphere_congruence(pair, z, data=None, Z=None):
    """Center Z + tau N and radius |tau| of the sphere through Z(z), with Z from the normalized data."""
    data = data or ribaucour_data(pair, z)
    tau = radius_function(data)
    if Z is None:
        Z = immerse(pair.normalized[0], z)
    return Z + tau * gauss_normal(pair.W, z), abs(tau)


def ribaucour_image(Z, X, phi):
    """Z~ = Z - (2 phi / |X|^2) X."""
    X = np.asarray(X, dtype=float)
    norm_sq = float(np.dot(X, X))
    if norm_sq == 0:
        raise DegenerateError("the associated frontal vanishes")
    return np.asarray(Z, dtype=float) - (2 * phi / norm_sq) * X


def reversed_ribaucour_data(data):
    """Data (1/phi, 1/rho) of the pair read from W~ back to W."""
    if data.rho == 0 or data.phi == 0:
        raise DegenerateError("rho or phi vanishes")
    return RibaucourData(1 / data.phi, 1 / data.rho)


def pair_summary(pair, ends=(), checks=(), periods=None):
    """JSON-ready description of a pair and of what was computed on it."""
    summary = {
        "k": pair.k,
        "weierstrass": {"f": str(pair.W.f), "g": str(pair.W.g)},
        "transformed": {"f": str(pair.W_tilde.f), "g": str(pair.W_tilde.g)},
        "h": str(pair.h),
        "punctures": [p for p in pair.W_tilde.punctures],
        "h_poles": list(pair.h_poles),
        "ends": [end.as_dict() for end in ends],
        "checks": [check.as_dict() for check in checks],
    }
    if periods is not None:
        summary["periods"] = periods
    return summary

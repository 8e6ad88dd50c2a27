"""
Flat fronts in hyperbolic space from a pair of Gauss maps.

Points of H^3 and of the de Sitter space live in Minkowski space R^{1,3} with
signature (-+++). Given holomorphic G+ != G-, the functions

    xi+ = c1 exp(int G+'/(G+ - G-) dz),   xi- = c0 exp(int G-'/(G- - G+) dz)

(from the base point) determine the front X and its unit normal N:

    X = a L(G-) + b L(G+),  N = -a L(G-) + b L(G+),  a = 1/|xi-|^2, b = 1/|xi+|^2

with the null vectors L(G) = ((|G|^2+1)/2, Re G, Im G, (|G|^2-1)/2). Smooth callables in
place of G+- give general frontals; there G' dz becomes dG = G_z dz + G_zbar dzbar.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from scripts.contour import (
    QUADRATURE_TOLERANCE,
    find_poles,
    find_zeros,
    integrate_fixed_form,
    integrate_form,
    local_order,
    loop_integral,
    merge_points,
    route_path,
)
from scripts.errors import ConfigError, DegenerateError, PathError, PoleSignal
from scripts.fd_geometry import (
    brioschi_curvature,
    first_form,
    jacobian_ratio,
    partials,
    sample_grid,
    second_form,
    shape_invariants,
)
from scripts.mexpr import (
    Const,
    MeroExpr,
    Var,
    add,
    diff_expr,
    div,
    eval_expr,
    mul,
    power,
    reciprocal,
    sub,
    substitute,
)
from scripts.weierstrass import WeierstrassData, is_infinity

SINGULAR_RATIO = 1e-6
STENCIL_SKIP_RATIO = 1e-2
DERIVATIVE_STEP = 1e-6
# difference quotients of callable Gauss maps carry noise near 1e-10
CALLABLE_TOLERANCE = 1e-8


def minkowski(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return -a[0] * b[0] + np.dot(a[1:], b[1:])


class _GaussMaps:
    """G+ and G- as expressions or as smooth callables, with the log rates of xi+-."""

    def __init__(self, g_plus, g_minus):
        self.g_plus = g_plus
        self.g_minus = g_minus
        self.symbolic = isinstance(g_plus, MeroExpr) and isinstance(g_minus, MeroExpr)
        if self.symbolic:
            self.d_plus = diff_expr(g_plus)
            self.d_minus = diff_expr(g_minus)
        elif not (callable(g_plus) and callable(g_minus)):
            raise ConfigError("Gauss maps must both be expressions or both be callables")

    def _call(self, fun, z):
        if isinstance(fun, MeroExpr):
            return eval_expr(fun, z)
        if np.ndim(z) == 0:
            return complex(fun(complex(z)))
        return np.array([complex(fun(complex(w))) for w in np.ravel(z)]).reshape(np.shape(z))

    def values(self, z):
        return self._call(self.g_plus, z), self._call(self.g_minus, z)

    def wirtinger(self, z):
        """
        ((G+_z, G+_zbar), (G-_z, G-_zbar)) at z. Callables use central differences
        along x and y; the zbar parts of expressions are zero.
        """
        if self.symbolic:
            dp, dm = eval_expr(self.d_plus, z), eval_expr(self.d_minus, z)
            return (dp, np.zeros_like(dp)), (dm, np.zeros_like(dm))
        step = DERIVATIVE_STEP * (1 + np.abs(z))
        pairs = []
        for hi, lo in zip(zip(self.values(z + step), self.values(z + 1j * step)),
                          zip(self.values(z - step), self.values(z - 1j * step))):
            g_x = (hi[0] - lo[0]) / (2 * step)
            g_y = (hi[1] - lo[1]) / (2 * step)
            pairs.append((0.5 * (g_x - 1j * g_y), 0.5 * (g_x + 1j * g_y)))
        return tuple(pairs)

    def derivatives(self, z):
        (dp, _), (dm, _) = self.wirtinger(z)
        return dp, dm

    def log_rates(self, z, dz):
        """dG+/(G+ - G-) and dG-/(G- - G+) evaluated on the tangent vector dz at z."""
        gp, gm = self.values(z)
        delta = gp - gm
        (p_z, p_zbar), (m_z, m_zbar) = self.wirtinger(z)
        dz_bar = np.conj(dz)
        d_plus = p_z * dz + p_zbar * dz_bar
        d_minus = m_z * dz + m_zbar * dz_bar
        return np.stack([np.asarray(d_plus / delta), np.asarray(-d_minus / delta)])


@dataclass(frozen=True)
class FlatFrontData:
    g_plus: MeroExpr
    g_minus: MeroExpr
    base_point: complex = 1 + 0j
    c0: complex = 1 + 0j
    c1: complex | None = None
    punctures: tuple = ()
    exclusion_radius: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "base_point", complex(self.base_point))
        object.__setattr__(self, "c0", complex(self.c0))
        object.__setattr__(self, "punctures", tuple(complex(p) for p in self.punctures))
        try:
            delta_b = eval_expr(self.g_plus, self.base_point) - eval_expr(self.g_minus, self.base_point)
        except PoleSignal as e:
            raise ConfigError(f"Gauss maps have a pole at the base point {self.base_point}") from e
        if abs(delta_b) < 1e-14 * (1 + abs(eval_expr(self.g_plus, self.base_point))):
            raise DegenerateError(f"G+ = G- at the base point {self.base_point}")
        if self.c0 == 0:
            raise ConfigError("c0 must be non-zero")
        if self.c1 is None:
            object.__setattr__(self, "c1", delta_b / self.c0)
        object.__setattr__(self, "c1", complex(self.c1))
        if abs(abs(self.c0 * self.c1) - abs(delta_b)) > 1e-9 * abs(delta_b):
            raise ConfigError(f"|c0 c1| must equal |G+ - G-| = {abs(delta_b):.12g} at the base point")

    @cached_property
    def maps(self):
        return _GaussMaps(self.g_plus, self.g_minus)

    @cached_property
    def delta(self):
        return sub(self.g_plus, self.g_minus)

    @cached_property
    def delta_at_base(self):
        return eval_expr(self.delta, self.base_point)


@dataclass
class FrontalSample:
    X: np.ndarray
    N: np.ndarray
    z: complex
    singular: bool = False
    xi_plus_sq: float = field(default=float("nan"), repr=False)


def make_flat_front(g_plus, g_minus, base_point=1, c0=1, c1=None, punctures=(), exclusion_radius=0.05,
                    search_radius=4.0):
    """FlatFrontData whose obstacle list also holds the zeros and poles of G+ - G- and the poles of G+-."""
    delta = sub(g_plus, g_minus)
    obstacles = merge_points(
        punctures,
        find_zeros(delta, search_radius),
        find_poles(delta, search_radius),
        find_poles(g_plus, search_radius),
        find_poles(g_minus, search_radius),
    )
    return FlatFrontData(g_plus, g_minus, base_point, c0, c1, obstacles, exclusion_radius)


def helicoidal_front(m):
    """G+ = z, G- = (m-1)/(m+1) z with z_b = 1, c0 = 1, c1 = 2/(m+1)."""
    z = Var()
    m = float(m)
    if m <= 0:
        raise ConfigError(f"m must be positive, got {m}")
    return FlatFrontData(z, mul(Const((m - 1) / (m + 1)), z), 1, 1, 2 / (m + 1), (0j, complex("inf")))


def front_weierstrass_pair(FF):
    """Minimal data (4 G-'/(G- - G+)^2, G+) and (4 G+'/(G+ - G-)^2, G-) of the associated pair."""
    square = power(FF.delta, 2)
    first = WeierstrassData(div(mul(Const(4), diff_expr(FF.g_minus)), square), FF.g_plus, FF.punctures,
                            FF.base_point, exclusion_radius=FF.exclusion_radius)
    second = WeierstrassData(div(mul(Const(4), diff_expr(FF.g_plus)), square), FF.g_minus, FF.punctures,
                             FF.base_point, exclusion_radius=FF.exclusion_radius)
    return first, second


def _default_path(FF, z):
    return route_path(FF.base_point, z, FF.punctures, FF.exclusion_radius)


def _check_path(FF, z, path):
    if path is None:
        return _default_path(FF, z)
    if abs(path.start - FF.base_point) > 1e-9 * (1 + abs(FF.base_point)) or abs(path.end - z) > 1e-9 * (1 + abs(z)):
        raise PathError(f"path must run from the base point {FF.base_point} to {z}")
    return path


def _xi_integrals(maps, path, tolerance):
    if not path.segments:
        return np.zeros(2, dtype=complex)
    return integrate_form(maps.log_rates, path, tolerance=tolerance)


def _paired_xi_minus(c0, c1, delta_b, delta_z, xi_plus_sq):
    return abs(c0 * c1) ** 2 * abs(delta_z / delta_b) ** 2 / xi_plus_sq


def xi_norms(FF, z, path=None, paired=False, tolerance=QUADRATURE_TOLERANCE):
    """
    (|xi+|^2, |xi-|^2) at z.

    With ``paired`` only xi+ is integrated and |xi-|^2 follows from
    |xi+ xi-| = |c0 c1| |G+ - G-| / |G+ - G-|(z_b).
    """
    z = complex(z)
    path = _check_path(FF, z, path)
    integrals = _xi_integrals(FF.maps, path, tolerance)
    xi_plus_sq = abs(FF.c1) ** 2 * np.exp(2 * integrals[0].real)
    if paired:
        gp, gm = FF.maps.values(z)
        return xi_plus_sq, _paired_xi_minus(FF.c0, FF.c1, FF.delta_at_base, gp - gm, xi_plus_sq)
    return xi_plus_sq, abs(FF.c0) ** 2 * np.exp(2 * integrals[1].real)


def _null_lift(G):
    n2 = abs(G) ** 2
    return np.array([0.5 * (n2 + 1), G.real, G.imag, 0.5 * (n2 - 1)])


def lorentz_frame(gp, gm, xi_plus_sq, xi_minus_sq):
    """Front point X and normal N from the Gauss maps and the squared norms of xi+-."""
    a, b = 1 / xi_minus_sq, 1 / xi_plus_sq
    lift_minus, lift_plus = _null_lift(complex(gm)), _null_lift(complex(gp))
    return a * lift_minus + b * lift_plus, -a * lift_minus + b * lift_plus


def _check_distinct(gp, gm, z):
    if abs(gp - gm) < 1e-14 * (1 + abs(gp)):
        raise DegenerateError(f"G+ = G- at z = {z}")


def _continue_frame(maps, consts, z, xi_plus_sq, offsets, nodes=20):
    """X and N at z + d for each offset, with xi+ continued along the short segment z -> z + d."""
    c0, c1, delta_b = consts
    frames = []
    for d in offsets:
        w = z + d
        if d == 0:
            w_xi = xi_plus_sq
        else:
            step = integrate_fixed_form(maps.log_rates, z, w, nodes)[0]
            w_xi = xi_plus_sq * np.exp(2 * step.real)
        gp, gm = maps.values(w)
        _check_distinct(gp, gm, w)
        X, N = lorentz_frame(gp, gm, w_xi, _paired_xi_minus(c0, c1, delta_b, gp - gm, w_xi))
        frames.append(np.concatenate([X, N]))
    return np.array(frames)


def _frame_stencil(maps, consts, z, xi_plus_sq, step, radius):
    return sample_grid(lambda offsets: _continue_frame(maps, consts, z, xi_plus_sq, offsets), step, radius)


def _frontal(maps, consts, z, path, detect_singular, tolerance):
    c0, c1, delta_b = consts
    gp, gm = maps.values(z)
    _check_distinct(gp, gm, z)
    integrals = _xi_integrals(maps, path, tolerance)
    xi_plus_sq = abs(c1) ** 2 * np.exp(2 * integrals[0].real)
    X, N = lorentz_frame(gp, gm, xi_plus_sq, _paired_xi_minus(c0, c1, delta_b, gp - gm, xi_plus_sq))
    singular = False
    if detect_singular:
        step = 1e-5 * (1 + abs(z))
        grid = _frame_stencil(maps, consts, z, xi_plus_sq, step, 1)
        du, dv, *_ = partials(grid[:, :, :4], step)
        singular = jacobian_ratio(du, dv) < SINGULAR_RATIO
    return FrontalSample(X, N, z, singular, xi_plus_sq)


def flat_front_point(FF, z, path=None, detect_singular=False, tolerance=QUADRATURE_TOLERANCE):
    z = complex(z)
    path = _check_path(FF, z, path)
    consts = (FF.c0, FF.c1, FF.delta_at_base)
    return _frontal(FF.maps, consts, z, path, detect_singular, tolerance)


def frontal_from_gauss(g_plus, g_minus, c0, c1, z, path=None, base_point=None, obstacles=(),
                       detect_singular=False, tolerance=QUADRATURE_TOLERANCE):
    """
    Frontal point for Gauss maps given as expressions or as smooth callables.

    The path starts at ``base_point`` (or at ``path.start``); |c0 c1| must equal
    |G+ - G-| there.
    """
    z = complex(z)
    if path is None:
        if base_point is None:
            raise ConfigError("frontal_from_gauss needs a path or a base point")
        path = route_path(base_point, z, obstacles)
    base_point = path.start
    maps = _GaussMaps(g_plus, g_minus)
    if not maps.symbolic:
        tolerance = max(tolerance, CALLABLE_TOLERANCE)
    gp_b, gm_b = maps.values(base_point)
    delta_b = gp_b - gm_b
    _check_distinct(gp_b, gm_b, base_point)
    if abs(abs(complex(c0) * complex(c1)) - abs(delta_b)) > 1e-9 * abs(delta_b):
        raise ConfigError(f"|c0 c1| must equal |G+ - G-| = {abs(delta_b):.12g} at the base point")
    return _frontal(maps, (complex(c0), complex(c1), delta_b), z, path, detect_singular, tolerance)


def envelopes(X, N):
    """The two horosphere envelopes (X+, N+), (X-, N-) in R^3."""
    X, N = np.asarray(X, dtype=float), np.asarray(N, dtype=float)
    r, s = X[0], N[0]
    x, n = X[1:], N[1:]
    if abs(r * r - s * s) < 1e-14 * (r * r + s * s) or abs(r + s) < 1e-300 or abs(r - s) < 1e-300:
        raise DegenerateError("r^2 = s^2: the envelopes are not defined")
    n_plus = (x + n) / (r + s)
    n_minus = (x - n) / (r - s)
    return (x - r * n_plus, n_plus), (x - r * n_minus, n_minus)


def recover_from_envelopes(X_plus, N_plus, X_minus, N_minus):
    """Inverse of ``envelopes``: the front point and normal from both envelopes."""
    X_plus, N_plus = np.asarray(X_plus, dtype=float), np.asarray(N_plus, dtype=float)
    X_minus, N_minus = np.asarray(X_minus, dtype=float), np.asarray(N_minus, dtype=float)
    rho_plus = float(np.dot(X_plus, N_plus))
    rho_minus = float(np.dot(X_minus, N_minus))
    if rho_plus == 0 or rho_minus == 0:
        raise DegenerateError("an envelope passes through the origin along its normal")
    lift_plus = np.concatenate([[1.0], N_plus]) / (2 * rho_plus)
    lift_minus = np.concatenate([[1.0], N_minus]) / (2 * rho_minus)
    return -lift_plus - lift_minus, -lift_plus + lift_minus


def to_ball(v):
    """Poincare ball image (v1, v2, v3) / (1 + v0) of a point of the hyperboloid."""
    v = np.asarray(v, dtype=float)
    return v[1:] / (1 + v[0])


def existence_period(FF, loop, **kwargs):
    """Real part of the loop integral of G+'/(G+ - G-); zero when |xi+| is single valued."""
    integrand = div(diff_expr(FF.g_plus), FF.delta)
    return loop_integral(integrand, loop, **kwargs).real


HOROSPHERICAL = "horospherical"
ROTATIONAL = "rotational"
UNCLASSIFIED_END = "unclassified"
_GENERIC_POINTS = np.array([0.37 + 0.21j, 1.3 - 0.7j, -0.9 + 1.1j])


@dataclass(frozen=True)
class FrontEnd:
    tag: str
    orders: tuple  # (ord G+, ord G-, ord G+ - G-) after normalisation
    point: complex

    def as_dict(self):
        point = "inf" if is_infinity(self.point) else [self.point.real, self.point.imag]
        return {"point": point, "tag": self.tag, "orders": list(self.orders)}


def _is_constant(e):
    with np.errstate(all="ignore"):
        values = eval_expr(diff_expr(e), _GENERIC_POINTS, strict=False)
    return bool(np.all(values == 0))


def _front_chart(g_plus, g_minus, z0):
    """Both Gauss maps moved by one isometry of H^3 (and w = 1/z at infinity) so that G+(z0) = 0."""
    if is_infinity(z0):
        w = div(Const(1), Var())
        g_plus, g_minus = substitute(g_plus, w), substitute(g_minus, w)
        z0 = 0j
    z0 = complex(z0)
    try:
        a = eval_expr(g_plus, z0)
    except PoleSignal:
        g_plus, g_minus = reciprocal(g_plus), reciprocal(g_minus)
        a = eval_expr(g_plus, z0)
    if abs(a) > 1e-12:
        conj = Const(complex(a).conjugate())
        g_plus, g_minus = (div(sub(G, Const(a)), add(Const(1), mul(conj, G))) for G in (g_plus, g_minus))
    return g_plus, g_minus, z0


def _decide_front(ord_plus, ord_minus, ord_delta):
    if ord_plus != ord_minus:
        return HOROSPHERICAL
    if ord_delta == ord_plus:
        return ROTATIONAL
    return UNCLASSIFIED_END


def classify_front_end(FF, z0):
    """
    Type of the end of the front at z0 (finite or infinity).

    In the normalised chart G+ vanishes at the end. Gauss maps vanishing to the
    same order with distinct leading terms give a rotational end (the model is
    G- = c G+); different orders give a horospherical end, and so does a
    constant Gauss map (no orders recorded). Equal leading terms are left
    unclassified.
    """
    if _is_constant(FF.g_plus) or _is_constant(FF.g_minus):
        return FrontEnd(HOROSPHERICAL, (None, None, None), complex(z0))
    g_plus, g_minus, point = _front_chart(FF.g_plus, FF.g_minus, z0)
    ord_plus = local_order(g_plus, point)
    ord_minus = local_order(g_minus, point)
    ord_delta = local_order(sub(g_plus, g_minus), point)
    return FrontEnd(_decide_front(ord_plus, ord_minus, ord_delta), (ord_plus, ord_minus, ord_delta), complex(z0))


def classify_front_ends(FF, points=None):
    """Ends at ``points``, by default at every obstacle of the front."""
    return [classify_front_end(FF, p) for p in (FF.punctures if points is None else points)]


def _stencil_at(FF, z, step, radius, path=None):
    sample = flat_front_point(FF, z, path)
    consts = (FF.c0, FF.c1, FF.delta_at_base)
    return sample, _frame_stencil(FF.maps, consts, complex(z), sample.xi_plus_sq, step, radius)


def _envelope_grid(grid):
    rows, cols = grid.shape[:2]
    plus = np.empty((rows, cols, 6))
    minus = np.empty((rows, cols, 6))
    for i in range(rows):
        for j in range(cols):
            (xp, np_), (xm, nm) = envelopes(grid[i, j, :4], grid[i, j, 4:])
            plus[i, j] = np.concatenate([xp, np_])
            minus[i, j] = np.concatenate([xm, nm])
    return plus, minus


def _mismatch(lhs, rhs):
    lhs, rhs = np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float)
    scale = np.max(np.abs(lhs)) + np.max(np.abs(rhs)) + 1e-300
    return float(np.max(np.abs(lhs - rhs)) / scale)


def form_relations_at(FF, z, step=1e-3, path=None):
    """
    Residuals of the relations between the fundamental forms of the front
    (Lorentzian) and of each envelope (Euclidean), and of the envelope
    curvatures expressed through the front's K_e and H. None near the singular set.
    """
    sample, grid = _stencil_at(FF, z, step, 1, path)
    dX = partials(grid[:, :, :4], step)[:2]
    dN = partials(grid[:, :, 4:], step)[:2]
    if jacobian_ratio(*dX) < STENCIL_SKIP_RATIO:
        return None
    lorentz = minkowski
    I = first_form(*dX, inner=lorentz)
    II = second_form(dX, dN, inner=lorentz)
    III = first_form(*dN, inner=lorentz)
    K_e, H = shape_invariants(I, II)
    r, s = sample.X[0], sample.N[0]
    residuals = {}
    for sign, env in zip((1, -1), _envelope_grid(grid)):
        label = "plus" if sign > 0 else "minus"
        dXe = partials(env[:, :, :3], step)[:2]
        dNe = partials(env[:, :, 3:], step)[:2]
        I_e = first_form(*dXe)
        II_e = second_form(dXe, dNe)
        III_e = first_form(*dNe)
        residuals[f"first_{label}"] = _mismatch(I, I_e + r * r * III_e - 2 * r * II_e)
        residuals[f"third_{label}"] = _mismatch(III, I_e + s * s * III_e + sign * 2 * s * II_e)
        residuals[f"second_{label}"] = _mismatch(II, sign * I_e - r * s * III_e + (s - sign * r) * II_e)
        K_env, H_env = shape_invariants(I_e, II_e)
        denominator = s * s + 2 * H * r * s + K_e * r * r
        residuals[f"gauss_{label}"] = _mismatch(K_env, (1 - sign * 2 * H + K_e) / denominator)
        residuals[f"mean_{label}"] = _mismatch(H_env, (H * (s - sign * r) + r * K_e - sign * s) / denominator)
    return residuals


def form_relations_check(FF, points, step=1e-3):
    """Largest residual of each relation over ``points`` (near-singular points skipped)."""
    worst = {}
    for z in points:
        residuals = form_relations_at(FF, z, step)
        if residuals is None:
            continue
        for name, value in residuals.items():
            worst[name] = max(worst.get(name, 0.0), value)
    return worst


def flatness_residuals(FF, z, step=1e-3, path=None):
    """
    (theta, K) at z, both relative. theta measures rho^2 + rho Lap(rho) - |grad rho|^2
    for rho = -|xi+|^2/(1 + |G+|^2) in the spherical metric of G+; K is the
    Brioschi curvature of the induced metric of the front. None near the singular set.
    """
    sample, grid = _stencil_at(FF, z, step, 2, path)
    X_grid = grid[:, :, :4]
    du, dv, *_ = partials(X_grid, step)
    if jacobian_ratio(du, dv) < STENCIL_SKIP_RATIO:
        return None
    K, scale = brioschi_curvature(X_grid, step, inner=minkowski)

    offsets = [(i + 1j * j) * step for i in (-1, 0, 1) for j in (-1, 0, 1)]
    rho = np.empty(9)
    z = complex(z)
    for n, d in enumerate(offsets):
        w = z + d
        if d == 0:
            xi_sq = sample.xi_plus_sq
        else:
            xi_sq = sample.xi_plus_sq * np.exp(2 * integrate_fixed_form(FF.maps.log_rates, z, w)[0].real)
        gp, _ = FF.maps.values(w)
        rho[n] = -xi_sq / (1 + abs(gp) ** 2)
    rho = rho.reshape(3, 3)
    r_u, r_v, r_uu, r_vv, _ = partials(rho, step)
    gp, _ = FF.maps.values(z)
    dp, _ = FF.maps.derivatives(z)
    sigma_sq = 4 * abs(dp) ** 2 / (1 + abs(gp) ** 2) ** 2
    value = rho[1, 1]
    laplace_term = value * (r_uu + r_vv) / sigma_sq
    gradient_term = (r_u ** 2 + r_v ** 2) / sigma_sq
    theta = value ** 2 + laplace_term - gradient_term
    theta_scale = value ** 2 + abs(laplace_term) + gradient_term + 1e-300
    return abs(theta) / theta_scale, abs(K) / scale


def front_ball_evaluator(FF):
    def evaluate(z):
        sample = flat_front_point(FF, z, detect_singular=True)
        return to_ball(sample.X), sample.singular

    return evaluate

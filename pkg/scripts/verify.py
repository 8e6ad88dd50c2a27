"""
Numerical checks of the identities a pair (or a flat front) must satisfy.

Every check returns a CheckReport. Tolerances come in three tiers: algebraic
identities, quantities that go through quadrature or the ODE solver, and
finite-difference quantities. A point whose evaluation raises is counted as a
failure; failures on fewer than 1 % of the points are reported only.
"""
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from i18n.i18n import I18nAuto
from scripts.errors import RibaucourError
from scripts.hfront import (
    envelopes,
    existence_period,
    flat_front_point,
    flatness_residuals,
    form_relations_at,
    minkowski,
    recover_from_envelopes,
    xi_norms,
)
from scripts.mesh_io import random_points
from scripts.mexpr import diff_expr, eval_expr
from scripts.ribaucour import (
    RibaucourPair,
    associated_frontal,
    radius_function,
    ribaucour_data,
    ribaucour_image,
)
from scripts.riccati import monodromy, period_real, residual, residual_terms
from scripts.weierstrass import gauss_normal, immerse, immerse_near, metric_factor

i18n = I18nAuto()

TOL_ALGEBRAIC = 1e-10
TOL_QUADRATURE = 1e-6
TOL_FINITE_DIFFERENCE = 1e-3
FD_STEP = 1e-3
SEED = 0x5EED
FAILURE_FRACTION = 0.01


@dataclass
class CheckReport:
    name: str
    max_residual: float
    tolerance: float
    points_tested: int
    passed: bool
    failures: int = 0
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "name": self.name,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "points_tested": self.points_tested,
            "passed": self.passed,
            "failures": self.failures,
            "details": self.details,
        }


def _collect(name, tolerance, items, residual_at, details=None):
    """Run ``residual_at`` over ``items``; None results are skipped, package errors counted."""
    worst = 0.0
    tested = failures = 0
    first_failure = None
    for item in items:
        try:
            value = residual_at(item)
        except RibaucourError as e:
            failures += 1
            if first_failure is None:
                first_failure = f"{item}: {e}"
            continue
        if value is None:
            continue
        tested += 1
        worst = max(worst, float(value))
    attempted = tested + failures
    if attempted == 0 or (failures and failures >= FAILURE_FRACTION * attempted):
        worst = float("inf")
    details = dict(details or {})
    if first_failure is not None:
        details["first_failure"] = first_failure
    return CheckReport(name, worst, tolerance, tested, worst < tolerance, failures, details)


def check_riccati(pair, points, tolerance=TOL_ALGEBRAIC):
    """Relative Riccati residual |h' - k h^2 f + g'| / (1 + |h'| + |k h^2 f| + |g'|)."""
    expr = residual(pair.W, pair.k, pair.h)
    terms = residual_terms(pair.W, pair.k, pair.h)

    def at(z):
        scale = 1 + sum(abs(eval_expr(t, z)) for t in terms)
        return abs(eval_expr(expr, z)) / scale

    return _collect("riccati", tolerance, points, at)


def check_hopf(pair, points, tolerance=TOL_ALGEBRAIC):
    """The Hopf differential f g' is the same for W and W~."""
    dg, dg_tilde = diff_expr(pair.W.g), diff_expr(pair.W_tilde.g)

    def at(z):
        before = eval_expr(pair.W.f, z) * eval_expr(dg, z)
        after = eval_expr(pair.W_tilde.f, z) * eval_expr(dg_tilde, z)
        return abs(after - before) / (1 + abs(before))

    return _collect("hopf", tolerance, points, at)


def minimal_residual(W, z, step=FD_STEP):
    """Largest of the relative harmonicity, conformality and tangency defects at z."""
    Z = immerse(W, z)
    hop = step * (1 + abs(z))
    plus_u, minus_u, plus_v, minus_v = immerse_near(W, z, Z, [hop, -hop, 1j * hop, -1j * hop])
    Z_u = (plus_u - minus_u) / (2 * hop)
    Z_v = (plus_v - minus_v) / (2 * hop)
    Z_uu = (plus_u - 2 * Z + minus_u) / hop ** 2
    Z_vv = (plus_v - 2 * Z + minus_v) / hop ** 2
    speed = np.sqrt(metric_factor(W, z))
    harmonic = np.linalg.norm(Z_uu + Z_vv) / (np.linalg.norm(Z_uu) + np.linalg.norm(Z_vv) + speed)
    conformal = max(abs(Z_u @ Z_u - Z_v @ Z_v), abs(Z_u @ Z_v)) / speed ** 2
    normal = gauss_normal(W, z)
    tangent = max(abs(normal @ Z_u), abs(normal @ Z_v)) / speed
    return max(harmonic, conformal, tangent)


def check_minimal(W, points, tolerance=TOL_FINITE_DIFFERENCE, step=FD_STEP, name="minimal"):
    return _collect(name, tolerance, points, lambda z: minimal_residual(W, z, step))


def check_sphere_congruence(pair, points, tolerance=TOL_QUADRATURE):
    """
    The transformed point Z - (2 phi/|X|^2) X lies on the sphere of the
    congruence, is tangent to it, and differs from the immersion of the
    normalised transformed data by one constant translation.
    """
    W_norm, W_tilde_norm = pair.normalized
    offsets = []

    def at(z):
        data = ribaucour_data(pair, z)
        Z = immerse(W_norm, z)
        X = associated_frontal(pair, z, data)
        tau = radius_function(data)
        center = Z + tau * gauss_normal(pair.W, z)
        image = ribaucour_image(Z, X, data.phi)
        to_image = image - center
        on_sphere = abs(np.linalg.norm(to_image) - abs(tau)) / (1 + abs(tau))
        tangent = abs(to_image @ gauss_normal(pair.W_tilde, z) + tau) / (1 + abs(tau))
        surface = immerse(W_tilde_norm, z)
        offset = surface - image
        offsets.append(offset)
        drift = np.linalg.norm(offset - offsets[0]) / (1 + np.linalg.norm(surface))
        return max(on_sphere, tangent, drift)

    return _collect("sphere_congruence", tolerance, points, at)


def check_frontal_data(pair, points, tolerance=TOL_ALGEBRAIC):
    """<X, N> = rho and |X|^2 = rho phi for the associated frontal."""
    def at(z):
        data = ribaucour_data(pair, z)
        X = associated_frontal(pair, z, data)
        scale = abs(data.rho) + abs(data.rho * data.phi)
        along = abs(X @ gauss_normal(pair.W, z) - data.rho)
        norm = abs(X @ X - data.rho * data.phi)
        return max(along, norm) / scale

    return _collect("frontal_data", tolerance, points, at)


def check_hyperboloid(FF, points, tolerance=TOL_ALGEBRAIC):
    """
    <<X,X>> = -1, <<N,N>> = 1, <<X,N>> = 0. Passes on the residual relative to
    the size of the coordinates; the largest absolute residual goes to the details.
    """
    absolute = []

    def at(z):
        sample = flat_front_point(FF, z)
        X, N = sample.X, sample.N
        residual = max(abs(minkowski(X, X) + 1), abs(minkowski(N, N) - 1), abs(minkowski(X, N)))
        absolute.append(residual)
        return residual / (1 + X @ X + N @ N)

    report = _collect("hyperboloid", tolerance, points, at)
    report.details["max_absolute"] = max(absolute, default=0.0)
    return report


def check_symmetry(FF, points, tolerance=TOL_ALGEBRAIC):
    """The envelopes are inversions of each other: |X+|^2 X- + X+ = 0."""
    def at(z):
        sample = flat_front_point(FF, z)
        (X_plus, _), (X_minus, _) = envelopes(sample.X, sample.N)
        square = X_plus @ X_plus
        scale = square * np.linalg.norm(X_minus) + np.linalg.norm(X_plus) + 1e-300
        return np.linalg.norm(square * X_minus + X_plus) / scale

    return _collect("symmetry", tolerance, points, at)


def check_envelope_roundtrip(FF, points, tolerance=TOL_ALGEBRAIC):
    def at(z):
        sample = flat_front_point(FF, z)
        (X_plus, N_plus), (X_minus, N_minus) = envelopes(sample.X, sample.N)
        X, N = recover_from_envelopes(X_plus, N_plus, X_minus, N_minus)
        scale = 1 + np.linalg.norm(sample.X) + np.linalg.norm(sample.N)
        return (np.linalg.norm(X - sample.X) + np.linalg.norm(N - sample.N)) / scale

    return _collect("envelope_roundtrip", tolerance, points, at)


def check_xi_product(FF, points, tolerance=TOL_QUADRATURE):
    """Both xi norms integrated separately satisfy |xi+ xi-| = |G+ - G-| |c0 c1| / |G+ - G-|(z_b)."""
    def at(z):
        xi_plus_sq, xi_minus_sq = xi_norms(FF, z, paired=False)
        delta = eval_expr(FF.delta, z)
        expected = abs(FF.c0 * FF.c1) ** 2 * abs(delta / FF.delta_at_base) ** 2
        return abs(xi_plus_sq * xi_minus_sq - expected) / expected

    return _collect("xi_product", tolerance, points, at)


def check_flatness(FF, points, tolerance=TOL_FINITE_DIFFERENCE, step=FD_STEP):
    def at(z):
        values = flatness_residuals(FF, z, step)
        return None if values is None else max(values)

    return _collect("flatness", tolerance, points, at)


def check_form_relations(FF, points, tolerance=TOL_FINITE_DIFFERENCE, step=FD_STEP):
    worst = {}

    def at(z):
        residuals = form_relations_at(FF, z, step)
        if residuals is None:
            return None
        for key, value in residuals.items():
            worst[key] = max(worst.get(key, 0.0), value)
        return max(residuals.values())

    report = _collect("form_relations", tolerance, points, at)
    report.details.update(worst)
    return report


def check_periods(obj, loops, tolerance=TOL_QUADRATURE):
    """|Re of the loop integral| of g'/h for a pair, or of G+'/(G+ - G-) for a flat front."""
    if isinstance(obj, RibaucourPair):
        def at(loop):
            return abs(period_real(obj.W, obj.h, loop))
    else:
        def at(loop):
            return abs(existence_period(obj, loop))

    return _collect("periods", tolerance, loops, at)


def check_monodromy(pair, loops, tolerance=TOL_QUADRATURE):
    """h continued once around each loop comes back to its starting value."""
    def at(loop):
        h0 = eval_expr(pair.h, loop.start)
        return monodromy(pair.W, pair.k, h0, loop)

    return _collect("monodromy", tolerance, loops, at)


TIERS = {
    "algebraic": TOL_ALGEBRAIC,
    "quadrature": TOL_QUADRATURE,
    "finite_difference": TOL_FINITE_DIFFERENCE,
}


def _tiers(tiers, tol_scale):
    merged = dict(TIERS, **(tiers or {}))
    return {key: value * tol_scale for key, value in merged.items()}


def run_suite(pair, domain, loops=(), seed=SEED, count=40, tol_scale=1.0, progress=True, tiers=None,
              step=FD_STEP):
    """All checks of a pair on ``count`` random points of the domain, sorted by name."""
    tol = _tiers(tiers, tol_scale)
    front = pair.front
    points = random_points(domain, count, seed, tuple(front.punctures))
    checks = [
        lambda: check_riccati(pair, points, tol["algebraic"]),
        lambda: check_hopf(pair, points, tol["algebraic"]),
        lambda: check_minimal(pair.W, points, tol["finite_difference"], step, name="minimal"),
        lambda: check_minimal(pair.W_tilde, points, tol["finite_difference"], step, name="minimal_transformed"),
        lambda: check_frontal_data(pair, points, tol["algebraic"]),
        lambda: check_sphere_congruence(pair, points, tol["quadrature"]),
        lambda: check_hyperboloid(front, points, tol["algebraic"]),
        lambda: check_xi_product(front, points, tol["quadrature"]),
        lambda: check_symmetry(front, points, tol["algebraic"]),
        lambda: check_envelope_roundtrip(front, points, tol["algebraic"]),
        lambda: check_flatness(front, points, tol["finite_difference"], step),
        lambda: check_form_relations(front, points, tol["finite_difference"], step),
    ]
    if loops:
        checks.append(lambda: check_periods(pair, loops, tol["quadrature"]))
        checks.append(lambda: check_monodromy(pair, loops, tol["quadrature"]))
    reports = [run() for run in tqdm(checks, desc=i18n("Verifying"), disable=not progress)]
    return sorted(reports, key=lambda report: report.name)


def run_front_suite(FF, domain, loops=(), seed=SEED, count=40, tol_scale=1.0, progress=True, tiers=None,
                    step=FD_STEP):
    """Checks of a flat front given directly by its Gauss maps."""
    tol = _tiers(tiers, tol_scale)
    points = random_points(domain, count, seed, FF.punctures)
    checks = [
        lambda: check_hyperboloid(FF, points, tol["algebraic"]),
        lambda: check_xi_product(FF, points, tol["quadrature"]),
        lambda: check_symmetry(FF, points, tol["algebraic"]),
        lambda: check_envelope_roundtrip(FF, points, tol["algebraic"]),
        lambda: check_flatness(FF, points, tol["finite_difference"], step),
        lambda: check_form_relations(FF, points, tol["finite_difference"], step),
    ]
    if loops:
        checks.append(lambda: check_periods(FF, loops, tol["quadrature"]))
    reports = [run() for run in tqdm(checks, desc=i18n("Verifying"), disable=not progress)]
    return sorted(reports, key=lambda report: report.name)


def print_reports(reports):
    for report in reports:
        status = i18n("PASS") if report.passed else i18n("FAIL")
        print(i18n("{} {}: max residual {:.3e} (tolerance {:.1e}, {} points, {} failures)").format(
            status, report.name, report.max_residual, report.tolerance, report.points_tested, report.failures))


def all_passed(reports):
    return all(report.passed for report in reports)


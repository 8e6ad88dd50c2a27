"""
The Riccati equation dh = k h^2 f dz - dg attached to Weierstrass data (f, g).

Closed-form solutions for the catenoid and trinoid families, residuals and
loop integrals for checking them, and an adaptive Cash-Karp integrator that
follows a solution along a path. Near a pole of h the integrator switches to
mu = 1/h, which solves d mu = (g' mu^2 - k f) dz.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scripts.contour import loop_integral
from scripts.errors import ConfigError, PathError, RiccatiError
from scripts.mesh_io import export_csv
from scripts.mexpr import Const, MeroExpr, Var, add, diff_expr, div, eval_expr, mul, power, sub

ODE_TOLERANCE = 1e-10
CHART_SWITCH = 10.0
CHART_HYSTERESIS = 0.9
MAX_CHART_SWITCHES = 100
MIN_STEP = 1e-12
MAX_STEPS = 200000

# Cash-Karp 5(4): stage nodes, stage rows, 5th-order weights, error weights
CK_NODES = (0.0, 1 / 5, 3 / 10, 3 / 5, 1.0, 7 / 8)
CK_ROWS = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (3 / 10, -9 / 10, 6 / 5),
    (-11 / 54, 5 / 2, -70 / 27, 35 / 27),
    (1631 / 55296, 175 / 512, 575 / 13824, 44275 / 110592, 253 / 4096),
)
CK_WEIGHTS = (37 / 378, 0.0, 250 / 621, 125 / 594, 0.0, 512 / 1771)
CK_ERROR = (-277 / 64512, 0.0, 6925 / 370944, -6925 / 202752, -277 / 14336, 277 / 7084)


@dataclass(frozen=True)
class RiccatiSample:
    z: complex
    value: complex
    chart: str  # "h" or "mu"

    @property
    def h(self):
        if self.chart == "h":
            return self.value
        return complex("inf") if self.value == 0 else 1 / self.value


@dataclass(frozen=True)
class RiccatiSolution:
    k: float
    expr: MeroExpr | None = None
    samples: tuple = ()
    switches: int = 0
    switch_points: tuple = ()  # (z, h, mu) at each chart change

    @property
    def kind(self):
        return "closed_form" if self.expr is not None else "sampled"

    @property
    def end_h(self):
        if not self.samples:
            raise RiccatiError("solution has no samples")
        return self.samples[-1].h

    def at(self, z):
        if self.expr is None:
            raise RiccatiError("a sampled solution can only be read at its samples")
        return eval_expr(self.expr, z)


@dataclass(frozen=True)
class IndicialPair:
    plus: complex
    minus: complex


def check_k(k):
    if isinstance(k, complex):
        if k.imag != 0:
            raise ConfigError(f"k must be real, got {k}")
        k = k.real
    k = float(k)
    if k == 0:
        raise RiccatiError("k must be non-zero")
    return k


def _other(chart):
    return "mu" if chart == "h" else "h"


def _cash_karp_step(slope, t, value, dt):
    stages = []
    for node, row in zip(CK_NODES, CK_ROWS):
        trial = value + dt * sum(a * s for a, s in zip(row, stages))
        stages.append(slope(t + node * dt, trial))
    new = value + dt * sum(b * s for b, s in zip(CK_WEIGHTS, stages))
    error = abs(dt * sum(e * s for e, s in zip(CK_ERROR, stages)))
    return new, error


def solve_along(W, k, z0, h0, path, tolerance=ODE_TOLERANCE, threshold=CHART_SWITCH,
                hysteresis=CHART_HYSTERESIS, max_switches=MAX_CHART_SWITCHES):
    """
    Continue the solution with h(z0) = h0 along ``path``.

    Steps are taken in the parameter t of each segment with local
    extrapolation. A step ending above ``threshold`` is accepted and the chart
    changes; one ending above threshold / hysteresis is retried with half the step.
    """
    k = check_k(k)
    z0, h0 = complex(z0), complex(h0)
    if path.segments and abs(path.start - z0) > 1e-9 * (1 + abs(z0)):
        raise PathError(f"path starts at {path.start}, not at z0 = {z0}")
    f, dg = W.f, diff_expr(W.g)

    if cmath.isinf(h0) or abs(h0) > threshold:
        chart, value = "mu", (0j if cmath.isinf(h0) else 1 / h0)
    else:
        chart, value = "h", h0
    samples = [RiccatiSample(z0, value, chart)]
    switch_points = []
    band = threshold / hysteresis
    steps = 0

    for seg in path.segments:
        def slope(t, v, seg=seg):
            z = complex(seg.point(t))
            dz = complex(seg.velocity(t))
            if chart == "h":
                return (k * v * v * eval_expr(f, z) - eval_expr(dg, z)) * dz
            return (eval_expr(dg, z) * v * v - k * eval_expr(f, z)) * dz

        t, dt = 0.0, 0.05
        while t < 1.0:
            steps += 1
            if steps > MAX_STEPS:
                raise RiccatiError(f"more than {MAX_STEPS} steps without reaching the end of the path")
            dt = min(dt, 1.0 - t)
            new, error = _cash_karp_step(slope, t, value, dt)
            ratio = error / (tolerance * (1 + max(abs(value), abs(new))))
            if not math.isfinite(ratio) or ratio > 1:
                dt *= 0.1 if not math.isfinite(ratio) else max(0.1, 0.9 * ratio ** -0.25)
            elif abs(new) > band:
                dt *= 0.5
            else:
                t = 1.0 if 1.0 - t - dt < 1e-15 else t + dt
                value = new
                z = complex(seg.point(t))
                if abs(value) > threshold:
                    flipped = 1 / value
                    switch_points.append((z, value, flipped) if chart == "h" else (z, flipped, value))
                    chart, value = _other(chart), flipped
                    if len(switch_points) > max_switches:
                        raise RiccatiError(f"more than {max_switches} chart switches near z = {z}")
                samples.append(RiccatiSample(z, value, chart))
                dt *= min(5.0, max(0.2, 0.9 * ratio ** -0.2)) if ratio > 0 else 5.0
                continue
            if dt < MIN_STEP:
                raise RiccatiError(f"step size underflow near z = {complex(seg.point(t))}")

    return RiccatiSolution(k, None, tuple(samples), len(switch_points), tuple(switch_points))


def catenoid_closed_form(m, C=0):
    """h = 2z(C - z^m) / ((m+1) z^m + (m-1) C) for the catenoid f = z^-2, g = z; k = (m^2 - 1)/4."""
    if isinstance(m, complex) or not m > 0:
        raise RiccatiError(f"m must be a positive real number, got {m}")
    m = float(m)
    k = (m * m - 1) / 4
    if k == 0:
        raise RiccatiError("m = 1 gives k = 0")
    z = Var()
    exponent = int(m) if m.is_integer() else m
    C = complex(C)
    if C == 0:
        return mul(Const(-2 / (m + 1)), z), k
    zm = power(z, exponent)
    numerator = mul(Const(2), mul(z, sub(Const(C), zm)))
    denominator = add(mul(Const(m + 1), zm), Const((m - 1) * C))
    return div(numerator, denominator), k


def trinoid_closed_form():
    """h = z^2 (z^3 - 1), k = 5, for f = 1/(z^3 - 1)^2, g = z^2."""
    z = Var()
    return mul(power(z, 2), sub(power(z, 3), Const(1))), 5.0


CLOSED_FORMS = {
    "catenoid": lambda params: catenoid_closed_form(params.get("m", 3), params.get("C", 0)),
    "trinoid": lambda params: trinoid_closed_form(),
}


def closed_form_solution(name, params=None):
    if name not in CLOSED_FORMS:
        raise ConfigError(f"unknown closed-form solution {name!r}; known: {', '.join(sorted(CLOSED_FORMS))}")
    expr, k = CLOSED_FORMS[name](params or {})
    return RiccatiSolution(k, expr)


def _expr_of(h):
    if isinstance(h, RiccatiSolution):
        if h.expr is None:
            raise RiccatiError("this operation needs a closed-form solution")
        return h.expr
    return h


def residual(W, k, h):
    """The expression h' - k h^2 f + g', which vanishes for a solution."""
    h = _expr_of(h)
    return add(sub(diff_expr(h), mul(Const(check_k(k)), mul(power(h, 2), W.f))), diff_expr(W.g))


def residual_terms(W, k, h):
    """(h', k h^2 f, g') for scaling the residual."""
    h = _expr_of(h)
    return diff_expr(h), mul(Const(check_k(k)), mul(power(h, 2), W.f)), diff_expr(W.g)


def period_real(W, h, loop, **kwargs):
    """Real part of the loop integral of g'/h."""
    integrand = div(diff_expr(W.g), _expr_of(h))
    return loop_integral(integrand, loop, **kwargs).real


def singular_indices(k):
    """
    Roots (1 +- sqrt(1 + 4k)) / 2 of the indicial equation at a double pole of f.

    k = 0 is allowed here; 1 + 4k < 0 is not.
    """
    if isinstance(k, complex):
        if k.imag != 0:
            raise ConfigError(f"k must be real, got {k}")
        k = k.real
    discriminant = 1 + 4 * float(k)
    if discriminant < 0:
        raise ConfigError(f"1 + 4k must be non-negative, got k = {k}")
    root = math.sqrt(discriminant)
    return IndicialPair((1 + root) / 2, (1 - root) / 2)


def monodromy(W, k, h0, loop, **kwargs):
    """Relative change of the solution after one turn around ``loop``, starting from h0 at loop.start."""
    solution = solve_along(W, k, loop.start, h0, loop.path(), **kwargs)
    h_end = solution.end_h
    h0 = complex(h0)
    return abs(h_end - h0) / max(abs(h0), 1e-300)


def trace_rows(solution):
    return [
        (s.z.real, s.z.imag, s.chart, complex(s.value).real, complex(s.value).imag)
        for s in solution.samples
    ]


TRACE_HEADER = ("z_re", "z_im", "chart", "val_re", "val_im")


def export_trace_csv(solution, destination):
    return export_csv(trace_rows(solution), destination, TRACE_HEADER)

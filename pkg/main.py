import os

os.environ.setdefault("PYTHONWARNINGS", "ignore")

import argparse
import sys
import traceback
import warnings
from dataclasses import replace

from i18n.i18n import I18nAuto
from scripts import ends, hfront, mesh_io, ribaucour, riccati, save_json, verify
from scripts.contour import merge_points
from scripts.errors import ConfigError, RibaucourError
from scripts.mexpr import eval_expr
from scripts.run_config import get_solver_config, load_loops, load_run_config
from scripts.weierstrass import immersion_evaluator

warnings.filterwarnings("ignore")

i18n = I18nAuto()

COMMANDS = ("transform", "flatfront", "verify", "periods", "classify")

DEFAULT_OUTPUTS = {
    "mesh_r3": "surface.obj",
    "mesh_r3_transformed": "surface_transformed.obj",
    "mesh_h3_ball": "front_ball.obj",
    "report": "report.json",
    "trace": "riccati_trace.csv",
}


def build_parser():
    parser = argparse.ArgumentParser(description="Ribaucour transforms of minimal surfaces and flat fronts in H3.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        command = sub.add_parser(name)
        command.add_argument("--config", required=True, help="Run config (configs/*.json)")
        command.add_argument("--out", help="Output directory (default: output/<config name>)")
        command.add_argument("--seed", type=int, help="Seed for the random check points")
        command.add_argument("--tol-scale", type=float, default=1.0, help="Multiplies every check tolerance")
        command.add_argument("--loops", help="JSON list of loops {center, radius, orientation}")
        command.add_argument("--solver-config", help="Numeric defaults (default: solver_config.json)")
        command.add_argument("--no-progress", action="store_true", help="Hide the progress bars")
    return parser


class Run:
    """Everything a command needs: the loaded config, the solver defaults and the CLI overrides."""

    def __init__(self, args):
        if args.tol_scale <= 0:
            raise ConfigError(f"--tol-scale must be positive, got {args.tol_scale}")
        self.args = args
        self.solver = get_solver_config(args.solver_config)
        self.config = load_run_config(args.config)
        self.seed = next(s for s in (args.seed, self.config.seed, self.solver["seed"]) if s is not None)
        self.loops = load_loops(args.loops) if args.loops else self.config.loops
        self.out_dir = args.out or os.path.join("output", self.config.name)
        self.progress = self.solver["show_progress"] and not args.no_progress
        self.outputs = dict(DEFAULT_OUTPUTS, **self.config.outputs)
        self.written = []

    def path(self, key):
        return os.path.join(self.out_dir, self.outputs[key])

    def tiers(self):
        return {
            "algebraic": self.solver["tolerance_algebraic"],
            "quadrature": self.solver["tolerance_quadrature"],
            "finite_difference": self.solver["tolerance_finite_difference"],
        }

    def manifest(self):
        hashed = {
            "config": self.config.raw,
            "loops": [[loop.center, loop.radius, loop.orientation] for loop in self.loops],
            "tol_scale": self.args.tol_scale,
        }
        save_json.write_manifest(hashed, self.out_dir, self.seed, self.args.command, self.written)

    def save_report(self, report):
        path = save_json.export_json(report, self.path("report"))
        self.written.append(path)
        print(i18n("Report saved to {}").format(path))

    def save_mesh(self, key, mesh):
        path = mesh_io.export_obj(mesh, self.path(key))
        self.written.append(path)
        print(i18n("Mesh saved to {} ({} vertices, {} faces)").format(path, len(mesh.vertices), len(mesh.faces)))

    def pair(self):
        """The Ribaucour pair of a closed-form Riccati solution."""
        config = self.config
        if config.weierstrass is None or config.riccati is None:
            raise ConfigError("this command needs 'weierstrass' and 'riccati' sections")
        spec = config.riccati
        if spec.mode != "closed_form":
            raise ConfigError("this command needs a closed-form Riccati solution")
        solution = riccati.closed_form_solution(spec.name, spec.params)
        if spec.k is not None and abs(spec.k - solution.k) > 1e-12 * (1 + abs(solution.k)):
            raise ConfigError(f"riccati.k = {spec.k} does not match k = {solution.k} of {spec.name}")
        print(i18n("Riccati solution {}: h = {}, k = {}").format(spec.name, solution.expr, solution.k))
        return ribaucour.build_pair(config.weierstrass, solution, solution.k,
                                    search_radius=self.solver["zero_search_radius"])

    def front(self):
        spec = self.config.flatfront
        if spec is not None:
            W = self.config.weierstrass
            exclusion = W.exclusion_radius if W is not None else 0.05
            return hfront.make_flat_front(spec.g_plus, spec.g_minus, spec.base_point, spec.c0, spec.c1,
                                          spec.punctures, exclusion, self.solver["zero_search_radius"])
        return self.pair().front


def _surface_mesh(run, W, key, desc, obstacles=()):
    domain = replace(run.config.domain, punctures=tuple(p for p in obstacles if abs(p) != float("inf")))
    grid = mesh_io.sample_domain(domain)
    mesh = mesh_io.build_mesh(immersion_evaluator(W, obstacles), grid, run.progress, desc)
    run.save_mesh(key, mesh)
    return mesh


def _print_ends(classes):
    for end in classes:
        point = "inf" if abs(end.point) == float("inf") else f"{end.point:.6g}"
        print(i18n("End at {}: {} (orders g, f, h = {})").format(point, end.tag, end.orders))


def _numeric_transform(run):
    config = run.config
    spec = config.riccati
    solver = run.solver
    solution = riccati.solve_along(
        config.weierstrass, spec.k, spec.z0, spec.h0, spec.path,
        tolerance=solver["ode_tolerance"],
        threshold=solver["chart_switch_threshold"],
        hysteresis=solver["chart_hysteresis"],
        max_switches=solver["max_chart_switches"],
    )
    trace = riccati.export_trace_csv(solution, run.path("trace"))
    run.written.append(trace)
    print(i18n("Riccati trace saved to {} ({} samples, {} chart switches)").format(
        trace, len(solution.samples), solution.switches))
    W = config.weierstrass
    _surface_mesh(run, W, "mesh_r3", i18n("Meshing surface"), W.punctures)
    print(i18n("The transformed surface needs a closed-form solution; only the trace and the original surface were written"))
    run.save_report({
        "k": spec.k,
        "weierstrass": {"f": str(W.f), "g": str(W.g)},
        "riccati": {
            "mode": "numeric",
            "samples": len(solution.samples),
            "switches": solution.switches,
            "end_h": solution.end_h,
            "switch_points": [list(point) for point in solution.switch_points],
        },
    })
    return 0


def command_transform(run):
    config = run.config
    if config.riccati is not None and config.riccati.mode == "numeric":
        return _numeric_transform(run)
    pair = run.pair()
    W_norm, W_tilde_norm = pair.normalized
    _surface_mesh(run, W_norm, "mesh_r3", i18n("Meshing surface"), pair.W.punctures)
    _surface_mesh(run, W_tilde_norm, "mesh_r3_transformed", i18n("Meshing transformed surface"),
                  merge_points(pair.W_tilde.punctures, pair.h_poles))
    classes = ends.classify_ends(pair)
    _print_ends(classes)
    run.save_report(ribaucour.pair_summary(pair, classes))
    return 0


def _print_front_ends(classes):
    for end in classes:
        point = "inf" if abs(end.point) == float("inf") else f"{end.point:.6g}"
        print(i18n("Front end at {}: {} (orders G+, G-, G+ - G- = {})").format(point, end.tag, end.orders))


def command_flatfront(run):
    if run.config.flatfront is not None:
        FF = run.front()
        end_points = run.config.flatfront.punctures
    else:
        pair = run.pair()
        FF = pair.front
        end_points = pair.W_tilde.punctures
    domain = replace(run.config.domain, punctures=tuple(p for p in FF.punctures if abs(p) != float("inf")))
    grid = mesh_io.sample_domain(domain)
    mesh = mesh_io.build_mesh(hfront.front_ball_evaluator(FF), grid, run.progress, i18n("Meshing flat front"))
    run.save_mesh("mesh_h3_ball", mesh)
    singular = [i for i, flag in enumerate(mesh.singular) if flag]
    print(i18n("{} singular vertices on the front").format(len(singular)))
    front_ends = hfront.classify_front_ends(FF, end_points)
    _print_front_ends(front_ends)
    run.save_report({
        "G_plus": str(FF.g_plus),
        "G_minus": str(FF.g_minus),
        "base_point": FF.base_point,
        "c0": FF.c0,
        "c1": FF.c1,
        "punctures": list(FF.punctures),
        "vertices": len(mesh.vertices),
        "faces": len(mesh.faces),
        "singular_vertices": len(singular),
        "singular_indices": singular,
        "failed_vertices": len(mesh.failed),
        "ends": [end.as_dict() for end in front_ends],
    })
    return 0


def command_verify(run):
    config = run.config
    options = dict(
        seed=run.seed,
        count=run.solver["sample_points"],
        tol_scale=run.args.tol_scale,
        progress=run.progress,
        tiers=run.tiers(),
        step=run.solver["fd_step"],
    )
    if config.riccati is not None:
        reports = verify.run_suite(run.pair(), config.domain, run.loops, **options)
    else:
        reports = verify.run_front_suite(run.front(), config.domain, run.loops, **options)
    verify.print_reports(reports)
    passed = verify.all_passed(reports)
    run.save_report({"seed": run.seed, "passed": passed, "checks": [r.as_dict() for r in reports]})
    return 0 if passed else 1


def _loop_value(fun, *args):
    try:
        return fun(*args)
    except RibaucourError:
        return float("nan")


def command_periods(run):
    if not run.loops:
        raise ConfigError("no loops given (config 'loops' or --loops)")
    tolerance = run.solver["tolerance_quadrature"] * run.args.tol_scale
    if run.config.riccati is not None:
        pair = run.pair()
        reports = [verify.check_periods(pair, run.loops, tolerance), verify.check_monodromy(pair, run.loops, tolerance)]
        values = []
        for loop in run.loops:
            period = _loop_value(riccati.period_real, pair.W, pair.h, loop)
            jump = _loop_value(riccati.monodromy, pair.W, pair.k, eval_expr(pair.h, loop.start), loop)
            values.append({"loop": [loop.center, loop.radius, loop.orientation], "real_period": period,
                           "monodromy": jump})
            print(i18n("Loop at {:.6g} (radius {:g}): Re period {:.3e}, monodromy {:.3e}").format(
                loop.center, loop.radius, period, jump))
    else:
        FF = run.front()
        reports = [verify.check_periods(FF, run.loops, tolerance)]
        values = []
        for loop in run.loops:
            period = _loop_value(hfront.existence_period, FF, loop)
            values.append({"loop": [loop.center, loop.radius, loop.orientation], "real_period": period})
            print(i18n("Loop at {:.6g} (radius {:g}): Re period {:.3e}").format(loop.center, loop.radius, period))
    verify.print_reports(reports)
    passed = verify.all_passed(reports)
    run.save_report({"passed": passed, "loops": values, "checks": [r.as_dict() for r in reports]})
    return 0 if passed else 1


def command_classify(run):
    pair = run.pair()
    classes = ends.classify_ends(pair)
    _print_ends(classes)
    run.save_report({"ends": [end.as_dict() for end in classes]})
    return 0


HANDLERS = {
    "transform": command_transform,
    "flatfront": command_flatfront,
    "verify": command_verify,
    "periods": command_periods,
    "classify": command_classify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        run = Run(args)
        code = HANDLERS[args.command](run)
        run.manifest()
        return code
    except RibaucourError as e:
        print(i18n("Error: {}").format(str(e)))
        return e.exit_code
    except Exception as e:
        print(i18n("\nAn error occurred: {}").format(str(e)))
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())

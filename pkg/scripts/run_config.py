"""
Run configurations (configs/*.json) and the numeric defaults in solver_config.json.

Complex numbers are written as numbers or [re, im] pairs, the point at infinity
as "inf", expressions as grammar strings.
"""
import json
import os
from dataclasses import dataclass, field

from i18n.i18n import I18nAuto
from scripts.contour import LoopSpec, PathSpec
from scripts.errors import ConfigError
from scripts.mesh_io import DomainSpec
from scripts.mexpr import parse_expr
from scripts.riccati import check_k
from scripts.weierstrass import INFINITY, WeierstrassData

i18n = I18nAuto()

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SOLVER_CONFIG_PATH = os.path.join(ROOT, "solver_config.json")

SOLVER_DEFAULTS = {
    "ode_tolerance": 1e-10,
    "chart_switch_threshold": 10.0,
    "chart_hysteresis": 0.9,
    "max_chart_switches": 100,
    "fd_step": 1e-3,
    "tolerance_algebraic": 1e-10,
    "tolerance_quadrature": 1e-6,
    "tolerance_finite_difference": 1e-3,
    "seed": 0x5EED,
    "sample_points": 40,
    "zero_search_radius": 4.0,
    "show_progress": True,
}


def get_solver_config(config_path=None):
    """Built-in defaults updated from solver_config.json (or ``config_path``)."""
    config = dict(SOLVER_DEFAULTS)
    config_path = config_path or SOLVER_CONFIG_PATH
    if config_path and os.path.exists(config_path):
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                loaded_config = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read solver config {config_path}: {e}") from e
        unknown = sorted(set(loaded_config) - set(SOLVER_DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown solver config keys: {', '.join(unknown)}")
        config.update(loaded_config)
    return config


def parse_complex(value, what="value"):
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return INFINITY
        raise ConfigError(f"{what}: expected a number, [re, im] or \"inf\", got {value!r}")
    if isinstance(value, bool):
        raise ConfigError(f"{what}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{what}: expected a number, [re, im] or \"inf\", got {value!r}")


def _require(section, key, where):
    if not isinstance(section, dict) or key not in section:
        raise ConfigError(f"missing key {key!r} in {where}")
    return section[key]


@dataclass
class RiccatiSpec:
    mode: str
    k: float | None = None
    name: str | None = None
    params: dict = field(default_factory=dict)
    z0: complex | None = None
    h0: complex | None = None
    path: PathSpec | None = None


@dataclass
class FlatFrontSpec:
    g_plus: object
    g_minus: object
    base_point: complex = 1 + 0j
    c0: complex = 1 + 0j
    c1: complex | None = None
    punctures: tuple = ()


@dataclass
class RunConfig:
    name: str
    weierstrass: WeierstrassData | None
    riccati: RiccatiSpec | None
    flatfront: FlatFrontSpec | None
    domain: DomainSpec
    outputs: dict
    loops: list
    seed: int | None
    raw: dict = field(repr=False, default_factory=dict)


def _weierstrass(section):
    punctures = tuple(parse_complex(p, "weierstrass.punctures") for p in section.get("punctures", []))
    base_value = section.get("base_value", [0, 0, 0])
    return WeierstrassData(
        parse_expr(_require(section, "f", "weierstrass")),
        parse_expr(_require(section, "g", "weierstrass")),
        punctures,
        parse_complex(section.get("base_point", 1), "weierstrass.base_point"),
        tuple(base_value),
        float(section.get("exclusion_radius", 0.05)),
    )


def _riccati(section):
    mode = section.get("mode", "closed_form")
    k = section.get("k")
    if k is not None:
        if isinstance(k, list):
            k = parse_complex(k, "riccati.k")
        k = check_k(k)
    if mode == "closed_form":
        params = {
            key: parse_complex(value, f"riccati.params.{key}") if isinstance(value, list) else value
            for key, value in section.get("params", {}).items()
        }
        return RiccatiSpec(mode, k, _require(section, "name", "riccati"), params)
    if mode == "numeric":
        if k is None:
            raise ConfigError("riccati.k is required in numeric mode")
        points = [parse_complex(p, "riccati.path") for p in _require(section, "path", "riccati")]
        z0 = parse_complex(section["z0"], "riccati.z0") if "z0" in section else points[0]
        h0 = parse_complex(_require(section, "h0", "riccati"), "riccati.h0")
        return RiccatiSpec(mode, k, z0=z0, h0=h0, path=PathSpec.polyline(points))
    raise ConfigError(f"unknown riccati mode {mode!r}")


def _flatfront(section):
    c1 = section.get("c1")
    return FlatFrontSpec(
        parse_expr(_require(section, "G_plus", "flatfront")),
        parse_expr(_require(section, "G_minus", "flatfront")),
        parse_complex(section.get("base_point", 1), "flatfront.base_point"),
        parse_complex(section.get("c0", 1), "flatfront.c0"),
        None if c1 is None else parse_complex(c1, "flatfront.c1"),
        tuple(parse_complex(p, "flatfront.punctures") for p in section.get("punctures", [])),
    )


def _domain(section, punctures):
    kind = _require(section, "kind", "domain")
    if kind == "annulus":
        params = (float(_require(section, "r_in", "domain")), float(_require(section, "r_out", "domain")))
    elif kind == "disk":
        params = (float(_require(section, "radius", "domain")),)
    elif kind == "rect":
        params = (parse_complex(_require(section, "z_min", "domain"), "domain.z_min"),
                  parse_complex(_require(section, "z_max", "domain"), "domain.z_max"))
    else:
        raise ConfigError(f"unknown domain kind {kind!r}")
    return DomainSpec(
        kind,
        params,
        punctures,
        float(section.get("exclusion_radius", 0.05)),
        int(section.get("nu", 24)),
        int(section.get("nv", 48)),
        parse_complex(section.get("center", 0), "domain.center"),
    )


def parse_loops(items):
    if not isinstance(items, list):
        raise ConfigError("loops must be a list")
    return [
        LoopSpec(
            parse_complex(_require(item, "center", "loops"), "loops.center"),
            float(_require(item, "radius", "loops")),
            int(item.get("orientation", 1)),
        )
        for item in items
    ]


def load_loops(path):
    return parse_loops(_read_json(path))


def _read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e}") from e


def load_run_config(path):
    raw = _read_json(path)
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: the top level must be an object")
    name = raw.get("name") or os.path.splitext(os.path.basename(path))[0]
    weierstrass = _weierstrass(raw["weierstrass"]) if "weierstrass" in raw else None
    riccati = _riccati(raw["riccati"]) if "riccati" in raw else None
    flatfront = _flatfront(raw["flatfront"]) if "flatfront" in raw else None
    if weierstrass is None and flatfront is None:
        raise ConfigError(f"{path}: needs a 'weierstrass' or a 'flatfront' section")
    if riccati is not None and weierstrass is None:
        raise ConfigError(f"{path}: a 'riccati' section needs a 'weierstrass' section")
    if weierstrass is not None:
        punctures = weierstrass.finite_punctures
    else:
        punctures = tuple(p for p in flatfront.punctures if p != INFINITY)
    domain = _domain(_require(raw, "domain", path), punctures)
    seed = raw.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    outputs = raw.get("outputs", {})
    if not isinstance(outputs, dict):
        raise ConfigError("outputs must be an object")
    print(i18n("Loaded run config from {}").format(path))
    return RunConfig(name, weierstrass, riccati, flatfront, domain, outputs, parse_loops(raw.get("loops", [])),
                     seed, raw)

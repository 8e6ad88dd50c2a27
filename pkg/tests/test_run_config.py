import json

import pytest

from scripts.errors import ConfigError
from scripts.run_config import get_solver_config, load_run_config, parse_complex
from scripts.weierstrass import INFINITY

BASE = {
    "weierstrass": {"f": "z^-2", "g": "z", "punctures": [0, "inf"], "base_point": 1},
    "domain": {"kind": "annulus", "r_in": 0.5, "r_out": 2.0},
}


def write_config(tmp_path, **sections):
    data = dict(BASE)
    data.update(sections)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.mark.parametrize(
    "value, expected",
    [(2, 2 + 0j), (0.5, 0.5 + 0j), ([1, -2], 1 - 2j), ("inf", INFINITY), ("Infinity", INFINITY)],
)
def test_parse_complex(value, expected):
    assert parse_complex(value) == expected


@pytest.mark.parametrize("value", [True, "1+2i", [1, 2, 3], None])
def test_parse_complex_rejects(value):
    with pytest.raises(ConfigError):
        parse_complex(value)


def test_numeric_riccati_starts_at_first_path_point(tmp_path):
    path = write_config(tmp_path, riccati={"mode": "numeric", "k": 2, "path": [[0.5, 0.1], 1.5], "h0": -0.25})
    spec = load_run_config(path).riccati
    assert spec.z0 == 0.5 + 0.1j
    assert spec.h0 == -0.25
    assert spec.path.end == 1.5


def test_numeric_riccati_explicit_start(tmp_path):
    path = write_config(tmp_path, riccati={"mode": "numeric", "k": 2, "path": [0.5, 1.5], "z0": 0.5, "h0": -0.25})
    assert load_run_config(path).riccati.z0 == 0.5


def test_numeric_riccati_needs_k(tmp_path):
    path = write_config(tmp_path, riccati={"mode": "numeric", "path": [0.5, 1.5], "h0": -0.25})
    with pytest.raises(ConfigError):
        load_run_config(path)


def test_unknown_riccati_mode(tmp_path):
    path = write_config(tmp_path, riccati={"mode": "series", "k": 2})
    with pytest.raises(ConfigError):
        load_run_config(path)


def test_solver_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "solver.json"
    path.write_text(json.dumps({"ode_tolerance": 1e-9, "stepsize": 2}), encoding="utf-8")
    with pytest.raises(ConfigError):
        get_solver_config(str(path))

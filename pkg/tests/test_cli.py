import json
import os

import pytest

import main

CONFIGS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs")


def config(name):
    return os.path.join(CONFIGS, name)


def run(command, config_path, out_dir, *extra):
    return main.main([command, "--config", config_path, "--out", str(out_dir), "--no-progress", *extra])


def read_json(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def variant(tmp_path, name, **changes):
    """A copy of a shipped config with some sections replaced."""
    data = read_json(config(name))
    data.update(changes)
    path = tmp_path / f"variant_{name}"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.fixture
def small_solver(tmp_path):
    path = tmp_path / "solver.json"
    path.write_text(json.dumps({"sample_points": 5, "show_progress": False}), encoding="utf-8")
    return str(path)


def test_transform(tmp_path):
    assert run("transform", config("catenoid_C0.json"), tmp_path) == 0
    for name in ("catenoid.obj", "catenoid_transformed.obj", "report.json", "manifest.json"):
        assert (tmp_path / name).exists()
    report = read_json(tmp_path / "report.json")
    assert [end["tag"] for end in report["ends"]] == ["catenoid_type", "catenoid_type"]
    manifest = read_json(tmp_path / "manifest.json")
    assert manifest["command"] == "transform"
    assert manifest["seed"] == 24301
    assert manifest["outputs"] == ["catenoid.obj", "catenoid_transformed.obj", "report.json"]


def test_runs_are_reproducible(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    assert run("transform", config("catenoid_C0.json"), first) == 0
    assert run("transform", config("catenoid_C0.json"), second) == 0
    for name in sorted(os.listdir(first)):
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_classify(tmp_path):
    assert run("classify", config("catenoid_m3_C2.json"), tmp_path) == 0
    tags = [end["tag"] for end in read_json(tmp_path / "report.json")["ends"]]
    assert tags.count("planar_embedded") == 3
    assert tags.count("catenoid_type") == 2


def test_classify_trinoid(tmp_path):
    assert run("classify", config("trinoid_k5.json"), tmp_path) == 0
    tags = [end["tag"] for end in read_json(tmp_path / "report.json")["ends"]]
    assert sorted(tags) == ["catenoid_type"] * 3 + ["planar_nonembedded"]


def test_periods(tmp_path):
    assert run("periods", config("catenoid_m3_C2.json"), tmp_path) == 0
    report = read_json(tmp_path / "report.json")
    assert report["passed"] is True
    assert len(report["loops"]) == 4


def test_periods_fail_for_non_integer_exponent(tmp_path):
    path = variant(
        tmp_path, "catenoid_C0.json",
        riccati={"mode": "closed_form", "name": "catenoid", "params": {"m": 2.5, "C": 2}, "k": 1.3125},
    )
    assert run("periods", path, tmp_path / "out") == 1
    report = read_json(tmp_path / "out" / "report.json")
    monodromy = next(check for check in report["checks"] if check["name"] == "monodromy")
    assert monodromy["passed"] is False


def test_loops_override(tmp_path):
    loops = tmp_path / "loops.json"
    loops.write_text(json.dumps([{"center": 0, "radius": 0.2}]), encoding="utf-8")
    assert run("periods", config("catenoid_m3_C2.json"), tmp_path / "out", "--loops", str(loops)) == 0
    assert len(read_json(tmp_path / "out" / "report.json")["loops"]) == 1


def test_verify(tmp_path, small_solver):
    code = run("verify", config("catenoid_C0.json"), tmp_path, "--solver-config", small_solver, "--seed", "5")
    report = read_json(tmp_path / "report.json")
    assert code == (0 if report["passed"] else 1)
    assert report["seed"] == 5
    checks = {check["name"]: check for check in report["checks"]}
    for name in ("riccati", "hopf", "frontal_data", "hyperboloid", "symmetry", "envelope_roundtrip"):
        assert checks[name]["passed"], checks[name]
    assert read_json(tmp_path / "manifest.json")["seed"] == 5


def test_flatfront(tmp_path):
    assert run("flatfront", config("catenoid_C0.json"), tmp_path) == 0
    assert (tmp_path / "front_ball.obj").exists()
    report = read_json(tmp_path / "report.json")
    assert report["vertices"] > 0
    assert report["singular_vertices"] == len(report["singular_indices"])
    assert all(0 <= i < report["vertices"] for i in report["singular_indices"])
    assert [end["tag"] for end in report["ends"]] == ["rotational", "rotational"]


def test_flatfront_of_planar_end_transform(tmp_path):
    path = variant(tmp_path, "catenoid_m3_C2.json",
                   domain={"kind": "annulus", "r_in": 0.5, "r_out": 2.0, "nu": 6, "nv": 12})
    assert run("flatfront", path, tmp_path / "out") == 0
    report = read_json(tmp_path / "out" / "report.json")
    tags = sorted(end["tag"] for end in report["ends"])
    assert tags == ["horospherical"] * 3 + ["rotational"] * 2
    with open(tmp_path / "out" / "front_ball.obj", encoding="utf-8") as f:
        vertex_lines = [line for line in f if line.startswith("v ")]
    assert len(vertex_lines) == report["vertices"]
    assert set(report["singular_indices"]) <= set(range(report["vertices"]))


def test_numeric_transform(tmp_path):
    path = variant(
        tmp_path, "catenoid_C0.json",
        riccati={"mode": "numeric", "k": 2, "path": [0.5, 1.5], "h0": -0.25},
        domain={"kind": "annulus", "r_in": 0.5, "r_out": 2.0, "nu": 4, "nv": 8},
    )
    assert run("transform", path, tmp_path / "out") == 0
    report = read_json(tmp_path / "out" / "report.json")
    assert report["riccati"]["mode"] == "numeric"
    assert report["riccati"]["end_h"] == pytest.approx([-0.75, 0.0], abs=1e-7)
    assert (tmp_path / "out" / "riccati_trace.csv").exists()


def test_missing_config(tmp_path):
    assert run("transform", str(tmp_path / "missing.json"), tmp_path) == 2


def test_bad_tolerance_scale(tmp_path):
    assert run("verify", config("catenoid_C0.json"), tmp_path, "--tol-scale", "0") == 2


def test_unknown_solver_key(tmp_path):
    path = tmp_path / "solver.json"
    path.write_text(json.dumps({"no_such_key": 1}), encoding="utf-8")
    assert run("classify", config("catenoid_C0.json"), tmp_path, "--solver-config", str(path)) == 2


@pytest.mark.parametrize("argv", [[], ["transform"], ["nonsense", "--config", "x.json"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as error:
        main.main(argv)
    assert error.value.code == 2

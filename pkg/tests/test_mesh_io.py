import csv

import numpy as np
import pytest

from scripts.errors import ConfigError, DegenerateError, MeshError
from scripts.mesh_io import (
    DomainSpec,
    build_mesh,
    euler_characteristic,
    export_csv,
    export_obj,
    random_points,
    read_obj,
    sample_domain,
)


def flat(z):
    return np.array([z.real, z.imag, 0.0])


def test_annulus_grid():
    grid = sample_domain(DomainSpec("annulus", (0.5, 2.0), nu=4, nv=8))
    assert len(grid) == 32
    assert grid.periodic
    radii = sorted({round(abs(z), 12) for z in grid})
    assert radii[0] == pytest.approx(0.5)
    assert radii[-1] == pytest.approx(2.0)
    assert radii[1] / radii[0] == pytest.approx(radii[2] / radii[1])


def test_exclusion_disks_drop_nodes():
    domain = DomainSpec("disk", (1.0,), punctures=(0.5,), exclusion_radius=0.2, nu=12, nv=24)
    grid = sample_domain(domain)
    assert None in grid.points
    assert all(abs(z - 0.5) >= 0.2 for z in grid)


def test_rect_grid_is_not_periodic():
    grid = sample_domain(DomainSpec("rect", (-1 - 1j, 1 + 2j), nu=3, nv=5))
    assert not grid.periodic
    assert grid.points[0] == -1 - 1j
    assert grid.points[-1] == 1 + 2j


@pytest.mark.parametrize(
    "kind, params",
    [("annulus", (2.0, 1.0)), ("disk", (0.0,)), ("rect", (1 + 1j, 0j)), ("sphere", (1.0,))],
)
def test_invalid_domains(kind, params):
    with pytest.raises(ConfigError):
        DomainSpec(kind, params)


def test_annulus_mesh_topology():
    grid = sample_domain(DomainSpec("annulus", (0.5, 2.0), nu=5, nv=10))
    mesh = build_mesh(flat, grid, progress=False)
    assert len(mesh.vertices) == 50
    assert len(mesh.faces) == 2 * 4 * 10
    assert euler_characteristic(mesh) == 0
    assert not any(mesh.singular)


def test_rect_mesh_topology():
    grid = sample_domain(DomainSpec("rect", (0j, 1 + 1j), nu=4, nv=6))
    mesh = build_mesh(flat, grid, progress=False)
    assert len(mesh.faces) == 2 * 3 * 5
    assert euler_characteristic(mesh) == 1


def test_failed_vertices_are_skipped():
    grid = sample_domain(DomainSpec("rect", (0j, 1 + 1j), nu=4, nv=4))

    def evaluator(z):
        if z == 0j:
            raise DegenerateError("corner")
        return flat(z), z.real > 0.5

    mesh = build_mesh(evaluator, grid, progress=False)
    assert mesh.failed == [0j]
    assert len(mesh.vertices) == 15
    assert len(mesh.faces) == 2 * 9 - 2
    assert sum(mesh.singular) == 8


def test_mostly_failing_mesh():
    grid = sample_domain(DomainSpec("rect", (0j, 1 + 1j), nu=3, nv=3))
    with pytest.raises(MeshError):
        build_mesh(lambda z: np.array([np.nan, 0.0, 0.0]), grid, progress=False)


def test_obj_round_trip(tmp_path):
    grid = sample_domain(DomainSpec("annulus", (0.5, 2.0), nu=3, nv=6))
    mesh = build_mesh(flat, grid, progress=False)
    path = export_obj(mesh, str(tmp_path / "sub" / "mesh.obj"))
    vertices, faces = read_obj(path)
    np.testing.assert_array_equal(np.array(vertices), np.array(mesh.vertices))
    assert faces == mesh.faces


def test_csv_writer(tmp_path):
    path = export_csv([(1, 0.1, "h"), (2, 1 / 3, "mu")], str(tmp_path / "rows.csv"), ("n", "x", "chart"))
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["n", "x", "chart"]
    assert float(rows[2][1]) == 1 / 3
    assert rows[2][2] == "mu"


def test_random_points_reproducible():
    domain = DomainSpec("annulus", (0.5, 2.0), punctures=(1.0,), exclusion_radius=0.1)
    first = random_points(domain, 20, seed=7)
    assert first == random_points(domain, 20, seed=7)
    assert first != random_points(domain, 20, seed=8)
    assert all(0.5 <= abs(z) <= 2.0 + 1e-12 for z in first)
    assert all(abs(z - 1.0) >= 0.2 for z in first)


def test_random_points_give_up():
    domain = DomainSpec("disk", (1.0,), punctures=(0j,), exclusion_radius=0.6)
    with pytest.raises(ConfigError):
        random_points(domain, 3, seed=1, max_draws=50)

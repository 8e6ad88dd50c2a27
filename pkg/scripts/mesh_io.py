"""
Parameter-domain sampling, triangle meshes and the OBJ / CSV / JSON writers.

Grids are row-major: index i * nv + j, i along the radial (or real) direction,
j along the angular (or imaginary) direction. Annulus and disk grids are
periodic in j.
"""
import cmath
import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from i18n.i18n import I18nAuto
from scripts.errors import ConfigError, MeshError, RibaucourError

i18n = I18nAuto()

DOMAIN_KINDS = ("annulus", "disk", "rect")


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    params: tuple
    punctures: tuple = ()
    exclusion_radius: float = 0.05
    nu: int = 24
    nv: int = 48
    center: complex = 0j

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise ConfigError(f"unknown domain kind {self.kind!r}")
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "punctures", tuple(complex(p) for p in self.punctures))
        if self.nu < 2 or self.nv < 2:
            raise ConfigError("a grid needs at least 2 x 2 nodes")
        if self.kind == "annulus":
            r_in, r_out = self.params
            if not 0 < r_in < r_out:
                raise ConfigError(f"annulus radii must satisfy 0 < r_in < r_out, got {self.params}")
        elif self.kind == "disk":
            (radius,) = self.params
            if not radius > 0:
                raise ConfigError(f"disk radius must be positive, got {radius}")
        else:
            lower, upper = (complex(p) for p in self.params)
            if not (lower.real < upper.real and lower.imag < upper.imag):
                raise ConfigError(f"rect corners must be ordered, got {self.params}")

    @property
    def periodic(self):
        return self.kind != "rect"

    def radial_range(self):
        if self.kind == "annulus":
            return self.params
        radius = self.params[0]
        inner = self.exclusion_radius if self.exclusion_radius < radius else 0.01 * radius
        return inner, radius


@dataclass
class GridSample:
    points: list  # complex, or None where the node was dropped
    nu: int
    nv: int
    periodic: bool

    def __iter__(self):
        return (p for p in self.points if p is not None)

    def __len__(self):
        return sum(1 for p in self.points if p is not None)

    def index(self, i, j):
        return i * self.nv + j


@dataclass
class SurfaceMesh:
    vertices: list = field(default_factory=list)
    faces: list = field(default_factory=list)
    params: list = field(default_factory=list)
    singular: list = field(default_factory=list)
    failed: list = field(default_factory=list)


def _near_puncture(z, punctures, radius):
    return any(not cmath.isinf(p) and abs(z - p) < radius for p in punctures)


def sample_domain(d):
    """Grid nodes of the domain, with nodes inside an exclusion disk dropped."""
    if d.kind == "rect":
        lower, upper = (complex(p) for p in d.params)
        us = np.linspace(lower.real, upper.real, d.nu)
        vs = np.linspace(lower.imag, upper.imag, d.nv)
        raw = [complex(u, v) for u in us for v in vs]
    else:
        r_in, r_out = d.radial_range()
        radii = r_in * (r_out / r_in) ** (np.arange(d.nu) / (d.nu - 1))
        angles = 2 * math.pi * np.arange(d.nv) / d.nv
        raw = [complex(d.center + r * cmath.exp(1j * a)) for r in radii for a in angles]
    points = [None if _near_puncture(z, d.punctures, d.exclusion_radius) else z for z in raw]
    return GridSample(points, d.nu, d.nv, d.periodic)


def random_points(d, count, seed, obstacles=(), margin=2.0, max_draws=100000):
    """``count`` reproducible random points of the domain, kept margin * exclusion away from obstacles."""
    rng = np.random.default_rng(seed)
    avoid = tuple(d.punctures) + tuple(obstacles)
    radius = margin * d.exclusion_radius
    points = []
    draws = 0
    while len(points) < count:
        draws += 1
        if draws > max_draws:
            raise ConfigError("could not place sample points away from the obstacles")
        if d.kind == "rect":
            lower, upper = (complex(p) for p in d.params)
            z = complex(rng.uniform(lower.real, upper.real), rng.uniform(lower.imag, upper.imag))
        else:
            r_in, r_out = d.radial_range()
            r = r_in * (r_out / r_in) ** rng.uniform()
            z = complex(d.center + r * cmath.exp(2j * math.pi * rng.uniform()))
        if not _near_puncture(z, avoid, radius):
            points.append(z)
    return points


def _evaluate(evaluator, z):
    result = evaluator(z)
    if isinstance(result, tuple):
        position, singular = result
    else:
        position, singular = result, False
    position = np.asarray(position, dtype=float)
    if not np.all(np.isfinite(position)):
        raise MeshError(f"non-finite vertex at z = {z}")
    return position, bool(singular)


def build_mesh(evaluator, grid, progress=True, desc=None):
    """
    Evaluate every kept node and triangulate the quads whose corners all succeeded.

    ``evaluator(z)`` returns a position or (position, singular). Nodes raising a
    package error are recorded as failures; more than half failing is a MeshError.
    """
    mesh = SurfaceMesh()
    slot = {}
    kept = [(n, z) for n, z in enumerate(grid.points) if z is not None]
    for n, z in tqdm(kept, desc=desc or i18n("Meshing"), disable=not progress):
        try:
            position, singular = _evaluate(evaluator, z)
        except RibaucourError:
            mesh.failed.append(z)
            continue
        slot[n] = len(mesh.vertices)
        mesh.vertices.append(position)
        mesh.params.append(z)
        mesh.singular.append(singular)
    if kept and len(mesh.failed) > 0.5 * len(kept):
        raise MeshError(
            f"{len(mesh.failed)} of {len(kept)} vertices failed; first failure at z = {mesh.failed[0]}"
        )
    columns = grid.nv if grid.periodic else grid.nv - 1
    for i in range(grid.nu - 1):
        for j in range(columns):
            jn = (j + 1) % grid.nv
            a, b = grid.index(i, j), grid.index(i + 1, j)
            c, d = grid.index(i + 1, jn), grid.index(i, jn)
            for tri in ((a, b, c), (a, c, d)):
                if all(v in slot for v in tri):
                    mesh.faces.append(tuple(slot[v] for v in tri))
    if mesh.failed and progress:
        print(i18n("{} vertices skipped after evaluation errors").format(len(mesh.failed)))
    return mesh


def _fmt(x):
    return f"{float(x):.17g}"


def _prepare(destination):
    folder = os.path.dirname(destination)
    if folder:
        os.makedirs(folder, exist_ok=True)


def export_obj(mesh, destination):
    _prepare(destination)
    with open(destination, "w", encoding="utf-8", newline="\n") as file:
        for v in mesh.vertices:
            file.write("v " + " ".join(_fmt(x) for x in v) + "\n")
        for face in mesh.faces:
            file.write("f " + " ".join(str(i + 1) for i in face) + "\n")
    return destination


def read_obj(path):
    vertices, faces = [], []
    with open(path, "r", encoding="utf-8") as file:
        for line in file:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                vertices.append(np.array([float(x) for x in parts[1:4]]))
            elif parts[0] == "f":
                faces.append(tuple(int(x.split("/")[0]) - 1 for x in parts[1:]))
    return vertices, faces


def export_csv(rows, destination, header):
    _prepare(destination)
    with open(destination, "w", encoding="utf-8", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return destination


def euler_characteristic(mesh):
    """V - E + F over the vertices used by faces."""
    used = {v for face in mesh.faces for v in face}
    edges = set()
    for face in mesh.faces:
        for a, b in zip(face, face[1:] + face[:1]):
            edges.add((min(a, b), max(a, b)))
    return len(used) - len(edges) + len(mesh.faces)

"""
Finite-difference geometry on square stencils in the z-plane.

A stencil is an array ``grid[i, j]`` holding the value at z + (i - r) h + 1j (j - r) h,
so axis 0 is the u = Re z direction and axis 1 the v = Im z direction.
"""
import numpy as np


def stencil_offsets(h, radius=2):
    steps = np.arange(-radius, radius + 1)
    return [(i + 1j * j) * h for i in steps for j in steps]


def sample_grid(values_at, h, radius=2):
    """Collect ``values_at(offsets)`` into a (2r+1, 2r+1, dim) stencil."""
    offsets = stencil_offsets(h, radius)
    values = np.asarray(values_at(offsets))
    n = 2 * radius + 1
    return values.reshape(n, n, *values.shape[1:])


def _center(grid):
    return grid.shape[0] // 2


def partials(grid, h, i=None, j=None):
    """Central first and second differences (u, v, uu, vv, uv) at stencil node (i, j)."""
    c = _center(grid)
    i = c if i is None else i
    j = c if j is None else j
    du = (grid[i + 1, j] - grid[i - 1, j]) / (2 * h)
    dv = (grid[i, j + 1] - grid[i, j - 1]) / (2 * h)
    duu = (grid[i + 1, j] - 2 * grid[i, j] + grid[i - 1, j]) / h ** 2
    dvv = (grid[i, j + 1] - 2 * grid[i, j] + grid[i, j - 1]) / h ** 2
    duv = (grid[i + 1, j + 1] - grid[i + 1, j - 1] - grid[i - 1, j + 1] + grid[i - 1, j - 1]) / (4 * h ** 2)
    return du, dv, duu, dvv, duv


def laplacian_5pt(grid, h):
    c = _center(grid)
    return (grid[c + 1, c] + grid[c - 1, c] + grid[c, c + 1] + grid[c, c - 1] - 4 * grid[c, c]) / h ** 2


def first_form(du, dv, inner=np.dot):
    return np.array([[inner(du, du), inner(du, dv)], [inner(dv, du), inner(dv, dv)]])


def second_form(dX, dN, inner=np.dot):
    """II = -<dX, dN>, symmetrised."""
    (Xu, Xv), (Nu, Nv) = dX, dN
    off = -0.5 * (inner(Xu, Nv) + inner(Xv, Nu))
    return np.array([[-inner(Xu, Nu), off], [off, -inner(Xv, Nv)]])


def shape_invariants(I, II):
    """Extrinsic curvature det II / det I and mean curvature tr(I^-1 II) / 2."""
    K_e = np.linalg.det(II) / np.linalg.det(I)
    H = 0.5 * np.trace(np.linalg.solve(I, II))
    return K_e, H


def jacobian_ratio(du, dv):
    """Smallest over largest singular value of the Jacobian [du dv]; 0 marks a singular point."""
    sigma = np.linalg.svd(np.column_stack([du, dv]), compute_uv=False)
    if sigma[0] == 0:
        return 0.0
    return float(sigma[-1] / sigma[0])


def brioschi_curvature(grid, h, inner=np.dot):
    """
    Gaussian curvature of the metric induced by the stencil values, from the
    first fundamental form alone. Needs a radius-2 stencil.

    Returns (K, scale) where scale bounds the size of the two determinant terms,
    so K / scale is a relative measure.
    """
    c = _center(grid)
    E = np.empty((3, 3))
    F = np.empty((3, 3))
    G = np.empty((3, 3))
    for a in range(3):
        for b in range(3):
            du, dv, *_ = partials(grid, h, c - 1 + a, c - 1 + b)
            E[a, b] = inner(du, du)
            F[a, b] = inner(du, dv)
            G[a, b] = inner(dv, dv)
    E_u, E_v, E_uu, E_vv, _ = partials(E, h)
    F_u, F_v, _, _, F_uv = partials(F, h)
    G_u, G_v, G_uu, _, _ = partials(G, h)
    e, f, g = E[1, 1], F[1, 1], G[1, 1]
    first = np.array([
        [-0.5 * E_vv + F_uv - 0.5 * G_uu, 0.5 * E_u, F_u - 0.5 * E_v],
        [F_v - 0.5 * G_u, e, f],
        [0.5 * G_v, f, g],
    ])
    second = np.array([
        [0.0, 0.5 * E_v, 0.5 * G_u],
        [0.5 * E_v, e, f],
        [0.5 * G_u, f, g],
    ])
    d1, d2 = np.linalg.det(first), np.linalg.det(second)
    area2 = (e * g - f * f) ** 2
    return (d1 - d2) / area2, (abs(d1) + abs(d2)) / area2 + 1e-300

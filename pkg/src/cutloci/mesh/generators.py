"""Test geometries: icospheres, tori of revolution and nested 1→4 refinement."""

from typing import Optional

import numpy as np

from cutloci.core.logging import get_logger
from cutloci.mesh.analytic import AnalyticSurface, Sphere, TorusOfRevolution
from cutloci.mesh.surface import SurfaceMesh

logger = get_logger("cutloci.mesh")

_PHI = (1.0 + np.sqrt(5.0)) / 2.0

_ICOSAHEDRON_VERTICES = np.array([
    [-1, _PHI, 0], [1, _PHI, 0], [-1, -_PHI, 0], [1, -_PHI, 0],
    [0, -1, _PHI], [0, 1, _PHI], [0, -1, -_PHI], [0, 1, -_PHI],
    [_PHI, 0, -1], [_PHI, 0, 1], [-_PHI, 0, -1], [-_PHI, 0, 1],
], dtype=np.float64)

_ICOSAHEDRON_FACES = np.array([
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
], dtype=np.int64)


def icosahedron(radius: float = 1.0) -> SurfaceMesh:
    """Regular icosahedron inscribed in the sphere of the given radius."""
    if not radius > 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    v = _ICOSAHEDRON_VERTICES / np.linalg.norm(_ICOSAHEDRON_VERTICES, axis=1, keepdims=True)
    return SurfaceMesh(radius * v, _ICOSAHEDRON_FACES, name="icosahedron")


def subdivide(mesh: SurfaceMesh) -> tuple[np.ndarray, np.ndarray]:
    """
    Split every triangle into four through its edge midpoints.

    The original vertices keep their indices, the midpoint of edge e becomes
    vertex V + e, and the four children of triangle t are stored at
    4t, 4t+1, 4t+2, 4t+3 (corner at i0, corner at i1, corner at i2, center).

    Returns:
        Tuple of (vertices before projection, triangles)
    """
    v = mesh.vertices
    t = mesh.triangles
    nv = mesh.n_vertices
    mid = 0.5 * (v[mesh.edges[:, 0]] + v[mesh.edges[:, 1]])
    m01, m12, m20 = (nv + mesh.triangle_edges[:, k] for k in range(3))
    i0, i1, i2 = t[:, 0], t[:, 1], t[:, 2]
    children = np.stack([
        np.column_stack([i0, m01, m20]),
        np.column_stack([m01, i1, m12]),
        np.column_stack([m20, m12, i2]),
        np.column_stack([m01, m12, m20]),
    ], axis=1).reshape(-1, 3)
    return np.vstack([v, mid]), children


def refine_project(mesh: SurfaceMesh, surface: AnalyticSurface) -> SurfaceMesh:
    """
    1→4 midpoint refinement with new vertices projected onto ``surface``.

    Args:
        mesh: Mesh whose vertices lie in the tubular neighborhood of ``surface``
        surface: Analytic surface providing the closest-point map

    Returns:
        Refined mesh with 4·F faces; h_max roughly halves

    Raises:
        ProjectionError: If a vertex or new midpoint lies outside the tubular neighborhood
    """
    surface.project(mesh.vertices)
    vertices, triangles = subdivide(mesh)
    nv = mesh.n_vertices
    vertices[nv:] = surface.project(vertices[nv:])
    return SurfaceMesh(vertices, triangles, name=mesh.name)


def generate_sphere(
    radius: float = 1.0,
    subdivisions: int = 0,
    center: tuple[float, float, float] = (0.0, 0.0, 0.0),
) -> SurfaceMesh:
    """
    Icosphere: icosahedron refined ``subdivisions`` times, vertices on the sphere.

    Level k+1 is exactly ``refine_project`` of level k, so successive levels
    are nested (see ``SurfaceMesh`` child ordering in ``subdivide``).
    """
    if not radius > 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    if subdivisions < 0:
        raise ValueError(f"subdivisions must be >= 0, got {subdivisions}")
    surface = Sphere(center=center, radius=radius)
    mesh = icosahedron(radius)
    if any(center):
        mesh = SurfaceMesh(mesh.vertices + np.asarray(center), mesh.triangles)
    for _ in range(subdivisions):
        mesh = refine_project(mesh, surface)
    # Re-project the 12 seed vertices as well so every norm is exact to rounding.
    mesh = SurfaceMesh(surface.project(mesh.vertices), mesh.triangles, name=f"icosphere{subdivisions}")
    logger.log_mesh_summary(mesh.name, mesh.n_vertices, mesh.n_faces, genus=0)
    return mesh


def generate_torus(major: float, minor: float, nu: int, nv: int) -> SurfaceMesh:
    """
    Structured torus of revolution, each (u, v) grid quad split into two triangles.

    Vertex (i, j) sits at u = 2πi/nu, v = 2πj/nv and has index i·nv + j; vertex
    0 is on the outer equator at (R + r, 0, 0).

    Raises:
        ValueError: If R <= r, r <= 0, or a grid count is below 3
    """
    if not (major > minor > 0):
        raise ValueError(f"torus requires R > r > 0, got R={major}, r={minor}")
    if nu < 3 or nv < 3:
        raise ValueError(f"nu and nv must be >= 3, got nu={nu}, nv={nv}")

    u = 2.0 * np.pi * np.arange(nu) / nu
    v = 2.0 * np.pi * np.arange(nv) / nv
    uu, vv = np.meshgrid(u, v, indexing="ij")
    ring = major + minor * np.cos(vv)
    vertices = np.column_stack([
        (ring * np.cos(uu)).ravel(),
        (ring * np.sin(uu)).ravel(),
        (minor * np.sin(vv)).ravel(),
    ])

    i, j = np.meshgrid(np.arange(nu), np.arange(nv), indexing="ij")
    i, j = i.ravel(), j.ravel()
    ip, jp = (i + 1) % nu, (j + 1) % nv
    p00, p10, p11, p01 = i * nv + j, ip * nv + j, ip * nv + jp, i * nv + jp
    triangles = np.stack([
        np.column_stack([p00, p10, p11]),
        np.column_stack([p00, p11, p01]),
    ], axis=1).reshape(-1, 3)

    mesh = SurfaceMesh(vertices, triangles, name=f"torus{nu}x{nv}")
    logger.log_mesh_summary(mesh.name, mesh.n_vertices, mesh.n_faces, genus=1)
    return mesh


def surface_for_generator(kind: str, **params) -> Optional[AnalyticSurface]:
    """Analytic surface matching a generator spec (used for refinement and audits)."""
    if kind == "sphere":
        return Sphere(center=tuple(params.get("center", (0.0, 0.0, 0.0))), radius=params.get("radius", 1.0))
    if kind == "torus":
        return TorusOfRevolution(major=params["major"], minor=params["minor"])
    return None

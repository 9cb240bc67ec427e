"""Mesh quality measurement: resolution h, shape regularity, invariant flags."""

import numpy as np

from cutloci.mesh.surface import SurfaceMesh
from cutloci.schemas.mesh import MeshReport


def min_angles(mesh: SurfaceMesh) -> np.ndarray:
    """Smallest interior angle of every triangle, in radians."""
    p = mesh.vertices[mesh.triangles]
    angles = []
    for k in range(3):
        a = p[:, (k + 1) % 3] - p[:, k]
        b = p[:, (k + 2) % 3] - p[:, k]
        cos = np.einsum("ij,ij->i", a, b) / (
            np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
        )
        angles.append(np.arccos(np.clip(cos, -1.0, 1.0)))
    return np.min(np.column_stack(angles), axis=1)


def validate(mesh: SurfaceMesh) -> MeshReport:
    """
    Measure a mesh and flag every invariant; violations are reported, never raised.

    Args:
        mesh: Mesh to inspect

    Returns:
        Populated MeshReport
    """
    topology, geometry = mesh.check_invariants()
    diam = mesh.triangle_diameters()
    h_max = float(diam.max()) if len(diam) else 0.0
    h_min = float(diam.min()) if len(diam) else 0.0
    with np.errstate(invalid="ignore"):
        angles = min_angles(mesh)
    min_angle = float(np.nanmin(angles)) if len(angles) else 0.0

    def _none(prefix: str, items: list[str]) -> bool:
        return not any(v.startswith(prefix) for v in items)

    counts = mesh.edge_face_counts
    return MeshReport(
        name=mesh.name,
        vertices=mesh.n_vertices,
        edges=mesh.n_edges,
        faces=mesh.n_faces,
        h_max=h_max,
        h_min=h_min,
        min_angle_deg=float(np.degrees(min_angle)),
        area=mesh.area(),
        euler_characteristic=mesh.euler_characteristic,
        genus=mesh.genus,
        quasi_uniformity=h_max / h_min if h_min > 0 else float("inf"),
        closed=bool(np.all(counts >= 2)),
        manifold=bool(np.all(counts <= 2)),
        oriented=_none("inconsistent orientation", topology),
        nondegenerate=_none("zero-area", geometry),
        euler_valid=_none("Euler characteristic", topology),
        no_duplicate_vertices=_none("duplicate vertices", geometry),
        violations=topology + geometry,
    )

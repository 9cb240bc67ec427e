"""Closed oriented triangle meshes and per-triangle tangent frames."""

from typing import NamedTuple, Optional

import numpy as np
from scipy import sparse

from cutloci.core.errors import MeshGeometryError, MeshTopologyError

# Local edges of a triangle (i0, i1, i2): (i0,i1), (i1,i2), (i2,i0).
LOCAL_EDGES = np.array([[0, 1], [1, 2], [2, 0]])


class TangentFrame(NamedTuple):
    """Orthonormal basis of one triangle plane plus its unit normal."""

    e1: np.ndarray
    e2: np.ndarray
    n: np.ndarray


class SurfaceMesh:
    """
    Closed, consistently oriented triangle mesh embedded in R³.

    Arrays are made read-only on construction so a mesh can be shared between
    workers. Connectivity (unique edges, triangle-to-edge map, edge-to-triangle
    map) is computed once, vectorized, from the triangle array.

    Use ``SurfaceMesh(...)`` for raw construction and ``check_invariants`` /
    ``ensure_valid`` (or the loaders, which call it) to enforce the closed
    2-manifold invariants.
    """

    def __init__(self, vertices, triangles, name: str = "mesh"):
        """
        Args:
            vertices: (V, 3) float coordinates
            triangles: (F, 3) vertex indices, counterclockwise w.r.t. the outward normal
            name: Label used in logs and exported headers
        """
        v = np.array(vertices, dtype=np.float64)
        t = np.array(triangles, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("Vertices should be an array of shape (V, 3)")
        if t.ndim != 2 or t.shape[1] != 3:
            raise ValueError("Triangles should be an array of shape (F, 3)")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise ValueError("Triangle index out of range")
        v.setflags(write=False)
        t.setflags(write=False)
        self.vertices = v
        self.triangles = t
        self.name = name
        self._build_connectivity()
        self._frames: Optional[tuple[np.ndarray, np.ndarray, np.ndarray]] = None

    def _build_connectivity(self) -> None:
        t = self.triangles
        directed = t[:, LOCAL_EDGES].reshape(-1, 2)
        undirected = np.sort(directed, axis=1)
        edges, inverse, counts = np.unique(
            undirected, axis=0, return_inverse=True, return_counts=True
        )
        inverse = inverse.reshape(-1)
        self.edges = edges
        self.edges.setflags(write=False)
        self.triangle_edges = inverse.reshape(-1, 3)
        self.triangle_edges.setflags(write=False)
        self.edge_face_counts = counts
        self._directed = directed

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    @property
    def genus(self) -> Optional[int]:
        """Genus of a closed orientable surface, None when V−E+F is odd or > 2."""
        chi = self.euler_characteristic
        if chi % 2 != 0 or chi > 2:
            return None
        return (2 - chi) // 2

    def face_normals_unnormalized(self) -> np.ndarray:
        v = self.vertices
        t = self.triangles
        return np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]])

    def triangle_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self.face_normals_unnormalized(), axis=1)

    def area(self) -> float:
        return float(self.triangle_areas().sum())

    def edge_lengths(self) -> np.ndarray:
        v = self.vertices
        return np.linalg.norm(v[self.edges[:, 1]] - v[self.edges[:, 0]], axis=1)

    def triangle_diameters(self) -> np.ndarray:
        """Longest edge of every triangle."""
        return self.edge_lengths()[self.triangle_edges].max(axis=1)

    def h_max(self) -> float:
        return float(self.triangle_diameters().max())

    def bounding_box_diameter(self) -> float:
        return float(np.linalg.norm(self.vertices.max(axis=0) - self.vertices.min(axis=0)))

    def edge_adjacency(self) -> sparse.csr_matrix:
        """Triangle-triangle adjacency through shared edges (F × F, symmetric)."""
        edge_of = self.triangle_edges.reshape(-1)
        face_of = np.repeat(np.arange(self.n_faces), 3)
        order = np.argsort(edge_of, kind="stable")
        e_sorted = edge_of[order]
        f_sorted = face_of[order]
        same = e_sorted[1:] == e_sorted[:-1]
        a = f_sorted[:-1][same]
        b = f_sorted[1:][same]
        data = np.ones(2 * len(a))
        adj = sparse.coo_matrix(
            (data, (np.concatenate([a, b]), np.concatenate([b, a]))),
            shape=(self.n_faces, self.n_faces),
        ).tocsr()
        adj.data[:] = 1.0
        return adj

    def frame_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(e1, e2, n) arrays of shape (F, 3); cached."""
        if self._frames is None:
            v = self.vertices
            t = self.triangles
            start = np.argmin(t, axis=1)
            rows = np.arange(self.n_faces)
            a = t[rows, start]
            b = t[rows, (start + 1) % 3]
            e1 = v[b] - v[a]
            e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
            n = self.face_normals_unnormalized()
            n /= np.linalg.norm(n, axis=1, keepdims=True)
            e2 = np.cross(n, e1)
            e2 /= np.linalg.norm(e2, axis=1, keepdims=True)
            for arr in (e1, e2, n):
                arr.setflags(write=False)
            self._frames = (e1, e2, n)
        return self._frames

    def check_invariants(self, duplicate_tol: float = 0.0) -> tuple[list[str], list[str]]:
        """
        Collect every violated SurfaceMesh invariant.

        Args:
            duplicate_tol: Distance under which two vertices count as duplicates

        Returns:
            Tuple of (topology violations, geometry violations)
        """
        topology: list[str] = []
        geometry: list[str] = []

        counts = self.edge_face_counts
        for e in np.flatnonzero(counts == 1):
            topology.append(f"boundary edge ({self.edges[e, 0]}, {self.edges[e, 1]})")
        for e in np.flatnonzero(counts > 2):
            topology.append(
                f"non-manifold edge ({self.edges[e, 0]}, {self.edges[e, 1]}) "
                f"shared by {counts[e]} triangles"
            )

        directed_unique, directed_counts = np.unique(
            self._directed, axis=0, return_counts=True
        )
        for k in np.flatnonzero(directed_counts > 1):
            i, j = directed_unique[k]
            topology.append(f"inconsistent orientation on edge ({i}, {j})")

        used = np.zeros(self.n_vertices, dtype=bool)
        used[self.triangles.reshape(-1)] = True
        for i in np.flatnonzero(~used):
            topology.append(f"vertex {i} belongs to no triangle")

        chi = self.euler_characteristic
        if chi % 2 != 0 or chi > 2:
            topology.append(f"Euler characteristic {chi} is not an even integer <= 2")

        areas = self.triangle_areas()
        for f in np.flatnonzero(~(areas > 0.0)):
            geometry.append(f"zero-area triangle {f} {tuple(int(i) for i in self.triangles[f])}")

        geometry.extend(self._duplicate_vertex_violations(duplicate_tol))
        return topology, geometry

    def _duplicate_vertex_violations(self, tol: float) -> list[str]:
        if tol > 0.0:
            from scipy.spatial import cKDTree

            pairs = sorted(cKDTree(self.vertices).query_pairs(tol))
        else:
            _, first, inverse = np.unique(
                self.vertices, axis=0, return_index=True, return_inverse=True
            )
            owner = first[inverse.reshape(-1)]
            dup = np.flatnonzero(owner != np.arange(self.n_vertices))
            pairs = [(int(owner[i]), int(i)) for i in dup]
        return [f"duplicate vertices {i} and {j}" for i, j in pairs]

    def ensure_valid(self) -> "SurfaceMesh":
        """Raise if any invariant is violated; every violation is listed."""
        topology, geometry = self.check_invariants()
        if topology:
            raise MeshTopologyError(topology + geometry)
        if geometry:
            raise MeshGeometryError(geometry)
        return self

    def __repr__(self) -> str:
        return f"SurfaceMesh(name={self.name!r}, V={self.n_vertices}, F={self.n_faces})"


def tangent_frames(mesh: SurfaceMesh) -> list[TangentFrame]:
    """
    Per-triangle tangent frames.

    e₁ runs along the edge from the lowest-index vertex of the triangle to the
    vertex that follows it in the triangle's cyclic order, n is the unit
    normal of the triangle's orientation and e₂ = n × e₁.
    """
    e1, e2, n = mesh.frame_arrays()
    return [TangentFrame(e1[f], e2[f], n[f]) for f in range(mesh.n_faces)]

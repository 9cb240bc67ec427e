"""Shortest-path distances on Steiner-refined mesh graphs."""

from typing import Iterable

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra

from cutloci.mesh.surface import SurfaceMesh


def steiner_points_per_edge(level: int) -> int:
    """2^level − 1 points per edge, so the graph at level ℓ contains the one at ℓ − 1."""
    if level < 0:
        raise ValueError(f"steiner_level must be >= 0, got {level}")
    return 2**level - 1


def steiner_graph(mesh: SurfaceMesh, level: int = 0) -> tuple[sparse.csr_matrix, np.ndarray]:
    """
    Build the Steiner-refined graph of a mesh.

    Nodes are the mesh vertices (indices 0..V−1) followed by k = 2^level − 1
    equally spaced points on every edge, node V + e·k + j − 1 being the j-th
    point from ``edges[e, 0]``. Every pair of nodes on the boundary of a
    triangle is joined by its straight segment inside that triangle.

    Returns:
        Tuple of (symmetric csr adjacency with Euclidean weights, node coordinates)
    """
    k = steiner_points_per_edge(level)
    v = mesh.vertices
    nv = mesh.n_vertices
    if k:
        t = np.arange(1, k + 1) / (k + 1)
        a = v[mesh.edges[:, 0]]
        b = v[mesh.edges[:, 1]]
        along = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]
        coords = np.vstack([v, along.reshape(-1, 3)])
    else:
        coords = v

    # boundary nodes of every triangle: 3 corners plus the Steiner points of its edges
    boundary = [mesh.triangles]
    if k:
        offsets = nv + mesh.triangle_edges[:, :, None] * k + np.arange(k)[None, None, :]
        boundary.append(offsets.reshape(mesh.n_faces, -1))
    nodes = np.hstack(boundary)

    width = nodes.shape[1]
    ii, jj = np.triu_indices(width, k=1)
    pairs = np.stack([nodes[:, ii].ravel(), nodes[:, jj].ravel()], axis=1)
    pairs.sort(axis=1)
    # segments along a shared edge appear in both triangles; keep one copy
    pairs = np.unique(pairs, axis=0)
    weights = np.linalg.norm(coords[pairs[:, 0]] - coords[pairs[:, 1]], axis=1)

    n = len(coords)
    graph = sparse.csr_matrix((weights, (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    return graph, coords


def _source_array(sources: Iterable[int], n_vertices: int) -> np.ndarray:
    idx = np.asarray(list(sources), dtype=np.int64)
    if idx.size == 0:
        raise ValueError("at least one source vertex is required")
    if idx.min() < 0 or idx.max() >= n_vertices:
        raise ValueError(f"source vertices must lie in [0, {n_vertices})")
    return idx


def graph_distance(mesh: SurfaceMesh, sources: Iterable[int], steiner_level: int = 0) -> np.ndarray:
    """
    Distance from the nearest source to every vertex along the Steiner graph.

    Args:
        mesh: Valid mesh
        sources: Source vertex indices
        steiner_level: Refinement level ℓ ≥ 0 (2^ℓ − 1 points per edge)

    Returns:
        (V,) distances; zero at the sources
    """
    idx = _source_array(getattr(sources, "indices", sources), mesh.n_vertices)
    graph, _ = steiner_graph(mesh, steiner_level)
    dist = dijkstra(graph, directed=False, indices=idx, min_only=True)
    return np.asarray(dist[: mesh.n_vertices], dtype=np.float64)


def graph_distance_per_source(
    mesh: SurfaceMesh, sources: Iterable[int], steiner_level: int = 0
) -> np.ndarray:
    """(S, V) matrix of graph distances, one row per source vertex."""
    idx = _source_array(getattr(sources, "indices", sources), mesh.n_vertices)
    graph, _ = steiner_graph(mesh, steiner_level)
    dist = dijkstra(graph, directed=False, indices=idx)
    return np.atleast_2d(dist)[:, : mesh.n_vertices]


def edge_lipschitz_violations(mesh: SurfaceMesh, distances: np.ndarray, lengths: np.ndarray) -> int:
    """Number of mesh edges with |d(i) − d(j)| greater than the given edge length."""
    gap = np.abs(distances[mesh.edges[:, 0]] - distances[mesh.edges[:, 1]])
    return int(np.count_nonzero(gap > lengths * (1.0 + 1e-12) + 1e-12))

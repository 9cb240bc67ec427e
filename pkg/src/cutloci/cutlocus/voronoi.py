"""Nearest-source labeling of vertices and triangles for multi-source runs."""

from dataclasses import dataclass

import numpy as np

from cutloci.mesh.surface import SurfaceMesh
from cutloci.oracle.distance import DistanceOracle
from cutloci.schemas.params import SourceSet


@dataclass(frozen=True)
class VoronoiLabeling:
    """Per-vertex nearest source (position in the source list) and per-triangle majority."""

    vertex_labels: np.ndarray
    triangle_labels: np.ndarray
    n_sources: int

    def cell_sizes(self) -> np.ndarray:
        return np.bincount(self.vertex_labels, minlength=self.n_sources)


def majority_labels(triangle_vertex_labels: np.ndarray) -> np.ndarray:
    """Most frequent of three labels per row; the smallest when all three differ."""
    s = np.sort(triangle_vertex_labels, axis=1)
    return np.where((s[:, 0] == s[:, 1]) | (s[:, 1] == s[:, 2]), s[:, 1], s[:, 0])


def label_cells(mesh: SurfaceMesh, sources: SourceSet, oracle: DistanceOracle) -> VoronoiLabeling:
    """
    Assign every vertex to its nearest source by the oracle's distances.

    Ties go to the lowest source position, so each source vertex keeps its own
    label.

    Raises:
        ValueError: If fewer than two sources are given or the oracle uses other sources
    """
    if len(sources) < 2:
        raise ValueError(f"Voronoi labeling needs at least 2 sources, got {len(sources)}")
    if oracle.sources.indices != sources.indices:
        raise ValueError("oracle was built for a different source set")
    vertex_labels = oracle.nearest_source().astype(np.int64)
    triangle_labels = majority_labels(vertex_labels[mesh.triangles])
    return VoronoiLabeling(
        vertex_labels=vertex_labels,
        triangle_labels=triangle_labels,
        n_sources=len(sources),
    )

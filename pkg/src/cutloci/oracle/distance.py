"""Reference distance functions d_b used to validate solutions."""

from enum import Enum
from typing import Optional

import numpy as np

from cutloci.core.logging import get_logger
from cutloci.mesh.analytic import Sphere
from cutloci.mesh.surface import SurfaceMesh
from cutloci.oracle.graph import edge_lipschitz_violations, graph_distance_per_source
from cutloci.oracle.sphere import great_circle_length, sphere_distance
from cutloci.schemas.params import SourceSet

logger = get_logger("cutloci.oracle")


class OracleKind(str, Enum):
    """How reference distances are computed."""

    ANALYTIC_SPHERE = "sphere"
    GRAPH = "graph"


class DistanceOracle:
    """
    Per-vertex distance to the nearest source, computed lazily and cached.

    The graph kind runs Dijkstra on the Steiner-refined mesh graph and is an
    upper bound for the surface geodesic distance; the sphere kind evaluates
    great-circle distances and needs the mesh vertices on ``sphere``.
    """

    def __init__(
        self,
        mesh: SurfaceMesh,
        sources: SourceSet,
        kind: OracleKind = OracleKind.GRAPH,
        steiner_level: int = 0,
        sphere: Optional[Sphere] = None,
    ):
        if kind is OracleKind.ANALYTIC_SPHERE and sphere is None:
            raise ValueError("the analytic sphere oracle needs a Sphere")
        if max(sources.indices) >= mesh.n_vertices:
            raise ValueError(f"oracle sources must be vertices (< {mesh.n_vertices})")
        self.mesh = mesh
        self.sources = sources
        self.kind = OracleKind(kind)
        self.steiner_level = steiner_level
        self.sphere = sphere
        self._per_source: Optional[np.ndarray] = None
        self._distances: Optional[np.ndarray] = None

    def per_source_distances(self) -> np.ndarray:
        """(S, V) distances, row s measured from source s."""
        if self._per_source is None:
            idx = list(self.sources.indices)
            if self.kind is OracleKind.GRAPH:
                self._per_source = graph_distance_per_source(self.mesh, idx, self.steiner_level)
            else:
                center, radius = np.asarray(self.sphere.center), self.sphere.radius
                self._per_source = np.vstack([
                    sphere_distance(center, radius, self.mesh.vertices[i], self.mesh.vertices)
                    for i in idx
                ])
            self._per_source.setflags(write=False)
            logger.debug(
                "Computed reference distances",
                kind=self.kind.value,
                sources=len(idx),
                steiner_level=self.steiner_level,
            )
        return self._per_source

    def distances(self) -> np.ndarray:
        """(V,) distance to the nearest source."""
        if self._distances is None:
            self._distances = self.per_source_distances().min(axis=0)
            self._distances[list(self.sources.indices)] = 0.0
            self._distances.setflags(write=False)
        return self._distances

    def nearest_source(self) -> np.ndarray:
        """Position in the source list of the nearest source; ties go to the lowest position."""
        return np.argmin(self.per_source_distances(), axis=0)

    def check_invariants(self) -> list[str]:
        """
        Violations of: d ≥ 0, d = 0 at sources, 1-Lipschitz along mesh edges.

        The Lipschitz bound uses the straight edge length for the graph kind and
        the great-circle length between the edge endpoints for the sphere kind.
        """
        d = self.distances()
        violations = []
        if np.any(d < 0):
            violations.append("negative distance")
        if np.any(d[list(self.sources.indices)] != 0):
            violations.append("nonzero distance at a source")
        if self.kind is OracleKind.GRAPH:
            lengths = self.mesh.edge_lengths()
        else:
            a = self.mesh.vertices[self.mesh.edges[:, 0]]
            b = self.mesh.vertices[self.mesh.edges[:, 1]]
            lengths = great_circle_length(self.sphere.center, self.sphere.radius, a, b)
        bad = edge_lipschitz_violations(self.mesh, d, lengths)
        if bad:
            violations.append(f"{bad} edges violate the 1-Lipschitz bound")
        return violations

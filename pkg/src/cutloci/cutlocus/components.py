"""Connected components of flagged triangles under shared-edge adjacency."""

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.sparse.csgraph import connected_components

from cutloci.mesh.surface import SurfaceMesh

if TYPE_CHECKING:
    from cutloci.cutlocus.extract import CutLocusSet


@dataclass(frozen=True)
class CutComponent:
    """One connected piece of the indicator set."""

    id: int
    triangles: np.ndarray
    area: float

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)


def find_components(
    mesh: SurfaceMesh, triangle_mask: np.ndarray, triangle_areas: np.ndarray
) -> tuple[CutComponent, ...]:
    """
    Group flagged triangles into edge-connected components.

    Components are ordered by area, largest first; equal areas keep the order
    of their smallest triangle index. Ids follow that order.
    """
    flagged = np.flatnonzero(triangle_mask)
    if not len(flagged):
        return ()
    adj = mesh.edge_adjacency()[flagged][:, flagged]
    count, labels = connected_components(adj, directed=False)
    areas = np.bincount(labels, weights=triangle_areas[flagged], minlength=count)
    first = np.full(count, len(flagged))
    np.minimum.at(first, labels, np.arange(len(flagged)))
    order = np.lexsort((first, -areas))
    return tuple(
        CutComponent(id=rank, triangles=flagged[labels == label], area=float(areas[label]))
        for rank, label in enumerate(order)
    )


def components(cut_set: "CutLocusSet", mesh: SurfaceMesh) -> list[CutComponent]:
    """Components of an extracted set, sorted by area descending (empty set → [])."""
    if len(cut_set.triangle_flags) != mesh.n_faces:
        raise ValueError("cut-locus set was extracted on a different mesh")
    return list(find_components(mesh, cut_set.triangle_flags, mesh.triangle_areas()))


def subcomplex_euler_characteristic(mesh: SurfaceMesh, triangles: np.ndarray) -> int:
    """V − E + F of the simplicial complex spanned by the given triangles."""
    tri = np.asarray(triangles, dtype=np.int64)
    if not len(tri):
        return 0
    n_vertices = len(np.unique(mesh.triangles[tri]))
    n_edges = len(np.unique(mesh.triangle_edges[tri]))
    return n_vertices - n_edges + len(tri)

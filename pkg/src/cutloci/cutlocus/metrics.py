"""Distances and areas comparing extracted sets with references or each other."""

import numpy as np
from scipy.spatial import cKDTree

from cutloci.cutlocus.extract import CutLocusSet
from cutloci.fem.transfer import ancestors, refinement_depth
from cutloci.mesh.surface import SurfaceMesh


def hausdorff_to_reference(
    cut_set: CutLocusSet, mesh: SurfaceMesh, reference
) -> tuple[float, float]:
    """
    One-sided sup distances between the flagged points and a reference sample.

    Args:
        cut_set: Nonempty extracted set on ``mesh``
        mesh: Mesh the set was extracted on
        reference: (n, 3) reference points

    Returns:
        (sup over flagged points of the distance to the reference,
         sup over reference points of the distance to the flagged points),
        Euclidean ambient metric

    Raises:
        ValueError: If either side is empty or the set belongs to another mesh
    """
    if len(cut_set.triangle_flags) != mesh.n_faces:
        raise ValueError("cut-locus set was extracted on a different mesh")
    points = cut_set.flagged_points
    ref = np.atleast_2d(np.asarray(reference, dtype=np.float64))
    if not len(points):
        raise ValueError("cut-locus set is empty")
    if not ref.size:
        raise ValueError("reference sample is empty")
    to_ref, _ = cKDTree(ref).query(points)
    to_set, _ = cKDTree(points).query(ref)
    return float(to_ref.max()), float(to_set.max())


def symmetric_difference_area(
    coarse: CutLocusSet,
    fine: CutLocusSet,
    coarse_mesh: SurfaceMesh,
    fine_mesh: SurfaceMesh,
) -> float:
    """
    Area of the symmetric difference of two sets on nested refinements.

    A fine triangle counts as inside the coarse set when its ancestor is
    flagged there; areas are measured on the fine mesh.
    """
    depth = refinement_depth(coarse_mesh.n_faces, fine_mesh.n_faces)
    inherited = coarse.triangle_flags[ancestors(fine_mesh.n_faces, depth)]
    differ = inherited ^ fine.triangle_flags
    return float(fine_mesh.triangle_areas()[differ].sum())

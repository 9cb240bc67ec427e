"""Extraction of the discrete λ-cut-locus indicator set from a solution field."""

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from cutloci.core.logging import get_logger
from cutloci.cutlocus.components import CutComponent, find_components
from cutloci.fem.space import FunctionSpace, values_at_constraints
from cutloci.solver.admm import SolutionField
from cutloci.solver.normalize import NormalizedSolution

logger = get_logger("cutloci.cutlocus")

DEFAULT_LAMBDA_FRACTIONS = (0.02, 0.05, 0.1, 0.2)
DEFAULT_FILTER_FRACTION = 1e-3

SolutionLike = Union[SolutionField, NormalizedSolution]


@dataclass(frozen=True)
class CutLocusSet:
    """
    Indicator set {p : u(p) > λ and |∇u(p)|² ≤ 1 − λ²/u(p)²} at constraint points.

    A triangle belongs to the set when at least one of its constraint points
    is flagged. ``point_values`` and ``point_norms`` hold u and |∇u| at every
    constraint point, so exporters and summaries can be recomputed from the
    set alone.
    """

    lam: float
    flags: np.ndarray
    point_triangles: np.ndarray
    point_xyz: np.ndarray
    point_values: np.ndarray
    point_norms: np.ndarray
    triangle_flags: np.ndarray
    triangle_areas: np.ndarray
    mesh_area: float
    components: tuple[CutComponent, ...]
    warning: Optional[str] = None

    @property
    def triangles(self) -> np.ndarray:
        return np.flatnonzero(self.triangle_flags)

    @property
    def is_empty(self) -> bool:
        return not self.flags.any()

    @property
    def total_area(self) -> float:
        return float(self.triangle_areas[self.triangle_flags].sum())

    @property
    def flagged_points(self) -> np.ndarray:
        return self.point_xyz[self.flags]

    def component_ids(self) -> np.ndarray:
        """Per-triangle component id, −1 outside the set."""
        ids = np.full(len(self.triangle_flags), -1, dtype=np.int64)
        for comp in self.components:
            ids[comp.triangles] = comp.id
        return ids


def extract(sol: SolutionLike, space: FunctionSpace, lam: float) -> CutLocusSet:
    """
    Flag the constraint points of the λ-cut locus.

    u at each point is the element interpolant of the nodal solution; the
    gradient is the one stored with the solution.

    Args:
        sol: Raw or normalized solution on ``space``
        space: Function space of the solution
        lam: Threshold λ > 0

    Returns:
        CutLocusSet with components computed; when λ ≥ max u the set is empty
        and ``warning`` is set

    Raises:
        ValueError: If λ <= 0
    """
    if not lam > 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    u = values_at_constraints(space, sol.coeffs)
    norms = np.linalg.norm(sol.gradients, axis=1)
    above = u > lam
    with np.errstate(divide="ignore", invalid="ignore"):
        bound = np.where(above, 1.0 - lam**2 / np.where(above, u, 1.0) ** 2, -1.0)
    flags = above & (norms**2 <= bound)

    point_triangles = space.constraint_point_triangles()
    triangle_flags = np.zeros(space.mesh.n_faces, dtype=bool)
    triangle_flags[point_triangles[flags]] = True
    areas = space.triangle_areas

    warning = None
    if not flags.any():
        peak = float(u.max()) if len(u) else 0.0
        if lam >= peak:
            warning = f"lambda {lam:g} >= max u {peak:g}; the set is empty"
        else:
            warning = f"no point satisfies the lambda {lam:g} bound"
        logger.warning("Empty cut-locus set", lam=lam, max_u=peak)

    comps = find_components(space.mesh, triangle_flags, areas)
    logger.debug(
        "Extracted cut-locus set",
        lam=lam,
        flagged_points=int(flags.sum()),
        triangles=int(triangle_flags.sum()),
        components=len(comps),
    )
    return CutLocusSet(
        lam=float(lam),
        flags=flags,
        point_triangles=point_triangles,
        point_xyz=space.constraint_points_xyz(),
        point_values=u,
        point_norms=norms,
        triangle_flags=triangle_flags,
        triangle_areas=areas,
        mesh_area=float(areas.sum()),
        components=comps,
        warning=warning,
    )


def filter_components(
    cut_set: CutLocusSet, min_area_fraction: float = DEFAULT_FILTER_FRACTION
) -> CutLocusSet:
    """
    Drop components smaller than ``min_area_fraction`` of the mesh area.

    Points and triangles of dropped components are unflagged; surviving
    components are renumbered in area order. Applying the same filter twice
    gives the same set.
    """
    if not 0 <= min_area_fraction < 1:
        raise ValueError(f"min_area_fraction must be in [0, 1), got {min_area_fraction}")
    threshold = min_area_fraction * cut_set.mesh_area
    kept = [c for c in cut_set.components if c.area >= threshold]
    if len(kept) == len(cut_set.components):
        return cut_set

    triangle_flags = np.zeros_like(cut_set.triangle_flags)
    for comp in kept:
        triangle_flags[comp.triangles] = True
    flags = cut_set.flags & triangle_flags[cut_set.point_triangles]
    comps = tuple(replace(c, id=i) for i, c in enumerate(kept))
    logger.debug(
        "Filtered components",
        dropped=len(cut_set.components) - len(kept),
        kept=len(kept),
        threshold=threshold,
    )
    return replace(cut_set, flags=flags, triangle_flags=triangle_flags, components=comps)


def lambda_sweep(
    sol: SolutionLike,
    space: FunctionSpace,
    fractions: Sequence[float] = DEFAULT_LAMBDA_FRACTIONS,
) -> dict[float, CutLocusSet]:
    """Extract at λ = fraction · (bounding-box diameter) for every fraction."""
    diam = space.mesh.bounding_box_diameter()
    return {f: extract(sol, space, f * diam) for f in fractions}

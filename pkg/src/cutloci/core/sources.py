"""Turning a source specification into pinned mesh vertices."""

from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from cutloci.core.errors import ConfigValidationError
from cutloci.core.logging import get_logger
from cutloci.mesh.analytic import AnalyticSurface, Sphere, TorusOfRevolution
from cutloci.mesh.surface import SurfaceMesh
from cutloci.schemas.config import CurveSpec, SourceSpec
from cutloci.schemas.params import SourceSet

logger = get_logger("cutloci.sources")


def snap_points(mesh: SurfaceMesh, points) -> list[int]:
    """Index of the nearest mesh vertex for every point."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if not pts.size:
        return []
    _, idx = cKDTree(mesh.vertices).query(pts)
    return [int(i) for i in np.atleast_1d(idx)]


def random_vertices(mesh: SurfaceMesh, count: int, seed: int) -> list[int]:
    """``count`` distinct vertices drawn uniformly with a seeded generator."""
    if count > mesh.n_vertices:
        raise ConfigValidationError(
            f"sources.random = {count} exceeds the {mesh.n_vertices} mesh vertices"
        )
    rng = np.random.default_rng(seed)
    return [int(i) for i in rng.choice(mesh.n_vertices, size=count, replace=False)]


def curve_distance(curve: CurveSpec, surface: AnalyticSurface, points: np.ndarray) -> np.ndarray:
    """Euclidean distance from points to a closed curve on an analytic surface."""
    if isinstance(surface, Sphere):
        if curve.kind != "sphere_parallel":
            raise ConfigValidationError(f"curve kind '{curve.kind}' needs a torus input")
        rel = points - np.asarray(surface.center)
        if abs(curve.value) >= surface.radius:
            raise ConfigValidationError(
                f"parallel z = {curve.value} misses the sphere of radius {surface.radius}"
            )
        ring = np.sqrt(surface.radius**2 - curve.value**2)
        return np.hypot(np.hypot(rel[:, 0], rel[:, 1]) - ring, rel[:, 2] - curve.value)
    if isinstance(surface, TorusOfRevolution):
        big, small = surface.major, surface.minor
        if curve.kind == "torus_parallel":
            ring = big + small * np.cos(curve.value)
            height = small * np.sin(curve.value)
            return np.hypot(np.hypot(points[:, 0], points[:, 1]) - ring, points[:, 2] - height)
        if curve.kind == "torus_meridian":
            c, s = np.cos(curve.value), np.sin(curve.value)
            radial = points[:, 0] * c + points[:, 1] * s
            normal = -points[:, 0] * s + points[:, 1] * c
            return np.hypot(np.hypot(radial - big, points[:, 2]) - small, normal)
        raise ConfigValidationError(f"curve kind '{curve.kind}' needs a sphere input")
    raise ConfigValidationError("curve sources need a generated sphere or torus")


def curve_vertices(mesh: SurfaceMesh, curve: CurveSpec, surface: Optional[AnalyticSurface]) -> list[int]:
    """Vertices within half the longest edge of the curve."""
    if surface is None:
        raise ConfigValidationError("curve sources need a generated sphere or torus")
    dist = curve_distance(curve, surface, mesh.vertices)
    picked = np.flatnonzero(dist <= 0.5 * mesh.h_max())
    if not len(picked):
        raise ConfigValidationError(f"no vertex lies near the {curve.kind} curve at {curve.value}")
    return [int(i) for i in picked]


def resolve_sources(
    spec: SourceSpec,
    mesh: SurfaceMesh,
    surface: Optional[AnalyticSurface] = None,
    seed: int = 0,
) -> SourceSet:
    """
    Combine explicit vertices, snapped points, random picks and curve vertices.

    The order is vertices, points, random, curve; a vertex selected twice keeps
    its first position and a warning is logged.

    Raises:
        ConfigValidationError: On out-of-range vertices or an unusable curve
    """
    bad = [i for i in spec.vertices if i >= mesh.n_vertices]
    if bad:
        raise ConfigValidationError(
            f"sources.vertices {bad} out of range for a mesh with {mesh.n_vertices} vertices"
        )
    chosen = list(spec.vertices)
    chosen += snap_points(mesh, spec.points)
    if spec.random:
        chosen += random_vertices(mesh, spec.random, seed)
    if spec.curve is not None:
        chosen += curve_vertices(mesh, spec.curve, surface)

    unique = list(dict.fromkeys(chosen))
    if len(unique) < len(chosen):
        logger.warning(
            "Duplicate sources collapsed",
            requested=len(chosen),
            distinct=len(unique),
        )
    return SourceSet(indices=unique)

"""Closed-form geodesic distances and Voronoi bisectors on a round sphere."""

from typing import Sequence

import numpy as np

from cutloci.mesh.surface import SurfaceMesh

ON_SPHERE_TOL = 1e-9
_PRESAMPLE_FACTOR = 16


def _check_on_sphere(points: np.ndarray, center: np.ndarray, radius: float, what: str) -> np.ndarray:
    rel = points - center
    off = np.abs(np.linalg.norm(rel, axis=-1) - radius)
    if np.any(off > ON_SPHERE_TOL * max(1.0, radius)):
        raise ValueError(f"{what} is not on the sphere (max deviation {off.max():.3e})")
    return rel


def sphere_distance(center: Sequence[float], radius: float, b, x) -> np.ndarray:
    """
    Great-circle distance R·arccos(((b − c)·(x − c)) / R²).

    ``x`` may be a single point or an (n, 3) array; the cosine is clamped to
    [−1, 1] before arccos.

    Raises:
        ValueError: If ``b`` or any ``x`` lies off the sphere by more than 1e−9
    """
    if not radius > 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    c = np.asarray(center, dtype=np.float64)
    rb = _check_on_sphere(np.asarray(b, dtype=np.float64), c, radius, "base point")
    rx = _check_on_sphere(np.asarray(x, dtype=np.float64), c, radius, "target point")
    cos = np.clip((rx @ rb) / radius**2, -1.0, 1.0)
    result = radius * np.arccos(cos)
    return float(result) if np.ndim(result) == 0 else result


def great_circle_length(center: Sequence[float], radius: float, p, q) -> np.ndarray:
    """Arc length between points projected radially onto the sphere."""
    c = np.asarray(center, dtype=np.float64)
    a = np.asarray(p, dtype=np.float64) - c
    b = np.asarray(q, dtype=np.float64) - c
    a = a / np.linalg.norm(a, axis=-1, keepdims=True)
    b = b / np.linalg.norm(b, axis=-1, keepdims=True)
    return radius * np.arccos(np.clip(np.sum(a * b, axis=-1), -1.0, 1.0))


def inscribed_radius(mesh: SurfaceMesh, center: Sequence[float]) -> float:
    """Least distance from ``center`` to the planes of the mesh triangles."""
    normals = mesh.face_normals_unnormalized()
    normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    p0 = mesh.vertices[mesh.triangles[:, 0]] - np.asarray(center, dtype=np.float64)
    return float(np.abs(np.einsum("ij,ij->i", normals, p0)).min())


def _circular_runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """(start, length) of every maximal run of True in a circular mask."""
    n = len(mask)
    if mask.all():
        return [(0, n)]
    shift = int(np.flatnonzero(~mask)[0])
    rolled = np.roll(mask, -shift)
    padded = np.concatenate([[False], rolled, [False]]).astype(np.int8)
    edges = np.diff(padded)
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return [((s + shift) % n, e - s) for s, e in zip(starts, ends)]


def spherical_voronoi_boundary(
    center: Sequence[float],
    radius: float,
    sources,
    samples: int = 512,
) -> np.ndarray:
    """
    Sample the boundaries of the geodesic Voronoi cells of points on a sphere.

    For every source pair the bisector is the great circle with normal
    s_i − s_j. Its points closer to {s_i, s_j} than to any other source form
    the shared cell boundary; each such arc is resampled with ``samples`` points.

    Args:
        center: Sphere center
        radius: Sphere radius
        sources: (k, 3) source points on the sphere, k ≥ 2
        samples: Points per arc

    Returns:
        (n, 3) array of boundary points

    Raises:
        ValueError: If fewer than two sources are given, sources coincide or lie off the sphere
    """
    c = np.asarray(center, dtype=np.float64)
    pts = np.atleast_2d(np.asarray(sources, dtype=np.float64))
    if len(pts) < 2:
        raise ValueError(f"need at least 2 sources, got {len(pts)}")
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    rel = _check_on_sphere(pts, c, radius, "source")
    unit = rel / radius
    gaps = np.linalg.norm(unit[:, None, :] - unit[None, :, :], axis=2)
    np.fill_diagonal(gaps, np.inf)
    if np.any(gaps < ON_SPHERE_TOL):
        i, j = np.argwhere(gaps < ON_SPHERE_TOL)[0]
        raise ValueError(f"sources {i} and {j} coincide")

    dense = _PRESAMPLE_FACTOR * samples
    theta = 2.0 * np.pi * np.arange(dense) / dense
    out = []
    for i in range(len(unit)):
        for j in range(i + 1, len(unit)):
            n = unit[i] - unit[j]
            n /= np.linalg.norm(n)
            u = np.cross(n, [1.0, 0.0, 0.0])
            if np.linalg.norm(u) < 1e-6:
                u = np.cross(n, [0.0, 1.0, 0.0])
            u /= np.linalg.norm(u)
            w = np.cross(n, u)

            def circle(t: np.ndarray) -> np.ndarray:
                return np.cos(t)[:, None] * u + np.sin(t)[:, None] * w

            # closer to i than k  <=>  p·(s_i − s_k) > 0 on the unit sphere
            others = np.delete(unit, [i, j], axis=0)
            ring = circle(theta)
            keep = np.ones(dense, dtype=bool)
            if len(others):
                keep = np.all(ring @ (unit[i][:, None] - others.T) > 0, axis=1)
            for start, length in _circular_runs(keep):
                if length == dense:
                    t = 2.0 * np.pi * np.arange(samples) / samples
                else:
                    t0 = theta[start]
                    span = 2.0 * np.pi * (length - 1) / dense
                    t = t0 + span * np.linspace(0.0, 1.0, samples)
                out.append(c + radius * circle(t))
    if not out:
        return np.zeros((0, 3))
    return np.vstack(out)

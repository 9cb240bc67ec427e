"""Legacy ASCII VTK and colored PLY output of meshes with attached data."""

from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np

from cutloci.core.errors import ArtifactIOError
from cutloci.mesh.io import save_mesh
from cutloci.mesh.surface import SurfaceMesh

# Categorical palette; index −1 (outside every class) maps to light gray.
_PALETTE = np.array([
    [228, 26, 28], [55, 126, 184], [77, 175, 74], [152, 78, 163],
    [255, 127, 0], [255, 255, 51], [166, 86, 40], [247, 129, 191],
    [102, 194, 165], [141, 160, 203], [231, 138, 195], [166, 216, 84],
], dtype=np.uint8)
_BACKGROUND = np.array([200, 200, 200], dtype=np.uint8)


def label_colors(labels: np.ndarray) -> np.ndarray:
    """(F, 3) uint8 colors for integer labels; negative labels get the background color."""
    labels = np.asarray(labels, dtype=np.int64)
    colors = np.tile(_BACKGROUND, (len(labels), 1))
    inside = labels >= 0
    colors[inside] = _PALETTE[labels[inside] % len(_PALETTE)]
    return colors


def _data_block(name: str, values: np.ndarray) -> list[str]:
    values = np.asarray(values)
    if values.dtype == bool or np.issubdtype(values.dtype, np.integer):
        lines = [f"SCALARS {name} int 1", "LOOKUP_TABLE default"]
        lines.extend(str(int(x)) for x in values)
    else:
        lines = [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines.extend(repr(float(x)) for x in values)
    return lines


def write_vtk(
    mesh: SurfaceMesh,
    path: Union[str, Path],
    point_data: Optional[Mapping[str, np.ndarray]] = None,
    cell_data: Optional[Mapping[str, np.ndarray]] = None,
    title: Optional[str] = None,
) -> Path:
    """
    Write a legacy ASCII VTK polydata file.

    Args:
        mesh: Surface mesh (points and triangles)
        path: Destination file
        point_data: Per-vertex scalar arrays, keyed by name (no spaces)
        cell_data: Per-triangle scalar arrays, keyed by name

    Raises:
        ValueError: If an array has the wrong length or a name contains whitespace
        ArtifactIOError: If the file cannot be written
    """
    path = Path(path)
    point_data = dict(point_data or {})
    cell_data = dict(cell_data or {})
    for kind, data, size in (("point", point_data, mesh.n_vertices), ("cell", cell_data, mesh.n_faces)):
        for name, values in data.items():
            if any(c.isspace() for c in name):
                raise ValueError(f"VTK array name {name!r} contains whitespace")
            if len(values) != size:
                raise ValueError(f"{kind} array {name!r} has {len(values)} values, expected {size}")

    lines = [
        "# vtk DataFile Version 3.0",
        (title or mesh.name).replace("\n", " ")[:255],
        "ASCII",
        "DATASET POLYDATA",
        f"POINTS {mesh.n_vertices} double",
    ]
    lines.extend(" ".join(repr(float(c)) for c in p) for p in mesh.vertices)
    lines.append(f"POLYGONS {mesh.n_faces} {4 * mesh.n_faces}")
    lines.extend(f"3 {a} {b} {c}" for a, b, c in mesh.triangles)
    if point_data:
        lines.append(f"POINT_DATA {mesh.n_vertices}")
        for name, values in point_data.items():
            lines.extend(_data_block(name, values))
    if cell_data:
        lines.append(f"CELL_DATA {mesh.n_faces}")
        for name, values in cell_data.items():
            lines.extend(_data_block(name, values))

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="ascii")
    except OSError as e:
        raise ArtifactIOError(f"Cannot write VTK file {path}: {e}") from e
    return path


def read_vtk_cell_data(path: Union[str, Path]) -> dict[str, np.ndarray]:
    """Read back the CELL_DATA scalar arrays of a file written by ``write_vtk``."""
    try:
        lines = Path(path).read_text(encoding="ascii").splitlines()
    except OSError as e:
        raise ArtifactIOError(f"Cannot read VTK file {path}: {e}") from e
    out: dict[str, np.ndarray] = {}
    in_cells = False
    count = 0
    i = 0
    while i < len(lines):
        tokens = lines[i].split()
        if tokens and tokens[0] == "CELL_DATA":
            in_cells, count = True, int(tokens[1])
        elif tokens and tokens[0] == "POINT_DATA":
            in_cells = False
        elif in_cells and tokens and tokens[0] == "SCALARS":
            name, dtype = tokens[1], tokens[2]
            values = lines[i + 2:i + 2 + count]
            out[name] = np.array(values, dtype=np.int64 if dtype == "int" else np.float64)
            i += 2 + count
            continue
        i += 1
    return out


def write_colored_ply(mesh: SurfaceMesh, path: Union[str, Path], labels: np.ndarray) -> Path:
    """PLY mesh with one color per triangle derived from integer labels."""
    return save_mesh(mesh, path, format="ply", face_colors=label_colors(labels))

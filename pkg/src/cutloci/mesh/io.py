"""Reading and writing OFF, OBJ and PLY (ASCII) triangle meshes."""

from enum import Enum
from pathlib import Path
from typing import Optional, Union

import numpy as np

from cutloci.core.errors import ArtifactIOError, MeshParseError
from cutloci.core.logging import get_logger
from cutloci.mesh.surface import SurfaceMesh

logger = get_logger("cutloci.mesh")


class MeshFormat(str, Enum):
    """Supported mesh file formats."""

    OFF = "off"
    OBJ = "obj"
    PLY = "ply"

    @classmethod
    def from_path(cls, path: Union[str, Path]) -> "MeshFormat":
        suffix = Path(path).suffix.lower().lstrip(".")
        try:
            return cls(suffix)
        except ValueError:
            raise MeshParseError(f"cannot infer mesh format from extension '.{suffix}'", str(path))


def _content_lines(text: str) -> list[tuple[int, list[str]]]:
    """Non-empty, comment-stripped lines as (1-based line number, tokens)."""
    out = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((number, line.split()))
    return out


def _floats(tokens: list[str], path: str, line: int) -> list[float]:
    try:
        return [float(x) for x in tokens]
    except ValueError:
        raise MeshParseError(f"expected numbers, got {' '.join(tokens)!r}", path, line)


def _ints(tokens: list[str], path: str, line: int) -> list[int]:
    try:
        return [int(x) for x in tokens]
    except ValueError:
        raise MeshParseError(f"expected integers, got {' '.join(tokens)!r}", path, line)


def _parse_off(text: str, path: str) -> tuple[np.ndarray, np.ndarray]:
    lines = _content_lines(text)
    if not lines or lines[0][1][0] != "OFF":
        raise MeshParseError("missing OFF header", path, lines[0][0] if lines else None)
    header_tokens = lines[0][1][1:]
    rest = lines[1:]
    if not header_tokens:
        if not rest:
            raise MeshParseError("missing element counts", path)
        number, header_tokens = rest[0]
        rest = rest[1:]
    else:
        number = lines[0][0]
    counts = _ints(header_tokens[:3], path, number)
    if len(counts) < 2:
        raise MeshParseError("element counts need at least vertex and face counts", path, number)
    n_vertices, n_faces = counts[0], counts[1]
    if len(rest) < n_vertices + n_faces:
        raise MeshParseError(
            f"expected {n_vertices} vertices and {n_faces} faces, file has {len(rest)} data lines",
            path,
        )

    vertices = []
    for number, tokens in rest[:n_vertices]:
        xyz = _floats(tokens[:3], path, number)
        if len(xyz) != 3:
            raise MeshParseError("vertex needs three coordinates", path, number)
        vertices.append(xyz)

    faces = []
    for number, tokens in rest[n_vertices:n_vertices + n_faces]:
        values = _ints(tokens, path, number) if tokens else []
        if not values or values[0] != 3 or len(values) < 4:
            raise MeshParseError("only triangular faces ('3 i j k') are supported", path, number)
        faces.append(values[1:4])
    return np.asarray(vertices, dtype=np.float64), np.asarray(faces, dtype=np.int64)


def _parse_obj(text: str, path: str) -> tuple[np.ndarray, np.ndarray]:
    vertices: list[list[float]] = []
    faces: list[list[int]] = []
    for number, tokens in _content_lines(text):
        record = tokens[0]
        if record == "v":
            xyz = _floats(tokens[1:4], path, number)
            if len(xyz) != 3:
                raise MeshParseError("vertex needs three coordinates", path, number)
            vertices.append(xyz)
        elif record == "f":
            refs = tokens[1:]
            if len(refs) != 3:
                raise MeshParseError("only triangular faces are supported", path, number)
            idx = _ints([r.split("/", 1)[0] for r in refs], path, number)
            # 1-based, negative indices count back from the latest vertex
            faces.append([i - 1 if i > 0 else len(vertices) + i for i in idx])
        elif record in {"vt", "vn", "o", "g", "s", "usemtl", "mtllib"}:
            continue
        else:
            raise MeshParseError(f"unsupported OBJ record '{record}'", path, number)
    return np.asarray(vertices, dtype=np.float64).reshape(-1, 3), np.asarray(faces, dtype=np.int64).reshape(-1, 3)


def _parse_ply(text: str, path: str) -> tuple[np.ndarray, np.ndarray]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "ply":
        raise MeshParseError("missing 'ply' magic", path, 1)

    elements: list[tuple[str, int, list[list[str]]]] = []
    body_start = None
    for number, raw in enumerate(lines[1:], start=2):
        tokens = raw.split()
        if not tokens:
            continue
        if tokens[0] == "format":
            if len(tokens) < 2 or tokens[1] != "ascii":
                raise MeshParseError("only ASCII PLY is supported", path, number)
        elif tokens[0] == "element":
            if len(tokens) != 3:
                raise MeshParseError("malformed element line", path, number)
            elements.append((tokens[1], _ints([tokens[2]], path, number)[0], []))
        elif tokens[0] == "property":
            if not elements:
                raise MeshParseError("property before any element", path, number)
            elements[-1][2].append(tokens[1:])
        elif tokens[0] == "end_header":
            body_start = number
            break
    if body_start is None:
        raise MeshParseError("missing end_header", path)

    body = [(n, ln.split()) for n, ln in enumerate(lines[body_start:], start=body_start + 1) if ln.strip()]
    cursor = 0
    vertices = np.zeros((0, 3))
    faces = np.zeros((0, 3), dtype=np.int64)
    for name, count, props in elements:
        rows = body[cursor:cursor + count]
        if len(rows) != count:
            raise MeshParseError(f"element '{name}' expects {count} rows", path)
        cursor += count
        if name == "vertex":
            names = [p[-1] for p in props]
            try:
                cols = [names.index(axis) for axis in ("x", "y", "z")]
            except ValueError:
                raise MeshParseError("vertex element needs x, y, z properties", path)
            width = len(props)
            for n, tok in rows:
                if len(tok) < width:
                    raise MeshParseError(f"vertex row has {len(tok)} values, header declares {width}", path, n)
            vertices = np.asarray(
                [[_floats([tok[c]], path, n)[0] for c in cols] for n, tok in rows],
                dtype=np.float64,
            ).reshape(-1, 3)
        elif name == "face":
            out = []
            for n, tok in rows:
                values = _ints(tok, path, n)
                if values[0] != 3 or len(values) < 4:
                    raise MeshParseError("only triangular faces are supported", path, n)
                out.append(values[1:4])
            faces = np.asarray(out, dtype=np.int64).reshape(-1, 3)
    return vertices, faces


_PARSERS = {
    MeshFormat.OFF: _parse_off,
    MeshFormat.OBJ: _parse_obj,
    MeshFormat.PLY: _parse_ply,
}


def read_mesh(path: Union[str, Path], format: Optional[Union[str, MeshFormat]] = None) -> SurfaceMesh:
    """
    Parse a triangle mesh without checking the surface invariants.

    Raises:
        ArtifactIOError: If the file cannot be read
        MeshParseError: If the file is malformed or indices are out of range
    """
    path = Path(path)
    fmt = MeshFormat(format.lower()) if isinstance(format, str) else (format or MeshFormat.from_path(path))
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ArtifactIOError(f"Cannot read mesh file {path}: {e}") from e

    vertices, faces = _PARSERS[fmt](text, str(path))
    if len(faces) and (faces.min() < 0 or faces.max() >= len(vertices)):
        raise MeshParseError("face references a vertex index out of range", str(path))
    return SurfaceMesh(vertices, faces, name=path.stem)


def load_mesh(path: Union[str, Path], format: Optional[Union[str, MeshFormat]] = None) -> SurfaceMesh:
    """
    Load and validate a closed triangle mesh.

    Args:
        path: Mesh file
        format: One of off/obj/ply; inferred from the extension when None

    Returns:
        SurfaceMesh passing every invariant

    Raises:
        ArtifactIOError: If the file cannot be read
        MeshParseError: If the file is malformed
        MeshTopologyError / MeshGeometryError: Listing every violation found
    """
    mesh = read_mesh(path, format)
    mesh.ensure_valid()
    logger.log_mesh_summary(mesh.name, mesh.n_vertices, mesh.n_faces, genus=mesh.genus, source=str(path))
    return mesh


def _format_float(x: float) -> str:
    return repr(float(x))


def save_mesh(
    mesh: SurfaceMesh,
    path: Union[str, Path],
    format: Optional[Union[str, MeshFormat]] = None,
    face_colors: Optional[np.ndarray] = None,
) -> Path:
    """
    Write a mesh as ASCII OFF, OBJ or PLY.

    Args:
        mesh: Mesh to write
        path: Destination file
        format: Output format; inferred from the extension when None
        face_colors: Optional (F, 3) uint8 colors, written as PLY face properties

    Returns:
        Path written
    """
    path = Path(path)
    fmt = MeshFormat(format.lower()) if isinstance(format, str) else (format or MeshFormat.from_path(path))
    v, t = mesh.vertices, mesh.triangles
    lines: list[str] = []
    if fmt is MeshFormat.OFF:
        lines.append("OFF")
        lines.append(f"{mesh.n_vertices} {mesh.n_faces} {mesh.n_edges}")
        lines.extend(" ".join(_format_float(c) for c in p) for p in v)
        lines.extend(f"3 {a} {b} {c}" for a, b, c in t)
    elif fmt is MeshFormat.OBJ:
        lines.append(f"# {mesh.name}")
        lines.extend("v " + " ".join(_format_float(c) for c in p) for p in v)
        lines.extend(f"f {a + 1} {b + 1} {c + 1}" for a, b, c in t)
    else:
        lines.extend([
            "ply",
            "format ascii 1.0",
            f"comment {mesh.name}",
            f"element vertex {mesh.n_vertices}",
            "property double x",
            "property double y",
            "property double z",
            f"element face {mesh.n_faces}",
            "property list uchar int vertex_indices",
        ])
        if face_colors is not None:
            lines.extend(["property uchar red", "property uchar green", "property uchar blue"])
        lines.append("end_header")
        lines.extend(" ".join(_format_float(c) for c in p) for p in v)
        if face_colors is None:
            lines.extend(f"3 {a} {b} {c}" for a, b, c in t)
        else:
            colors = np.asarray(face_colors, dtype=np.uint8)
            lines.extend(
                f"3 {a} {b} {c} {r} {g} {bl}"
                for (a, b, c), (r, g, bl) in zip(t, colors)
            )

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        raise ArtifactIOError(f"Cannot write mesh file {path}: {e}") from e
    return path

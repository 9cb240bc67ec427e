"""CSV tables: components, λ results, iteration history, study rows."""

import csv
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

import numpy as np

from cutloci.core.errors import ArtifactIOError
from cutloci.schemas.results import ComponentRecord, LambdaRecord, StudyFit, StudyRow
from cutloci.solver.admm import HISTORY_COLUMNS


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_csv(path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a CSV file with a header row; floats use their shortest round-trip form."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
    except OSError as e:
        raise ArtifactIOError(f"Cannot write table {path}: {e}") from e
    return path


def read_csv(path: Union[str, Path]) -> list[dict[str, str]]:
    try:
        with Path(path).open(newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))
    except OSError as e:
        raise ArtifactIOError(f"Cannot read table {path}: {e}") from e


def write_components(path: Union[str, Path], records: Sequence[ComponentRecord]) -> Path:
    header = ["lam", "id", "area", "triangle_count", "euler_characteristic"]
    return write_csv(path, header, ([getattr(r, h) for h in header] for r in records))


def write_lambdas(path: Union[str, Path], records: Sequence[LambdaRecord]) -> Path:
    header = ["lam", "flagged_points", "flagged_triangles", "area", "component_count", "warning"]
    return write_csv(path, header, ([getattr(r, h) for h in header] for r in records))


def write_history(path: Union[str, Path], history: np.ndarray) -> Path:
    """Iteration log: iteration, objective, best objective, residuals, rho."""
    rows = ([int(r[0]), *r[1:]] for r in np.asarray(history))
    return write_csv(path, HISTORY_COLUMNS, rows)


def write_study(path: Union[str, Path], rows: Sequence[StudyRow]) -> Path:
    header = list(StudyRow.model_fields)
    return write_csv(path, header, ([getattr(r, h) for h in header] for r in rows))


def write_fits(path: Union[str, Path], fits: Sequence[StudyFit]) -> Path:
    header = list(StudyFit.model_fields)
    return write_csv(path, header, ([getattr(f, h) for h in header] for f in fits))

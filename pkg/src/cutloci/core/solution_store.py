"""Versioned on-disk container for solution fields."""

import json
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from cutloci.core.errors import ArtifactIOError
from cutloci.schemas.params import SolveParams, SourceSet
from cutloci.solver.admm import HISTORY_COLUMNS, SolutionField

FORMAT_VERSION = 1


def save_solution(sol: SolutionField, path: Union[str, Path], extra: Optional[dict[str, Any]] = None) -> Path:
    """
    Write a solution as ``.npz``: coeffs, gradients, history and JSON metadata.

    Args:
        sol: Solution to store
        path: Destination (``.npz`` appended by numpy when missing)
        extra: Additional JSON-serializable metadata (mesh name, order, ...)

    Raises:
        ArtifactIOError: If the file cannot be written
    """
    path = Path(path)
    metadata = {
        "format_version": FORMAT_VERSION,
        "objective": sol.objective,
        "iterations": sol.iterations,
        "primal_residual": sol.primal_residual,
        "dual_residual": sol.dual_residual,
        "converged": sol.converged,
        "m": sol.m,
        "rho": sol.rho,
        "params": sol.params.model_dump(),
        "sources": list(sol.sources.indices),
        "history_columns": list(HISTORY_COLUMNS),
    }
    if extra:
        metadata["extra"] = extra
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as fh:
            np.savez(
                fh,
                coeffs=sol.coeffs,
                gradients=sol.gradients,
                history=sol.history,
                metadata=np.array(json.dumps(metadata, sort_keys=True)),
            )
    except OSError as e:
        raise ArtifactIOError(f"Cannot write solution to {path}: {e}") from e
    return path


def load_solution(path: Union[str, Path]) -> tuple[SolutionField, dict[str, Any]]:
    """
    Read a solution written by ``save_solution``.

    Returns:
        Tuple of (SolutionField, extra metadata)

    Raises:
        ArtifactIOError: If the file is unreadable or has an unknown format version
    """
    path = Path(path)
    try:
        with np.load(path, allow_pickle=False) as data:
            coeffs = data["coeffs"]
            gradients = data["gradients"]
            history = data["history"]
            metadata = json.loads(str(data["metadata"]))
    except (OSError, KeyError, ValueError) as e:
        raise ArtifactIOError(f"Cannot read solution from {path}: {e}") from e

    version = metadata.get("format_version")
    if version != FORMAT_VERSION:
        raise ArtifactIOError(f"{path}: unsupported solution format version {version}")

    sol = SolutionField(
        coeffs=coeffs,
        gradients=gradients,
        objective=metadata["objective"],
        iterations=metadata["iterations"],
        primal_residual=metadata["primal_residual"],
        dual_residual=metadata["dual_residual"],
        converged=metadata["converged"],
        m=metadata["m"],
        rho=metadata["rho"],
        params=SolveParams.model_validate(metadata["params"]),
        sources=SourceSet(indices=metadata["sources"]),
        history=history,
    )
    return sol, metadata.get("extra", {})

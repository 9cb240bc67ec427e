"""Exception hierarchy for CUTLOCI.

Every error carries the process exit code the CLI uses when it escapes a
subcommand: 1 validation, 2 solver non-convergence, 3 I/O.
"""

from typing import Optional


class CutLociError(Exception):
    """Base class for all cutloci errors."""

    exit_code: int = 1


class ConfigValidationError(CutLociError):
    """Run configuration failed validation."""


class MeshError(CutLociError):
    """Base class for mesh construction and loading problems."""


class MeshParseError(MeshError):
    """Mesh file is malformed or uses an unsupported record."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class MeshValidationError(MeshError):
    """Mesh violates one or more SurfaceMesh invariants."""

    kind = "validation"

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        lines = [f"Mesh {self.kind} error ({len(self.violations)} violation(s)):"]
        lines.extend(f"  - {v}" for v in self.violations)
        super().__init__("\n".join(lines))


class MeshTopologyError(MeshValidationError):
    """Boundary edges, non-manifold edges or inconsistent orientation."""

    kind = "topology"


class MeshGeometryError(MeshValidationError):
    """Degenerate triangles or duplicate vertices."""

    kind = "geometry"


class ProjectionError(MeshError):
    """A point lies outside the tubular neighborhood of an analytic surface."""


class FunctionSpaceError(CutLociError):
    """Unsupported element order / constraint rule, or a dof-vector size mismatch."""


class SolverError(CutLociError):
    """Solver failure."""

    exit_code = 2


class NonConvergenceError(SolverError):
    """Iteration limit reached before both residuals met their tolerances."""


class ZeroFieldError(CutLociError):
    """A field with identically zero gradient cannot be Lipschitz-normalized."""


class ArtifactIOError(CutLociError):
    """Reading or writing a run artifact failed."""

    exit_code = 3

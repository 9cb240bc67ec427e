"""Schemas for run summaries, component tables and study reports."""

import json
from typing import Optional

from pydantic import BaseModel, Field

SUMMARY_VERSION = 1


class ComponentRecord(BaseModel):
    """One row of the component table."""

    lam: float = Field(description="λ the set was extracted at")
    id: int = Field(description="Component id, 0 for the largest")
    area: float
    triangle_count: int
    euler_characteristic: int = Field(description="V − E + F of the component's triangle subcomplex")


class LambdaRecord(BaseModel):
    """Extraction result at one λ (after filtering)."""

    lam: float
    flagged_points: int
    flagged_triangles: int
    area: float
    component_count: int
    warning: Optional[str] = None


class MeshSummary(BaseModel):
    name: str
    vertices: int
    faces: int
    genus: Optional[int] = None
    h_max: float


class RunSummary(BaseModel):
    """Machine-readable record of a solve or Voronoi run."""

    version: int = SUMMARY_VERSION
    mode: str = Field(description="solve or voronoi")
    mesh: MeshSummary
    order: int
    constraint_points: int
    dofs: int
    sources: list[int]
    m: float
    rho: float
    converged: bool
    iterations: int
    objective: float
    primal_residual: float
    dual_residual: float
    max_gradient_norm: float
    audit_max_gradient_norm: Optional[float] = None
    min_coeff: float
    max_coeff: float
    filter_fraction: float
    lambdas: list[LambdaRecord] = Field(default_factory=list)
    components: list[ComponentRecord] = Field(default_factory=list)
    voronoi_cell_sizes: Optional[list[int]] = None
    voronoi_hausdorff: Optional[tuple[float, float]] = None
    timings: Optional[dict[str, float]] = Field(default=None, description="Stage durations in seconds")

    def to_json(self) -> str:
        """Canonical JSON: sorted keys, shortest round-trip floats."""
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


class StudyRow(BaseModel):
    """One (refinement level, m) cell of a convergence study."""

    level: int
    h: float
    m: float
    faces: int
    objective: float
    objective_gap: Optional[float] = Field(default=None, description="|F_h − F_finest|")
    l1_error: Optional[float] = Field(default=None, description="L¹ distance to the finest solution")
    grad_l2_error: Optional[float] = Field(default=None, description="L² distance of gradients to the finest solution")
    sym_diff_area: Optional[float] = Field(default=None, description="Area of E_h Δ E_finest")
    converged: bool
    iterations: int


class StudyFit(BaseModel):
    """Least-squares slope of log(error) against log(h) for one m."""

    m: float
    quantity: str
    order: Optional[float] = Field(default=None, description="None when fewer than two points are usable")
    points: int


class StudyReport(BaseModel):
    lam: float
    rows: list[StudyRow] = Field(default_factory=list)
    fits: list[StudyFit] = Field(default_factory=list)

    def fit(self, m: float, quantity: str) -> Optional[StudyFit]:
        return next((f for f in self.fits if f.m == m and f.quantity == quantity), None)

"""Schemas for solver parameters and source sets."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

DEFAULT_M_TIMES_DIAMETER = 50.0


class SolveParams(BaseModel):
    """Configuration of the splitting solver for min cᵀKc − m·ℓᵀc, |∇u| ≤ 1."""

    model_config = ConfigDict(extra="forbid")

    m: Optional[float] = Field(
        default=None,
        gt=0,
        description="Volume weight; None means 50 / bounding-box diameter of the mesh",
    )
    rho: Optional[float] = Field(
        default=None,
        gt=0,
        description="Initial penalty parameter on the area-weighted constraint rows; None means 2·area / dof count",
    )
    tol_primal: float = Field(default=1e-7, ge=0, description="Max-norm gap between ∇u and the auxiliary field")
    tol_dual: float = Field(default=1e-7, ge=0, description="Scaled dual residual tolerance")
    max_iters: int = Field(default=50000, ge=1, description="Iteration limit")
    over_relaxation: float = Field(default=1.0, ge=1.0, le=1.9, description="Relaxation factor α")
    accelerate: bool = Field(default=True, description="Momentum on (z, y) with restart when the combined residual stalls")
    adaptive_rho: bool = Field(default=True, description="Rebalance rho from the residual ratio")
    rho_update_period: int = Field(default=25, ge=1, description="Iterations between rho checks")
    max_rho_updates: Optional[int] = Field(default=None, ge=0, description="Cap on rho changes per solve; None means no cap")
    log_every: int = Field(default=500, ge=1, description="Iterations between progress log lines")

    def resolved_m(self, diameter: float) -> float:
        return self.m if self.m is not None else DEFAULT_M_TIMES_DIAMETER / diameter

    def resolved_rho(self, area: float, n_dofs: int) -> float:
        return self.rho if self.rho is not None else 2.0 * area / n_dofs


class SourceSet(BaseModel):
    """Dof indices pinned to zero: the base point(s) of the distance function."""

    model_config = ConfigDict(frozen=True)

    indices: tuple[int, ...] = Field(min_length=1, description="Distinct dof indices")

    @field_validator("indices", mode="before")
    @classmethod
    def normalize_indices(cls, v):
        if isinstance(v, int):
            return (v,)
        return tuple(int(i) for i in v)

    @field_validator("indices")
    @classmethod
    def check_distinct(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if any(i < 0 for i in v):
            raise ValueError(f"source indices must be >= 0, got {sorted(i for i in v if i < 0)}")
        if len(set(v)) != len(v):
            dupes = sorted({i for i in v if v.count(i) > 1})
            raise ValueError(f"duplicate source indices {dupes}")
        return v

    def __len__(self) -> int:
        return len(self.indices)

    def check_range(self, n_dofs: int) -> "SourceSet":
        """Raise ValueError unless every index is in [0, n_dofs)."""
        bad = [i for i in self.indices if i >= n_dofs]
        if bad:
            raise ValueError(f"source indices {bad} out of range for {n_dofs} dofs")
        return self

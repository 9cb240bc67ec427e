"""Schema for run configuration files."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from cutloci.schemas.params import SolveParams


class GeneratorSpec(BaseModel):
    """Built-in test geometry."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["sphere", "torus"] = Field(description="Icosphere or torus of revolution")
    radius: float = Field(default=1.0, gt=0, description="Sphere radius")
    subdivisions: int = Field(default=4, ge=0, description="Icosphere refinement level")
    center: tuple[float, float, float] = Field(default=(0.0, 0.0, 0.0), description="Sphere center")
    major: float = Field(default=2.0, gt=0, description="Torus major radius R")
    minor: float = Field(default=1.0, gt=0, description="Torus minor radius r")
    nu: int = Field(default=128, ge=3, description="Torus grid count around the z-axis")
    nv: int = Field(default=64, ge=3, description="Torus grid count around the tube")

    @model_validator(mode="after")
    def check_torus(self) -> "GeneratorSpec":
        if self.kind == "torus" and not self.major > self.minor:
            raise ValueError(f"torus requires major > minor, got {self.major} <= {self.minor}")
        return self


class InputSpec(BaseModel):
    """Where the mesh comes from: exactly one of a generator or a mesh file."""

    model_config = ConfigDict(extra="forbid")

    generator: Optional[GeneratorSpec] = None
    mesh_path: Optional[str] = None

    @model_validator(mode="after")
    def exactly_one(self) -> "InputSpec":
        if (self.generator is None) == (self.mesh_path is None):
            raise ValueError("exactly one of input.generator and input.mesh_path must be set")
        return self


class CurveSpec(BaseModel):
    """
    Closed curve used as a source set.

    ``sphere_parallel``: the circle z = value on the sphere; ``torus_parallel``:
    the circle at tube angle v = value; ``torus_meridian``: the circle at
    azimuth u = value. Angles are in radians.
    """

    model_config = ConfigDict(extra="forbid")

    kind: Literal["sphere_parallel", "torus_parallel", "torus_meridian"]
    value: float = 0.0


class SourceSpec(BaseModel):
    """Base point(s). The sub-selections are combined; duplicates are collapsed."""

    model_config = ConfigDict(extra="forbid")

    vertices: list[int] = Field(default_factory=list, description="Vertex indices")
    points: list[tuple[float, float, float]] = Field(
        default_factory=list, description="Points snapped to the nearest vertex"
    )
    random: Optional[int] = Field(default=None, ge=1, description="Number of seeded random vertices")
    curve: Optional[CurveSpec] = Field(default=None, description="Vertices near a closed curve")

    @field_validator("vertices")
    @classmethod
    def nonnegative(cls, v: list[int]) -> list[int]:
        if any(i < 0 for i in v):
            raise ValueError("vertex indices must be >= 0")
        return v

    @model_validator(mode="after")
    def nonempty(self) -> "SourceSpec":
        if not (self.vertices or self.points or self.random or self.curve):
            raise ValueError("no sources given: set vertices, points, random or curve")
        return self


class ElementSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    order: Literal[1, 2] = 1
    g: Optional[Literal[3, 6, 7]] = Field(default=None, description="Constraint points per triangle for order 2")


class StudySpec(BaseModel):
    """Convergence study over nested refinements of a generator mesh."""

    model_config = ConfigDict(extra="forbid")

    levels: list[int] = Field(default_factory=lambda: [2, 3, 4, 5], min_length=1)
    m_factors: list[float] = Field(
        default_factory=lambda: [10.0, 25.0, 50.0, 100.0],
        min_length=1,
        description="m values as multiples of 1 / bounding-box diameter",
    )
    m_values: Optional[list[float]] = Field(default=None, description="Absolute m values; override m_factors")
    workers: int = Field(default=1, ge=1, description="Parallel study cells")

    @field_validator("levels")
    @classmethod
    def sorted_levels(cls, v: list[int]) -> list[int]:
        if any(level < 0 for level in v):
            raise ValueError("levels must be >= 0")
        return sorted(set(v))

    @field_validator("m_factors", "m_values")
    @classmethod
    def positive(cls, v):
        if v is not None and any(not x > 0 for x in v):
            raise ValueError("m values must be > 0")
        return v


class RunConfig(BaseModel):
    """Everything a solve, Voronoi or study run needs."""

    model_config = ConfigDict(extra="forbid")

    input: InputSpec
    sources: SourceSpec
    element: ElementSpec = Field(default_factory=ElementSpec)
    solver: SolveParams = Field(default_factory=SolveParams)
    lambdas: Optional[list[float]] = Field(
        default=None,
        min_length=1,
        description="Absolute λ values; None means [0.1 · bounding-box diameter]",
    )
    filter_fraction: float = Field(default=1e-3, ge=0, lt=1)
    steiner_level: int = Field(default=0, ge=0)
    output_dir: str = "cutloci-out"
    formats: list[Literal["vtk", "ply", "csv"]] = Field(default_factory=lambda: ["vtk", "ply", "csv"])
    seed: int = 0
    deterministic: bool = False
    voronoi_samples: int = Field(default=512, ge=2, description="Bisector samples per arc")
    study: StudySpec = Field(default_factory=StudySpec)

    @field_validator("lambdas")
    @classmethod
    def positive_lambdas(cls, v):
        if v is not None and any(not lam > 0 for lam in v):
            raise ValueError("lambda values must be > 0")
        return v

"""Schema for mesh quality reports."""

from typing import Optional

from pydantic import BaseModel, Field


class MeshReport(BaseModel):
    """Resolution, shape-regularity and invariant flags of a surface mesh."""

    name: str = Field(description="Mesh label")
    vertices: int = Field(description="Vertex count V")
    edges: int = Field(description="Edge count E")
    faces: int = Field(description="Triangle count F")
    h_max: float = Field(description="Largest triangle diameter (longest edge)")
    h_min: float = Field(description="Smallest triangle diameter")
    min_angle_deg: float = Field(description="Smallest interior angle over all triangles, degrees")
    area: float = Field(description="Total surface area")
    euler_characteristic: int = Field(description="V - E + F")
    genus: Optional[int] = Field(default=None, description="(2 - chi)/2 when well defined")
    quasi_uniformity: float = Field(description="h_max / h_min")
    closed: bool = Field(description="Every edge has at least two incident triangles")
    manifold: bool = Field(description="No edge has more than two incident triangles")
    oriented: bool = Field(description="Triangles sharing an edge traverse it in opposite directions")
    nondegenerate: bool = Field(description="Every triangle has positive area")
    euler_valid: bool = Field(description="V - E + F is an even integer <= 2")
    no_duplicate_vertices: bool = Field(description="No two vertices coincide")
    violations: list[str] = Field(default_factory=list, description="Every violated invariant")

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_record(self) -> str:
        """Flat ``key=value`` text record, one field per line."""
        data = self.model_dump(exclude={"violations"})
        lines = [f"{key}={'' if value is None else value}" for key, value in data.items()]
        lines.append(f"violation_count={len(self.violations)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_record(cls, text: str) -> "MeshReport":
        """Parse a record written by ``to_record`` (violation texts are not stored)."""
        data: dict[str, object] = {}
        for line in text.splitlines():
            if not line.strip() or "=" not in line:
                continue
            key, value = line.split("=", 1)
            if key == "violation_count":
                continue
            data[key] = None if value == "" else value
        return cls.model_validate(data)

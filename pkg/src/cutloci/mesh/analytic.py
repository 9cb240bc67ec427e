"""Analytic reference surfaces with closed-form signed distance and closest-point map."""

from abc import abstractmethod
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from cutloci.core.errors import ProjectionError


class AnalyticSurface(BaseModel):
    """
    Smooth closed surface S with signed distance d and closest-point map a.

    For x in the tubular neighborhood U_η = {|d| < η} (η = ``reach``) the
    decomposition x = a(x) + d(x)·ν(a(x)) holds with a(x) on S.
    """

    model_config = ConfigDict(frozen=True)

    @property
    @abstractmethod
    def reach(self) -> float:
        """Width η of the tubular neighborhood where a(x) is unique."""

    @abstractmethod
    def _decompose(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (a(x), d(x), ν(a(x))) for points x of shape (n, 3)."""

    def signed_distance(self, x) -> np.ndarray:
        """Signed distance d(x), positive outside."""
        _, d, _ = self._decompose(np.atleast_2d(np.asarray(x, dtype=np.float64)))
        return d

    def normal(self, x) -> np.ndarray:
        """Outward unit normal ν(a(x))."""
        _, _, nu = self._decompose(np.atleast_2d(np.asarray(x, dtype=np.float64)))
        return nu

    def project(self, x) -> np.ndarray:
        """
        Closest-point projection a(x).

        Raises:
            ProjectionError: If any point lies outside the tubular neighborhood
        """
        pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
        a, d, _ = self._decompose(pts)
        outside = ~(np.abs(d) < self.reach)
        if np.any(outside):
            idx = np.flatnonzero(outside)
            raise ProjectionError(
                f"{len(idx)} point(s) outside the tubular neighborhood "
                f"(|d| >= {self.reach:g}) of {self!r}; first offending point index {idx[0]}"
            )
        return a


class Sphere(AnalyticSurface):
    """Round sphere."""

    kind: Literal["sphere"] = "sphere"
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius: float = Field(default=1.0, gt=0)

    @property
    def reach(self) -> float:
        return self.radius

    def _decompose(self, x):
        c = np.asarray(self.center)
        rel = x - c
        rho = np.linalg.norm(rel, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            nu = rel / rho[:, None]
        return c + self.radius * nu, rho - self.radius, nu


class TorusOfRevolution(AnalyticSurface):
    """Torus ((R + r cos v) cos u, (R + r cos v) sin u, r sin v) around the z-axis."""

    kind: Literal["torus"] = "torus"
    major: float = Field(default=2.0, gt=0)
    minor: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def _check_radii(self) -> "TorusOfRevolution":
        if not self.major > self.minor:
            raise ValueError(f"torus requires R > r, got R={self.major}, r={self.minor}")
        return self

    @property
    def reach(self) -> float:
        # Focal set: the core circle (at distance r) and the z-axis (at R − r).
        return min(self.minor, self.major - self.minor)

    def _decompose(self, x):
        rho = np.hypot(x[:, 0], x[:, 1])
        with np.errstate(invalid="ignore", divide="ignore"):
            core = np.column_stack([
                self.major * x[:, 0] / rho,
                self.major * x[:, 1] / rho,
                np.zeros(len(x)),
            ])
            rel = x - core
            dist = np.linalg.norm(rel, axis=1)
            nu = rel / dist[:, None]
        return core + self.minor * nu, dist - self.minor, nu


SurfaceSpec = Annotated[Union[Sphere, TorusOfRevolution], Field(discriminator="kind")]

"""Lagrange finite elements on surface meshes."""

from cutloci.fem.assembly import QuadraticForm, assemble
from cutloci.fem.space import FunctionSpace, build_space

__all__ = ["FunctionSpace", "QuadraticForm", "assemble", "build_space"]

"""Splitting solver for the gradient-constrained problem."""

from cutloci.solver.admm import SolutionField, solve
from cutloci.solver.normalize import NormalizedSolution, normalize_lipschitz

__all__ = ["SolutionField", "solve", "NormalizedSolution", "normalize_lipschitz"]

"""1-Lipschitz normalization and slack-region measurement of solution fields."""

from dataclasses import dataclass
from typing import Union

import numpy as np

from cutloci.core.errors import ZeroFieldError
from cutloci.fem.space import FunctionSpace, gradient_at_constraints
from cutloci.solver.admm import SolutionField


@dataclass(frozen=True)
class NormalizedSolution:
    """Coefficients divided by their max constraint-point gradient norm."""

    coeffs: np.ndarray
    gradients: np.ndarray
    scale: float
    source: SolutionField

    @property
    def gradient_norms(self) -> np.ndarray:
        return np.linalg.norm(self.gradients, axis=1)

    @property
    def max_gradient_norm(self) -> float:
        return float(self.gradient_norms.max())


def normalize_lipschitz(sol: SolutionField, space: FunctionSpace) -> NormalizedSolution:
    """
    Rescale a solution so its max gradient norm over constraint points is exactly 1.

    The division is exact in both directions: a field with max norm 0.9 is
    scaled up by 1/0.9.

    Raises:
        ZeroFieldError: If every constraint-point gradient vanishes
    """
    grads = gradient_at_constraints(space, sol.coeffs)
    peak = float(np.linalg.norm(grads, axis=1).max()) if len(grads) else 0.0
    if not peak > 0:
        raise ZeroFieldError("cannot normalize a field whose gradient vanishes everywhere")
    scale = 1.0 / peak
    return NormalizedSolution(
        coeffs=sol.coeffs * scale,
        gradients=grads * scale,
        scale=scale,
        source=sol,
    )


def slack_area(
    sol: Union[SolutionField, NormalizedSolution],
    space: FunctionSpace,
    threshold: float = 0.99,
) -> float:
    """Area represented by constraint points where |∇u| < ``threshold``."""
    return float(space.constraint_point_weights()[slack_mask(sol, threshold)].sum())


def slack_mask(sol: Union[SolutionField, NormalizedSolution], threshold: float = 0.99) -> np.ndarray:
    return sol.gradient_norms < threshold

"""
Splitting solver for the gradient-constrained quadratic program

    minimize    cᵀKc − m·ℓᵀc
    subject to  |∇u(p)| ≤ 1 at every constraint point p,  c = 0 on the sources.

An auxiliary 2-vector z_p is tied to the element gradient (Bc)_p. Each iteration
alternates a sparse SPD solve in c (source dofs eliminated), independent
projections of the relaxed gradients onto the unit ball, and a scaled dual
update (ADMM). The coupling rows are weighted by the area each constraint point
stands for, normalized by the mean element area A/N, so the penalty term
approximates ρ·(N/A)·∫|∇u − z + y|² and ρ = 2A/N balances it against the
Dirichlet energy independently of the mesh size.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from cutloci.core.errors import FunctionSpaceError, SolverError
from cutloci.core.logging import get_logger
from cutloci.fem.assembly import QuadraticForm
from cutloci.fem.space import FunctionSpace, gradient_at_constraints
from cutloci.schemas.params import SolveParams, SourceSet

logger = get_logger("cutloci.solver")

HISTORY_COLUMNS = (
    "iteration",
    "objective",
    "feasible_objective",
    "primal_residual",
    "dual_residual",
    "combined_residual",
    "rho",
)
_RHO_FACTOR = 2.0
_RHO_BALANCE = 10.0
_RESTART_DECAY = 0.999


@dataclass
class SolutionField:
    """Result of ``solve``: nodal coefficients plus per-point gradients and diagnostics."""

    coeffs: np.ndarray
    gradients: np.ndarray
    objective: float
    iterations: int
    primal_residual: float
    dual_residual: float
    converged: bool
    m: float
    rho: float
    params: SolveParams
    sources: SourceSet
    history: np.ndarray = field(repr=False)

    @property
    def gradient_norms(self) -> np.ndarray:
        return np.linalg.norm(self.gradients, axis=1)

    @property
    def max_gradient_norm(self) -> float:
        return float(self.gradient_norms.max()) if len(self.gradients) else 0.0


def project_ball(v: np.ndarray) -> np.ndarray:
    """
    Euclidean projection onto the closed unit disk.

    Accepts a single 2-vector or an (n, 2) array of them; vectors inside the
    disk are returned unchanged and the rest are scaled to unit length.
    """
    v = np.asarray(v, dtype=np.float64)
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / np.maximum(norms, 1.0)


def objective(form: QuadraticForm, m: float, coeffs) -> float:
    """cᵀKc − m·ℓᵀc."""
    c = np.asarray(coeffs, dtype=np.float64)
    if c.shape != (form.n_dofs,):
        raise FunctionSpaceError(f"dof vector has shape {c.shape}, expected ({form.n_dofs},)")
    return form.energy(c) - m * float(form.load @ c)


class _ReducedSystem:
    """LU factorization of (2K + ρBᵀΩB) restricted to the free dofs."""

    def __init__(self, double_k: sparse.csr_matrix, btb: sparse.csr_matrix, free: np.ndarray):
        self._double_k = double_k
        self._btb = btb
        self._free = free
        self.rho = None
        self._lu = None
        self._matrix = None

    def factorize(self, rho: float) -> None:
        full = (self._double_k + rho * self._btb).tocsr()
        self._matrix = full[self._free][:, self._free].tocsc()
        try:
            self._lu = splu(self._matrix)
        except RuntimeError as e:
            raise SolverError(f"Reduced system is singular: {e}") from e
        self.rho = rho

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        x = self._lu.solve(rhs)
        residual = rhs - self._matrix @ x
        scale = np.abs(rhs).max()
        if scale > 0 and np.abs(residual).max() > 1e-10 * scale:
            x = x + self._lu.solve(residual)
        return x


def _pointwise_gap(bc: np.ndarray, z: np.ndarray) -> float:
    if not len(bc):
        return 0.0
    return float(np.linalg.norm((bc - z).reshape(-1, 2), axis=1).max())


def _combined_residual(rho: float, row_weights: np.ndarray, dz: np.ndarray, dy: np.ndarray) -> float:
    """sqrt(ρ·(|Δz|²_Ω + |Δy|²_Ω)); nonincreasing for unrelaxed ADMM at fixed ρ."""
    return float(np.sqrt(rho * (row_weights @ (dz * dz) + row_weights @ (dy * dy))))


def _balance_factor(primal: float, dual: float, params: SolveParams) -> float:
    """Multiplicative ρ update from the tolerance-normalized residual ratio (1.0 keeps ρ)."""
    r = primal / params.tol_primal if params.tol_primal > 0 else primal
    s = dual / params.tol_dual if params.tol_dual > 0 else dual
    if r > _RHO_BALANCE * s:
        return min(np.sqrt(r / s), _RHO_FACTOR) if s > 0 else _RHO_FACTOR
    if s > _RHO_BALANCE * r:
        return 1.0 / (min(np.sqrt(s / r), _RHO_FACTOR) if r > 0 else _RHO_FACTOR)
    return 1.0


def solve(
    form: QuadraticForm,
    space: FunctionSpace,
    sources: SourceSet,
    params: Optional[SolveParams] = None,
) -> SolutionField:
    """
    Minimize the discrete energy under the pointwise gradient bound.

    Convergence is declared when the primal residual max_p |(Bc)_p − z_p| and the
    scaled dual residual |ρBᵀΩ(z − ẑ)|_∞ / max(|mℓ|_∞, |ρBᵀΩy|_∞), both over free
    dofs, drop below their tolerances. ẑ is the previous z, or its extrapolation
    when ``accelerate`` is on; the momentum restarts whenever the combined
    residual fails to shrink. With ``adaptive_rho`` the penalty is rebalanced
    every ``rho_update_period`` iterations until the residuals meet.

    When ``max_iters`` is hit the best feasibility-scaled iterate
    c / max(1, max_p |(Bc)_p|) is returned with ``converged=False``; callers
    decide whether that is an error.

    Args:
        form: Assembled quadratic form
        space: Function space the form was assembled on
        sources: Dof indices pinned to zero
        params: Solver parameters (defaults when None)

    Returns:
        SolutionField

    Raises:
        FunctionSpaceError: If form and space disagree on the dof count
        ValueError: If a source index is out of range
    """
    params = params or SolveParams()
    n = space.n_dofs
    if form.n_dofs != n:
        raise FunctionSpaceError(f"form has {form.n_dofs} dofs, space has {n}")
    sources.check_range(n)

    m = params.resolved_m(space.mesh.bounding_box_diameter())
    rho = params.resolved_rho(form.area, n)
    alpha = params.over_relaxation

    free = np.ones(n, dtype=bool)
    free[list(sources.indices)] = False
    free_idx = np.flatnonzero(free)

    row_weights = np.repeat(space.constraint_point_weights() * (n / form.area), 2)
    omega = sparse.diags(row_weights)
    b_op = space.gradient_operator()
    b_free = b_op[:, free_idx]
    btw_free = (b_free.T @ omega).tocsr()
    mload = m * form.load
    mload_free = mload[free_idx]
    mload_scale = float(np.abs(mload_free).max()) if len(free_idx) else 0.0

    system = _ReducedSystem(2.0 * form.stiffness, (b_op.T @ omega @ b_op).tocsr(), free_idx)
    system.factorize(rho)

    c = np.zeros(n)
    z = np.zeros(b_op.shape[0])
    y = np.zeros_like(z)
    z_hat, y_hat = z.copy(), y.copy()
    momentum = 1.0
    last_combined = np.inf

    best_objective = np.inf
    best_coeffs = c.copy()
    rho_updates = restarts = 0
    history = []
    converged = False
    primal = dual = np.inf
    iteration = 0

    logger.info(
        "Starting solve",
        dofs=n,
        constraint_points=space.n_constraint_points,
        sources=len(sources),
        m=m,
        rho=rho,
        accelerate=params.accelerate,
    )

    for iteration in range(1, params.max_iters + 1):
        rhs = mload_free + rho * (btw_free @ (z_hat - y_hat))
        c[free_idx] = system.solve(rhs)
        bc = b_free @ c[free_idx]

        z_prev, y_prev = z, y
        relaxed = alpha * bc + (1.0 - alpha) * z_hat
        z = project_ball((relaxed + y_hat).reshape(-1, 2)).reshape(-1)
        y = y_hat + relaxed - z

        primal = _pointwise_gap(bc, z)
        dual_num = float(np.abs(rho * (btw_free @ (z - z_hat))).max()) if len(free_idx) else 0.0
        dual_den = max(mload_scale, float(np.abs(rho * (btw_free @ y)).max()) if len(free_idx) else 0.0)
        dual = dual_num / dual_den if dual_den > 0 else dual_num
        combined = _combined_residual(rho, row_weights, z - z_hat, y - y_hat)

        raw = objective(form, m, c)
        max_grad = float(np.linalg.norm(bc.reshape(-1, 2), axis=1).max()) if len(bc) else 0.0
        scaled = c / max(1.0, max_grad)
        feasible = objective(form, m, scaled)
        if feasible < best_objective:
            best_objective = feasible
            best_coeffs = scaled
        history.append((iteration, raw, feasible, primal, dual, combined, rho))

        if iteration % params.log_every == 0:
            logger.log_solver_progress(
                iteration, raw, primal, dual, rho, combined_residual=combined, restarts=restarts
            )

        if primal <= params.tol_primal and dual <= params.tol_dual:
            converged = True
            break

        if params.accelerate and combined < _RESTART_DECAY * last_combined:
            next_momentum = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum * momentum))
            beta = (momentum - 1.0) / next_momentum
            z_hat = z + beta * (z - z_prev)
            y_hat = y + beta * (y - y_prev)
            momentum = next_momentum
        else:
            if params.accelerate and momentum > 1.0:
                restarts += 1
            z_hat, y_hat = z, y
            momentum = 1.0
        last_combined = combined

        if (
            params.adaptive_rho
            and (params.max_rho_updates is None or rho_updates < params.max_rho_updates)
            and iteration % params.rho_update_period == 0
        ):
            factor = _balance_factor(primal, dual, params)
            if factor != 1.0:
                rho *= factor
                y = y / factor
                z_hat, y_hat = z, y
                momentum = 1.0
                last_combined = np.inf
                system.factorize(rho)
                rho_updates += 1
                logger.debug("Penalty updated", iteration=iteration, rho=rho)

    coeffs = c.copy() if converged else best_coeffs.copy()
    coeffs[~free] = 0.0
    final_objective = objective(form, m, coeffs)
    gradients = gradient_at_constraints(space, coeffs)

    if converged:
        logger.info(
            "Solver converged",
            iterations=iteration,
            objective=final_objective,
            primal_residual=primal,
            dual_residual=dual,
            rho=rho,
            rho_updates=rho_updates,
        )
    else:
        logger.warning(
            "Solver hit the iteration limit; returning the best feasible iterate",
            iterations=iteration,
            objective=final_objective,
            primal_residual=primal,
            dual_residual=dual,
            rho=rho,
        )

    return SolutionField(
        coeffs=coeffs,
        gradients=gradients,
        objective=final_objective,
        iterations=iteration,
        primal_residual=primal,
        dual_residual=dual,
        converged=converged,
        m=m,
        rho=rho,
        params=params,
        sources=sources,
        history=np.asarray(history, dtype=np.float64).reshape(-1, len(HISTORY_COLUMNS)),
    )

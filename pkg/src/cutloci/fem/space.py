"""Lagrange finite-element spaces of order 1 and 2 on affine surface triangles."""

from typing import Callable, Optional

import numpy as np
from scipy import sparse

from cutloci.core.errors import FunctionSpaceError
from cutloci.fem.quadrature import QuadratureRule, rule_of_degree, rule_with_points
from cutloci.mesh.surface import SurfaceMesh

SUPPORTED_ORDERS = (1, 2)
P2_CONSTRAINT_RULES = (3, 6, 7)
DEFAULT_P2_CONSTRAINT_POINTS = 6
DEFAULT_QUADRATURE_DEGREE = 4

# Denser per-triangle sample for auditing |∇u| between constraint points:
# the 7-point rule, the corners and the edge midpoints.
_AUDIT_POINTS = np.vstack([
    rule_with_points(7).points,
    [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]],
])


def _barycentric(ref: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xi, eta = ref[:, 0], ref[:, 1]
    return 1.0 - xi - eta, xi, eta


def basis_values(order: int, ref: np.ndarray) -> np.ndarray:
    """Reference basis values, shape (n_points, n_basis)."""
    l0, l1, l2 = _barycentric(ref)
    if order == 1:
        return np.column_stack([l0, l1, l2])
    return np.column_stack([
        l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
        4 * l0 * l1, 4 * l1 * l2, 4 * l2 * l0,
    ])


def basis_gradients(order: int, ref: np.ndarray) -> np.ndarray:
    """Reference gradients d/d(ξ, η), shape (n_points, n_basis, 2)."""
    n = len(ref)
    if order == 1:
        g = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
        return np.broadcast_to(g, (n, 3, 2)).copy()
    l0, l1, l2 = _barycentric(ref)
    out = np.empty((n, 6, 2))
    out[:, 0] = (4 * l0 - 1)[:, None] * np.array([-1.0, -1.0])
    out[:, 1] = (4 * l1 - 1)[:, None] * np.array([1.0, 0.0])
    out[:, 2] = (4 * l2 - 1)[:, None] * np.array([0.0, 1.0])
    out[:, 3] = 4 * np.column_stack([l0 - l1, -l1])
    out[:, 4] = 4 * np.column_stack([l2, l1])
    out[:, 5] = 4 * np.column_stack([-l2, l0 - l2])
    return out


class FunctionSpace:
    """
    Continuous Lagrange space L_h^r over a SurfaceMesh.

    Dof numbering: vertices first (dof i is vertex i), then for r = 2 one dof
    per edge at V + e. Each triangle lists its dofs as (i0, i1, i2) for r = 1
    and (i0, i1, i2, e01, e12, e20) for r = 2, so a shared vertex or edge has
    the same dof index from both sides.

    Gradients are expressed in each triangle's TangentFrame. The gradient
    constraint is imposed at the constraint points: the centroid for r = 1
    (the gradient is constant per triangle) and the points of the g-point rule
    for r = 2.
    """

    def __init__(
        self,
        mesh: SurfaceMesh,
        order: int = 1,
        constraint_points: Optional[int] = None,
        quadrature_degree: int = DEFAULT_QUADRATURE_DEGREE,
    ):
        if order not in SUPPORTED_ORDERS:
            raise FunctionSpaceError(f"unsupported element order {order}; supported: {SUPPORTED_ORDERS}")
        if order == 1:
            g = 1
        else:
            g = DEFAULT_P2_CONSTRAINT_POINTS if constraint_points is None else constraint_points
            if g not in P2_CONSTRAINT_RULES:
                raise FunctionSpaceError(
                    f"order 2 needs g in {P2_CONSTRAINT_RULES} constraint points, got {g}"
                )
        if quadrature_degree < 2 * order - 2 or quadrature_degree < order:
            raise FunctionSpaceError(
                f"quadrature degree {quadrature_degree} is not exact for order-{order} assembly"
            )

        self.mesh = mesh
        self.order = order
        self.g = g
        self.constraint_rule: QuadratureRule = rule_with_points(g)
        self.quadrature: QuadratureRule = rule_of_degree(quadrature_degree)

        nv = mesh.n_vertices
        if order == 1:
            self.n_dofs = nv
            self.element_dofs = mesh.triangles.copy()
            self.node_coords = mesh.vertices.copy()
        else:
            self.n_dofs = nv + mesh.n_edges
            self.element_dofs = np.hstack([mesh.triangles, nv + mesh.triangle_edges])
            mid = 0.5 * (mesh.vertices[mesh.edges[:, 0]] + mesh.vertices[mesh.edges[:, 1]])
            self.node_coords = np.vstack([mesh.vertices, mid])
        for arr in (self.element_dofs, self.node_coords):
            arr.setflags(write=False)

        self._setup_geometry()
        self.gradient_maps = self.element_gradient_maps(self.constraint_rule.points)
        self.gradient_maps.setflags(write=False)
        self._gradient_operator: Optional[sparse.csr_matrix] = None
        self._value_operator: Optional[sparse.csr_matrix] = None

    @property
    def n_basis(self) -> int:
        return self.element_dofs.shape[1]

    @property
    def points_per_triangle(self) -> int:
        return self.constraint_rule.size

    @property
    def n_constraint_points(self) -> int:
        return self.mesh.n_faces * self.points_per_triangle

    def _setup_geometry(self) -> None:
        v = self.mesh.vertices
        t = self.mesh.triangles
        e1, e2, _ = self.mesh.frame_arrays()
        d1 = v[t[:, 1]] - v[t[:, 0]]
        d2 = v[t[:, 2]] - v[t[:, 0]]
        jac = np.empty((self.mesh.n_faces, 2, 2))
        jac[:, 0, 0] = np.einsum("ij,ij->i", e1, d1)
        jac[:, 1, 0] = np.einsum("ij,ij->i", e2, d1)
        jac[:, 0, 1] = np.einsum("ij,ij->i", e1, d2)
        jac[:, 1, 1] = np.einsum("ij,ij->i", e2, d2)
        self.jacobian_det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
        self.jacobian_inv = np.linalg.inv(jac)
        self.triangle_areas = 0.5 * np.abs(self.jacobian_det)

    def element_gradient_maps(self, ref_points: np.ndarray) -> np.ndarray:
        """
        Linear maps from local dof values to tangent gradients.

        Args:
            ref_points: (P, 2) reference coordinates

        Returns:
            (F, P, n_basis, 2) array G with ∇u(f, p) = Σ_k c[dof(f,k)] · G[f, p, k]
        """
        ref_grads = basis_gradients(self.order, np.asarray(ref_points, dtype=np.float64))
        return np.einsum("pkd,fde->fpke", ref_grads, self.jacobian_inv)

    def reference_to_physical(self, ref_points: np.ndarray) -> np.ndarray:
        """(F, P, 3) physical coordinates of reference points on every triangle."""
        v = self.mesh.vertices
        t = self.mesh.triangles
        bary = np.column_stack(_barycentric(np.asarray(ref_points, dtype=np.float64)))
        return np.einsum("pk,fkd->fpd", bary, v[t])

    def constraint_points_xyz(self) -> np.ndarray:
        """Physical positions of all constraint points, (F·P, 3)."""
        return self.reference_to_physical(self.constraint_rule.points).reshape(-1, 3)

    def constraint_point_triangles(self) -> np.ndarray:
        """Triangle index of every constraint point."""
        return np.repeat(np.arange(self.mesh.n_faces), self.points_per_triangle)

    def constraint_point_weights(self) -> np.ndarray:
        """Area represented by every constraint point (sums to the mesh area)."""
        w = 2.0 * self.constraint_rule.weights
        return (self.triangle_areas[:, None] * w[None, :]).reshape(-1)

    def _scatter_operator(self, local: np.ndarray, row_width: int) -> sparse.csr_matrix:
        """Sparse operator from per-point local coefficients (F, P, n_basis, W)."""
        n_faces, n_points, nb, width = local.shape
        rows = (np.arange(n_faces * n_points)[:, None] * width + np.arange(width)[None, :])
        rows = np.broadcast_to(rows.reshape(n_faces, n_points, 1, width), local.shape)
        cols = np.broadcast_to(self.element_dofs[:, None, :, None], local.shape)
        return sparse.coo_matrix(
            (local.ravel(), (rows.ravel(), cols.ravel())),
            shape=(n_faces * n_points * row_width, self.n_dofs),
        ).tocsr()

    def gradient_operator(self) -> sparse.csr_matrix:
        """B with (B c)[2q + d] = component d of ∇u at constraint point q."""
        if self._gradient_operator is None:
            self._gradient_operator = self._scatter_operator(self.gradient_maps, 2)
        return self._gradient_operator

    def value_operator(self, ref_points: Optional[np.ndarray] = None) -> sparse.csr_matrix:
        """E with (E c)[q] = u at point q (constraint points unless ``ref_points`` given)."""
        if ref_points is None and self._value_operator is not None:
            return self._value_operator
        pts = self.constraint_rule.points if ref_points is None else np.asarray(ref_points)
        vals = basis_values(self.order, pts)
        local = np.broadcast_to(vals[None, :, :, None], (self.mesh.n_faces, len(pts), self.n_basis, 1))
        op = self._scatter_operator(local, 1)
        if ref_points is None:
            self._value_operator = op
        return op

    def check_coeffs(self, coeffs) -> np.ndarray:
        c = np.asarray(coeffs, dtype=np.float64)
        if c.shape != (self.n_dofs,):
            raise FunctionSpaceError(
                f"dof vector has shape {c.shape}, expected ({self.n_dofs},)"
            )
        return c

    def __repr__(self) -> str:
        return (
            f"FunctionSpace(order={self.order}, dofs={self.n_dofs}, "
            f"constraint_points={self.n_constraint_points})"
        )


def build_space(mesh: SurfaceMesh, order: int = 1, g: Optional[int] = None) -> FunctionSpace:
    """
    Build the Lagrange space of the given order.

    Args:
        mesh: Valid surface mesh
        order: Element order r (1 or 2)
        g: Constraint points per triangle for r = 2 (3, 6 or 7; default 6); ignored for r = 1

    Raises:
        FunctionSpaceError: If the order or constraint rule is unsupported
    """
    return FunctionSpace(mesh, order=order, constraint_points=g)


def gradient_at_constraints(space: FunctionSpace, coeffs) -> np.ndarray:
    """
    Tangent-frame gradient at every constraint point.

    Returns:
        (F·P, 2) array; for r = 1 row f is the constant gradient on triangle f

    Raises:
        FunctionSpaceError: If ``coeffs`` does not have length N
    """
    c = space.check_coeffs(coeffs)
    local = c[space.element_dofs]
    return np.einsum("fk,fpkd->fpd", local, space.gradient_maps).reshape(-1, 2)


def values_at_constraints(space: FunctionSpace, coeffs) -> np.ndarray:
    """Element interpolant of the nodal values at every constraint point."""
    c = space.check_coeffs(coeffs)
    return space.value_operator() @ c


def audit_gradient_norm(space: FunctionSpace, coeffs) -> float:
    """Max |∇u| over a denser per-triangle sample than the constraint points."""
    c = space.check_coeffs(coeffs)
    maps = space.element_gradient_maps(_AUDIT_POINTS)
    grads = np.einsum("fk,fpkd->fpd", c[space.element_dofs], maps)
    return float(np.linalg.norm(grads, axis=2).max())


def interpolate(space: FunctionSpace, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """
    Lagrange interpolation: coeffs[i] = f(node_i).

    Args:
        space: Target space
        f: Scalar function evaluated on an (N, 3) array of node coordinates

    Returns:
        Dof vector of length N
    """
    values = np.asarray(f(space.node_coords), dtype=np.float64)
    if values.shape == ():
        values = np.full(space.n_dofs, float(values))
    return values.reshape(space.n_dofs).copy()

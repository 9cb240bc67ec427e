"""Transfer of discrete functions between nested 1→4 refinements."""

import numpy as np

from cutloci.core.errors import FunctionSpaceError
from cutloci.fem.space import FunctionSpace, basis_values

# Barycentric coordinates (rows: child corners) of the four children of a
# triangle in the parent's barycentric frame; order matches mesh.generators.subdivide.
CHILD_CORNERS = np.array([
    [[1.0, 0.0, 0.0], [0.5, 0.5, 0.0], [0.5, 0.0, 0.5]],
    [[0.5, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.5, 0.5]],
    [[0.5, 0.0, 0.5], [0.0, 0.5, 0.5], [0.0, 0.0, 1.0]],
    [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]],
])


def refinement_depth(n_coarse_faces: int, n_fine_faces: int) -> int:
    """Number of 1→4 refinements between two nested meshes."""
    depth = 0
    count = n_coarse_faces
    while count < n_fine_faces:
        count *= 4
        depth += 1
    if count != n_fine_faces:
        raise FunctionSpaceError(
            f"{n_fine_faces} faces is not a 4^k refinement of {n_coarse_faces} faces"
        )
    return depth


def ancestors(n_fine_faces: int, depth: int) -> np.ndarray:
    """Index of the coarse triangle containing each fine triangle."""
    return np.arange(n_fine_faces) // (4 ** depth)


def ancestor_corner_coordinates(n_coarse_faces: int, depth: int) -> np.ndarray:
    """
    Barycentric coordinates of fine-triangle corners inside their ancestor.

    Returns:
        (F_fine, 3, 3) array; entry [t, k] is corner k of fine triangle t
    """
    corners = np.broadcast_to(np.eye(3), (n_coarse_faces, 3, 3))
    for _ in range(depth):
        corners = np.einsum("cij,tjk->tcik", CHILD_CORNERS, corners).reshape(-1, 3, 3)
    return np.ascontiguousarray(corners)


def ancestor_coordinates(
    coarse_faces: int, fine_faces: int, fine_bary: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    Map points given in fine-triangle barycentric coordinates to their ancestors.

    Args:
        coarse_faces: Face count of the coarse mesh
        fine_faces: Face count of the fine mesh
        fine_bary: (F_fine, P, 3) barycentric coordinates inside each fine triangle

    Returns:
        Tuple of (ancestor index per fine triangle, (F_fine, P, 3) ancestor coordinates)
    """
    depth = refinement_depth(coarse_faces, fine_faces)
    corners = ancestor_corner_coordinates(coarse_faces, depth)
    return ancestors(fine_faces, depth), np.einsum("tpk,tkj->tpj", fine_bary, corners)


def prolong(coarse: FunctionSpace, coeffs: np.ndarray, fine: FunctionSpace) -> np.ndarray:
    """
    Interpolate a coarse-space function at the nodes of a nested fine space.

    Each fine node is located in its coarse ancestor triangle by composing the
    child maps, so the result does not depend on where projection moved the
    fine vertices. Shared nodes take the value from the lowest-index fine
    triangle that owns them; the coarse function is continuous, so every
    owner gives the same value up to rounding.

    Args:
        coarse: Space on the coarse mesh
        coeffs: Coarse dof vector
        fine: Space on a mesh obtained from the coarse one by repeated refinement

    Returns:
        Fine dof vector

    Raises:
        FunctionSpaceError: If the meshes are not nested or ``coeffs`` has the wrong length
    """
    c = coarse.check_coeffs(coeffs)
    fine_bary = np.eye(3)
    if fine.order == 2:
        fine_bary = np.vstack([fine_bary, [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]])
    n_fine = fine.mesh.n_faces
    parent, bary = ancestor_coordinates(
        coarse.mesh.n_faces, n_fine, np.broadcast_to(fine_bary, (n_fine, len(fine_bary), 3))
    )

    owner_dofs = fine.element_dofs.ravel()
    owner_bary = bary.reshape(-1, 3)
    owner_parent = np.repeat(parent, fine.n_basis)
    _, first = np.unique(owner_dofs, return_index=True)

    ref = owner_bary[first][:, 1:3]
    tri = owner_parent[first]
    # basis_values is evaluated pointwise, one row per fine node
    vals = basis_values(coarse.order, ref)
    return np.einsum("nk,nk->n", vals, c[coarse.element_dofs[tri]])

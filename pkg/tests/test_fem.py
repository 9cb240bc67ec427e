"""Tests for quadrature, Lagrange spaces, assembly and nested transfer."""

from math import factorial

import numpy as np
import pytest

from cutloci.core.errors import FunctionSpaceError
from cutloci.fem.assembly import assemble, dirichlet_energy_by_quadrature, element_stiffness, integrate
from cutloci.fem.quadrature import rule_of_degree, rule_with_points
from cutloci.fem.space import (
    audit_gradient_norm,
    build_space,
    gradient_at_constraints,
    interpolate,
    values_at_constraints,
)
from cutloci.fem.transfer import ancestor_corner_coordinates, ancestors, prolong, refinement_depth
from cutloci.mesh.analytic import Sphere
from cutloci.mesh.generators import generate_sphere, refine_project
from cutloci.mesh.surface import SurfaceMesh

SLOPE = np.array([0.3, -1.2, 0.7])


def linear(x: np.ndarray) -> np.ndarray:
    return x @ SLOPE


def tangential_norms(mesh: SurfaceMesh) -> np.ndarray:
    _, _, n = mesh.frame_arrays()
    tangential = SLOPE[None, :] - (n @ SLOPE)[:, None] * n
    return np.linalg.norm(tangential, axis=1)


@pytest.fixture
def right_triangle() -> SurfaceMesh:
    return SurfaceMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]], name="right")


class TestQuadrature:
    @pytest.mark.parametrize("n_points", [1, 3, 6, 7])
    def test_weights_sum_to_reference_area(self, n_points):
        assert rule_with_points(n_points).weights.sum() == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("n_points", [3, 6, 7])
    def test_monomials_up_to_degree(self, n_points):
        rule = rule_with_points(n_points)
        xi, eta = rule.points[:, 0], rule.points[:, 1]
        for a in range(rule.degree + 1):
            for b in range(rule.degree + 1 - a):
                exact = factorial(a) * factorial(b) / factorial(a + b + 2)
                assert rule.weights @ (xi**a * eta**b) == pytest.approx(exact, abs=1e-12)

    def test_unknown_rules(self):
        with pytest.raises(FunctionSpaceError):
            rule_with_points(4)
        with pytest.raises(FunctionSpaceError):
            rule_of_degree(9)


class TestFunctionSpace:
    """Test dof layout and gradient evaluation."""

    def test_p1_layout(self, octahedron):
        space = build_space(octahedron, 1)
        assert space.n_dofs == 6
        assert space.g == 1
        assert space.n_constraint_points == 8
        assert space.gradient_operator().shape == (16, 6)

    def test_p2_layout(self, octahedron):
        space = build_space(octahedron, 2)
        assert space.n_dofs == 6 + 12
        assert space.g == 6
        assert space.element_dofs.shape == (8, 6)
        tri = octahedron.triangles[0]
        e01 = space.element_dofs[0, 3] - 6
        assert sorted(octahedron.edges[e01]) == sorted(tri[:2])

    def test_unsupported_order_and_rule(self, octahedron):
        with pytest.raises(FunctionSpaceError):
            build_space(octahedron, 3)
        with pytest.raises(FunctionSpaceError):
            build_space(octahedron, 2, g=5)

    @pytest.mark.parametrize("order", [1, 2])
    def test_linear_function_gradient_is_tangential_part(self, icosphere1, order):
        space = build_space(icosphere1, order)
        coeffs = interpolate(space, linear)
        norms = np.linalg.norm(gradient_at_constraints(space, coeffs), axis=1)
        expected = np.repeat(tangential_norms(icosphere1), space.points_per_triangle)
        assert np.allclose(norms, expected, atol=1e-12)
        assert audit_gradient_norm(space, coeffs) == pytest.approx(expected.max(), abs=1e-12)

    def test_values_at_constraints_reproduce_linear(self, icosphere1):
        space = build_space(icosphere1, 2, g=7)
        coeffs = interpolate(space, linear)
        assert np.allclose(values_at_constraints(space, coeffs), linear(space.constraint_points_xyz()))

    def test_constraint_weights_cover_area(self, icosphere1):
        space = build_space(icosphere1, 2)
        assert space.constraint_point_weights().sum() == pytest.approx(icosphere1.area())

    def test_gradient_is_linear_in_coefficients(self, icosphere1):
        space = build_space(icosphere1, 2)
        rng = np.random.default_rng(7)
        a, b = rng.standard_normal((2, space.n_dofs))
        combined = gradient_at_constraints(space, 2.5 * a - 0.75 * b)
        separate = 2.5 * gradient_at_constraints(space, a) - 0.75 * gradient_at_constraints(space, b)
        assert np.allclose(combined, separate, atol=1e-12)

    @pytest.mark.parametrize("level", [3, 4])
    def test_interpolated_sphere_distance_gradient(self, level):
        mesh = generate_sphere(1.0, level)
        space = build_space(mesh)
        coeffs = interpolate(space, lambda x: np.arccos(np.clip(x[:, 2], -1.0, 1.0)))
        norms = np.linalg.norm(gradient_at_constraints(space, coeffs), axis=1)
        per_triangle = norms.reshape(mesh.n_faces, space.points_per_triangle).max(axis=1)

        centroids = mesh.vertices[mesh.triangles].mean(axis=1)
        polar = np.arccos(np.clip(centroids[:, 2] / np.linalg.norm(centroids, axis=1), -1.0, 1.0))
        # the distance has a cone point at both poles, so the fans there stay above 1 at every h
        away = np.minimum(polar, np.pi - polar) > 4.0 * mesh.h_max()
        assert away.sum() > 0.7 * mesh.n_faces
        assert per_triangle[away].max() <= 1.05
        assert per_triangle.max() <= 1.25

    def test_wrong_coefficient_length(self, octahedron):
        space = build_space(octahedron)
        with pytest.raises(FunctionSpaceError):
            gradient_at_constraints(space, np.zeros(5))


class TestAssembly:
    """Test the stiffness matrix and load vector."""

    def test_right_triangle_stiffness(self, right_triangle):
        local = element_stiffness(build_space(right_triangle))[0]
        expected = np.array([[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]])
        assert np.allclose(local, expected)

    @pytest.mark.parametrize("order", [1, 2])
    def test_constants_in_kernel_and_load_sums_to_area(self, icosphere1, order):
        space = build_space(icosphere1, order)
        form = assemble(space)
        assert np.abs(form.stiffness @ np.ones(space.n_dofs)).max() < 1e-12
        assert form.load.sum() == pytest.approx(icosphere1.area())
        assert form.area == pytest.approx(icosphere1.area())
        assert abs(form.stiffness - form.stiffness.T).max() < 1e-14

    @pytest.mark.parametrize("order", [1, 2])
    def test_stiffness_is_semidefinite_with_constant_kernel(self, icosphere1, order):
        space = build_space(icosphere1, order)
        eigenvalues = np.linalg.eigvalsh(assemble(space).stiffness.toarray())
        scale = eigenvalues.max()
        assert eigenvalues.min() >= -1e-12 * scale
        assert np.sum(eigenvalues <= 1e-10 * scale) == 1

    def test_assembly_ignores_triangle_order(self, icosphere1):
        rng = np.random.default_rng(3)
        triangles = icosphere1.triangles[rng.permutation(icosphere1.n_faces)]
        # cyclic rotation keeps the orientation of every triangle
        triangles = np.roll(triangles, 1, axis=1)
        shuffled = SurfaceMesh(icosphere1.vertices, triangles)
        reference = assemble(build_space(icosphere1))
        form = assemble(build_space(shuffled))
        assert abs(form.stiffness - reference.stiffness).max() < 1e-13
        assert np.allclose(form.load, reference.load, atol=1e-15)

    @pytest.mark.parametrize("order", [1, 2])
    def test_energy_matches_quadrature(self, small_torus, order):
        space = build_space(small_torus, order)
        coeffs = interpolate(space, lambda x: np.sin(x[:, 0]) + x[:, 2] ** 2)
        form = assemble(space)
        assert form.energy(coeffs) == pytest.approx(dirichlet_energy_by_quadrature(space, coeffs), rel=1e-10)

    def test_energy_of_linear_function(self, octahedron):
        space = build_space(octahedron)
        coeffs = interpolate(space, linear)
        areas = octahedron.triangle_areas()
        expected = float(np.sum(areas * tangential_norms(octahedron) ** 2))
        assert assemble(space).energy(coeffs) == pytest.approx(expected)

    def test_integrate(self, icosphere1):
        space = build_space(icosphere1, 2)
        assert integrate(space, np.ones(space.n_dofs)) == pytest.approx(icosphere1.area())
        coeffs = interpolate(space, lambda x: x[:, 2])
        assert integrate(space, coeffs) == pytest.approx(0.0, abs=1e-12)
        assert integrate(space, coeffs, absolute=True) > 0

    def test_coordinate_text(self, tmp_path, right_triangle):
        form = assemble(build_space(right_triangle))
        text = form.save_coordinate_text(tmp_path / "k.txt").read_text()
        lines = text.splitlines()
        assert lines[0] == f"% 3 3 {form.stiffness.nnz}"
        assert lines[1].startswith("0 0 ")


class TestTransfer:
    """Test ancestry and prolongation between nested meshes."""

    def test_refinement_depth(self):
        assert refinement_depth(20, 20) == 0
        assert refinement_depth(20, 320) == 2
        with pytest.raises(FunctionSpaceError):
            refinement_depth(20, 100)

    def test_ancestors(self):
        assert np.array_equal(ancestors(64, 2), np.arange(64) // 16)

    def test_corner_coordinates_are_barycentric(self):
        corners = ancestor_corner_coordinates(2, 2)
        assert corners.shape == (32, 3, 3)
        assert np.allclose(corners.sum(axis=2), 1.0)
        assert np.all(corners >= 0)

    @pytest.mark.parametrize("order", [1, 2])
    def test_prolong_keeps_coarse_nodes(self, icosphere1, order):
        fine_mesh = refine_project(icosphere1, Sphere())
        coarse = build_space(icosphere1, order)
        fine = build_space(fine_mesh, order)
        coeffs = interpolate(coarse, linear)
        out = prolong(coarse, coeffs, fine)
        nv = icosphere1.n_vertices
        assert out.shape == (fine.n_dofs,)
        assert np.allclose(out[:nv], coeffs[:nv])

    def test_p1_prolong_averages_edge_midpoints(self, icosphere1):
        fine_mesh = refine_project(icosphere1, Sphere())
        coarse = build_space(icosphere1)
        coeffs = interpolate(coarse, linear)
        out = prolong(coarse, coeffs, build_space(fine_mesh))
        nv = icosphere1.n_vertices
        mids = 0.5 * (coeffs[icosphere1.edges[:, 0]] + coeffs[icosphere1.edges[:, 1]])
        assert np.allclose(out[nv:], mids)

    def test_prolong_rejects_unnested_meshes(self, icosphere1, small_torus):
        with pytest.raises(FunctionSpaceError):
            prolong(build_space(small_torus), np.zeros(small_torus.n_vertices), build_space(icosphere1))

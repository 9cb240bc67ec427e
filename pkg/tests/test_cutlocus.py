"""Tests for cut-locus extraction, components, Voronoi labels and set metrics."""

from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest

from cutloci.cutlocus.components import components, find_components, subcomplex_euler_characteristic
from cutloci.cutlocus.extract import extract, filter_components, lambda_sweep
from cutloci.cutlocus.metrics import hausdorff_to_reference, symmetric_difference_area
from cutloci.cutlocus.voronoi import label_cells, majority_labels
from cutloci.fem.space import build_space, gradient_at_constraints, interpolate
from cutloci.mesh.analytic import Sphere
from cutloci.mesh.generators import refine_project
from cutloci.oracle.distance import DistanceOracle, OracleKind
from cutloci.schemas.params import SourceSet


def pole_index(mesh, z: float) -> int:
    return int(np.argmin(np.linalg.norm(mesh.vertices - [0.0, 0.0, z], axis=1)))


@pytest.fixture
def height_field(icosphere2):
    """u = 1 - z on the unit sphere: zero at the north pole, flat at both poles."""
    space = build_space(icosphere2)
    coeffs = interpolate(space, lambda x: 1.0 - x[:, 2])
    field = SimpleNamespace(coeffs=coeffs, gradients=gradient_at_constraints(space, coeffs))
    return space, field


class TestExtract:
    """Test the indicator set and its bookkeeping."""

    def test_lambda_must_be_positive(self, height_field):
        space, field = height_field
        for lam in (0.0, -0.1):
            with pytest.raises(ValueError):
                extract(field, space, lam)

    def test_lambda_above_max_is_empty_with_warning(self, height_field):
        space, field = height_field
        cut_set = extract(field, space, 4.0)
        assert cut_set.is_empty
        assert cut_set.components == ()
        assert cut_set.total_area == 0.0
        assert ">= max u" in cut_set.warning

    def test_flags_match_definition(self, height_field):
        space, field = height_field
        lam = 0.3
        cut_set = extract(field, space, lam)
        u, norms = cut_set.point_values, cut_set.point_norms
        expected = (u > lam) & (norms**2 <= 1 - lam**2 / np.where(u > 0, u, 1.0) ** 2)
        assert np.array_equal(cut_set.flags, expected)
        assert np.array_equal(np.unique(cut_set.point_triangles[cut_set.flags]), cut_set.triangles)
        assert cut_set.warning is None

    def test_sets_are_nested_in_lambda(self, height_field):
        space, field = height_field
        small, large = extract(field, space, 0.2), extract(field, space, 0.6)
        assert not np.any(large.flags & ~small.flags)
        assert large.total_area <= small.total_area

    def test_south_pole_is_flagged(self, height_field):
        space, field = height_field
        cut_set = extract(field, space, 0.2)
        south = space.mesh.vertices[pole_index(space.mesh, -1.0)]
        dist = np.linalg.norm(cut_set.flagged_points - south, axis=1)
        assert dist.min() < space.mesh.h_max()

    def test_component_ids(self, height_field):
        space, field = height_field
        cut_set = extract(field, space, 0.2)
        ids = cut_set.component_ids()
        assert np.array_equal(ids >= 0, cut_set.triangle_flags)
        areas = [c.area for c in cut_set.components]
        assert areas == sorted(areas, reverse=True)
        assert sum(areas) == pytest.approx(cut_set.total_area)

    def test_lambda_sweep_keys(self, height_field):
        space, field = height_field
        sweep = lambda_sweep(field, space, (0.05, 0.1))
        assert list(sweep) == [0.05, 0.1]
        assert sweep[0.1].lam == pytest.approx(0.1 * space.mesh.bounding_box_diameter())


class TestFilter:
    def test_idempotent(self, height_field):
        space, field = height_field
        cut_set = extract(field, space, 0.2)
        once = filter_components(cut_set, 0.01)
        twice = filter_components(once, 0.01)
        assert np.array_equal(once.flags, twice.flags)
        assert len(once.components) == len(twice.components)

    def test_drops_small_components(self, height_field):
        space, field = height_field
        cut_set = extract(field, space, 0.2)
        emptied = filter_components(cut_set, 0.999)
        assert emptied.components == ()
        assert not emptied.flags.any()
        assert not emptied.triangle_flags.any()

    def test_zero_fraction_keeps_everything(self, height_field):
        space, field = height_field
        cut_set = extract(field, space, 0.2)
        assert filter_components(cut_set, 0.0) is cut_set

    def test_fraction_range(self, height_field):
        space, field = height_field
        with pytest.raises(ValueError):
            filter_components(extract(field, space, 0.2), 1.0)


class TestComponents:
    def test_disjoint_faces(self, octahedron):
        mask = np.zeros(8, dtype=bool)
        mask[[0, 7]] = True
        comps = find_components(octahedron, mask, octahedron.triangle_areas())
        assert len(comps) == 2
        assert comps[0].id == 0
        assert list(comps[0].triangles) == [0]

    def test_vertex_contact_is_not_adjacency(self, octahedron):
        mask = np.zeros(8, dtype=bool)
        mask[[0, 1]] = True
        assert len(find_components(octahedron, mask, octahedron.triangle_areas())) == 2

    def test_shared_edge_joins(self, octahedron):
        mask = np.zeros(8, dtype=bool)
        mask[[0, 4]] = True
        comps = find_components(octahedron, mask, octahedron.triangle_areas())
        assert len(comps) == 1
        assert comps[0].triangle_count == 2

    def test_empty_mask(self, octahedron):
        assert find_components(octahedron, np.zeros(8, dtype=bool), octahedron.triangle_areas()) == ()

    def test_components_checks_mesh(self, height_field, octahedron):
        space, field = height_field
        cut_set = extract(field, space, 0.2)
        assert len(components(cut_set, space.mesh)) == len(cut_set.components)
        with pytest.raises(ValueError):
            components(cut_set, octahedron)

    def test_euler_characteristic(self, octahedron):
        assert subcomplex_euler_characteristic(octahedron, [0]) == 1
        assert subcomplex_euler_characteristic(octahedron, np.arange(8)) == 2
        assert subcomplex_euler_characteristic(octahedron, []) == 0


class TestVoronoi:
    def test_majority(self):
        labels = np.array([[0, 0, 1], [2, 1, 0], [1, 2, 2]])
        assert list(majority_labels(labels)) == [0, 0, 2]

    def test_poles(self, icosphere1):
        sources = SourceSet(indices=(pole_index(icosphere1, 1.0), pole_index(icosphere1, -1.0)))
        oracle = DistanceOracle(icosphere1, sources, kind=OracleKind.ANALYTIC_SPHERE, sphere=Sphere())
        labeling = label_cells(icosphere1, sources, oracle)
        assert labeling.vertex_labels[sources.indices[0]] == 0
        assert labeling.vertex_labels[sources.indices[1]] == 1
        assert labeling.cell_sizes().sum() == icosphere1.n_vertices
        centroid_z = icosphere1.vertices[icosphere1.triangles].mean(axis=1)[:, 2]
        assert np.all(labeling.triangle_labels[centroid_z > 0.5] == 0)
        assert np.all(labeling.triangle_labels[centroid_z < -0.5] == 1)

    def test_needs_two_sources(self, icosphere1):
        sources = SourceSet(indices=(0,))
        with pytest.raises(ValueError):
            label_cells(icosphere1, sources, DistanceOracle(icosphere1, sources))

    def test_oracle_must_match(self, icosphere1):
        oracle = DistanceOracle(icosphere1, SourceSet(indices=(0, 1)))
        with pytest.raises(ValueError):
            label_cells(icosphere1, SourceSet(indices=(0, 2)), oracle)


class TestMetrics:
    def test_hausdorff_to_own_points(self, height_field):
        space, field = height_field
        cut_set = extract(field, space, 0.2)
        assert hausdorff_to_reference(cut_set, space.mesh, cut_set.flagged_points) == (0.0, 0.0)

    def test_hausdorff_errors(self, height_field):
        space, field = height_field
        empty = extract(field, space, 4.0)
        with pytest.raises(ValueError):
            hausdorff_to_reference(empty, space.mesh, [[0.0, 0.0, -1.0]])
        with pytest.raises(ValueError):
            hausdorff_to_reference(extract(field, space, 0.2), space.mesh, np.zeros((0, 3)))

    def test_symmetric_difference_same_mesh(self, height_field):
        space, field = height_field
        cut_set = extract(field, space, 0.2)
        assert symmetric_difference_area(cut_set, cut_set, space.mesh, space.mesh) == 0.0

    def test_symmetric_difference_nested(self, height_field):
        space, field = height_field
        coarse = extract(field, space, 0.2)
        fine_mesh = refine_project(space.mesh, Sphere())
        all_coarse = replace(coarse, triangle_flags=np.ones(space.mesh.n_faces, dtype=bool))
        fine = replace(coarse, triangle_flags=np.zeros(fine_mesh.n_faces, dtype=bool))
        area = symmetric_difference_area(all_coarse, fine, space.mesh, fine_mesh)
        assert area == pytest.approx(fine_mesh.area())

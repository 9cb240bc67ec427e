"""Tests for reference distances and spherical Voronoi bisectors."""

import numpy as np
import pytest

from cutloci.mesh.analytic import Sphere
from cutloci.mesh.generators import generate_sphere
from cutloci.oracle.distance import DistanceOracle, OracleKind
from cutloci.oracle.graph import graph_distance, steiner_graph, steiner_points_per_edge
from cutloci.oracle.sphere import inscribed_radius, sphere_distance, spherical_voronoi_boundary
from cutloci.schemas.params import SourceSet

NORTH = [0.0, 0.0, 1.0]
SOUTH = [0.0, 0.0, -1.0]


def pole_index(mesh, pole) -> int:
    return int(np.argmin(np.linalg.norm(mesh.vertices - pole, axis=1)))


class TestSphereDistance:
    def test_known_values(self):
        assert sphere_distance((0, 0, 0), 1.0, NORTH, SOUTH) == pytest.approx(np.pi)
        assert sphere_distance((0, 0, 0), 1.0, NORTH, [1.0, 0.0, 0.0]) == pytest.approx(np.pi / 2)
        assert sphere_distance((0, 0, 0), 1.0, NORTH, NORTH) == 0.0

    def test_radius_and_center(self):
        d = sphere_distance((1.0, 0.0, 0.0), 2.0, [1.0, 0.0, 2.0], np.array([[1.0, 0.0, -2.0], [3.0, 0.0, 0.0]]))
        assert np.allclose(d, [2 * np.pi, np.pi])

    def test_off_sphere(self):
        with pytest.raises(ValueError):
            sphere_distance((0, 0, 0), 1.0, NORTH, [0.0, 0.0, 1.1])
        with pytest.raises(ValueError):
            sphere_distance((0, 0, 0), 0.0, NORTH, NORTH)

    def test_inscribed_radius(self, octahedron):
        assert inscribed_radius(octahedron, (0, 0, 0)) == pytest.approx(1 / np.sqrt(3))


class TestGraphDistance:
    """Test Dijkstra distances on Steiner-refined graphs."""

    def test_steiner_counts(self, octahedron):
        assert steiner_points_per_edge(0) == 0
        assert steiner_points_per_edge(2) == 3
        with pytest.raises(ValueError):
            steiner_points_per_edge(-1)
        _, coords = steiner_graph(octahedron, 1)
        assert len(coords) == 6 + 12

    def test_octahedron_levels(self, octahedron):
        d0 = graph_distance(octahedron, [0], 0)
        d1 = graph_distance(octahedron, [0], 1)
        assert d0[2] == pytest.approx(np.sqrt(2))
        assert d0[1] == pytest.approx(2 * np.sqrt(2))
        # across two faces through an edge midpoint
        assert d1[1] == pytest.approx(np.sqrt(6))
        assert np.all(d1 <= d0 + 1e-12)

    def test_refinement_is_monotone(self, icosphere1):
        levels = [graph_distance(icosphere1, [0], level) for level in range(3)]
        assert np.all(levels[1] <= levels[0] + 1e-12)
        assert np.all(levels[2] <= levels[1] + 1e-12)

    def test_bad_sources(self, octahedron):
        with pytest.raises(ValueError):
            graph_distance(octahedron, [], 0)
        with pytest.raises(ValueError):
            graph_distance(octahedron, [6], 0)


class TestDistanceOracle:
    def test_graph_bounds_sphere_distance(self, icosphere2):
        north = pole_index(icosphere2, NORTH)
        oracle = DistanceOracle(icosphere2, SourceSet(indices=(north,)), steiner_level=1)
        exact = sphere_distance((0, 0, 0), 1.0, icosphere2.vertices[north], icosphere2.vertices)
        r_in = inscribed_radius(icosphere2, (0, 0, 0))
        assert np.all(oracle.distances() >= r_in * exact - 1e-12)
        assert oracle.check_invariants() == []

    def test_level_two_graph_tracks_sphere_distance(self):
        mesh = generate_sphere(1.0, 4)
        north = pole_index(mesh, NORTH)
        graph = graph_distance(mesh, [north], steiner_level=2)
        exact = sphere_distance((0, 0, 0), 1.0, mesh.vertices[north], mesh.vertices)
        assert np.abs(graph - exact).max() <= 0.03

    @pytest.mark.parametrize("kind", list(OracleKind))
    def test_triangle_inequality(self, icosphere2, kind):
        rng = np.random.default_rng(11)
        sample = tuple(int(i) for i in rng.choice(icosphere2.n_vertices, size=12, replace=False))
        oracle = DistanceOracle(icosphere2, SourceSet(indices=sample), kind=kind, steiner_level=1, sphere=Sphere())
        d = oracle.per_source_distances()[:, list(sample)]
        # d[a, c] <= d[a, b] + d[b, c] for every triple
        detour = d[:, :, None] + d[None, :, :]
        assert np.all(d[:, None, :] <= detour + 1e-12)
        assert np.allclose(d, d.T, atol=1e-12)

    def test_sphere_kind(self, icosphere1):
        north = pole_index(icosphere1, NORTH)
        oracle = DistanceOracle(
            icosphere1, SourceSet(indices=(north,)), kind=OracleKind.ANALYTIC_SPHERE, sphere=Sphere()
        )
        d = oracle.distances()
        assert d[north] == 0.0
        assert d[pole_index(icosphere1, SOUTH)] == pytest.approx(np.pi)
        assert oracle.check_invariants() == []

    def test_sphere_kind_needs_sphere(self, icosphere1):
        with pytest.raises(ValueError):
            DistanceOracle(icosphere1, SourceSet(indices=(0,)), kind=OracleKind.ANALYTIC_SPHERE)

    def test_distances_are_cached_and_read_only(self, octahedron):
        oracle = DistanceOracle(octahedron, SourceSet(indices=(0,)))
        assert oracle.distances() is oracle.distances()
        with pytest.raises(ValueError):
            oracle.distances()[0] = 1.0

    def test_nearest_source_splits_hemispheres(self, icosphere1):
        sources = SourceSet(indices=(pole_index(icosphere1, NORTH), pole_index(icosphere1, SOUTH)))
        labels = DistanceOracle(
            icosphere1, sources, kind=OracleKind.ANALYTIC_SPHERE, sphere=Sphere()
        ).nearest_source()
        z = icosphere1.vertices[:, 2]
        assert np.all(labels[z > 1e-9] == 0)
        assert np.all(labels[z < -1e-9] == 1)

    def test_multi_source_minimum(self, octahedron):
        oracle = DistanceOracle(octahedron, SourceSet(indices=(0, 1)))
        assert np.allclose(oracle.distances(), np.minimum(*oracle.per_source_distances()))


class TestSphericalVoronoi:
    def test_two_poles_give_equator(self):
        pts = spherical_voronoi_boundary((0, 0, 0), 1.0, [NORTH, SOUTH], samples=64)
        assert pts.shape == (64, 3)
        assert np.allclose(pts[:, 2], 0.0, atol=1e-12)
        assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)

    def test_tetrahedral_arcs_are_equidistant(self):
        sources = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / np.sqrt(3)
        pts = spherical_voronoi_boundary((0, 0, 0), 1.0, sources, samples=32)
        assert len(pts) == 6 * 32
        d = np.sort(np.vstack([sphere_distance((0, 0, 0), 1.0, s, pts) for s in sources]), axis=0)
        assert np.allclose(d[0], d[1], atol=1e-9)

    def test_errors(self):
        with pytest.raises(ValueError):
            spherical_voronoi_boundary((0, 0, 0), 1.0, [NORTH])
        with pytest.raises(ValueError):
            spherical_voronoi_boundary((0, 0, 0), 1.0, [NORTH, NORTH])
        with pytest.raises(ValueError):
            spherical_voronoi_boundary((0, 0, 0), 1.0, [NORTH, [0.0, 0.0, -2.0]])

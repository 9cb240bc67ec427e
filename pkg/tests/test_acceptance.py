"""
End-to-end checks against reference distances and known cut loci.

Everything except the octahedron check is marked slow; run with ``-m slow``.
"""

import numpy as np
import pytest
from scipy.optimize import minimize

from cutloci.analysis.study import ConvergenceStudy
from cutloci.core.config import PRESETS, load_config
from cutloci.core.pipeline import CutLociPipeline
from cutloci.cutlocus.components import subcomplex_euler_characteristic
from cutloci.cutlocus.extract import extract
from cutloci.cutlocus.metrics import symmetric_difference_area
from cutloci.fem.assembly import assemble
from cutloci.fem.space import build_space
from cutloci.oracle.graph import graph_distance
from cutloci.schemas.params import SolveParams, SourceSet
from cutloci.solver.admm import solve
from cutloci.solver.normalize import normalize_lipschitz, slack_mask


def run(tmp_path_factory, preset, voronoi=False, **overrides):
    out = tmp_path_factory.mktemp(preset)
    config = load_config(
        preset=preset,
        overrides={"output_dir": str(out), **overrides},
        user_config=None,
        project_dir=out,
    )
    pipeline = CutLociPipeline(config)
    return pipeline.run_voronoi() if voronoi else pipeline.run_solve()


def geodesic_to_south_pole(points: np.ndarray) -> np.ndarray:
    unit = points / np.linalg.norm(points, axis=1, keepdims=True)
    return np.arccos(np.clip(-unit[:, 2], -1.0, 1.0))


class TestOctahedronOptimum:
    def test_matches_slsqp(self, octahedron):
        space = build_space(octahedron)
        form = assemble(space)
        m = 10.0
        sol = solve(form, space, SourceSet(indices=(0,)),
                    SolveParams(m=m, tol_primal=1e-9, tol_dual=1e-9, max_iters=20000))

        stiffness = form.stiffness.toarray()
        grad_op = space.gradient_operator().toarray()

        def full(x):
            return np.concatenate([[0.0], x])

        def energy(x):
            c = full(x)
            return c @ stiffness @ c - m * form.load @ c

        def slack(x):
            g = (grad_op @ full(x)).reshape(-1, 2)
            return 1.0 - np.sum(g * g, axis=1)

        reference = minimize(
            energy, np.zeros(5), method="SLSQP",
            constraints=[{"type": "ineq", "fun": slack}],
            options={"ftol": 1e-12, "maxiter": 1000},
        )
        assert sol.objective == pytest.approx(reference.fun, rel=1e-6)


@pytest.fixture(scope="module")
def sphere_run(tmp_path_factory):
    return run(tmp_path_factory, "sphere", lambdas=[0.05, 0.1, 0.2])


@pytest.fixture(scope="module")
def torus_run(tmp_path_factory):
    return run(tmp_path_factory, "torus")


@pytest.mark.slow
class TestSphere:
    def test_feasible_and_pinned(self, sphere_run):
        sol = sphere_run.solution
        assert sol.max_gradient_norm <= 1 + 1e-6
        assert np.all(sol.coeffs[list(sol.sources.indices)] == 0.0)
        assert sol.coeffs.min() >= -1e-8

    def test_below_graph_distance(self, sphere_run):
        mesh = sphere_run.mesh
        bound = graph_distance(mesh, sphere_run.solution.sources, 0)
        assert np.all(sphere_run.solution.coeffs <= bound + 1e-6)

    def test_cut_locus_is_antipode(self, sphere_run):
        cut_set = next(s for s in sphere_run.cut_sets if s.lam == 0.1)
        assert not cut_set.is_empty
        assert len(cut_set.components) == 1
        assert geodesic_to_south_pole(cut_set.flagged_points).max() <= 0.15

    def test_lambda_monotonicity(self, sphere_run):
        normalized = normalize_lipschitz(sphere_run.solution, sphere_run.space)
        sets = [extract(normalized, sphere_run.space, lam) for lam in (0.05, 0.1, 0.2)]
        for small, large in zip(sets, sets[1:]):
            assert not np.any(large.flags & ~small.flags)


@pytest.mark.slow
def test_m_nesting(tmp_path_factory):
    runs = {m: run(tmp_path_factory, "sphere", solver={"m": m}) for m in (25.0, 50.0, 100.0)}
    space = runs[25.0].space
    weights = space.constraint_point_weights()
    area = space.mesh.area()
    masks = {m: slack_mask(r.solution) for m, r in runs.items()}
    for m1 in masks:
        for m2 in masks:
            if m2 > m1:
                assert weights[masks[m2] & ~masks[m1]].sum() <= 0.02 * area


@pytest.mark.slow
class TestTorus:
    def test_below_graph_distance(self, torus_run):
        bound = graph_distance(torus_run.mesh, torus_run.solution.sources, 0)
        assert np.all(torus_run.solution.coeffs <= bound + 1e-6)

    def test_cut_locus_contains_a_cycle(self, torus_run):
        cut_set = torus_run.cut_sets[0]
        assert len(cut_set.components) == 1
        assert subcomplex_euler_characteristic(torus_run.mesh, cut_set.components[0].triangles) <= 0


@pytest.mark.slow
@pytest.mark.parametrize("deterministic", [False, True])
@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_presets_converge(tmp_path_factory, preset, deterministic):
    result = run(tmp_path_factory, preset, voronoi=preset == "sphere-voronoi", deterministic=deterministic)
    sol = result.solution
    assert sol.converged
    assert result.summary.converged
    assert sol.max_gradient_norm <= 1 + 1e-6
    assert np.all(sol.coeffs[list(sol.sources.indices)] == 0.0)
    assert sol.coeffs.min() >= -1e-8


@pytest.mark.slow
def test_voronoi_boundaries(tmp_path_factory):
    result = run(tmp_path_factory, "sphere-voronoi", voronoi=True)
    to_reference, to_set = result.summary.voronoi_hausdorff
    assert to_reference <= 0.15
    assert to_set <= 0.15


# Symmetric-difference area between sphere levels 3 and 4 stays below C·sqrt(h_max)
# of the finer level. Both sets sit in a cap of radius 0.15 + h_max(level 3) around
# the antipode, whose area is C·sqrt(h_max(level 4)) with C = 1.
MEASURE_STABILITY_C = 1.0


@pytest.mark.slow
def test_measure_stability(tmp_path_factory):
    runs = {
        level: run(tmp_path_factory, "sphere", input={"generator": {"subdivisions": level}})
        for level in (3, 4)
    }
    coarse, fine = runs[3], runs[4]
    area = symmetric_difference_area(coarse.cut_sets[0], fine.cut_sets[0], coarse.mesh, fine.mesh)
    assert area <= MEASURE_STABILITY_C * np.sqrt(fine.mesh.h_max())


@pytest.mark.slow
def test_convergence_study(tmp_path):
    config = load_config(
        preset="sphere",
        overrides={"study": {"levels": [2, 3, 4, 5], "m_values": [50.0]}, "deterministic": True},
        user_config=None,
        project_dir=tmp_path,
    )
    report = ConvergenceStudy(config).run()
    assert all(r.converged for r in report.rows)
    gaps = [r.objective_gap for r in report.rows if r.objective_gap is not None]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert report.fit(50.0, "l1_error").order >= 0.5

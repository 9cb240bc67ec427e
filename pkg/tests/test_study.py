"""Tests for the convergence study."""

import json

import numpy as np
import pytest

from cutloci.analysis.study import (
    FIT_QUANTITIES,
    ConvergenceStudy,
    convergence_order,
    nested_meshes,
    study_m_values,
    write_report,
)
from cutloci.core.errors import ConfigValidationError
from cutloci.core.validator import validate_schema
from cutloci.schemas.config import RunConfig


def study_config(**overrides) -> RunConfig:
    data = {
        "input": {"generator": {"kind": "sphere", "radius": 1.0}},
        "sources": {"points": [[0.0, 0.0, 1.0]]},
        "solver": {"tol_primal": 1e-6, "tol_dual": 1e-6, "max_iters": 20000},
        "lambdas": [0.3],
        "study": {"levels": [0, 1, 2], "m_values": [5.0]},
        "deterministic": True,
    }
    data.update(overrides)
    return validate_schema(data, RunConfig)


class TestHelpers:
    def test_nested_meshes(self):
        meshes, surface = nested_meshes(study_config(study={"levels": [0, 2]}))
        assert sorted(meshes) == [0, 2]
        assert meshes[0].n_faces == 20
        assert meshes[2].n_faces == 320
        assert np.array_equal(meshes[2].vertices[:12], meshes[0].vertices)
        assert meshes[2].name == "sphere-level2"
        assert surface.radius == 1.0

    def test_torus_levels_split_and_project(self):
        config = study_config(
            input={"generator": {"kind": "torus", "major": 2.0, "minor": 1.0, "nu": 8, "nv": 4}},
            study={"levels": [0, 1]},
        )
        meshes, _ = nested_meshes(config)
        assert meshes[0].n_faces == 64
        assert meshes[1].n_faces == 256
        assert np.array_equal(meshes[1].vertices[:32], meshes[0].vertices)
        v = meshes[1].vertices
        tube = (np.hypot(v[:, 0], v[:, 1]) - 2.0) ** 2 + v[:, 2] ** 2
        assert np.allclose(tube, 1.0)
        assert meshes[1].genus == 1

    def test_mesh_file_input_rejected(self):
        with pytest.raises(ConfigValidationError):
            nested_meshes(study_config(input={"mesh_path": "mesh.off"}))

    def test_m_values(self):
        assert study_m_values(study_config(), 2.0) == [5.0]
        config = study_config(study={"levels": [0], "m_factors": [10.0, 20.0]})
        assert study_m_values(config, 2.0) == [5.0, 10.0]

    def test_convergence_order(self):
        order, points = convergence_order([0.5, 0.25, 0.125], [1.0, 0.25, 0.0625])
        assert order == pytest.approx(2.0)
        assert points == 3
        assert convergence_order([0.5, 0.25], [1.0, 0.0]) == (None, 1)
        assert convergence_order([0.5, 0.25], [None, None]) == (None, 0)


class TestConvergenceStudy:
    """Test a small three-level study end to end."""

    @pytest.fixture(scope="class")
    def report(self):
        return ConvergenceStudy(study_config()).run()

    def test_rows(self, report):
        assert [r.level for r in report.rows] == [0, 1, 2]
        assert [r.faces for r in report.rows] == [20, 80, 320]
        assert report.lam == 0.3
        finest = report.rows[-1]
        assert finest.objective_gap is None
        assert finest.l1_error is None
        for row in report.rows[:-1]:
            assert row.objective_gap >= 0
            assert row.l1_error >= 0
            assert row.grad_l2_error >= 0
            assert row.sym_diff_area >= 0

    def test_fits(self, report):
        assert len(report.fits) == len(FIT_QUANTITIES)
        for quantity in FIT_QUANTITIES:
            fit = report.fit(5.0, quantity)
            assert fit is not None
            assert fit.points <= 2

    def test_write_report(self, report, tmp_path):
        paths = write_report(report, tmp_path / "study")
        assert paths["study"].read_text().startswith("level,h,m,faces")
        assert paths["fits"].exists()
        data = json.loads(paths["report"].read_text())
        assert len(data["rows"]) == 3

    def test_single_level_has_no_fit(self):
        report = ConvergenceStudy(study_config(study={"levels": [1], "m_values": [5.0]})).run()
        assert len(report.rows) == 1
        assert all(f.order is None and f.points == 0 for f in report.fits)

    def test_workers_do_not_change_results(self, report):
        parallel = ConvergenceStudy(
            study_config(study={"levels": [0, 1, 2], "m_values": [5.0], "workers": 2})
        ).run()
        assert [r.objective for r in parallel.rows] == [r.objective for r in report.rows]

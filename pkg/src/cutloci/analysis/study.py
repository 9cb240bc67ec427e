"""
Convergence study over nested refinements of a generated surface.

For every refinement level and every m the problem is solved once. Each
coarse solution is prolonged to the finest mesh of the same m and compared
there: objective gap, L¹ distance, L² gradient distance and the area of the
symmetric difference of the extracted λ-sets. The decay of each quantity in
h is summarized by a least-squares slope in log-log scale.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from cutloci.core.errors import ArtifactIOError, ConfigValidationError
from cutloci.core.logging import get_logger
from cutloci.core.progress import ProgressIndicator
from cutloci.core.sources import resolve_sources
from cutloci.cutlocus.extract import CutLocusSet, extract, filter_components
from cutloci.cutlocus.metrics import symmetric_difference_area
from cutloci.export.tables import write_fits, write_study
from cutloci.fem.assembly import QuadraticForm, assemble, integrate
from cutloci.fem.space import FunctionSpace, build_space
from cutloci.fem.transfer import prolong
from cutloci.mesh.analytic import AnalyticSurface
from cutloci.mesh.generators import generate_sphere, generate_torus, refine_project, surface_for_generator
from cutloci.mesh.surface import SurfaceMesh
from cutloci.schemas.config import RunConfig
from cutloci.schemas.params import SourceSet
from cutloci.schemas.results import StudyFit, StudyReport, StudyRow
from cutloci.solver.admm import SolutionField, solve
from cutloci.solver.normalize import normalize_lipschitz

logger = get_logger("cutloci.study")

FIT_QUANTITIES = ("objective_gap", "l1_error", "grad_l2_error", "sym_diff_area")


@dataclass
class _Cell:
    level: int
    m: float
    space: FunctionSpace
    form: QuadraticForm
    solution: SolutionField
    cut_set: CutLocusSet


def nested_meshes(config: RunConfig) -> tuple[dict[int, SurfaceMesh], AnalyticSurface]:
    """
    Meshes for the configured levels, each a refinement of the previous one,
    together with the surface they sample.

    Sphere levels count icosahedron subdivisions. Torus levels start from the
    configured (nu, nv) grid; every further level splits each triangle into four
    and projects the new midpoints back onto the torus.

    Raises:
        ConfigValidationError: If the input is a mesh file
    """
    gen = config.input.generator
    if gen is None:
        raise ConfigValidationError("study needs a generated input (input.generator); mesh files cannot be refined")
    if gen.kind == "sphere":
        surface = surface_for_generator("sphere", radius=gen.radius, center=gen.center)
        mesh = generate_sphere(gen.radius, 0, gen.center)
    else:
        surface = surface_for_generator("torus", major=gen.major, minor=gen.minor)
        mesh = generate_torus(gen.major, gen.minor, gen.nu, gen.nv)

    levels = config.study.levels
    meshes: dict[int, SurfaceMesh] = {}
    for level in range(levels[-1] + 1):
        if level in levels:
            meshes[level] = SurfaceMesh(mesh.vertices, mesh.triangles, name=f"{gen.kind}-level{level}")
        if level < levels[-1]:
            mesh = refine_project(mesh, surface)
    return meshes, surface


def study_m_values(config: RunConfig, diameter: float) -> list[float]:
    if config.study.m_values is not None:
        return list(config.study.m_values)
    return [factor / diameter for factor in config.study.m_factors]


def convergence_order(h: list[float], errors: list[Optional[float]]) -> tuple[Optional[float], int]:
    """
    Slope of log(error) against log(h) over the strictly positive errors.

    Returns:
        (slope, number of points used); slope is None below two points
    """
    pts = [(hi, e) for hi, e in zip(h, errors) if e is not None and e > 0 and hi > 0]
    if len(pts) < 2:
        return None, len(pts)
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope), len(pts)


class ConvergenceStudy:
    """Sweeps refinement levels and m values for one configuration."""

    def __init__(self, config: RunConfig, progress: Optional[ProgressIndicator] = None):
        self.config = config
        self.progress = progress or ProgressIndicator(enabled=False)

    def _solve_cell(self, level: int, mesh: SurfaceMesh, sources: SourceSet, m: float, lam: float) -> _Cell:
        config = self.config
        space = build_space(mesh, config.element.order, config.element.g)
        form = assemble(space)
        sol = solve(form, space, sources, config.solver.model_copy(update={"m": m}))
        cut_set = filter_components(extract(normalize_lipschitz(sol, space), space, lam), config.filter_fraction)
        logger.info(
            "Study cell solved",
            level=level,
            m=m,
            faces=mesh.n_faces,
            objective=sol.objective,
            converged=sol.converged,
        )
        return _Cell(level=level, m=m, space=space, form=form, solution=sol, cut_set=cut_set)

    def run(self) -> StudyReport:
        """
        Solve every (level, m) cell and compare each with the finest level.

        Sources are resolved on the coarsest mesh; refinement appends vertices,
        so the same indices name the same points on every level.

        Raises:
            ConfigValidationError: If the input is not generated
        """
        config = self.config
        meshes, surface = nested_meshes(config)
        levels = sorted(meshes)
        coarsest = meshes[levels[0]]
        sources = resolve_sources(config.sources, coarsest, surface, seed=config.seed)
        diameter = coarsest.bounding_box_diameter()
        m_values = study_m_values(config, diameter)
        lam = config.lambdas[0] if config.lambdas else 0.1 * diameter

        jobs = [(level, m) for m in m_values for level in levels]
        self.progress.start_stage("study", f"{len(jobs)} cells", total=len(jobs))
        cells: dict[tuple[int, float], _Cell] = {}
        try:
            with ThreadPoolExecutor(max_workers=config.study.workers) as pool:
                futures = {
                    job: pool.submit(self._solve_cell, job[0], meshes[job[0]], sources, job[1], lam)
                    for job in jobs
                }
                for done, (job, future) in enumerate(futures.items(), start=1):
                    cells[job] = future.result()
                    self.progress.advance(done, f"level {job[0]}, m = {job[1]:g}")
            self.progress.complete_stage(f"study: {len(jobs)} cells")
        finally:
            self.progress.finish()

        rows: list[StudyRow] = []
        fits: list[StudyFit] = []
        finest = levels[-1]
        for m in m_values:
            ref = cells[(finest, m)]
            m_rows = [self._row(cells[(level, m)], ref, level == finest) for level in levels]
            rows.extend(m_rows)
            coarse_rows = [r for r in m_rows if r.level != finest]
            for quantity in FIT_QUANTITIES:
                order, used = convergence_order(
                    [r.h for r in coarse_rows], [getattr(r, quantity) for r in coarse_rows]
                )
                fits.append(StudyFit(m=m, quantity=quantity, order=order, points=used))
        report = StudyReport(lam=lam, rows=rows, fits=fits)
        logger.info("Study finished", cells=len(rows), levels=levels, m_values=m_values)
        return report

    @staticmethod
    def _row(cell: _Cell, ref: _Cell, is_finest: bool) -> StudyRow:
        mesh = cell.space.mesh
        row = StudyRow(
            level=cell.level,
            h=mesh.h_max(),
            m=cell.m,
            faces=mesh.n_faces,
            objective=cell.solution.objective,
            converged=cell.solution.converged,
            iterations=cell.solution.iterations,
        )
        if is_finest:
            return row
        diff = prolong(cell.space, cell.solution.coeffs, ref.space) - ref.solution.coeffs
        return row.model_copy(update={
            "objective_gap": abs(cell.solution.objective - ref.solution.objective),
            "l1_error": integrate(ref.space, diff, absolute=True),
            "grad_l2_error": math.sqrt(max(ref.form.energy(diff), 0.0)),
            "sym_diff_area": symmetric_difference_area(cell.cut_set, ref.cut_set, mesh, ref.space.mesh),
        })


def run_study(config: RunConfig, progress: Optional[ProgressIndicator] = None) -> StudyReport:
    return ConvergenceStudy(config, progress).run()


def write_report(report: StudyReport, out_dir: Path) -> dict[str, Path]:
    """study.csv, fits.csv and study.json in ``out_dir``."""
    out_dir = Path(out_dir)
    paths = {
        "study": write_study(out_dir / "study.csv", report.rows),
        "fits": write_fits(out_dir / "fits.csv", report.fits),
    }
    path = out_dir / "study.json"
    try:
        path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise ArtifactIOError(f"Cannot write study report {path}: {e}") from e
    paths["report"] = path
    return paths

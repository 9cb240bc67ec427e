"""Run orchestration: mesh, sources, solve, extraction, Voronoi labels, artifacts."""

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
from scipy.spatial import cKDTree

from cutloci.core.config import save_config
from cutloci.core.errors import ArtifactIOError, ConfigValidationError
from cutloci.core.logging import StructuredLogger, get_logger
from cutloci.core.progress import ProgressIndicator
from cutloci.core.solution_store import save_solution
from cutloci.core.sources import resolve_sources
from cutloci.cutlocus.components import subcomplex_euler_characteristic
from cutloci.cutlocus.extract import CutLocusSet, extract, filter_components
from cutloci.cutlocus.metrics import hausdorff_to_reference
from cutloci.cutlocus.voronoi import VoronoiLabeling, label_cells
from cutloci.export.tables import write_components, write_history, write_lambdas
from cutloci.export.vtk import write_colored_ply, write_vtk
from cutloci.fem.assembly import assemble
from cutloci.fem.space import FunctionSpace, audit_gradient_norm, build_space
from cutloci.mesh.analytic import AnalyticSurface, Sphere
from cutloci.mesh.generators import generate_sphere, generate_torus, surface_for_generator
from cutloci.mesh.io import load_mesh, save_mesh
from cutloci.mesh.surface import SurfaceMesh
from cutloci.oracle.distance import DistanceOracle
from cutloci.oracle.sphere import spherical_voronoi_boundary
from cutloci.schemas.config import GeneratorSpec, RunConfig
from cutloci.schemas.params import SourceSet
from cutloci.schemas.results import ComponentRecord, LambdaRecord, MeshSummary, RunSummary
from cutloci.solver.admm import SolutionField, solve
from cutloci.solver.normalize import normalize_lipschitz

DEFAULT_LAMBDA_FRACTION = 0.1
MESH_FILE = "mesh.off"
SOLUTION_FILE = "solution.npz"
SUMMARY_FILE = "summary.json"


@dataclass
class RunResult:
    """In-memory products of a run next to the paths of what was written."""

    summary: RunSummary
    output_dir: Path
    mesh: SurfaceMesh
    space: FunctionSpace
    solution: SolutionField
    cut_sets: list[CutLocusSet]
    labeling: Optional[VoronoiLabeling] = None
    artifacts: dict[str, Path] = field(default_factory=dict)


def build_mesh(spec: GeneratorSpec) -> tuple[SurfaceMesh, AnalyticSurface]:
    """Generated mesh plus the analytic surface it samples."""
    if spec.kind == "sphere":
        mesh = generate_sphere(spec.radius, spec.subdivisions, spec.center)
        return mesh, surface_for_generator("sphere", radius=spec.radius, center=spec.center)
    mesh = generate_torus(spec.major, spec.minor, spec.nu, spec.nv)
    return mesh, surface_for_generator("torus", major=spec.major, minor=spec.minor)


def vertex_gradient_norms(space: FunctionSpace, point_norms: np.ndarray) -> np.ndarray:
    """|∇u| at each vertex, taken from the nearest constraint point."""
    _, nearest = cKDTree(space.constraint_points_xyz()).query(space.mesh.vertices)
    return np.asarray(point_norms)[nearest]


def lambda_records(cut_sets: list[CutLocusSet]) -> list[LambdaRecord]:
    return [
        LambdaRecord(
            lam=s.lam,
            flagged_points=int(s.flags.sum()),
            flagged_triangles=int(s.triangle_flags.sum()),
            area=s.total_area,
            component_count=len(s.components),
            warning=s.warning,
        )
        for s in cut_sets
    ]


def component_records(mesh: SurfaceMesh, cut_sets: list[CutLocusSet]) -> list[ComponentRecord]:
    """One row per component per λ, with the Euler characteristic of its triangles."""
    return [
        ComponentRecord(
            lam=s.lam,
            id=c.id,
            area=c.area,
            triangle_count=c.triangle_count,
            euler_characteristic=subcomplex_euler_characteristic(mesh, c.triangles),
        )
        for s in cut_sets
        for c in s.components
    ]


def resolve_lambdas(config: RunConfig, mesh: SurfaceMesh) -> list[float]:
    if config.lambdas is not None:
        return list(config.lambdas)
    return [DEFAULT_LAMBDA_FRACTION * mesh.bounding_box_diameter()]


class CutLociPipeline:
    """Runs one configuration end to end and writes its artifact bundle."""

    def __init__(self, config: RunConfig, progress: Optional[ProgressIndicator] = None):
        """
        Initialize pipeline.

        Args:
            config: Validated run configuration
            progress: Terminal progress display (disabled when None)
        """
        self.config = config
        self.progress = progress or ProgressIndicator(enabled=False)
        self.logger: StructuredLogger = get_logger("cutloci.pipeline")
        self.timings: dict[str, float] = {}

    @contextmanager
    def _stage(self, name: str, description: str = "") -> Iterator[None]:
        start = time.perf_counter()
        self.logger.log_pipeline_stage(name, "started")
        self.progress.start_stage(name, description)
        try:
            yield
        except Exception as e:
            duration_ms = (time.perf_counter() - start) * 1000
            self.logger.log_pipeline_stage(name, "failed", duration_ms=duration_ms, error=str(e))
            self.progress.error(f"{name} failed: {e}")
            raise
        duration = time.perf_counter() - start
        self.timings[name] = duration
        self.logger.log_pipeline_stage(name, "completed", duration_ms=duration * 1000)
        self.progress.complete_stage(f"{name} ({duration:.2f}s)")

    def load_mesh(self) -> tuple[SurfaceMesh, Optional[AnalyticSurface]]:
        spec = self.config.input
        if spec.generator is not None:
            return build_mesh(spec.generator)
        return load_mesh(spec.mesh_path), None

    def run_solve(self) -> RunResult:
        """Single- or multi-source cut-locus run."""
        return self._run(voronoi=False)

    def run_voronoi(self) -> RunResult:
        """
        Multi-source run whose λ-set approximates the Voronoi cell boundaries.

        Raises:
            ConfigValidationError: If the sources resolve to fewer than two vertices
        """
        return self._run(voronoi=True)

    def _run(self, voronoi: bool) -> RunResult:
        config = self.config
        mode = "voronoi" if voronoi else "solve"
        self.timings = {}
        out_dir = Path(config.output_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ArtifactIOError(f"Cannot create output directory {out_dir}: {e}") from e

        try:
            with self._stage("mesh", "building mesh"):
                mesh, surface = self.load_mesh()
                sources = resolve_sources(config.sources, mesh, surface, seed=config.seed)
                if voronoi and len(sources) < 2:
                    raise ConfigValidationError(
                        f"voronoi mode needs at least 2 distinct sources, got {len(sources)}"
                    )
                self.logger.info("Sources resolved", mode=mode, sources=list(sources.indices))

            with self._stage("assemble", "assembling the quadratic form"):
                space = build_space(mesh, config.element.order, config.element.g)
                form = assemble(space)

            with self._stage("solve", "running the splitting solver"):
                sol = solve(form, space, sources, config.solver)
                audit = audit_gradient_norm(space, sol.coeffs) if space.order > 1 else None

            with self._stage("extract", "extracting cut-locus sets"):
                normalized = normalize_lipschitz(sol, space)
                cut_sets = [
                    filter_components(extract(normalized, space, lam), config.filter_fraction)
                    for lam in resolve_lambdas(config, mesh)
                ]
                for cut_set in cut_sets:
                    if cut_set.warning:
                        self.progress.warning(cut_set.warning)

            labeling = None
            hausdorff = None
            with self._stage("oracle", "computing reference distances"):
                oracle = DistanceOracle(mesh, sources, steiner_level=config.steiner_level)
                distances = oracle.distances()
                if voronoi:
                    labeling = label_cells(mesh, sources, oracle)
                    if isinstance(surface, Sphere) and not cut_sets[0].is_empty:
                        reference = spherical_voronoi_boundary(
                            surface.center,
                            surface.radius,
                            mesh.vertices[list(sources.indices)],
                            samples=config.voronoi_samples,
                        )
                        hausdorff = hausdorff_to_reference(cut_sets[0], mesh, reference)

            summary = self._summary(mode, mesh, space, sol, sources, cut_sets, audit, labeling, hausdorff)

            with self._stage("write", f"writing artifacts to {out_dir}"):
                artifacts = self._write(out_dir, space, sol, distances, cut_sets, labeling, summary)
        finally:
            self.progress.finish()

        return RunResult(
            summary=summary,
            output_dir=out_dir,
            mesh=mesh,
            space=space,
            solution=sol,
            cut_sets=cut_sets,
            labeling=labeling,
            artifacts=artifacts,
        )

    def _summary(
        self,
        mode: str,
        mesh: SurfaceMesh,
        space: FunctionSpace,
        sol: SolutionField,
        sources: SourceSet,
        cut_sets: list[CutLocusSet],
        audit: Optional[float],
        labeling: Optional[VoronoiLabeling],
        hausdorff: Optional[tuple[float, float]],
    ) -> RunSummary:
        return RunSummary(
            mode=mode,
            mesh=MeshSummary(
                name=mesh.name,
                vertices=mesh.n_vertices,
                faces=mesh.n_faces,
                genus=mesh.genus,
                h_max=mesh.h_max(),
            ),
            order=space.order,
            constraint_points=space.g,
            dofs=space.n_dofs,
            sources=list(sources.indices),
            m=sol.m,
            rho=sol.rho,
            converged=sol.converged,
            iterations=sol.iterations,
            objective=sol.objective,
            primal_residual=sol.primal_residual,
            dual_residual=sol.dual_residual,
            max_gradient_norm=sol.max_gradient_norm,
            audit_max_gradient_norm=audit,
            min_coeff=float(sol.coeffs.min()),
            max_coeff=float(sol.coeffs.max()),
            filter_fraction=self.config.filter_fraction,
            lambdas=lambda_records(cut_sets),
            components=component_records(mesh, cut_sets),
            voronoi_cell_sizes=labeling.cell_sizes().tolist() if labeling is not None else None,
            voronoi_hausdorff=hausdorff,
            timings=None if self.config.deterministic else dict(self.timings),
        )

    def _write(
        self,
        out_dir: Path,
        space: FunctionSpace,
        sol: SolutionField,
        distances: np.ndarray,
        cut_sets: list[CutLocusSet],
        labeling: Optional[VoronoiLabeling],
        summary: RunSummary,
    ) -> dict[str, Path]:
        formats = set(self.config.formats)
        artifacts: dict[str, Path] = {
            "mesh": save_mesh(space.mesh, out_dir / MESH_FILE),
            "solution": save_solution(
                sol,
                out_dir / SOLUTION_FILE,
                extra={
                    "mesh": MESH_FILE,
                    "order": space.order,
                    "g": space.g,
                    "lambdas": [s.lam for s in cut_sets],
                    "filter_fraction": self.config.filter_fraction,
                },
            ),
            "config": save_config(self.config, out_dir / "config.yaml"),
        }
        artifacts.update(write_set_artifacts(out_dir, space, sol.coeffs, sol.gradient_norms, cut_sets, formats,
                                             distances=distances, labeling=labeling))
        if "csv" in formats:
            artifacts["history"] = write_history(out_dir / "history.csv", sol.history)

        path = out_dir / SUMMARY_FILE
        try:
            path.write_text(summary.to_json(), encoding="utf-8")
        except OSError as e:
            raise ArtifactIOError(f"Cannot write summary {path}: {e}") from e
        artifacts["summary"] = path
        self.logger.info("Artifacts written", output_dir=str(out_dir), files=len(artifacts))
        return artifacts


def write_set_artifacts(
    out_dir: Path,
    space: FunctionSpace,
    coeffs: np.ndarray,
    point_norms: np.ndarray,
    cut_sets: list[CutLocusSet],
    formats: set[str],
    distances: Optional[np.ndarray] = None,
    labeling: Optional[VoronoiLabeling] = None,
) -> dict[str, Path]:
    """
    Write the VTK field file, per-λ colored PLY files and the component tables.

    Shared by fresh runs and ``cutloci export``. Cell arrays ``flag_<i>`` and
    ``component_<i>`` belong to the i-th entry of ``cut_sets``.
    """
    mesh = space.mesh
    artifacts: dict[str, Path] = {}
    if "vtk" in formats:
        point_data = {
            "u": np.asarray(coeffs)[:mesh.n_vertices],
            "grad_norm": vertex_gradient_norms(space, point_norms),
        }
        if distances is not None:
            point_data["graph_distance"] = distances
        if labeling is not None:
            point_data["voronoi_label"] = labeling.vertex_labels
        cell_data: dict[str, np.ndarray] = {}
        for i, cut_set in enumerate(cut_sets):
            cell_data[f"flag_{i}"] = cut_set.triangle_flags.astype(np.int64)
            cell_data[f"component_{i}"] = cut_set.component_ids()
        if labeling is not None:
            cell_data["voronoi_label"] = labeling.triangle_labels
        artifacts["vtk"] = write_vtk(mesh, out_dir / "solution.vtk", point_data, cell_data)
    if "ply" in formats:
        for i, cut_set in enumerate(cut_sets):
            artifacts[f"ply_{i}"] = write_colored_ply(mesh, out_dir / f"cutlocus_{i}.ply", cut_set.component_ids())
        if labeling is not None:
            artifacts["ply_voronoi"] = write_colored_ply(mesh, out_dir / "voronoi.ply", labeling.triangle_labels)
    if "csv" in formats:
        artifacts["components"] = write_components(out_dir / "components.csv", component_records(mesh, cut_sets))
        artifacts["lambdas"] = write_lambdas(out_dir / "lambdas.csv", lambda_records(cut_sets))
    return artifacts

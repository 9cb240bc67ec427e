"""CLI interface for cutloci."""

import functools
import sys
from pathlib import Path
from typing import Any, Callable, Optional

import click

from cutloci.cli.formatters import OutputFormatter
from cutloci.core.config import PRESETS, load_config, parse_overrides
from cutloci.core.errors import CutLociError, FunctionSpaceError, NonConvergenceError
from cutloci.core.logging import configure_logging
from cutloci.core.progress import ProgressIndicator
from cutloci.schemas.config import RunConfig

OVERRIDE_SETTINGS = {"ignore_unknown_options": True, "allow_extra_args": True}


def _fail(error: Exception, exit_code: int = 1) -> None:
    click.echo(f"Error: {error}", err=True)
    sys.exit(exit_code)


def handle_errors(func: Callable) -> Callable:
    """Turn library errors into a diagnostic line and the error's exit code."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except CutLociError as e:
            _fail(e, e.exit_code)
        except ValueError as e:
            _fail(e, 1)

    return wrapper


def logging_options(func: Callable) -> Callable:
    func = click.option(
        "--json-logging",
        is_flag=True,
        default=False,
        help="Output logs in JSON format",
    )(func)
    func = click.option(
        "--log-file",
        type=click.Path(),
        default=None,
        help="Write logs to file",
    )(func)
    func = click.option(
        "--log-level",
        type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
        default="WARNING",
        help="Logging level (default: WARNING)",
    )(func)
    return func


def run_options(func: Callable) -> Callable:
    """Options shared by the commands that take a RunConfig."""
    func = click.option(
        "--quiet",
        "-q",
        is_flag=True,
        default=False,
        help="Suppress progress and tables",
    )(func)
    func = click.option(
        "--output-dir",
        "-o",
        type=click.Path(file_okay=False),
        default=None,
        help="Artifact directory (overrides output_dir)",
    )(func)
    func = click.option(
        "--preset",
        type=click.Choice(sorted(PRESETS)),
        default=None,
        help="Built-in configuration used as the base layer",
    )(func)
    func = click.option(
        "--config",
        "config_file",
        type=click.Path(exists=True, dir_okay=False),
        default=None,
        help="YAML or JSON run configuration",
    )(func)
    return logging_options(func)


def _load_run_config(
    extra_args: list[str],
    config_file: Optional[str],
    preset: Optional[str],
    output_dir: Optional[str],
) -> RunConfig:
    overrides = parse_overrides(extra_args)
    if output_dir is not None:
        overrides["output_dir"] = output_dir
    return load_config(
        config_file=Path(config_file) if config_file else None,
        preset=preset,
        overrides=overrides,
    )


@click.group()
@click.version_option(package_name="cutloci")
def main():
    """
    cutloci - cut loci and geodesic Voronoi boundaries on closed surfaces.

    The distance-like function is the maximizer of a gradient-constrained
    convex energy, discretized with P1/P2 finite elements and solved by a
    splitting method; the cut locus is read off where the gradient bound
    is slack.

    Every configuration field can be overridden with its dotted name,
    for example --solver.m 50 or --input.generator.nu=64.
    """
    pass


@main.command()
@click.argument("kind", type=click.Choice(["sphere", "torus"]))
@click.option("--output", "-o", type=click.Path(dir_okay=False), required=True, help="Mesh file (.off, .obj, .ply)")
@click.option("--radius", type=float, default=1.0, help="Sphere radius")
@click.option("--subdivisions", type=int, default=4, help="Icosphere refinement level")
@click.option("--major", type=float, default=2.0, help="Torus major radius R")
@click.option("--minor", type=float, default=1.0, help="Torus minor radius r")
@click.option("--nu", type=int, default=128, help="Torus grid count around the axis")
@click.option("--nv", type=int, default=64, help="Torus grid count around the tube")
@logging_options
@handle_errors
def gen(
    kind: str,
    output: str,
    radius: float,
    subdivisions: int,
    major: float,
    minor: float,
    nu: int,
    nv: int,
    log_level: str,
    log_file: Optional[str],
    json_logging: bool,
):
    """
    Generate an icosphere or a torus of revolution and write it to a mesh file.

    Examples:

      cutloci gen sphere --subdivisions 4 -o sphere.off

      cutloci gen torus --nu 64 --nv 32 -o torus.obj
    """
    configure_logging(level=log_level, json_output=json_logging, log_file=log_file)

    from cutloci.core.pipeline import build_mesh
    from cutloci.core.validator import validate_schema
    from cutloci.mesh.io import save_mesh
    from cutloci.schemas.config import GeneratorSpec

    spec = validate_schema(
        {
            "kind": kind,
            "radius": radius,
            "subdivisions": subdivisions,
            "major": major,
            "minor": minor,
            "nu": nu,
            "nv": nv,
        },
        GeneratorSpec,
    )
    mesh, _ = build_mesh(spec)
    path = save_mesh(mesh, output)
    click.echo(f"Wrote {mesh.name}: {mesh.n_vertices} vertices, {mesh.n_faces} faces -> {path}")


def _run_pipeline(ctx: click.Context, voronoi: bool, config_file, preset, output_dir, quiet) -> None:
    from cutloci.core.pipeline import CutLociPipeline

    config = _load_run_config(ctx.args, config_file, preset, output_dir)
    progress = ProgressIndicator(enabled=not quiet)
    pipeline = CutLociPipeline(config, progress=progress)
    result = pipeline.run_voronoi() if voronoi else pipeline.run_solve()

    if not quiet:
        formatter = OutputFormatter()
        formatter.print_summary(result.summary)
        formatter.print_success(f"Artifacts written to {result.output_dir}")
    if not result.summary.converged:
        raise NonConvergenceError(
            f"solver stopped after {result.summary.iterations} iterations "
            f"(primal {result.summary.primal_residual:.3g}, dual {result.summary.dual_residual:.3g}); "
            f"best iterate written to {result.output_dir}"
        )


@main.command(context_settings=OVERRIDE_SETTINGS)
@run_options
@click.pass_context
@handle_errors
def solve(
    ctx: click.Context,
    config_file: Optional[str],
    preset: Optional[str],
    output_dir: Optional[str],
    quiet: bool,
    log_level: str,
    log_file: Optional[str],
    json_logging: bool,
):
    """
    Solve for the distance-like field and extract the λ-cut-locus sets.

    Writes solution.vtk, cutlocus_<i>.ply, components.csv, lambdas.csv,
    history.csv, solution.npz, mesh.off, config.yaml and summary.json.
    Exits with code 2 (after writing) when the solver does not converge.

    Examples:

      cutloci solve --preset sphere -o out/sphere

      cutloci solve --preset torus --solver.m 25 --lambdas "[0.05, 0.1]"
    """
    configure_logging(level=log_level, json_output=json_logging, log_file=log_file)
    _run_pipeline(ctx, False, config_file, preset, output_dir, quiet)


@main.command(context_settings=OVERRIDE_SETTINGS)
@run_options
@click.pass_context
@handle_errors
def voronoi(
    ctx: click.Context,
    config_file: Optional[str],
    preset: Optional[str],
    output_dir: Optional[str],
    quiet: bool,
    log_level: str,
    log_file: Optional[str],
    json_logging: bool,
):
    """
    Multi-source run: the λ-set approximates the geodesic Voronoi cell boundaries.

    Needs at least two distinct sources. Adds voronoi_label channels and
    voronoi.ply; on a generated sphere the summary also reports the Hausdorff
    distances to the exact bisector arcs.

    Examples:

      cutloci voronoi --preset sphere-voronoi

      cutloci voronoi --input.mesh_path genus2.off --sources.random 10 --seed 3
    """
    configure_logging(level=log_level, json_output=json_logging, log_file=log_file)
    _run_pipeline(ctx, True, config_file, preset, output_dir, quiet)


@main.command(context_settings=OVERRIDE_SETTINGS)
@run_options
@click.pass_context
@handle_errors
def study(
    ctx: click.Context,
    config_file: Optional[str],
    preset: Optional[str],
    output_dir: Optional[str],
    quiet: bool,
    log_level: str,
    log_file: Optional[str],
    json_logging: bool,
):
    """
    Convergence study over nested refinements and several m values.

    Writes study.csv, fits.csv and study.json to the output directory.

    Example:

      cutloci study --preset sphere --study.levels "[2, 3, 4]" --study.m_values "[50]"
    """
    configure_logging(level=log_level, json_output=json_logging, log_file=log_file)

    from cutloci.analysis.study import run_study, write_report

    config = _load_run_config(ctx.args, config_file, preset, output_dir)
    report = run_study(config, progress=ProgressIndicator(enabled=not quiet))
    paths = write_report(report, Path(config.output_dir))
    if not quiet:
        formatter = OutputFormatter()
        formatter.print_study(report)
        formatter.print_success(f"Study written to {paths['study'].parent}")


@main.command()
@click.argument("solution", type=click.Path(exists=True, dir_okay=False))
@click.option("--mesh", "mesh_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Mesh the solution lives on (default: the one stored next to it)")
@click.option("--lambda", "lambdas", type=float, multiple=True,
              help="λ to extract at (repeatable; default: the stored values)")
@click.option("--filter-fraction", type=float, default=None, help="Minimum component area fraction")
@click.option("--format", "formats", type=click.Choice(["vtk", "ply", "csv"]), multiple=True,
              help="Output formats (repeatable; default: all)")
@click.option("--output-dir", "-o", type=click.Path(file_okay=False), default=None,
              help="Destination (default: the solution's directory)")
@logging_options
@handle_errors
def export(
    solution: str,
    mesh_path: Optional[str],
    lambdas: tuple[float, ...],
    filter_fraction: Optional[float],
    formats: tuple[str, ...],
    output_dir: Optional[str],
    log_level: str,
    log_file: Optional[str],
    json_logging: bool,
):
    """
    Re-extract and re-export the cut-locus sets of a stored solution.

    Example:

      cutloci export out/solution.npz --lambda 0.05 --lambda 0.2 --format vtk
    """
    configure_logging(level=log_level, json_output=json_logging, log_file=log_file)

    from cutloci.core.pipeline import write_set_artifacts
    from cutloci.core.solution_store import load_solution
    from cutloci.cutlocus.extract import extract, filter_components
    from cutloci.fem.space import build_space
    from cutloci.mesh.io import load_mesh
    from cutloci.solver.normalize import normalize_lipschitz

    solution_path = Path(solution)
    sol, extra = load_solution(solution_path)
    mesh = load_mesh(mesh_path or solution_path.parent / extra.get("mesh", "mesh.off"))
    space = build_space(mesh, extra.get("order", 1), extra.get("g"))
    if space.n_dofs != len(sol.coeffs):
        raise FunctionSpaceError(
            f"solution has {len(sol.coeffs)} dofs but the mesh gives {space.n_dofs}; pass the matching --mesh"
        )

    lams = list(lambdas) or list(extra.get("lambdas") or [0.1 * mesh.bounding_box_diameter()])
    fraction = filter_fraction if filter_fraction is not None else extra.get("filter_fraction", 1e-3)
    normalized = normalize_lipschitz(sol, space)
    cut_sets = [filter_components(extract(normalized, space, lam), fraction) for lam in lams]
    out_dir = Path(output_dir) if output_dir else solution_path.parent
    artifacts = write_set_artifacts(
        out_dir, space, sol.coeffs, sol.gradient_norms, cut_sets, set(formats or ("vtk", "ply", "csv"))
    )
    for name, path in sorted(artifacts.items()):
        click.echo(f"{name}: {path}")


@main.command()
@click.argument("mesh_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--record", type=click.Path(dir_okay=False), default=None, help="Write the key=value report here")
@click.option("--json", "as_json", is_flag=True, default=False, help="Print the report as JSON")
@logging_options
@handle_errors
def validate(
    mesh_file: str,
    record: Optional[str],
    as_json: bool,
    log_level: str,
    log_file: Optional[str],
    json_logging: bool,
):
    """
    Check a mesh file against the surface invariants and print its quality report.

    Exits with code 1 when any invariant is violated.
    """
    configure_logging(level=log_level, json_output=json_logging, log_file=log_file)

    from cutloci.core.errors import ArtifactIOError
    from cutloci.mesh.io import read_mesh
    from cutloci.mesh.quality import validate as validate_mesh

    report = validate_mesh(read_mesh(mesh_file))
    formatter = OutputFormatter()
    if as_json:
        formatter.print_json(report.model_dump())
    else:
        formatter.print_mesh_report(report)
    if record:
        try:
            Path(record).write_text(report.to_record(), encoding="utf-8")
        except OSError as e:
            raise ArtifactIOError(f"Cannot write report {record}: {e}") from e
    if not report.valid:
        _fail(f"{len(report.violations)} invariant violation(s) in {mesh_file}", 1)
    formatter.print_success(f"{mesh_file} is a valid closed surface mesh")


if __name__ == "__main__":
    main()

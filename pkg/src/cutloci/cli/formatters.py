"""Terminal output of run summaries, study reports and mesh reports."""

import json
import sys
from typing import Any

try:
    from rich.console import Console
    from rich.json import JSON
    from rich.table import Table

    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

from cutloci.schemas.mesh import MeshReport
from cutloci.schemas.results import RunSummary, StudyReport


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


class OutputFormatter:
    """Formats output with optional rich support."""

    def __init__(self, use_rich: bool = True, force_color: bool = False, stream=None):
        self.use_rich = use_rich and RICH_AVAILABLE
        self.stream = stream or sys.stdout
        self.console = Console(force_terminal=force_color, file=self.stream) if self.use_rich else None

    def _print(self, text: str = "") -> None:
        print(text, file=self.stream)

    def print_json(self, data: Any, indent: int = 2) -> None:
        """Print JSON with syntax highlighting."""
        text = json.dumps(data, indent=indent, ensure_ascii=False)
        if self.use_rich:
            self.console.print(JSON(text))
        else:
            self._print(text)

    def print_table(self, title: str, columns: list[str], rows: list[list[Any]]) -> None:
        if self.use_rich:
            table = Table(title=title, show_header=True, header_style="bold magenta")
            for i, col in enumerate(columns):
                table.add_column(col, style="cyan" if i == 0 else "green")
            for row in rows:
                table.add_row(*(_fmt(v) for v in row))
            self.console.print(table)
        else:
            self._print(f"\n{title}:")
            self._print("\t".join(columns))
            for row in rows:
                self._print("\t".join(_fmt(v) for v in row))

    def print_stats(self, stats: dict[str, Any], title: str = "Run Statistics") -> None:
        """Print statistics in a two-column table."""
        self.print_table(title, ["Metric", "Value"], [[k.replace("_", " ").title(), v] for k, v in stats.items()])

    def print_summary(self, summary: RunSummary) -> None:
        """Solver diagnostics, then one row per λ."""
        stats = {
            "mode": summary.mode,
            "mesh": f"{summary.mesh.name} ({summary.mesh.vertices} V, {summary.mesh.faces} F)",
            "order": summary.order,
            "dofs": summary.dofs,
            "sources": len(summary.sources),
            "m": summary.m,
            "converged": summary.converged,
            "iterations": summary.iterations,
            "objective": summary.objective,
            "max_gradient_norm": summary.max_gradient_norm,
        }
        if summary.audit_max_gradient_norm is not None:
            stats["audit_max_gradient_norm"] = summary.audit_max_gradient_norm
        if summary.voronoi_hausdorff is not None:
            stats["voronoi_hausdorff"] = ", ".join(f"{d:.4g}" for d in summary.voronoi_hausdorff)
        self.print_stats(stats)
        self.print_table(
            "Cut-Locus Sets",
            ["λ", "Points", "Triangles", "Area", "Components"],
            [[r.lam, r.flagged_points, r.flagged_triangles, r.area, r.component_count] for r in summary.lambdas],
        )
        for record in summary.lambdas:
            if record.warning:
                self.print_warning(record.warning)

    def print_study(self, report: StudyReport) -> None:
        columns = ["level", "h", "m", "faces", "objective", "objective_gap", "l1_error", "grad_l2_error",
                   "sym_diff_area", "converged"]
        self.print_table(
            f"Convergence Study (λ = {report.lam:.4g})",
            columns,
            [[getattr(r, c) for c in columns] for r in report.rows],
        )
        self.print_table(
            "Fitted Orders",
            ["m", "quantity", "order", "points"],
            [[f.m, f.quantity, f.order, f.points] for f in report.fits],
        )

    def print_mesh_report(self, report: MeshReport) -> None:
        data = report.model_dump(exclude={"violations"})
        self.print_stats(data, title=f"Mesh {report.name}")
        for violation in report.violations:
            self.print_error(violation)

    def print_success(self, message: str) -> None:
        if self.use_rich:
            self.console.print(f"[green]✓[/green] {message}")
        else:
            self._print(f"✓ {message}")

    def print_error(self, message: str) -> None:
        if self.use_rich:
            self.console.print(f"[red]✗[/red] {message}")
        else:
            self._print(f"✗ {message}")

    def print_warning(self, message: str) -> None:
        if self.use_rich:
            self.console.print(f"[yellow]⚠[/yellow] {message}")
        else:
            self._print(f"⚠ {message}")

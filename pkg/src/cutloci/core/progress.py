"""Stage progress display with colored output."""

import sys
from typing import Optional

try:
    from rich.console import Console
    from rich.progress import BarColumn, Progress, SpinnerColumn, TaskID, TextColumn, TimeElapsedColumn

    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False


class ProgressIndicator:
    """Stage-by-stage progress on stderr; a no-op when disabled."""

    def __init__(self, enabled: bool = True, stream=sys.stderr, use_rich: bool = True):
        self.enabled = enabled
        self.stream = stream
        self.use_rich = use_rich and RICH_AVAILABLE
        self.current_stage: Optional[str] = None
        self.progress_task: Optional["TaskID"] = None

        if self.use_rich:
            self.console = Console(file=stream)
            self.progress = Progress(
                SpinnerColumn(),
                TextColumn("[progress.description]{task.description}"),
                BarColumn(),
                TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
                TimeElapsedColumn(),
                console=self.console,
                transient=True,
            )
            self._started = False
        else:
            self.console = None
            self.progress = None

    def start_stage(self, stage_name: str, description: str = "", total: Optional[float] = None):
        """Start a new stage; ``total`` enables a determinate bar (e.g. iteration count)."""
        if not self.enabled:
            return
        self.current_stage = stage_name
        message = f"{stage_name}: {description}" if description else stage_name
        if self.use_rich:
            if not self._started:
                self.progress.start()
                self._started = True
            if self.progress_task is not None:
                self.progress.remove_task(self.progress_task)
            self.progress_task = self.progress.add_task(f"[cyan]{message}[/cyan]", total=total)
        else:
            self.stream.write(f"{message}...\n")
            self.stream.flush()

    def advance(self, completed: float, message: Optional[str] = None):
        """Set absolute progress of the current stage."""
        if not self.enabled or not self.use_rich or self.progress_task is None:
            return
        kwargs = {"completed": completed}
        if message:
            kwargs["description"] = f"[cyan]{self.current_stage}:[/cyan] {message}"
        self.progress.update(self.progress_task, **kwargs)

    def complete_stage(self, message: str = ""):
        """Complete current stage."""
        if not self.enabled:
            return
        text = message or f"{self.current_stage or 'Stage'} complete"
        if self.use_rich:
            if self.progress_task is not None:
                self.progress.remove_task(self.progress_task)
                self.progress_task = None
            self.console.print(f"  [green]✓[/green] {text}")
        else:
            self.stream.write(f"  ✓ {text}\n")
            self.stream.flush()
        self.current_stage = None

    def error(self, message: str):
        """Report an error."""
        self._line("red", "✗", message)

    def warning(self, message: str):
        """Report a warning."""
        self._line("yellow", "⚠", message)

    def info(self, message: str):
        """Report info message."""
        self._line("blue", "ℹ", message)

    def _line(self, color: str, symbol: str, message: str):
        if not self.enabled:
            return
        if self.use_rich:
            self.console.print(f"  [{color}]{symbol}[/{color}] {message}")
        else:
            self.stream.write(f"  {symbol} {message}\n")
            self.stream.flush()

    def finish(self):
        """Finish progress display."""
        if self.use_rich and self._started:
            self.progress.stop()
            self._started = False
            self.progress_task = None

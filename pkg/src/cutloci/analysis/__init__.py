"""Convergence studies over nested refinements."""

from cutloci.analysis.study import ConvergenceStudy, run_study

__all__ = ["ConvergenceStudy", "run_study"]

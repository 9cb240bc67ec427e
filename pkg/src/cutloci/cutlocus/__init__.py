"""λ-cut-locus extraction, components and Voronoi labels."""

from cutloci.cutlocus.extract import CutLocusSet, extract, filter_components

__all__ = ["CutLocusSet", "extract", "filter_components"]

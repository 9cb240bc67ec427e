"""cutloci - finite-element approximation of cut loci on closed triangulated surfaces."""

__version__ = "0.1.0"

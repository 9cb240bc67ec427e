"""VTK, PLY and CSV writers."""

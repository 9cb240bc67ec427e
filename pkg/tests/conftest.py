"""Shared mesh fixtures."""

from pathlib import Path

import numpy as np
import pytest

from cutloci.mesh.generators import generate_sphere, generate_torus
from cutloci.mesh.io import load_mesh
from cutloci.mesh.surface import SurfaceMesh

DATA_DIR = Path(__file__).parent / "data"


def octahedron_mesh() -> SurfaceMesh:
    """Unit octahedron: vertices +x, -x, +y, -y, +z, -z; outward orientation."""
    vertices = [
        [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0], [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0], [0.0, 0.0, -1.0],
    ]
    faces = [
        [0, 2, 4], [1, 3, 4], [1, 2, 5], [0, 3, 5],
        [0, 5, 2], [0, 4, 3], [1, 4, 2], [1, 5, 3],
    ]
    return SurfaceMesh(vertices, faces, name="octahedron")


def tetrahedron_mesh() -> SurfaceMesh:
    vertices = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(3.0)
    faces = [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]
    return SurfaceMesh(vertices, faces, name="tetrahedron")


@pytest.fixture
def octahedron() -> SurfaceMesh:
    return octahedron_mesh()


@pytest.fixture
def tetrahedron() -> SurfaceMesh:
    return tetrahedron_mesh()


@pytest.fixture
def genus2(genus2_file) -> SurfaceMesh:
    return load_mesh(genus2_file)


@pytest.fixture
def genus2_file() -> Path:
    """Bundled genus-2 polycube: a 3x5 slab of unit cubes with two holes punched through."""
    return DATA_DIR / "genus2.off"


@pytest.fixture(scope="session")
def icosphere1() -> SurfaceMesh:
    return generate_sphere(1.0, 1)


@pytest.fixture(scope="session")
def icosphere2() -> SurfaceMesh:
    return generate_sphere(1.0, 2)


@pytest.fixture(scope="session")
def small_torus() -> SurfaceMesh:
    return generate_torus(2.0, 1.0, 16, 8)

import numpy as np
import pytest

from systole_lab.generators import generate
from systole_lab.surface import validate_surface

# 6-vertex projective plane (hemi-icosahedron)
RP2_6 = [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1],
         [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3]]


def rp2_unit():
    return validate_surface(RP2_6, np.ones((10, 3)))


def lattice_torus_lengths(triangles, positions, basis):
    """Per-triangle lengths for a grid torus, shortest displacement mod the lattice."""
    B = np.asarray(basis, float)
    out = []
    for t in triangles:
        row = []
        for i in range(3):
            a, b = t[(i + 1) % 3], t[(i + 2) % 3]
            d = positions[b] - positions[a]
            best = min(np.linalg.norm(d + m * B[0] + n * B[1]) for m in (-1, 0, 1) for n in (-1, 0, 1))
            row.append(best)
        out.append(row)
    return np.array(out)


@pytest.fixture(scope="session")
def square():
    return generate("torus-square")


@pytest.fixture(scope="session")
def hexagonal():
    return generate("torus-hex")


@pytest.fixture(scope="session")
def tetra():
    return generate("sphere-tetra")


@pytest.fixture(scope="session")
def octagon():
    return generate("genus2-octagon")


@pytest.fixture(scope="session")
def rp2():
    return generate("rp2-icosa")


@pytest.fixture(scope="session")
def rp2_six():
    return rp2_unit()

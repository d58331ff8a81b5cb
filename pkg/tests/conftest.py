import numpy as np
import pytest

from jsrkit import MatrixSet

GOLDEN = (1.0 + 5.0**0.5) / 2.0


@pytest.fixture
def diag_set():
    """Two commuting diagonal matrices with joint spectral radius 3."""
    return MatrixSet(
        (np.diag([3.0, 1.0]), np.diag([1.0, 3.0])), labels=("A1", "A2")
    )


@pytest.fixture
def nilpotent_pair():
    """Each matrix is nilpotent, but their products alternate to radius 1."""
    a1 = np.array([[0.0, 1.0], [0.0, 0.0]])
    a2 = np.array([[0.0, 0.0], [1.0, 0.0]])
    return MatrixSet((a1, a2))


@pytest.fixture
def shear_pair():
    """The irreducible pair of unit shears; radius is the golden ratio."""
    a1 = np.array([[1.0, 1.0], [0.0, 1.0]])
    a2 = np.array([[1.0, 0.0], [1.0, 1.0]])
    return MatrixSet((a1, a2))


def random_matrix_set(rng, dim=None, size=None, complex_entries=False):
    dim = dim if dim is not None else int(rng.integers(2, 5))
    size = size if size is not None else int(rng.integers(1, 4))
    mats = []
    for _ in range(size):
        m = rng.normal(size=(dim, dim))
        if complex_entries:
            m = m + 1j * rng.normal(size=(dim, dim))
        mats.append(m)
    return MatrixSet(tuple(mats))

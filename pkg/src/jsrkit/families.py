"""Built-in parametrised matrix families used in examples and experiments."""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError
from .matrices import MatrixSet

__all__ = ["pair_family", "rotation", "FAMILIES"]


def pair_family(alpha: float) -> MatrixSet:
    """The pair {[[1,1],[0,1]], alpha*[[1,0],[1,1]]} for alpha in (0, 1].

    Irreducible for every alpha in (0, 1]; its exterior squares are the
    scalars {1, alpha}, and the optimal symbol frequencies vary
    continuously with alpha.
    """
    if not 0.0 < alpha <= 1.0:
        raise InputError("alpha must lie in (0, 1]")
    a1 = np.array([[1.0, 1.0], [0.0, 1.0]])
    a2 = np.array([[1.0, 0.0], [1.0, 1.0]])
    return MatrixSet((a1, alpha * a2))


def rotation(theta: float) -> np.ndarray:
    """Plane rotation by theta radians."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


FAMILIES = {"hmst": pair_family}

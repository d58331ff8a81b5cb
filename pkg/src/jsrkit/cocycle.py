"""Matrix cocycle over the full shift: scaled products along finite words.

For a word w = (w_1, ..., w_n) the cocycle value is the product
A_{w_n} ... A_{w_1}: the symbol read at time k multiplies on the LEFT.
The joint spectral radius does not depend on this orientation, but the
growth-maximising sequence semantics do, so the convention is fixed here
once and used everywhere.

Products are kept in a scaled representation ``product * exp(log_scale)``
with the max-entry norm of ``product`` held near [2**-32, 2**32]; the
rescale factors are exact powers of two so the log bookkeeping is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .matrices import MatrixSet, max_entry_norm

__all__ = ["CocycleValue", "evaluate", "prefix_values", "cocycle_check"]

_LN2 = math.log(2.0)
_SCALE_HI = 32  # rescale when the max entry leaves [2**-32, 2**32]


@dataclass(frozen=True)
class CocycleValue:
    """A matrix product in scaled form: true value = product * exp(log_scale)."""

    product: np.ndarray
    log_scale: float
    word: tuple

    @property
    def value(self) -> np.ndarray:
        return self.product * math.exp(self.log_scale)

    def log_max_entry(self) -> float:
        """log of the max-entry norm of the true product; -inf for zero."""
        m = max_entry_norm(self.product)
        if m == 0.0:
            return -math.inf
        return math.log(m) + self.log_scale


def _rescale(product: np.ndarray, log_scale: float):
    m = max_entry_norm(product)
    if m == 0.0:
        return np.zeros_like(product), 0.0
    e = math.frexp(m)[1]  # m in [2**(e-1), 2**e)
    if abs(e) > _SCALE_HI:
        product = product * 2.0**-e
        log_scale += e * _LN2
    return product, log_scale


def evaluate(ms: MatrixSet, word) -> CocycleValue:
    """Scaled product along a word, newest symbol multiplying on the left."""
    word = tuple(word)
    product = np.eye(ms.dim, dtype=np.complex128)
    log_scale = 0.0
    for s in word:
        product = ms.matrix(s) @ product
        product, log_scale = _rescale(product, log_scale)
    return CocycleValue(product, log_scale, word)


def prefix_values(ms: MatrixSet, word):
    """Cocycle values for every prefix w[:m], m = 1..len(word)."""
    word = tuple(word)
    out = []
    product = np.eye(ms.dim, dtype=np.complex128)
    log_scale = 0.0
    for m, s in enumerate(word, start=1):
        product = ms.matrix(s) @ product
        product, log_scale = _rescale(product, log_scale)
        out.append(CocycleValue(product.copy(), log_scale, word[:m]))
    return out


def cocycle_check(ms: MatrixSet, word, n: int, rtol: float = 1e-9) -> bool:
    """Verify L(w) = L(shift^n w, |w|-n) L(w, n) in the scaled representation."""
    word = tuple(word)
    if not 0 <= n <= len(word):
        raise InputError("split point outside the word")
    whole = evaluate(ms, word)
    head = evaluate(ms, word[:n])
    tail = evaluate(ms, word[n:])
    combined = tail.product @ head.product
    combined, log_scale = _rescale(combined, tail.log_scale + head.log_scale)
    scale = max_entry_norm(whole.product)
    if scale == 0.0:
        return max_entry_norm(combined) <= rtol
    diff = combined * math.exp(log_scale - whole.log_scale) - whole.product
    return max_entry_norm(diff) <= rtol * scale

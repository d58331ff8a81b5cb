"""Subadditive observables over the full shift: Fekete limits, two-sided
growth-rate sandwiches, and subordination survivor sets.

An observable assigns a value f_n(w) to every length-n word (the value of
f_n on the cylinder the word determines); minus infinity is allowed.
Subadditivity means f_{n+m}(w) <= f_n(w[m:]) + f_m(w[:m]) -- the suffix
carries the shifted n-block, matching the cocycle orientation used
throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceCapError
from .matrices import MatrixSet, operator_norm
from .words import enumerate_words, primitive_necklaces

__all__ = [
    "SubadditiveObservable",
    "matrix_observable",
    "fekete_limit",
    "beta_sandwich",
    "subordination_survivors",
]


@dataclass(frozen=True)
class SubadditiveObservable:
    """A word-indexed observable with a declared subadditivity contract."""

    evaluator: object  # callable Word -> float or -inf
    alphabet_size: int
    declared_subadditive: bool = True

    def __call__(self, w) -> float:
        return float(self.evaluator(tuple(w)))

    def spot_check(self, words, tol: float = 1e-9):
        """Verify subadditivity on all split points of the given words.

        Returns None, or the first violating (word, n, m) triple.
        """
        for w in words:
            w = tuple(w)
            for m in range(1, len(w)):
                whole = self(w)
                part = self(w[m:]) + self(w[:m])
                if whole > part + tol:
                    return (w, len(w) - m, m)
        return None


def matrix_observable(ms: MatrixSet, norm: str = "op") -> SubadditiveObservable:
    """f_n(w) = log of a submultiplicative norm of the cocycle product."""
    if norm == "op":
        d = 1.0
    elif norm == "max":
        d = float(ms.dim)
    else:
        raise InputError(f"unknown norm {norm!r}; use 'op' or 'max'")

    def evaluator(w):
        if not w:
            return 0.0
        product = np.eye(ms.dim, dtype=np.complex128)
        logsc = 0.0
        for s in w:
            product = ms.matrix(s) @ product
            mx = np.max(np.abs(product))
            if mx > 0.0:
                e = math.frexp(mx)[1]
                if abs(e) > 32:
                    product = product * 2.0**-e
                    logsc += e * math.log(2.0)
        if norm == "op":
            value = operator_norm(product)
        else:
            value = d * np.max(np.abs(product))
        return math.log(value) + logsc if value > 0.0 else -math.inf

    return SubadditiveObservable(evaluator=evaluator, alphabet_size=len(ms))


def fekete_limit(prefix) -> tuple:
    """min_n a_n / n for a finite prefix of a subadditive sequence a_1..a_N.

    Verifies subadditivity a_{n+m} <= a_n + a_m on every split pair first;
    returns (estimate, running_minima).  For subadditive sequences a_n / n
    converges to its infimum, so the running minima are an anytime upper
    estimate of the limit.
    """
    a = [float(x) for x in prefix]
    if not a:
        raise InputError("need at least a_1")
    big_n = len(a)
    for n in range(1, big_n + 1):
        for m in range(1, n):
            if a[n - 1] > a[n - m - 1] + a[m - 1] + 1e-9:
                raise InputError(
                    f"subadditivity violated at (n, m) = ({n - m}, {m}): "
                    f"a_{n} > a_{n - m} + a_{m}"
                )
    running = []
    best = math.inf
    for n in range(1, big_n + 1):
        best = min(best, a[n - 1] / n)
        running.append(best)
    return running[-1], running


def beta_sandwich(
    obs: SubadditiveObservable,
    depth: int,
    max_period: int,
    cap: int = 2**20,
) -> tuple:
    """Two-sided enclosure of the maximal ergodic average of the observable.

    upper = min over n <= depth of (1/n) max over length-n words of f_n:
    the inf-sup side, always an upper bound by subadditivity.  lower = max
    over primitive periodic words w of period p <= max_period of the
    truncated periodic average inf_{k <= K} f_{kp}(w^k)/(kp) with
    K = ceil(depth / p): the sup-inf side.  Because the truncation of the
    inner infimum can only overestimate, the lower side is clamped to the
    upper side, keeping lower <= upper unconditionally.
    """
    if not obs.declared_subadditive:
        raise InputError("beta_sandwich needs a declared-subadditive observable")
    if depth < 1 or max_period < 1:
        raise InputError("depth and max_period must be >= 1")
    ell = obs.alphabet_size
    upper = math.inf
    for n in range(1, depth + 1):
        if ell**n > cap:
            raise ResourceCapError(f"{ell}**{n} words exceed the cap of {cap}")
        sup = max(obs(w) for w in enumerate_words(ell, n))
        upper = min(upper, sup / n)
    lower = -math.inf
    for w in primitive_necklaces(ell, max_period):
        p = len(w)
        reps = max(1, math.ceil(depth / p))
        inner = min(obs(w * k) / (k * p) for k in range(1, reps + 1))
        lower = max(lower, inner)
    lower = min(lower, upper)
    return lower, upper


def subordination_survivors(
    obs: SubadditiveObservable,
    lam: float,
    depth: int,
    tol: float,
    cap: int = 2**20,
) -> dict:
    """Words whose every prefix nearly attains the maximal average lam.

    First verifies the hypothesis sup_w f_n(w) = n*lam within tol at every
    depth; then keeps, level by level, the words w with
    f_m(w[:m]) >= m*lam - tol for all m <= n.  Returns depth -> word set.
    """
    ell = obs.alphabet_size
    if depth < 1:
        raise InputError("depth must be >= 1")
    for n in range(1, depth + 1):
        if ell**n > cap:
            raise ResourceCapError(f"{ell}**{n} words exceed the cap of {cap}")
        sup = max(obs(w) for w in enumerate_words(ell, n))
        if abs(sup - n * lam) > tol * max(1.0, n):
            raise InputError(
                f"hypothesis sup f_n = n*lam fails at depth {n}: "
                f"sup = {sup}, n*lam = {n * lam}"
            )
    survivors = {}
    level = [
        (i,) for i in range(1, ell + 1) if obs((i,)) >= lam - tol
    ]
    survivors[1] = frozenset(level)
    for n in range(2, depth + 1):
        level = [
            w + (i,)
            for w in level
            for i in range(1, ell + 1)
            if obs(w + (i,)) >= n * lam - tol
        ]
        survivors[n] = frozenset(level)
    return survivors

"""Finite words over {1..l}, the shift, the 2^-n metric and de Bruijn graphs.

Words are plain tuples of 1-based integer symbols.  Infinite sequences are
always represented by finite prefixes with an explicit depth, and periodic
sequences by the lexicographically least rotation of a primitive word.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import networkx as nx

from .errors import InputError, ResourceCapError

__all__ = [
    "shift",
    "cylinder_metric",
    "enumerate_words",
    "least_rotation",
    "is_primitive",
    "normalize_periodic",
    "primitive_necklaces",
    "symbol_frequency",
    "WordGraph",
    "strongly_connected_components",
]

DEFAULT_WORD_CAP = 2**24


def shift(w):
    """Drop the first symbol."""
    if len(w) == 0:
        raise InputError("cannot shift the empty word")
    return tuple(w[1:])


def cylinder_metric(x, y) -> float:
    """2^-(first index of disagreement), 1-based; 0 when equal throughout."""
    if len(x) != len(y):
        raise InputError("cylinder_metric needs words of equal length")
    for n, (a, b) in enumerate(zip(x, y), start=1):
        if a != b:
            return 2.0**-n
    return 0.0


def enumerate_words(ell: int, n: int, cap: int = DEFAULT_WORD_CAP):
    """All l^n words of length n in lexicographic order."""
    if ell < 1 or n < 0:
        raise InputError("need alphabet size >= 1 and length >= 0")
    if ell**n > cap:
        raise ResourceCapError(f"{ell}^{n} words exceed the cap of {cap}")
    return product(range(1, ell + 1), repeat=n)


def least_rotation(w):
    """Lexicographically least rotation (Booth would be overkill at this size)."""
    if not w:
        return tuple(w)
    return min(tuple(w[k:] + w[:k]) for k in range(len(w)))


def is_primitive(w) -> bool:
    """True when w is not a power of a strictly shorter word."""
    n = len(w)
    if n == 0:
        return False
    for p in range(1, n):
        if n % p == 0 and w == w[p:] + w[:p]:
            return False
    return True


def normalize_periodic(w):
    """Primitive root in least-rotation normal form."""
    w = tuple(w)
    if not w:
        raise InputError("a periodic orbit needs period >= 1")
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return least_rotation(w[:p])
    return least_rotation(w)


def primitive_necklaces(ell: int, max_period: int):
    """Primitive least-rotation representatives, ordered by (period, lex)."""
    if max_period < 1:
        raise InputError("max_period must be >= 1")
    for p in range(1, max_period + 1):
        for w in enumerate_words(ell, p):
            if w == least_rotation(w) and is_primitive(w):
                yield w


def symbol_frequency(w, i: int) -> float:
    if not w:
        raise InputError("frequency of the empty word is undefined")
    return w.count(i) / len(w)


@dataclass
class WordGraph:
    """De Bruijn-style graph on a set of length-n words.

    There is an edge w -> w' exactly when the two words overlap in n-1
    symbols, i.e. w' = shift(w) + (s,).
    """

    depth: int
    nodes: frozenset
    edges: frozenset = field(default=None)

    def __post_init__(self):
        nodes = frozenset(tuple(w) for w in self.nodes)
        if any(len(w) != self.depth for w in nodes):
            raise InputError("all nodes must have length equal to the depth")
        if self.edges is None:
            by_prefix = {}
            for v in nodes:
                by_prefix.setdefault(v[:-1], []).append(v)
            edges = frozenset(
                (w, v)
                for w in nodes
                if self.depth >= 1
                for v in by_prefix.get(w[1:], ())
            )
        else:
            edges = frozenset((tuple(a), tuple(b)) for a, b in self.edges)
            for a, b in edges:
                if a not in nodes or b not in nodes:
                    raise InputError("edge endpoint is not a node")
                if a[1:] != b[:-1]:
                    raise InputError(f"edge {a}->{b} violates the overlap condition")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges)
        return g

    def cycles(self, length_bound: int):
        """Simple cycles as periodic symbol words (first symbol of each node)."""
        g = self.to_networkx()
        for cyc in nx.simple_cycles(g, length_bound=length_bound):
            yield tuple(node[0] for node in cyc)

    def to_dot(self) -> str:
        def name(w):
            return '"' + "".join(str(s) for s in w) + '"'

        lines = ["digraph words {"]
        for w in sorted(self.nodes):
            lines.append(f"  {name(w)};")
        for a, b in sorted(self.edges):
            lines.append(f"  {name(a)} -> {name(b)};")
        lines.append("}")
        return "\n".join(lines)


def strongly_connected_components(g: WordGraph):
    """SCC partition restricted to components that carry at least one edge,
    so that each returned component supports an infinite orbit."""
    nxg = g.to_networkx()
    out = []
    for comp in nx.strongly_connected_components(nxg):
        comp = frozenset(comp)
        if len(comp) > 1 or any((v, v) in g.edges for v in comp):
            out.append(comp)
    return out

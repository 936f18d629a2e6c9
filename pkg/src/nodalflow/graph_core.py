"""Weighted undirected graphs and their (combinatorial) Laplacians.

Vertices are 0..n-1. Edges are stored canonically: each as (i, j, w) with
i < j, positive weight, sorted lexicographically, no duplicates. Optional
per-vertex diagonal additions (``diag_extra``) model self loops, which add
to the Laplacian diagonal without creating off-diagonal entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotConnected

Edge = tuple[int, int, float]


@dataclass(frozen=True)
class WeightedGraph:
    """Immutable weighted graph on vertices 0..n-1."""

    n: int
    edges: tuple[Edge, ...]
    diag_extra: tuple[float, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one vertex, got n={self.n}")
        canon = []
        for e in self.edges:
            i, j, w = int(e[0]), int(e[1]), float(e[2])
            if i == j:
                raise ValueError(f"self loop ({i},{i}); use diag_extra instead")
            if i > j:
                i, j = j, i
            if not (0 <= i < j < self.n):
                raise ValueError(f"edge ({i},{j}) out of range for n={self.n}")
            if not w > 0:
                raise ValueError(f"edge ({i},{j}) has non-positive weight {w}")
            canon.append((i, j, w))
        canon.sort()
        for a, b in zip(canon, canon[1:]):
            if a[:2] == b[:2]:
                raise ValueError(f"duplicate edge ({a[0]},{a[1]})")
        object.__setattr__(self, "edges", tuple(canon))
        if self.diag_extra == () or self.diag_extra is None:
            object.__setattr__(self, "diag_extra", (0.0,) * self.n)
        else:
            d = tuple(float(x) for x in self.diag_extra)
            if len(d) != self.n:
                raise ValueError(f"diag_extra has length {len(d)}, expected {self.n}")
            if any(x < 0 for x in d):
                raise ValueError("diag_extra entries must be nonnegative")
            object.__setattr__(self, "diag_extra", d)

    @property
    def m(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class LaplacianMatrix:
    """Dense symmetric PSD matrix with a provenance tag saying how it was
    assembled (plain Laplacian, edge flow at sigma, subdivision at sigma...)."""

    matrix: np.ndarray
    provenance: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self):
        return self.matrix.shape


def laplacian(g: WeightedGraph) -> LaplacianMatrix:
    """Assemble L = D - A plus any diagonal additions. Exactly symmetric by
    construction."""
    L = np.zeros((g.n, g.n))
    for i, j, w in g.edges:
        L[i, i] += w
        L[j, j] += w
        L[i, j] -= w
        L[j, i] -= w
    for i, d in enumerate(g.diag_extra):
        L[i, i] += d
    return LaplacianMatrix(L, "laplacian")


def adjacency_lists(g: WeightedGraph) -> list[list[int]]:
    """Neighbor lists (unweighted view), each sorted ascending."""
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for i, j, _ in g.edges:
        adj[i].append(j)
        adj[j].append(i)
    for lst in adj:
        lst.sort()
    return adj


def connected_components(g: WeightedGraph) -> tuple[tuple[int, ...], ...]:
    """Vertex sets of the connected components, each sorted, ordered by
    smallest member."""
    adj = adjacency_lists(g)
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(tuple(sorted(comp)))
    return tuple(comps)


def is_connected(g: WeightedGraph) -> bool:
    return len(connected_components(g)) == 1


def betti_1(g: WeightedGraph) -> int:
    """First Betti number |E| - |V| + 1 of a connected graph."""
    comps = connected_components(g)
    if len(comps) != 1:
        raise NotConnected(f"graph has {len(comps)} components")
    return g.m - g.n + 1

"""Dirichlet eigenvalue problems on vertex subsets.

For an interior set S the boundary is the set of outside vertices adjacent
to S. The Dirichlet matrix keeps the full-graph degrees (boundary edge
weights included) but deletes the rows and columns of everything outside S,
which is what makes restrictions of global eigenvectors satisfy the
Dirichlet eigenvalue equation on their own domains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInterior, NotAComponent
from .graph_core import Edge, LaplacianMatrix, WeightedGraph, adjacency_lists, laplacian
from .spectra import SIGN_TOL, Spectrum, eigendecompose
from .vertex_flow import SubdivisionGraph, limit_graph


@dataclass(frozen=True)
class DirichletProblem:
    """Interior set, its boundary, and the reduced matrix.

    ``interior`` is sorted ascending; matrix row p corresponds to
    interior[p].
    """

    host: WeightedGraph
    interior: tuple[int, ...]
    boundary_vertices: tuple[int, ...]
    boundary_edges: tuple[Edge, ...]
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def dirichlet_problem(g: WeightedGraph, interior) -> DirichletProblem:
    """Reduce the Laplacian of g to the rows and columns of ``interior``."""
    S = sorted(set(int(v) for v in interior))
    if not S:
        raise EmptyInterior("interior vertex set is empty")
    if S[0] < 0 or S[-1] >= g.n:
        raise ValueError(f"interior vertices out of range for n={g.n}")
    in_S = np.zeros(g.n, dtype=bool)
    in_S[S] = True
    boundary = sorted(
        {v for i, j, _ in g.edges for v, u in ((i, j), (j, i)) if in_S[u] and not in_S[v]}
    )
    b_edges = tuple(
        e for e in g.edges if in_S[e[0]] != in_S[e[1]]
    )
    L = laplacian(g).matrix
    idx = np.array(S, dtype=int)
    return DirichletProblem(
        host=g,
        interior=tuple(S),
        boundary_vertices=tuple(boundary),
        boundary_edges=b_edges,
        matrix=L[np.ix_(idx, idx)],
    )


def d_connected_components(g: WeightedGraph, interior) -> tuple[tuple[int, ...], ...]:
    """Components of the interior under paths that avoid the boundary,
    i.e. components of the induced subgraph on the interior set."""
    S = set(int(v) for v in interior)
    if not S:
        raise EmptyInterior("interior vertex set is empty")
    adj = adjacency_lists(g)
    seen: set[int] = set()
    comps = []
    for start in sorted(S):
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if v in S and v not in seen:
                    seen.add(v)
                    stack.append(v)
        comps.append(tuple(sorted(comp)))
    return tuple(comps)


def dirichlet_spectrum(dp: DirichletProblem) -> Spectrum:
    """Eigendecomposition of the reduced matrix."""
    return eigendecompose(dp.matrix)


def is_signed(v: np.ndarray, tol: float = SIGN_TOL) -> bool:
    """True when every entry has the same strict sign (up to a global
    flip)."""
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) <= tol):
        return False
    return bool(np.all(v > 0) or np.all(v < 0))


@dataclass(frozen=True)
class ComponentEigenReport:
    """First Dirichlet eigenpair of one D-connected component."""

    component: tuple[int, ...]
    lambda_1: float
    simple: bool
    signed: bool
    eigenvector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.eigenvector, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "eigenvector", v)


def component_first_eigenpairs(
    g: WeightedGraph, interior
) -> tuple[ComponentEigenReport, ...]:
    """First Dirichlet eigenpair per D-connected component of the interior."""
    reports = []
    for comp in d_connected_components(g, interior):
        spec = dirichlet_spectrum(dirichlet_problem(g, comp))
        reports.append(
            ComponentEigenReport(
                component=comp,
                lambda_1=float(spec.eigenvalues[0]),
                simple=len(spec.group_of(0)) == 1,
                signed=is_signed(spec.eigenvectors[:, 0]),
                eigenvector=spec.eigenvectors[:, 0],
            )
        )
    return tuple(reports)


def restrict_eigenvector(
    sg: SubdivisionGraph, psi: np.ndarray, component
) -> np.ndarray:
    """Restrict a base eigenvector to one strong nodal domain, zero-extended
    over the rest of the subdivision (ghosts included).

    ``component`` must be one of the D-connected components of the base
    vertex set inside the sigma = infinity subdivision graph (these are
    exactly the strong nodal domains); otherwise NotAComponent is raised.
    The result satisfies the Dirichlet eigenvalue equation at psi's
    Rayleigh quotient on the component's interior rows.
    """
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (sg.n_base,):
        raise ValueError(f"expected base vector of length {sg.n_base}")
    comp = tuple(sorted(int(v) for v in component))
    lim = limit_graph(sg)
    comps = d_connected_components(lim, tuple(range(sg.n_base)))
    if comp not in comps:
        raise NotAComponent(f"{comp} is not a D-connected component")
    out = np.zeros(sg.n_total)
    idx = np.array(comp, dtype=int)
    out[idx] = psi[idx]
    return out

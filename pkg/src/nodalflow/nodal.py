"""Eigenpair selection and nodal domain decompositions.

A strong nodal domain is a connected component of the graph with the
sign-change edges (those where the eigenvector takes opposite signs at the
endpoints) removed. The index k of an eigenpair is always normalized down to
the first position of its multiplicity group, so the nodal deficiency
k - nu is well defined even when the eigenvalue is degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroVertex
from .graph_core import Edge, WeightedGraph, betti_1, connected_components, laplacian
from .spectra import Spectrum

# Relative threshold under which an eigenvector entry counts as zero.
ZETA_REL = 1e-10


@dataclass(frozen=True)
class EigenSelection:
    """A chosen eigenpair plus the assumption flags the flows care about.

    k is 1-based and normalized to the smallest index of the eigenvalue's
    multiplicity group; psi is the eigenvector at the requested index.
    """

    k: int
    requested_k: int
    lambda_k: float
    psi: np.ndarray
    simple: bool
    nowhere_zero: bool
    first_index: bool

    def __post_init__(self):
        v = np.asarray(self.psi, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "psi", v)


def zero_vertices(psi: np.ndarray) -> tuple[int, ...]:
    """Indices where |psi_i| <= ZETA_REL * max|psi|."""
    psi = np.asarray(psi, dtype=float)
    zeta = ZETA_REL * np.max(np.abs(psi))
    return tuple(int(i) for i in np.flatnonzero(np.abs(psi) <= zeta))


def select_eigenpair(spectrum: Spectrum, k: int) -> EigenSelection:
    """Pick the k-th (1-based) eigenpair and normalize k to the first index
    of its multiplicity group."""
    if not 1 <= k <= spectrum.n:
        raise ValueError(f"k={k} out of range 1..{spectrum.n}")
    group = spectrum.group_of(k - 1)
    k_norm = group[0] + 1
    psi = spectrum.eigenvectors[:, k - 1]
    return EigenSelection(
        k=k_norm,
        requested_k=k,
        lambda_k=float(spectrum.eigenvalues[k - 1]),
        psi=psi,
        simple=len(group) == 1,
        nowhere_zero=len(zero_vertices(psi)) == 0,
        first_index=(k == k_norm),
    )


def sign_change_edges(g: WeightedGraph, psi: np.ndarray) -> tuple[Edge, ...]:
    """Edges whose endpoint values have strictly opposite signs.

    Raises ZeroVertex if any entry of psi is (relatively) zero, since signs
    are then ill defined.
    """
    zeros = zero_vertices(psi)
    if zeros:
        raise ZeroVertex(zeros)
    return tuple(e for e in g.edges if psi[e[0]] * psi[e[1]] < 0)


@dataclass(frozen=True)
class NodalDecomposition:
    strong_domains: tuple[tuple[int, ...], ...]
    weak_domains: tuple[tuple[int, ...], ...]
    sign_change_edges: tuple[Edge, ...]
    nu: int
    deficiency: int


def _components_from_edges(n: int, edges) -> tuple[tuple[int, ...], ...]:
    return connected_components(WeightedGraph(n, tuple(edges)))


def nodal_decomposition(g: WeightedGraph, sel: EigenSelection) -> NodalDecomposition:
    """Strong and weak nodal domains of the selected eigenvector.

    Strong domains partition the vertices after removing sign-change edges;
    weak domains keep every edge whose endpoint product is >= 0. For a
    nowhere-zero eigenvector the two coincide.
    """
    psi = sel.psi
    e_pm = sign_change_edges(g, psi)
    pm = {(i, j) for i, j, _ in e_pm}
    strong = _components_from_edges(g.n, [e for e in g.edges if (e[0], e[1]) not in pm])
    weak = _components_from_edges(g.n, [e for e in g.edges if psi[e[0]] * psi[e[1]] >= 0])
    nu = len(strong)
    return NodalDecomposition(
        strong_domains=strong,
        weak_domains=weak,
        sign_change_edges=e_pm,
        nu=nu,
        deficiency=sel.k - nu,
    )


def strong_domains_allowing_zeros(
    g: WeightedGraph, psi: np.ndarray
) -> tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]:
    """Reporting-path variant of the strong domain count.

    Vertices with (relatively) zero eigenvector entries belong to no domain;
    the remaining vertices are grouped by edges with strictly positive
    endpoint product. Returns (domains, zero_vertices). The strict
    operations refuse zero vertices instead of using this.
    """
    psi = np.asarray(psi, dtype=float)
    zeros = zero_vertices(psi)
    zset = set(zeros)
    adj: dict[int, list[int]] = {i: [] for i in range(g.n) if i not in zset}
    for i, j, _ in g.edges:
        if i in zset or j in zset:
            continue
        if psi[i] * psi[j] > 0:
            adj[i].append(j)
            adj[j].append(i)
    seen: set[int] = set()
    domains = []
    for start in sorted(adj):
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        comp = []
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        domains.append(tuple(sorted(comp)))
    return tuple(domains), zeros


@dataclass(frozen=True)
class CourantBettiReport:
    """Bounds k - beta_1 <= nu <= k on the strong domain count.

    The lower bound is only claimed by the theory for simple eigenvalues
    with nowhere-zero eigenvectors; lower_applicable records that.
    """

    k: int
    nu: int
    beta_1: int
    upper_ok: bool
    lower_ok: bool
    lower_applicable: bool


def courant_and_betti_check(
    g: WeightedGraph, sel: EigenSelection, nd: NodalDecomposition
) -> CourantBettiReport:
    b1 = betti_1(g)
    return CourantBettiReport(
        k=sel.k,
        nu=nd.nu,
        beta_1=b1,
        upper_ok=nd.nu <= sel.k,
        lower_ok=nd.nu >= sel.k - b1,
        lower_applicable=sel.simple and sel.nowhere_zero,
    )


def perturb_to_nonzero(
    g: WeightedGraph, magnitude: float | None = None, seed: int = 0
) -> WeightedGraph:
    """Add a small random diagonal to break exact eigenvector zeros.

    Per-vertex additions are m + uniform(-m, m) with m defaulting to
    1e-8 * ||L||_inf. The constant +m part only keeps diag_extra
    nonnegative (a uniform shift leaves eigenvectors alone); the random
    part breaks the symmetries behind exact zeros. Never applied
    implicitly; callers opt in and re-run the eigensolver themselves.
    """
    if magnitude is None:
        L = laplacian(g).matrix
        magnitude = 1e-8 * float(np.max(np.sum(np.abs(L), axis=1)))
    if magnitude <= 0:
        raise ValueError("perturbation magnitude must be positive")
    rng = np.random.default_rng(seed)
    bump = magnitude + rng.uniform(-magnitude, magnitude, size=g.n)
    new_diag = tuple(d + b for d, b in zip(g.diag_extra, bump))
    return WeightedGraph(g.n, g.edges, new_diag)

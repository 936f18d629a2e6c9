"""Vertex-based spectral flow on the eigenvector subdivision graph.

Every sign-change edge (i, j) is subdivided by a ghost vertex; edge weights
are reorganized as a function of sigma so that the bilinear form

    B_sigma(u, v) = <u, L_sub(sigma) v> + sigma * <u, v>_ghosts

has the extended eigenvector as a sigma-independent eigenvector at lambda_k.
Ghost vertices are appended after the base vertices in ascending
lexicographic order of their edges, which keeps every matrix and output
bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateEigenvalue
from .graph_core import Edge, LaplacianMatrix, WeightedGraph, laplacian
from .nodal import EigenSelection, sign_change_edges
from .spectra import FlowResult, eigendecompose, group_tolerance, track_branches


@dataclass(frozen=True)
class SubdivisionGraph:
    """Base graph plus one ghost vertex per sign-change edge.

    sign_edges[p] = (i, j, w) gets ghost vertex n_base + p; q[p] holds
    (q_ij, q_ji) with q_ij = -psi_i / psi_j.
    """

    base: WeightedGraph
    sign_edges: tuple[Edge, ...]
    q: tuple[tuple[float, float], ...]
    psi: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.psi, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "psi", v)

    @property
    def n_base(self) -> int:
        return self.base.n

    @property
    def n_ghost(self) -> int:
        return len(self.sign_edges)

    @property
    def n_total(self) -> int:
        return self.base.n + len(self.sign_edges)

    def ghost_index(self, position: int) -> int:
        return self.base.n + position


def subdivide(g: WeightedGraph, sel: EigenSelection) -> SubdivisionGraph:
    """Build the subdivision of g along sel.psi's sign-change edges."""
    psi = sel.psi
    edges = sign_change_edges(g, psi)
    q = tuple((float(-psi[i] / psi[j]), float(-psi[j] / psi[i])) for i, j, _ in edges)
    return SubdivisionGraph(base=g, sign_edges=edges, q=q, psi=psi)


def graph_at(sg: SubdivisionGraph, sigma: float) -> WeightedGraph:
    """The weighted subdivision graph at flow parameter sigma >= 0.

    Sign-change edges keep weight w / (1 + sigma); their ghost half-edges
    carry (sigma / (1 + sigma)) * w * (1 + q) with q = q_ji on the i side
    and q_ij on the j side. At sigma = 0 the ghost edges vanish (zero
    weight means absence) and the base graph is recovered on the first
    n_base vertices.
    """
    if sigma < 0:
        raise ValueError(f"sigma={sigma} must be nonnegative")
    pm = {(i, j) for i, j, _ in sg.sign_edges}
    edges = [e for e in sg.base.edges if (e[0], e[1]) not in pm]
    s = sigma / (1.0 + sigma)
    for p, (i, j, w) in enumerate(sg.sign_edges):
        q_ij, q_ji = sg.q[p]
        gh = sg.ghost_index(p)
        edges.append((i, j, w / (1.0 + sigma)))
        if s > 0:
            edges.append((i, gh, s * w * (1.0 + q_ji)))
            edges.append((j, gh, s * w * (1.0 + q_ij)))
    diag = tuple(sg.base.diag_extra) + (0.0,) * sg.n_ghost
    return WeightedGraph(sg.n_total, tuple(edges), diag)


def limit_graph(sg: SubdivisionGraph) -> WeightedGraph:
    """The sigma -> infinity subdivision graph: sign-change edges are gone
    and the ghost half-edges carry their full weight w * (1 + q)."""
    pm = {(i, j) for i, j, _ in sg.sign_edges}
    edges = [e for e in sg.base.edges if (e[0], e[1]) not in pm]
    for p, (i, j, w) in enumerate(sg.sign_edges):
        q_ij, q_ji = sg.q[p]
        gh = sg.ghost_index(p)
        edges.append((i, gh, w * (1.0 + q_ji)))
        edges.append((j, gh, w * (1.0 + q_ij)))
    diag = tuple(sg.base.diag_extra) + (0.0,) * sg.n_ghost
    return WeightedGraph(sg.n_total, tuple(edges), diag)


def bilinear_matrix(sg: SubdivisionGraph, sigma: float) -> LaplacianMatrix:
    """Matrix of B_sigma: the subdivision Laplacian plus sigma on the ghost
    diagonal. PSD for every sigma >= 0."""
    M = laplacian(graph_at(sg, sigma)).matrix.copy()
    for p in range(sg.n_ghost):
        gh = sg.ghost_index(p)
        M[gh, gh] += sigma
    return LaplacianMatrix(M, f"subdivision(sigma={sigma:g})")


def extension_coefficients(sg: SubdivisionGraph) -> tuple[tuple[float, float], ...]:
    """(a_ij, a_ji) per sign-change edge with a_ij = 1 / (1 + q_ij); the
    pair sums to 1."""
    return tuple(
        (1.0 / (1.0 + q_ij), 1.0 / (1.0 + q_ji)) for q_ij, q_ji in sg.q
    )


def extend(sg: SubdivisionGraph, u: np.ndarray) -> np.ndarray:
    """Extend a base vector to the subdivision: ghost entry a_ij u_i +
    a_ji u_j. The selected eigenvector extends by zeros."""
    u = np.asarray(u, dtype=float)
    if u.shape != (sg.n_base,):
        raise ValueError(f"expected base vector of length {sg.n_base}")
    out = np.zeros(sg.n_total)
    out[: sg.n_base] = u
    coeffs = extension_coefficients(sg)
    for p, (i, j, _) in enumerate(sg.sign_edges):
        a_ij, a_ji = coeffs[p]
        out[sg.ghost_index(p)] = a_ij * u[i] + a_ji * u[j]
    return out


def _vertex_grid(sigma_max: float, steps: int) -> np.ndarray:
    return np.concatenate(
        [[0.0], np.logspace(-3.0, np.log10(sigma_max), steps)]
    )


def _dirichlet_values(sg: SubdivisionGraph) -> np.ndarray:
    """Sorted eigenvalues of the exact sigma = infinity Dirichlet problem
    on the base vertex set."""
    from .dirichlet import dirichlet_problem

    dp = dirichlet_problem(limit_graph(sg), tuple(range(sg.n_base)))
    return eigendecompose(dp.matrix).eigenvalues


def _dirichlet_gap(sg: SubdivisionGraph, lambda_k: float) -> float:
    """Distance from lambda_k to the nearest other distinct eigenvalue of
    the exact sigma = infinity Dirichlet spectrum. Falls back to
    max(lambda_k, 1) if every Dirichlet eigenvalue equals lambda_k."""
    vals = _dirichlet_values(sg)
    others = vals[np.abs(vals - lambda_k) > group_tolerance(lambda_k)]
    if len(others) == 0:
        return max(lambda_k, 1.0)
    return float(np.min(np.abs(others - lambda_k)))


def _classify_origins(
    fr: FlowResult, n_base: int, converging: frozenset[int]
) -> tuple[str, ...]:
    """Label each branch by where it started: 'ghost' for the zero-cluster
    branches that are not L's kernel, 'spectrum' otherwise.

    The sigma = 0 zero eigenspace is spanned by L's kernel plus one
    coordinate per ghost, and the analytic branch vectors mix these
    directions, so the kernel continuation is not readable from support
    alone. The kernel label goes to the cluster branch whose start vector
    best matches the constant vector on the base, chosen among the
    branches that do not converge to the reference value: the limits that
    survive at lambda_k exist only because ghosts were inserted, so they
    are ghost-attributed."""
    start_vals = fr.branch_values[:, 0]
    tol0 = group_tolerance(0.0)
    zero_cluster = [b for b in range(fr.n_branches) if abs(start_vals[b]) <= tol0]
    dim = fr.branch_vectors.shape[2]
    const = np.zeros(dim)
    const[:n_base] = 1.0 / np.sqrt(n_base)
    origins = ["spectrum"] * fr.n_branches
    if zero_cluster:
        overlaps = {
            b: abs(float(fr.branch_vectors[b, 0] @ const)) for b in zero_cluster
        }
        pool = [b for b in zero_cluster if b not in converging] or zero_cluster
        kernel_branch = max(pool, key=lambda b: overlaps[b])
        for b in zero_cluster:
            if b != kernel_branch:
                origins[b] = "ghost"
    return tuple(origins)


def run_vertex_flow(
    g: WeightedGraph,
    sel: EigenSelection,
    *,
    sigma_max: float = 1e4,
    steps: int = 200,
    allow_degenerate: bool = False,
    bracket_width: float = 1e-6,
    threads: int | None = None,
) -> FlowResult:
    """Track all branches of B_sigma from sigma = 0 toward the Dirichlet
    limit.

    The grid is [0] followed by ``steps`` log-spaced points on
    [1e-3, sigma_max]. Because convergence in sigma is only O(1/sigma),
    converged_count is certified against the exact sigma = infinity
    Dirichlet spectrum rather than by tightening sigma: the lowest final
    branch values are paired in sorted order with the Dirichlet
    eigenvalues, and a branch counts as converged to lambda_k when its
    paired limit equals lambda_k and the residual is below
    max(conv_tol, gap/2), conv_tol = max(1e-6, gap/100). branch_origins
    labels every branch 'ghost' or 'spectrum'.
    """
    from .edge_flow import _check_assumptions

    warnings = _check_assumptions(sel, allow_degenerate)
    sg = subdivide(g, sel)
    grid = _vertex_grid(sigma_max, steps)
    fr = track_branches(
        lambda s: bilinear_matrix(sg, s),
        grid,
        sel.lambda_k,
        bracket_width=bracket_width,
        threads=threads,
        expect_monotone=True,
    )
    dvals = _dirichlet_values(sg)
    gtol = group_tolerance(sel.lambda_k)
    others = dvals[np.abs(dvals - sel.lambda_k) > gtol]
    gap = float(np.min(np.abs(others - sel.lambda_k))) if others.size else max(
        sel.lambda_k, 1.0
    )
    accept = max(max(1e-6, gap / 100.0), gap / 2.0)
    finals = fr.branch_values[:, -1]
    lowest = np.argsort(finals)[: len(dvals)]
    converging = set()
    for rank, b in enumerate(lowest):
        mu = dvals[rank]
        if abs(mu - sel.lambda_k) <= gtol and abs(finals[b] - mu) <= accept:
            converging.add(int(b))
    return replace(
        fr,
        converged_count=len(converging),
        branch_origins=_classify_origins(fr, sg.n_base, frozenset(converging)),
        warnings=fr.warnings + warnings,
    )


def check_edge_equivalence(
    g: WeightedGraph,
    sel: EigenSelection,
    sigma: float,
    trials: int = 100,
    seed: int = 20240,
) -> float:
    """Compare B_sigma on extended vectors against <u, L v> plus the scaled
    edge-perturbation blocks, over random pairs (u, v).

    Returns the maximum deviation divided by max(1, |lhs|), directly
    comparable to the 1e-10 contract.
    """
    sg = subdivide(g, sel)
    B = bilinear_matrix(sg, sigma).matrix
    L = laplacian(g).matrix
    coeffs = extension_coefficients(sg)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        u = rng.standard_normal(g.n)
        v = rng.standard_normal(g.n)
        ut, vt = extend(sg, u), extend(sg, v)
        lhs = float(ut @ B @ vt)
        rhs = float(u @ L @ v)
        for p, (i, j, w) in enumerate(sg.sign_edges):
            q_ij, q_ji = sg.q[p]
            a_ij, a_ji = coeffs[p]
            # <u, P_ij v> for the rank-1 block of the edge-based flow.
            pij = w * (q_ji * u[i] * v[i] + u[i] * v[j] + u[j] * v[i] + q_ij * u[j] * v[j])
            rhs += sigma * (a_ij * a_ji / w) * pij
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return worst


def derivative_identity_check(
    sg: SubdivisionGraph, sigma: float, u: np.ndarray, h: float = 1e-5
) -> float:
    """Relative residual between the finite-difference branch slope at a
    simple eigenvalue and the closed-form derivative (sign-change edge sum
    plus ghost mass).

    u must be (close to) an eigenvector of B_sigma; DegenerateEigenvalue is
    raised when its eigenvalue is not simple there.
    """
    if sigma - h < 0:
        raise ValueError("sigma must be at least h for a central difference")
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)

    spec = eigendecompose(bilinear_matrix(sg, sigma))
    j = int(np.argmax(np.abs(spec.eigenvectors.T @ u)))
    if len(spec.group_of(j)) != 1:
        raise DegenerateEigenvalue(
            f"eigenvalue {spec.eigenvalues[j]:.12g} at sigma={sigma:g} is degenerate"
        )
    u = spec.eigenvectors[:, j]

    def branch_value(s: float) -> float:
        sp = eigendecompose(bilinear_matrix(sg, s))
        return float(sp.eigenvalues[np.argmax(np.abs(sp.eigenvectors.T @ u))])

    fd = (branch_value(sigma + h) - branch_value(sigma - h)) / (2.0 * h)

    s2 = (1.0 + sigma) ** 2
    pred = 0.0
    for p, (i, j2, w) in enumerate(sg.sign_edges):
        q_ij, q_ji = sg.q[p]
        gh = sg.ghost_index(p)
        term = u[gh] + q_ji * u[gh] - q_ji * u[i] - u[j2]
        pred += (w / s2) * q_ij * term * term
    pred += float(np.sum(u[sg.n_base:] ** 2))

    return abs(fd - pred) / max(1.0, abs(fd), abs(pred))

"""Edge-based spectral flow: L_sigma = L + sigma * P.

P is assembled from one rank-1 PSD block per sign-change edge; the selected
eigenvector psi spans its kernel, so the branch through (0, lambda_k) stays
constant while every other branch is non-decreasing in sigma. At sigma = 1
the multiplicity of lambda_k equals the strong nodal domain count.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import AssumptionViolated, DegenerateEigenvalue, FlowConsistencyError
from .graph_core import LaplacianMatrix, WeightedGraph, laplacian
from .nodal import EigenSelection, sign_change_edges
from .spectra import (
    CROSS_TOL_REL,
    FlowResult,
    eigendecompose,
    multiplicity_of,
    track_branches,
)


@dataclass(frozen=True)
class EdgePerturbation:
    """Per-edge blocks (i, j, w, q_ij, q_ji) and the assembled matrix P.

    q_ij = -psi_i / psi_j is positive exactly because (i, j) is a
    sign-change edge; q_ij * q_ji = 1, so each block is PSD of rank 1 with
    kernel spanned by (psi_i, psi_j).
    """

    blocks: tuple[tuple[int, int, float, float, float], ...]
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def build_perturbation(g: WeightedGraph, sel: EigenSelection) -> EdgePerturbation:
    """Assemble P from the sign-change edges of the selected eigenvector."""
    psi = sel.psi
    blocks = []
    P = np.zeros((g.n, g.n))
    for i, j, w in sign_change_edges(g, psi):
        q_ij = -psi[i] / psi[j]
        q_ji = -psi[j] / psi[i]
        blocks.append((i, j, w, float(q_ij), float(q_ji)))
        P[i, i] += w * q_ji
        P[j, j] += w * q_ij
        P[i, j] += w
        P[j, i] += w
    return EdgePerturbation(tuple(blocks), P)


def flow_matrix(g: WeightedGraph, pert: EdgePerturbation, sigma: float) -> LaplacianMatrix:
    """L + sigma * P for sigma in [0, 1]."""
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma={sigma} outside [0, 1]")
    L = laplacian(g).matrix
    return LaplacianMatrix(L + sigma * pert.matrix, f"edge_flow(sigma={sigma:g})")


def sign_preserving_graph(g: WeightedGraph, pert: EdgePerturbation) -> WeightedGraph:
    """The graph with sign-change edges removed and their weight folded into
    the diagonal as self loops of weight (1 + q_ji) w at i and (1 + q_ij) w
    at j. Its Laplacian equals the flow matrix at sigma = 1."""
    pm = {(i, j) for i, j, _, _, _ in pert.blocks}
    kept = tuple(e for e in g.edges if (e[0], e[1]) not in pm)
    diag = list(g.diag_extra)
    for i, j, w, q_ij, q_ji in pert.blocks:
        diag[i] += (1.0 + q_ji) * w
        diag[j] += (1.0 + q_ij) * w
    return WeightedGraph(g.n, kept, tuple(diag))


def _check_assumptions(sel: EigenSelection, allow_degenerate: bool) -> tuple[str, ...]:
    if not sel.nowhere_zero:
        raise AssumptionViolated("nowhere_zero", "eigenvector has zero entries")
    if not sel.simple:
        if not allow_degenerate:
            raise AssumptionViolated(
                "simple", f"lambda_{sel.k} = {sel.lambda_k:.12g} is degenerate"
            )
        return ("degenerate_lambda_k",)
    return ()


@dataclass(frozen=True)
class DirectCount:
    """Strong nodal domain count read off the sigma = 1 matrix.

    deficiency is None when lambda_k is degenerate: the count itself is
    still the multiplicity identity's nu, but the deficiency interpretation
    requires a simple eigenvalue.
    """

    k: int
    lambda_k: float
    nu: int
    deficiency: int | None
    degenerate_warning: bool


def nodal_count_direct(
    g: WeightedGraph, sel: EigenSelection, *, allow_degenerate: bool = False
) -> DirectCount:
    """nu(psi) = multiplicity of lambda_k in spec(L + P), no sweep needed."""
    _check_assumptions(sel, allow_degenerate)
    pert = build_perturbation(g, sel)
    spec1 = eigendecompose(flow_matrix(g, pert, 1.0))
    nu = multiplicity_of(spec1, sel.lambda_k)
    return DirectCount(
        k=sel.k,
        lambda_k=sel.lambda_k,
        nu=nu,
        deficiency=(sel.k - nu) if sel.simple else None,
        degenerate_warning=not sel.simple,
    )


def run_edge_flow(
    g: WeightedGraph,
    sel: EigenSelection,
    *,
    steps: int = 200,
    allow_degenerate: bool = False,
    bracket_width: float = 1e-6,
    threads: int | None = None,
) -> FlowResult:
    """Track all branches of L + sigma * P over sigma in [0, 1].

    converged_count is taken from the exact sigma = 1 spectrum. The branch
    count identity converged + (crossings from below) = k is asserted; for
    a degenerate lambda_k (allow_degenerate=True) a failure is recorded as
    a warning instead of raised, since the identity is only guaranteed for
    simple eigenvalues.
    """
    warnings = _check_assumptions(sel, allow_degenerate)
    pert = build_perturbation(g, sel)
    grid = np.linspace(0.0, 1.0, steps)
    fr = track_branches(
        lambda s: flow_matrix(g, pert, s),
        grid,
        sel.lambda_k,
        bracket_width=bracket_width,
        threads=threads,
        expect_monotone=True,
    )
    spec1 = eigendecompose(flow_matrix(g, pert, 1.0))
    nu = multiplicity_of(spec1, sel.lambda_k)

    cross_tol = CROSS_TOL_REL * max(1.0, abs(sel.lambda_k))
    from_below = [
        c for c in fr.crossings
        if fr.branch_values[c.branch, 0] < sel.lambda_k - cross_tol
    ]
    identity_ok = (nu + len(from_below)) == sel.k
    if not identity_ok:
        msg = (
            f"count identity failed: converged {nu} + crossings {len(from_below)}"
            f" != k {sel.k}"
        )
        if sel.simple:
            raise FlowConsistencyError(msg)
        warnings = warnings + (msg,)

    return replace(
        fr,
        converged_count=nu,
        warnings=fr.warnings + warnings,
        count_identity_ok=identity_ok,
    )


def derivative_identity_check(
    g: WeightedGraph,
    pert: EdgePerturbation,
    sigma: float,
    u: np.ndarray,
    h: float = 1e-5,
) -> float:
    """Relative residual between the finite-difference branch slope of
    L + sigma * P at a simple eigenvalue and the per-edge closed form
    sum w * (sqrt(q_ji) u_i + sqrt(q_ij) u_j)^2.

    u must be (close to) an eigenvector of L + sigma * P;
    DegenerateEigenvalue is raised when its eigenvalue is not simple there.
    """
    if sigma - h < 0 or sigma + h > 1:
        raise ValueError("sigma must lie in [h, 1 - h] for a central difference")
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)

    spec = eigendecompose(flow_matrix(g, pert, sigma))
    j = int(np.argmax(np.abs(spec.eigenvectors.T @ u)))
    if len(spec.group_of(j)) != 1:
        raise DegenerateEigenvalue(
            f"eigenvalue {spec.eigenvalues[j]:.12g} at sigma={sigma:g} is degenerate"
        )
    u = spec.eigenvectors[:, j]

    def branch_value(s: float) -> float:
        sp = eigendecompose(flow_matrix(g, pert, s))
        return float(sp.eigenvalues[np.argmax(np.abs(sp.eigenvectors.T @ u))])

    fd = (branch_value(sigma + h) - branch_value(sigma - h)) / (2.0 * h)

    pred = 0.0
    for i, j2, w, q_ij, q_ji in pert.blocks:
        term = np.sqrt(q_ji) * u[i] + np.sqrt(q_ij) * u[j2]
        pred += w * term * term

    return abs(fd - pred) / max(1.0, abs(fd), abs(pred))

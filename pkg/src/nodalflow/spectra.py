"""Dense symmetric eigendecomposition and eigenvalue branch tracking.

Branches of a one-parameter matrix family sigma -> M(sigma) are followed
across a grid by maximum-weight bipartite matching on eigenvector overlaps.
Intervals where the best matching is ambiguous (overlap below ``OVERLAP_MIN``)
are bisected adaptively down to a minimum step; degenerate eigenvalue
clusters are matched as whole subspaces and re-aligned by orthogonal
Procrustes so stored branch vectors stay continuous through them.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import EigFailure
from .graph_core import LaplacianMatrix

# Relative tolerance for clustering eigenvalues into multiplicity groups.
GROUP_TOL_REL = 1e-8
# Minimum eigenvector overlap for an unambiguous branch match.
OVERLAP_MIN = 0.5
# Relative margin required on both sides of a reference value before a sign
# change counts as a crossing (keeps tangencies out).
CROSS_TOL_REL = 1e-7
# Entries smaller than this are skipped by the sign-normalization convention.
SIGN_TOL = 1e-12


def group_tolerance(value: float) -> float:
    return GROUP_TOL_REL * max(1.0, abs(value))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues ascending, orthonormal eigenvector columns, and indices
    clustered into multiplicity groups."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for name in ("eigenvalues", "eigenvectors"):
            a = np.asarray(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def group_of(self, index: int) -> tuple[int, ...]:
        for g in self.groups:
            if index in g:
                return g
        raise IndexError(index)


def _as_matrix(M) -> np.ndarray:
    if isinstance(M, LaplacianMatrix):
        return M.matrix
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if np.max(np.abs(A - A.T)) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    return A


def _sign_normalize(vecs: np.ndarray) -> np.ndarray:
    """Flip each column so its first entry larger than SIGN_TOL in absolute
    value is positive."""
    out = vecs.copy()
    for c in range(out.shape[1]):
        col = out[:, c]
        idx = np.flatnonzero(np.abs(col) > SIGN_TOL)
        if idx.size and col[idx[0]] < 0:
            out[:, c] = -col
    return out


def _cluster(vals: np.ndarray) -> tuple[tuple[int, ...], ...]:
    groups = []
    cur = [0]
    for i in range(1, len(vals)):
        if vals[i] - vals[i - 1] <= group_tolerance(vals[i]):
            cur.append(i)
        else:
            groups.append(tuple(cur))
            cur = [i]
    groups.append(tuple(cur))
    return tuple(groups)


def eigendecompose(M) -> Spectrum:
    """Full eigendecomposition of a dense symmetric matrix.

    Eigenvalues come back ascending; eigenvectors are orthonormal columns
    with a deterministic sign convention.
    """
    A = _as_matrix(M)
    try:
        vals, vecs = scipy.linalg.eigh(A)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise EigFailure(str(exc)) from exc
    vecs = _sign_normalize(vecs)
    return Spectrum(vals, vecs, _cluster(vals))


def multiplicity_of(spectrum: Spectrum, value: float) -> int:
    """Number of eigenvalues within the relative group tolerance of value."""
    return int(np.sum(np.abs(spectrum.eigenvalues - value) <= group_tolerance(value)))


@dataclass(frozen=True)
class BranchCrossing:
    """One strict transversal crossing of the reference value, bracketed in
    sigma."""

    branch: int
    sigma_lo: float
    sigma_hi: float
    reference: float


@dataclass(frozen=True)
class FlowResult:
    """Tracked eigenvalue branches of a matrix family over a sigma grid.

    branch_values[b, t] is branch b at sigma_grid[t]; branch_vectors[b, t]
    is its (sign-aligned) eigenvector there. The branch index b is the
    eigenvalue position at the first grid point.
    """

    sigma_grid: np.ndarray
    branch_values: np.ndarray
    branch_vectors: np.ndarray
    reference_value: float
    crossings: tuple[BranchCrossing, ...]
    converged_count: int
    refinement_exhausted: bool = False
    block_matches: tuple = ()
    branch_origins: tuple[str, ...] | None = None
    warnings: tuple[str, ...] = ()
    count_identity_ok: bool | None = None

    def __post_init__(self):
        for name in ("sigma_grid", "branch_values", "branch_vectors"):
            a = np.asarray(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n_branches(self) -> int:
        return self.branch_values.shape[0]


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        raw = os.environ.get("NODALFLOW_THREADS", "0")
        try:
            threads = int(raw)
        except ValueError:
            threads = 1
    if threads == 0:
        threads = min(os.cpu_count() or 1, 8)
    return max(1, threads)


class _Node:
    """Mutable per-grid-point record used while walking the grid."""

    __slots__ = ("sigma", "vals", "vecs", "groups", "group_of")

    def __init__(self, sigma: float, spec: Spectrum):
        self.sigma = sigma
        self.vals = spec.eigenvalues
        self.vecs = spec.eigenvectors.copy()
        self.groups = spec.groups
        self.group_of = {}
        for g in spec.groups:
            for i in g:
                self.group_of[i] = g


def _procrustes(Vb_block: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Orthogonal R minimizing ||Vb_block R - target||_F."""
    M = Vb_block.T @ target
    U, _, Vt = scipy.linalg.svd(M)
    return U @ Vt


def _match_step(a: _Node, b: _Node, overlap_min: float, first: bool):
    """Match branches between adjacent nodes.

    Returns (ok, perm, block_events). perm[i] is the column of b continuing
    column i of a. Degenerate clusters are compared as subspaces; equal-size
    full block maps get the arriving basis rotated into alignment. On
    success, b.vecs (and a.vecs when first) may be updated in place.
    """
    O = np.abs(a.vecs.T @ b.vecs)
    rows, cols = linear_sum_assignment(-O)
    perm = np.empty(len(rows), dtype=int)
    perm[rows] = cols

    block_events = []
    rotations = []  # (Hb sorted tuple, target matrix)
    checked_blocks = set()
    for i in range(len(perm)):
        if O[i, perm[i]] >= overlap_min:
            continue
        Ga = a.group_of[i]
        Hb = b.group_of[perm[i]]
        if len(Ga) == 1 and len(Hb) == 1:
            return False, perm, []
        key = (Ga, Hb)
        if key in checked_blocks:
            continue
        checked_blocks.add(key)
        images = {int(perm[g]) for g in Ga}
        if len(Ga) <= len(Hb):
            if not images <= set(Hb):
                return False, perm, []
        else:
            preimages = {g for g in Ga if perm[g] in set(Hb)}
            if len(preimages) < len(Hb):
                return False, perm, []
        A = a.vecs[:, list(Ga)].T @ b.vecs[:, list(Hb)]
        s = scipy.linalg.svdvals(A)
        k = min(len(Ga), len(Hb))
        if s[k - 1] < overlap_min:
            return False, perm, []
        block_events.append((b.sigma, Ga, Hb))
        if len(Ga) == len(Hb) and images == set(Hb):
            # Columns of the target ordered to match Hb's column order.
            order = sorted(range(len(Ga)), key=lambda t: perm[Ga[t]])
            target = a.vecs[:, [Ga[t] for t in order]]
            rotations.append((tuple(sorted(Hb)), target))

    for Hb, target in rotations:
        cols_b = list(Hb)
        R = _procrustes(b.vecs[:, cols_b], target)
        b.vecs[:, cols_b] = b.vecs[:, cols_b] @ R

    if first:
        # The starting basis inside a degenerate cluster is solver-arbitrary;
        # align it retroactively with where the branches actually go.
        for Ga in a.groups:
            if len(Ga) == 1:
                continue
            cols_a = list(Ga)
            target = b.vecs[:, [int(perm[g]) for g in cols_a]]
            R = _procrustes(a.vecs[:, cols_a], target)
            a.vecs[:, cols_a] = a.vecs[:, cols_a] @ R

    # Sign-align the continuation for smooth stored branch vectors.
    for i in range(len(perm)):
        if a.vecs[:, i] @ b.vecs[:, perm[i]] < 0:
            b.vecs[:, perm[i]] = -b.vecs[:, perm[i]]
    return True, perm, block_events


def _locate_branch(spec: Spectrum, v: np.ndarray) -> int:
    return int(np.argmax(np.abs(spec.eigenvectors.T @ v)))


def _bracket_crossing(flow, lo, hi, v_lo, sign_lo, reference, width):
    """Narrow a crossing bracket by bisection, following the branch by
    eigenvector continuation from the left end."""
    v = v_lo
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        spec = eigendecompose(flow(mid))
        j = _locate_branch(spec, v)
        d = spec.eigenvalues[j] - reference
        if d == 0.0 or (d > 0) == (sign_lo > 0):
            if d != 0.0:
                lo = mid
                v = spec.eigenvectors[:, j]
            else:
                lo = mid
        else:
            hi = mid
    return lo, hi


def track_branches(
    flow_matrix,
    sigma_grid,
    reference_value: float,
    *,
    overlap_min: float = OVERLAP_MIN,
    converged_tol: float | None = None,
    bracket_width: float | None = None,
    threads: int | None = None,
    expect_monotone: bool = False,
) -> FlowResult:
    """Track all eigenvalue branches of ``flow_matrix(sigma)`` over a grid.

    Parameters
    ----------
    flow_matrix : callable sigma -> LaplacianMatrix (or ndarray)
    sigma_grid : strictly increasing grid; refined adaptively where needed
    reference_value : horizontal line whose crossings are detected
    overlap_min : minimum eigenvector overlap for an unambiguous match
    converged_tol : tolerance for counting branches at the reference value
        at the final sigma (default: relative group tolerance)
    bracket_width : when set, each crossing bracket is narrowed to this
        width by bisection
    threads : grid eigendecompositions run in a thread pool of this size
        (None reads NODALFLOW_THREADS; 0 means auto)
    expect_monotone : when the family is known non-decreasing, a matched
        step where some branch value drops is treated as an unresolved
        avoided crossing (the eigenvectors exchanged across the step) and
        the interval is refined like a matching failure

    Refinement floors out at 1e-6 * max(min(1, span), sigma), so
    log-spaced grids stay refinable near the origin; an interval at the
    floor that still fails sets refinement_exhausted instead.
    """
    sigmas = [float(s) for s in sigma_grid]
    if len(sigmas) < 2 or any(s1 >= s2 for s1, s2 in zip(sigmas, sigmas[1:])):
        raise ValueError("sigma grid must be strictly increasing with >= 2 points")
    span = sigmas[-1] - sigmas[0]
    nthreads = _resolve_threads(threads)

    def evaluate(sigma: float) -> _Node:
        return _Node(sigma, eigendecompose(flow_matrix(sigma)))

    if nthreads > 1 and len(sigmas) > 8:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            nodes = list(pool.map(evaluate, sigmas))
    else:
        nodes = [evaluate(s) for s in sigmas]

    perms: list[np.ndarray] = []
    block_matches: list = []
    refinement_exhausted = False
    t = 0
    while t < len(nodes) - 1:
        a, b = nodes[t], nodes[t + 1]
        ok, perm, events = _match_step(a, b, overlap_min, first=(t == 0))
        if ok and expect_monotone:
            scale = max(1.0, abs(reference_value), float(np.max(np.abs(a.vals))))
            ok = float(np.min(b.vals[perm] - a.vals)) >= -1e-11 * scale
        floor = 1e-6 * max(min(1.0, span), abs(a.sigma))
        if not ok and (b.sigma - a.sigma) > 2 * floor:
            nodes.insert(t + 1, evaluate(0.5 * (a.sigma + b.sigma)))
            continue
        if not ok:
            refinement_exhausted = True
        perms.append(perm)
        block_matches.extend(events)
        t += 1

    B = nodes[0].vals.shape[0]
    T = len(nodes)
    dim = nodes[0].vecs.shape[0]
    cols = np.arange(B)
    branch_values = np.empty((B, T))
    branch_vectors = np.empty((B, T, dim))
    branch_values[:, 0] = nodes[0].vals[cols]
    branch_vectors[:, 0, :] = nodes[0].vecs[:, cols].T
    for t in range(T - 1):
        cols = perms[t][cols]
        branch_values[:, t + 1] = nodes[t + 1].vals[cols]
        branch_vectors[:, t + 1, :] = nodes[t + 1].vecs[:, cols].T

    grid = np.array([nd.sigma for nd in nodes])
    cross_tol = CROSS_TOL_REL * max(1.0, abs(reference_value))
    crossings = []
    for bidx in range(B):
        d = branch_values[bidx] - reference_value
        for t in range(T - 1):
            if d[t] * d[t + 1] < 0 and abs(d[t]) > cross_tol and abs(d[t + 1]) > cross_tol:
                lo, hi = grid[t], grid[t + 1]
                if bracket_width is not None and hi - lo > bracket_width:
                    lo, hi = _bracket_crossing(
                        flow_matrix, lo, hi, branch_vectors[bidx, t],
                        np.sign(d[t]), reference_value, bracket_width,
                    )
                crossings.append(
                    BranchCrossing(bidx, float(lo), float(hi), reference_value)
                )

    tol = converged_tol if converged_tol is not None else group_tolerance(reference_value)
    converged = int(np.sum(np.abs(branch_values[:, -1] - reference_value) <= tol))

    return FlowResult(
        sigma_grid=grid,
        branch_values=branch_values,
        branch_vectors=branch_vectors,
        reference_value=float(reference_value),
        crossings=tuple(crossings),
        converged_count=converged,
        refinement_exhausted=refinement_exhausted,
        block_matches=tuple(block_matches),
    )

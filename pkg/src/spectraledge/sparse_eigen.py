"""Top eigenpairs of the full adjacency operator via restarted Lanczos.

Full reorthogonalization against the stored basis (ghost eigenvalues matter
more than speed at this scale), with thick restarts so the basis stays
within a fixed memory budget: at each restart the leading Ritz vectors are
kept together with the trailing Krylov direction, residuals are measured
explicitly with true matvecs, and expansion continues from the retained
remainder.  Start vectors come from the run's RNG stream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .graph import SparseGraph
from .local import RegimePartition
from .tree_eig import estimate

BASIS_MEMORY_BUDGET = 1.5e9  # bytes of float64 basis storage per solve


@dataclass
class SpectralResult:
    eigenvalues: np.ndarray          # descending, length k
    eigenvectors: np.ndarray         # (N, k), column i pairs with eigenvalue i
    residuals: np.ndarray
    matvec_count: int
    converged: np.ndarray            # boolean per pair
    unresolved_cluster: np.ndarray   # pairs closer than 10*tol to a neighbor
    tol: float

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


def top_k(g: SparseGraph, k: int, tol: float = 1e-8,
          max_iter: int = 2000, seed: int = 0, replicate: int = 0,
          negate: bool = False, m_max: int | None = None) -> SpectralResult:
    """Largest k eigenpairs of A (of -A when negate is set)."""
    n = g.n_vertices
    if not 1 <= k <= 64:
        raise ValueError(f"k must be in [1, 64], got {k}")
    if k >= n:
        raise ValueError(f"k={k} must be < N={n}")
    a_csr = g.to_csr()
    sign = -1.0 if negate else 1.0

    keep = min(2 * k + 4, n - 1)
    budget_rows = max(int(BASIS_MEMORY_BUDGET // (8 * n)), keep + 4)
    if m_max is None:
        m_max = min(max(3 * k + 28, 48), budget_rows, n)
    m_max = max(m_max, keep + 3)

    rng = _rng.stream(seed, _rng.LANCZOS_START, replicate)
    V = np.empty((m_max, n))
    H = np.zeros((m_max, m_max))
    v0 = rng.standard_normal(n)
    V[0] = v0 / np.linalg.norm(v0)
    m = 1
    matvecs = 0

    theta = np.zeros(k)
    Z = None
    res = np.full(k, np.inf)
    fresh = False
    rr_interval = max(2 * k + 8, 16)
    since_rr = 0

    def orthogonalize(w):
        # two classical Gram-Schmidt passes against the whole basis
        h = V[:m] @ w
        w = w - V[:m].T @ h
        h2 = V[:m] @ w
        w = w - V[:m].T @ h2
        return w, h + h2

    def rayleigh_ritz():
        nonlocal theta, Z, res, matvecs
        ew, Y = np.linalg.eigh(H[:m, :m])
        order = np.argsort(ew)[::-1][:keep]
        th = ew[order]
        Znew = Y[:, order].T @ V[:m]
        # residuals one Ritz vector at a time: a block A Z would stack
        # several (keep x N) temporaries, which dominates memory at large N
        rs = np.empty(len(th))
        for i in range(len(th)):
            az = sign * (a_csr @ Znew[i])
            matvecs += 1
            az -= th[i] * Znew[i]
            rs[i] = np.linalg.norm(az)
        theta = th[:k].copy()
        Z = Znew[:k].copy()
        res = rs[:k].copy()
        return th, Znew, rs

    def is_converged():
        return np.all(res <= tol * np.maximum(1.0, np.abs(theta)))

    while matvecs < max_iter:
        w = sign * (a_csr @ V[m - 1])
        matvecs += 1
        w, h = orthogonalize(w)
        H[:m, m - 1] = h
        H[m - 1, :m] = h
        fresh = False
        since_rr += 1
        beta = np.linalg.norm(w)
        if beta < 1e-12 * max(1.0, abs(H).max()):
            # invariant subspace exhausted; continue in a fresh direction
            w = rng.standard_normal(n)
            w, _ = orthogonalize(w)
            beta = np.linalg.norm(w)
            if beta < 1e-10:
                rayleigh_ritz()
                fresh = True
                break
        if m == m_max:
            th, Znew, rs = rayleigh_ritz()
            fresh = True
            since_rr = 0
            if is_converged():
                break
            # thick restart: Ritz block plus the trailing Krylov remainder
            q = w / beta
            nkeep = Znew.shape[0]
            V[:nkeep] = Znew
            V[nkeep] = q
            H[:, :] = 0.0
            H[np.arange(nkeep), np.arange(nkeep)] = th
            aq = sign * (a_csr @ q)
            matvecs += 1
            col = V[:nkeep + 1] @ aq
            H[:nkeep + 1, nkeep] = col
            H[nkeep, :nkeep + 1] = col
            m = nkeep + 1
            # the H column for the remainder is already filled, so expand
            # from a fresh orthogonalized direction of A q
            w2 = aq - V[:m].T @ (V[:m] @ aq)
            w2 = w2 - V[:m].T @ (V[:m] @ w2)
            b2 = np.linalg.norm(w2)
            if b2 < 1e-12:
                w2 = rng.standard_normal(n)
                w2 = w2 - V[:m].T @ (V[:m] @ w2)
                b2 = np.linalg.norm(w2)
            V[m] = w2 / b2
            m += 1
            fresh = False
            continue
        V[m] = w / beta
        m += 1
        if since_rr >= rr_interval and m > keep:
            rayleigh_ritz()
            fresh = True
            since_rr = 0
            if is_converged():
                break

    if Z is None or not fresh:
        rayleigh_ritz()

    conv = res <= tol * np.maximum(1.0, np.abs(theta))
    gaps = np.full(k, np.inf)
    if k > 1:
        d = np.abs(np.diff(theta))
        gaps[:-1] = np.minimum(gaps[:-1], d)
        gaps[1:] = np.minimum(gaps[1:], d)
    cluster = gaps < 10 * tol
    # for negate: theta are eigenvalues of -A, so -theta are the k most
    # negative eigenvalues of A, reported most-negative first
    return SpectralResult(
        eigenvalues=(-theta if negate else theta),
        eigenvectors=Z.T.copy(),
        residuals=res,
        matvec_count=matvecs,
        converged=conv,
        unresolved_cluster=cluster,
        tol=tol,
    )


@dataclass
class EigenVertexMatch:
    eig_index: int
    eigenvalue: float
    vertex: int
    in_fine_regime: bool
    overlap: float | None          # ||v - w_plus(x)|| when a ball pair exists
    lex_rank: int | None
    formula_error: float | None    # |lambda - simplified estimate|
    agreement: bool | None
    unresolved_cluster: bool


def match_eigenpairs(res: SpectralResult, part: RegimePartition,
                     ball_data: dict, d: float) -> list[EigenVertexMatch]:
    """Match global eigenpairs to fine-regime vertices.

    ball_data maps vertex -> (ball, BallEigenPair, LocalStats) for the
    fine regime.  Lexicographic rank orders the fine regime by (alpha,
    beta) descending; the agreement flag compares keys rather than raw
    ranks so that exact (alpha, beta) ties cannot spoil it.
    """
    fine = set(int(v) for v in part.fine)
    lex_sorted = sorted(
        ball_data,
        key=lambda v: (-ball_data[v][2].alpha, -ball_data[v][2].beta, v))
    lex_key = {v: (ball_data[v][2].alpha, ball_data[v][2].beta) for v in ball_data}
    rank_of = {v: i for i, v in enumerate(lex_sorted)}

    out = []
    for i in range(len(res.eigenvalues)):
        v = res.eigenvectors[:, i]
        x = int(np.argmax(np.abs(v)))
        lam = float(res.eigenvalues[i])
        in_fine = x in fine
        overlap = None
        lexr = None
        ferr = None
        agree = None
        if x in ball_data:
            ball, pair, stats = ball_data[x]
            s = 1.0 if v[x] >= 0 else -1.0
            dot = sum(pair.vector[u] * v[u] for u in pair.vector)
            overlap = math.sqrt(max(2.0 - 2.0 * s * dot, 0.0))
            lexr = rank_of[x]
            est = estimate(stats, d, "simplified")
            ferr = abs(lam - est.value)
            if i < len(lex_sorted):
                agree = lex_key[x] == lex_key[lex_sorted[i]]
            else:
                agree = False
        out.append(EigenVertexMatch(
            eig_index=i, eigenvalue=lam, vertex=x, in_fine_regime=in_fine,
            overlap=overlap, lex_rank=lexr, formula_error=ferr,
            agreement=agree,
            unresolved_cluster=bool(res.unresolved_cluster[i])))
    return out


def export_spectral_json(res: SpectralResult, path: str,
                         matches: list[EigenVertexMatch] | None = None,
                         include_vectors: bool = False):
    payload = {
        "eigenvalues": [float(x) for x in res.eigenvalues],
        "residuals": [float(x) for x in res.residuals],
        "matvec_count": int(res.matvec_count),
        "converged": [bool(x) for x in res.converged],
        "unresolved_cluster": [bool(x) for x in res.unresolved_cluster],
        "tol": res.tol,
    }
    if matches is not None:
        payload["matches"] = [
            {
                "eig_index": m.eig_index,
                "eigenvalue": m.eigenvalue,
                "vertex": m.vertex,
                "in_fine_regime": m.in_fine_regime,
                "overlap": m.overlap,
                "lex_rank": m.lex_rank,
                "formula_error": m.formula_error,
                "agreement": m.agreement,
                "unresolved_cluster": m.unresolved_cluster,
            }
            for m in matches
        ]
    if include_vectors:
        payload["eigenvectors"] = res.eigenvectors.tolist()
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)

"""Sparse Erdos-Renyi graphs G(N, d/N) with O(dN) expected sampling cost.

The sampler walks the linearized upper-triangle pair index with geometric
skips, so the work is proportional to the number of edges rather than the
number of vertex pairs.  Graphs are stored in a compressed row layout
(indptr/indices) with both directions of every edge present and neighbor
lists sorted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.special import gammaln


class GraphConfigError(ValueError):
    pass


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GraphConfig:
    """Sampling parameters for G(n_vertices, expected_degree / n_vertices)."""

    n_vertices: int
    expected_degree: float
    seed: int

    def __post_init__(self):
        if self.n_vertices < 2:
            raise GraphConfigError(f"need at least 2 vertices, got {self.n_vertices}")
        if self.n_vertices >= 1 << 32:
            raise GraphConfigError("vertex count must fit in 32 bits")
        if self.expected_degree < 0:
            raise GraphConfigError(f"expected_degree must be >= 0, got {self.expected_degree}")
        if self.expected_degree / self.n_vertices >= 1.0:
            raise GraphConfigError(
                f"edge probability d/N = {self.expected_degree / self.n_vertices} must be < 1"
            )

    @property
    def edge_probability(self) -> float:
        return self.expected_degree / self.n_vertices


@dataclass
class SparseGraph:
    """Undirected simple graph in compressed row form.

    indices[indptr[v]:indptr[v+1]] is the sorted neighbor list of v.
    """

    n_vertices: int
    indptr: np.ndarray
    indices: np.ndarray
    _csr: sparse.csr_matrix | None = field(default=None, repr=False, compare=False)

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def to_csr(self) -> sparse.csr_matrix:
        if self._csr is None:
            self._csr = sparse.csr_matrix(
                (np.ones(len(self.indices)), self.indices, self.indptr),
                shape=(self.n_vertices, self.n_vertices),
            )
        return self._csr

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """Adjacency-matrix product A @ v."""
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.n_vertices,):
            raise ValueError(f"vector shape {v.shape} != ({self.n_vertices},)")
        return self.to_csr() @ v

    def check_invariants(self):
        """Symmetry, no self loops, sorted rows.  Raises on violation."""
        n = self.n_vertices
        if len(self.indptr) != n + 1 or self.indptr[0] != 0:
            raise GraphFormatError("bad indptr")
        if np.any(np.diff(self.indptr) < 0):
            raise GraphFormatError("indptr not monotone")
        rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.indptr))
        cols = self.indices.astype(np.int64)
        if len(cols) and (cols.min() < 0 or cols.max() >= n):
            raise GraphFormatError("neighbor index out of range")
        if np.any(rows == cols):
            raise GraphFormatError("self loop present")
        starts = self.indptr[:-1]
        interior = np.ones(len(cols), dtype=bool)
        interior[starts[np.diff(self.indptr) > 0]] = False
        if np.any(np.diff(cols)[interior[1:]] <= 0):
            raise GraphFormatError("neighbor lists not strictly sorted")
        fwd = rows * n + cols
        rev = cols * n + rows
        if not np.array_equal(np.sort(fwd), np.sort(rev)):
            raise GraphFormatError("adjacency not symmetric")


def _pairs_to_graph(n: int, i: np.ndarray, j: np.ndarray) -> SparseGraph:
    rows = np.concatenate([i, j])
    cols = np.concatenate([j, i])
    order = np.lexsort((cols, rows))
    rows = rows[order]
    cols = cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return SparseGraph(n_vertices=n, indptr=indptr, indices=cols.astype(np.int64))


def _linear_to_pair(n: int, lin: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Invert L -> (i, j), i < j, for the row-major upper-triangle ordering.

    Row i starts at offset f(i) = i*(n-1) - i*(i-1)/2.
    """
    lin = lin.astype(np.int64)
    b = 2 * n - 1
    # float solve of i^2 - b*i + 2L <= 0, then integer correction
    i = np.floor((b - np.sqrt(b * b - 8.0 * lin)) / 2.0).astype(np.int64)
    np.clip(i, 0, n - 2, out=i)

    def f(k):
        return k * (n - 1) - k * (k - 1) // 2

    for _ in range(3):
        too_low = f(i + 1) <= lin
        too_high = f(i) > lin
        if not (too_low.any() or too_high.any()):
            break
        i = i + too_low.astype(np.int64) - too_high.astype(np.int64)
        np.clip(i, 0, n - 2, out=i)
    if np.any(f(i) > lin) or np.any(f(i + 1) <= lin):
        raise AssertionError("pair index inversion failed")
    j = lin - f(i) + i + 1
    return i, j


def sample_er(config: GraphConfig, _force_all: bool = False) -> SparseGraph:
    """Sample G(N, d/N) by geometric skipping over linearized pair indices.

    _force_all is a test hook that returns the complete graph (all pairs
    present) without touching the random stream.
    """
    from . import _rng

    n = config.n_vertices
    n_pairs = n * (n - 1) // 2
    if _force_all:
        i, j = _linear_to_pair(n, np.arange(n_pairs, dtype=np.int64))
        return _pairs_to_graph(n, i, j)

    p = config.edge_probability
    if p == 0.0:
        return SparseGraph(
            n_vertices=n,
            indptr=np.zeros(n + 1, dtype=np.int64),
            indices=np.zeros(0, dtype=np.int64),
        )

    rng = _rng.stream(config.seed, _rng.GRAPH_SAMPLING)
    expected = n_pairs * p
    chunk = int(expected + 10.0 * np.sqrt(expected + 1.0)) + 16
    positions = []
    last = -1  # linear index of the previous accepted pair
    while last < n_pairs:
        gaps = rng.geometric(p, size=chunk).astype(np.int64)
        # tiny p can overflow the int64 geometric draw (wraps negative);
        # any such draw lands past the end of the pair range anyway
        gaps = np.where(gaps <= 0, n_pairs + 1, np.minimum(gaps, n_pairs + 1))
        lin = last + np.cumsum(gaps)
        positions.append(lin)
        last = lin[-1]
    lin = np.concatenate(positions)
    lin = lin[lin < n_pairs]
    i, j = _linear_to_pair(n, lin)
    return _pairs_to_graph(n, i, j)


@dataclass(frozen=True)
class DegreeBenchmark:
    """Expected counts mu_k = N * P(Bin(N-1, d/N) = k) and the balance point.

    u_star is the k minimizing max(mu_k, 1/mu_k): the degree whose expected
    occupancy is closest to one, which locates the near-deterministic
    maximum degree.
    """

    u_star: int
    mu: np.ndarray  # mu[k] for k = 0 .. len(mu)-1

    def mu_ratio(self, k: int) -> float:
        """Exact ratio mu_{k+1} / mu_k."""
        return float(self.mu[k + 1] / self.mu[k])


def log_mu(n: int, d: float, k: np.ndarray) -> np.ndarray:
    """log of N * Binomial(N-1, d/N) pmf at k, computed via log-gamma."""
    p = d / n
    k = np.asarray(k, dtype=np.float64)
    m = n - 1
    out = (
        np.log(n)
        + gammaln(m + 1)
        - gammaln(k + 1)
        - gammaln(m - k + 1)
        + k * np.log(p)
        + (m - k) * np.log1p(-p)
    )
    return out


def degree_benchmark(n: int, d: float) -> DegreeBenchmark:
    if d <= 0 or d / n >= 1:
        raise GraphConfigError(f"need 0 < d < N, got d={d}, N={n}")
    k_hi = 8
    while True:
        ks = np.arange(k_hi + 1)
        lm = log_mu(n, d, ks)
        # past the mode and negligible: safe to stop extending
        if lm[-1] < lm[-2] and lm[-1] < np.log(1e-12):
            break
        if k_hi >= n - 1:
            ks = np.arange(n)
            lm = log_mu(n, d, ks)
            break
        k_hi = min(2 * k_hi, n - 1)
    u_star = int(np.argmin(np.abs(lm)))
    return DegreeBenchmark(u_star=u_star, mu=np.exp(lm))


def mu_ratio_formula(n: int, d: float, k: int) -> float:
    """Closed form for mu_{k+1}/mu_k: (N-1-k) p / ((k+1)(1-p))."""
    p = d / n
    return (n - 1 - k) * p / ((k + 1) * (1 - p))


def u_star_asymptotic(n: int, d: float) -> float:
    """First-order approximation log N / (log log N - log d)."""
    return np.log(n) / (np.log(np.log(n)) - np.log(d))


_MAGIC = b"SEGR"
_VERSION = 1


def save_graph(g: SparseGraph, path: str):
    """Binary container: magic, version, sizes, indptr, delta-coded indices."""
    nnz = len(g.indices)
    delta = np.empty(nnz, dtype=np.int64)
    if nnz:
        delta[0] = g.indices[0]
        delta[1:] = np.diff(g.indices)
        starts = g.indptr[:-1][np.diff(g.indptr) > 0]
        delta[starts] = g.indices[starts]
    if np.any(delta < 0) or (nnz and delta.max() >= 1 << 32):
        raise GraphFormatError("indices not delta-encodable")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(np.array([_VERSION], dtype=np.uint32).tobytes())
        fh.write(np.array([g.n_vertices, nnz], dtype=np.uint64).tobytes())
        fh.write(g.indptr.astype(np.int64).tobytes())
        fh.write(delta.astype(np.uint32).tobytes())


def load_graph(path: str) -> SparseGraph:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise GraphFormatError(f"{path}: not a graph container")
        version = np.frombuffer(fh.read(4), dtype=np.uint32)[0]
        if version != _VERSION:
            raise GraphFormatError(f"unsupported container version {version}")
        n, nnz = np.frombuffer(fh.read(16), dtype=np.uint64).astype(np.int64)
        indptr = np.frombuffer(fh.read(8 * (n + 1)), dtype=np.int64).copy()
        delta = np.frombuffer(fh.read(4 * nnz), dtype=np.uint32).astype(np.int64)
    # row starts hold absolute neighbor ids, so within a row the decoded
    # value is the global running sum minus the running sum just before
    # the row began
    c = np.cumsum(delta)
    indices = np.zeros(nnz, dtype=np.int64)
    if nnz:
        lens = np.diff(indptr)
        starts = indptr[:-1][lens > 0]
        prev = np.concatenate([[0], c[starts[1:] - 1]])
        row_of = np.repeat(np.arange(len(starts)), lens[lens > 0])
        indices = c - prev[row_of]
    g = SparseGraph(n_vertices=int(n), indptr=indptr, indices=indices)
    g.check_invariants()
    return g


def export_edge_list(g: SparseGraph, path: str):
    """Text interchange: one 'u v' line per edge with u < v, sorted."""
    rows = np.repeat(np.arange(g.n_vertices, dtype=np.int64), np.diff(g.indptr))
    mask = rows < g.indices
    pairs = np.column_stack([rows[mask], g.indices[mask]])
    with open(path, "w") as fh:
        fh.write(f"# vertices {g.n_vertices}\n")
        np.savetxt(fh, pairs, fmt="%d")


def import_edge_list(path: str) -> SparseGraph:
    n = None
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# vertices "):
            raise GraphFormatError(f"{path}: missing vertex-count header")
        n = int(header.split()[-1])
        data = np.loadtxt(fh, dtype=np.int64, ndmin=2)
    if data.size == 0:
        return SparseGraph(n_vertices=n, indptr=np.zeros(n + 1, dtype=np.int64),
                           indices=np.zeros(0, dtype=np.int64))
    i, j = data[:, 0], data[:, 1]
    if np.any(i >= j) or np.any(i < 0) or np.any(j >= n):
        raise GraphFormatError(f"{path}: edge list must contain 0 <= u < v < n")
    if len(np.unique(i * n + j)) != len(i):
        raise GraphFormatError(f"{path}: duplicate edges")
    g = _pairs_to_graph(n, i, j)
    g.check_invariants()
    return g

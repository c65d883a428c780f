"""Edge pruning around rough-regime hubs and the explicit test vector.

The procedure visits rough-regime vertices in ascending id order and, per
hub x, removes hub-incident edges in two phases: phase 1 removes (x, y)
when the depth-3 set reachable from y without the edge (x, y) contains x
or induces a cycle; phase 2 removes (x, y) when that set contains another
rough-regime vertex.  The target postcondition is that radius-3 balls
around the rough regime are pairwise disjoint trees in the pruned graph.

At finite sizes the postcondition can fail even after a correct pass:
the phase-2 lookahead reaches distance 4 from x, while two hubs at
distance 5 or 6 already have overlapping 3-balls.  Failures therefore
raise a structured error carrying witnesses (strict mode, default), or are
recorded on the result when strict=False.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import SparseGraph
from .local import LocalStats, RootedBall, extract_ball, local_stats


class PrunePostconditionError(RuntimeError):
    def __init__(self, witnesses: list[str]):
        super().__init__(
            "pruned graph violates postconditions (input outside the "
            f"high-probability event): {witnesses[:5]}")
        self.witnesses = witnesses


class DegenerateHubError(ValueError):
    pass


@dataclass
class PrunedGraph:
    base: SparseGraph
    rough: np.ndarray
    removed_edges: list[tuple[int, int]]
    hat_stats: dict[int, LocalStats]
    hat_balls: dict[int, RootedBall]
    removed_max_degree: int
    postcondition_violations: list[str] = field(default_factory=list)

    def to_graph(self) -> SparseGraph:
        """Materialize G minus the removed edges."""
        g = self.base
        removed = set()
        for u, v in self.removed_edges:
            removed.add((u, v))
            removed.add((v, u))
        if not removed:
            return SparseGraph(g.n_vertices, g.indptr.copy(), g.indices.copy())
        rows = np.repeat(np.arange(g.n_vertices, dtype=np.int64), np.diff(g.indptr))
        keep = np.fromiter(
            ((int(r), int(c)) not in removed for r, c in zip(rows, g.indices)),
            dtype=bool, count=len(g.indices))
        new_indices = g.indices[keep]
        counts = np.bincount(rows[keep], minlength=g.n_vertices)
        indptr = np.zeros(g.n_vertices + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return SparseGraph(g.n_vertices, indptr, new_indices)


def _reach3(g: SparseGraph, y: int, blocked: tuple[int, int],
            removed: set) -> tuple[set, int]:
    """Depth-3 BFS set from y avoiding one edge, plus its induced edge count."""
    bx = frozenset(blocked)
    seen = {y: 0}
    dq = deque([y])
    while dq:
        v = dq.popleft()
        dv = seen[v]
        if dv == 3:
            continue
        for u in g.neighbors(v):
            u = int(u)
            pair = (v, u) if v < u else (u, v)
            if pair in removed or frozenset(pair) == bx:
                continue
            if u not in seen:
                seen[u] = dv + 1
                dq.append(u)
    t = set(seen)
    edges = 0
    for v in t:
        for u in g.neighbors(v):
            u = int(u)
            if u in t:
                pair = (v, u) if v < u else (u, v)
                if pair not in removed and frozenset(pair) != bx:
                    edges += 1
    return t, edges // 2


def _hat_ball(g: SparseGraph, x: int, removed: set, radius: int = 3) -> RootedBall:
    """extract_ball on the implicitly pruned graph (small balls only)."""
    level_of = {x: 0}
    levels = [[x]]
    for depth in range(1, radius + 1):
        nxt = set()
        for v in levels[depth - 1]:
            for u in g.neighbors(v):
                u = int(u)
                pair = (v, u) if v < u else (u, v)
                if pair in removed or u in level_of:
                    continue
                nxt.add(u)
        if not nxt:
            break
        for u in nxt:
            level_of[u] = depth
        levels.append(sorted(nxt))
    parent = {}
    child_counts = {}
    half = 0
    for v, lv in level_of.items():
        nc = 0
        pbest = -1
        for u in g.neighbors(v):
            u = int(u)
            pair = (v, u) if v < u else (u, v)
            if pair in removed:
                continue
            lu = level_of.get(u)
            if lu is None:
                if lv == radius:
                    nc += 1
                continue
            half += 1
            if lu == lv + 1:
                nc += 1
            elif lu == lv - 1 and (pbest < 0 or u < pbest):
                pbest = u
        child_counts[v] = nc
        if lv > 0:
            parent[v] = pbest
    intra = half // 2
    return RootedBall(root=x, radius=radius, levels=levels, parent=parent,
                      child_counts=child_counts, intra_ball_edges=intra,
                      is_tree=(intra == len(level_of) - 1))


def prune(g: SparseGraph, rough: np.ndarray, c1: int = 2, c2: int = 5,
          strict: bool = True) -> PrunedGraph:
    if c1 < 2 or c2 < 5:
        raise ValueError(f"need c1 >= 2 and c2 >= 5, got c1={c1}, c2={c2}")
    rough = np.asarray(sorted(int(v) for v in rough), dtype=np.int64)
    rough_set = set(int(v) for v in rough)
    removed: set[tuple[int, int]] = set()

    for x in rough:
        x = int(x)
        # phase 1: cycles through or near the hub edge
        for y in [int(u) for u in g.neighbors(x)]:
            pair = (x, y) if x < y else (y, x)
            if pair in removed:
                continue
            t, edges = _reach3(g, y, (x, y), removed)
            if x in t or edges != len(t) - 1:
                removed.add(pair)
        # phase 2: another rough vertex too close to the hub edge
        for y in [int(u) for u in g.neighbors(x)]:
            pair = (x, y) if x < y else (y, x)
            if pair in removed:
                continue
            t, _edges = _reach3(g, y, (x, y), removed)
            if any(v in rough_set and v != x for v in t):
                removed.add(pair)

    witnesses: list[str] = []
    owner: dict[int, int] = {}
    hat_balls = {}
    hat_stats = {}
    for x in rough:
        x = int(x)
        ball = _hat_ball(g, x, removed)
        hat_balls[x] = ball
        hat_stats[x] = local_stats(ball)
        if not ball.is_tree:
            witnesses.append(f"pruned 3-ball at {x} is not a tree")
        for v in ball.vertices:
            if v in owner and owner[v] != x:
                witnesses.append(
                    f"pruned 3-balls of {owner[v]} and {x} share vertex {v}")
            else:
                owner[v] = x

    removed_deg: dict[int, int] = {}
    for u, v in removed:
        removed_deg[u] = removed_deg.get(u, 0) + 1
        removed_deg[v] = removed_deg.get(v, 0) + 1
    max_removed = max(removed_deg.values(), default=0)
    if max_removed > c1 + c2 - 2:
        worst = max(removed_deg, key=removed_deg.get)
        witnesses.append(
            f"removed-edge degree {max_removed} at vertex {worst} exceeds "
            f"c1+c2-2 = {c1 + c2 - 2}")

    if witnesses and strict:
        raise PrunePostconditionError(witnesses)
    return PrunedGraph(
        base=g, rough=rough, removed_edges=sorted(removed),
        hat_stats=hat_stats, hat_balls=hat_balls,
        removed_max_degree=max_removed,
        postcondition_violations=witnesses)


def rough_test_vector(pg: PrunedGraph, x: int, sigma: int
                      ) -> tuple[dict[int, float], float, float]:
    """Explicit two-sphere test vector on the pruned ball of hub x.

    Returns (vector, lam, residual) where lam = sigma * sqrt(ahat +
    bhat/ahat) and residual = ||A_G w - lam w|| against the full graph.
    """
    if sigma not in (-1, 1):
        raise ValueError(f"sigma must be +-1, got {sigma}")
    if x not in pg.hat_balls:
        raise KeyError(f"{x} is not a pruned rough-regime hub")
    ball = pg.hat_balls[x]
    st = pg.hat_stats[x]
    ahat = st.alpha
    if ahat == 0:
        raise DegenerateHubError(f"hub {x} isolated after pruning")
    bhat = st.beta
    lam2 = ahat + bhat / ahat
    lam = sigma * math.sqrt(lam2)
    w = {x: math.sqrt(ahat / lam2) / math.sqrt(2.0)}
    for y in (ball.levels[1] if len(ball.levels) > 1 else []):
        w[y] = sigma / math.sqrt(2.0 * ahat)
    for z in (ball.levels[2] if len(ball.levels) > 2 else []):
        w[z] = 1.0 / math.sqrt(2.0 * ahat * lam2)
    norm = math.sqrt(sum(v * v for v in w.values()))
    w = {v: val / norm for v, val in w.items()}

    # local residual: (A_G w) is supported on supp(w) and its neighbors
    g = pg.base
    aw: dict[int, float] = {}
    for v, wv in w.items():
        for u in g.neighbors(v):
            u = int(u)
            aw[u] = aw.get(u, 0.0) + wv
    sq = 0.0
    for v in set(aw) | set(w):
        sq += (aw.get(v, 0.0) - lam * w.get(v, 0.0)) ** 2
    return w, lam, math.sqrt(sq)


def export_removed_edges(pg: PrunedGraph, path: str):
    with open(path, "w") as fh:
        fh.write(f"# removed edges {len(pg.removed_edges)}\n")
        for u, v in pg.removed_edges:
            fh.write(f"{u} {v}\n")

"""BFS balls, local eigenvalue statistics, degree regimes, structural event.

The local statistics alpha (degree), beta (second sphere mass through child
counts), beta2 (sum of squared child counts over the first sphere) and
beta11 (child-count mass of the second sphere) are the inputs of every
eigenvalue formula in the package.  The structural event check mirrors the
high-probability event under which those formulas are proved; at finite
sizes it is a report with per-condition witnesses, never an assertion.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import SparseGraph


@dataclass
class RootedBall:
    """BFS ball of radius r: levels, canonical parents, child counts."""

    root: int
    radius: int
    levels: list[list[int]]          # levels[i] = sorted vertices of S_i
    parent: dict[int, int]           # BFS parent, smallest-id tie-break
    child_counts: dict[int, int]     # N_y: neighbors one level further out
    intra_ball_edges: int
    is_tree: bool

    @property
    def vertices(self) -> list[int]:
        return [v for level in self.levels for v in level]

    @property
    def n_vertices(self) -> int:
        return sum(len(level) for level in self.levels)


def extract_ball(g: SparseGraph, root: int, r: int) -> RootedBall:
    if not 0 <= root < g.n_vertices:
        raise ValueError(f"root {root} out of range")
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    level_of = {root: 0}
    levels = [[root]]
    for depth in range(1, r + 1):
        nxt = set()
        for v in levels[depth - 1]:
            for w in g.neighbors(v):
                if w not in level_of:
                    nxt.add(int(w))
        if not nxt:
            break
        for w in nxt:
            level_of[w] = depth
        levels.append(sorted(nxt))
    ball = set(level_of)
    parent: dict[int, int] = {}
    child_counts: dict[int, int] = {}
    half_edges = 0
    for v, lv in level_of.items():
        nc = 0
        pbest = -1
        for w in g.neighbors(v):
            w = int(w)
            lw = level_of.get(w)
            if lw is None:
                # outside the ball, hence at distance > r >= lv, i.e. lv+1
                # exactly when v sits on the outermost reached level
                if lv == r:
                    nc += 1
                continue
            half_edges += 1
            if lw == lv + 1:
                nc += 1
            elif lw == lv - 1 and (pbest < 0 or w < pbest):
                pbest = w
        child_counts[v] = nc
        if lv > 0:
            parent[v] = pbest
    intra = half_edges // 2
    return RootedBall(
        root=root,
        radius=r,
        levels=levels,
        parent=parent,
        child_counts=child_counts,
        intra_ball_edges=intra,
        is_tree=(intra == len(ball) - 1),
    )


@dataclass(frozen=True)
class LocalStats:
    alpha: int
    beta: int
    beta2: int
    beta11: int | None          # absent when the ball radius is < 3
    sphere_sizes: tuple[int, ...]
    tree_ball: bool             # beta11 on non-tree balls uses canonical parents

    def as_row(self, vertex: int) -> list:
        b11 = "" if self.beta11 is None else self.beta11
        return [vertex, self.alpha, self.beta, self.beta2, b11,
                *self.sphere_sizes[1:], int(self.tree_ball)]


def local_stats(ball: RootedBall) -> LocalStats:
    s1 = ball.levels[1] if len(ball.levels) > 1 else []
    s2 = ball.levels[2] if len(ball.levels) > 2 else []
    alpha = len(s1)
    beta = sum(ball.child_counts[y] for y in s1)
    beta2 = sum(ball.child_counts[y] ** 2 for y in s1)
    beta11 = None
    if ball.radius >= 3:
        beta11 = sum(ball.child_counts[y] for y in s2)
    sizes = tuple(len(level) for level in ball.levels)
    sizes = sizes + (0,) * (ball.radius + 1 - len(sizes))
    return LocalStats(alpha=alpha, beta=beta, beta2=beta2, beta11=beta11,
                      sphere_sizes=sizes, tree_ball=ball.is_tree)


class RegimeError(ValueError):
    pass


@dataclass(frozen=True)
class RegimePartition:
    """Degree regimes X_m = {x : alpha_x >= u_star - m} at three scales."""

    u_star: int
    fine: np.ndarray           # W, m = ceil(u^{1/4})
    intermediate: np.ndarray   # V, m = ceil(u^{2/3})
    rough: np.ndarray          # U, m = ceil(u/2)
    degrees: np.ndarray

    @property
    def fine_threshold(self) -> int:
        return self.u_star - math.ceil(self.u_star ** 0.25)

    @property
    def intermediate_threshold(self) -> int:
        return self.u_star - math.ceil(self.u_star ** (2.0 / 3.0))

    @property
    def rough_threshold(self) -> int:
        return self.u_star - math.ceil(self.u_star / 2.0)


def classify_regimes(g: SparseGraph, u_star: int) -> RegimePartition:
    if u_star < 2:
        raise RegimeError(f"u_star must be >= 2, got {u_star}")
    m_fine = math.ceil(u_star ** 0.25)
    m_rough = math.ceil(u_star / 2.0)
    if m_fine > m_rough:
        raise RegimeError(f"degenerate u_star={u_star}: fine threshold above rough")
    deg = g.degrees()
    sets = [np.flatnonzero(deg >= u_star - m).astype(np.int64)
            for m in (m_fine, math.ceil(u_star ** (2.0 / 3.0)), m_rough)]
    return RegimePartition(u_star=u_star, fine=sets[0], intermediate=sets[1],
                           rough=sets[2], degrees=deg)


ENVELOPE_CONSTANT = 4.0


@dataclass
class OmegaScopeReport:
    """One scale of the structural event (either V or W vertices)."""

    disjoint: bool
    trees: bool
    sphere_growth: bool
    child_counts: bool
    beta2_concentration: bool
    witnesses: list[str] = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return (self.disjoint and self.trees and self.sphere_growth
                and self.child_counts and self.beta2_concentration)


@dataclass
class OmegaReport:
    """Structural event report: intermediate scope drives the five headline
    booleans; the fine scope is the same five conditions restricted to the
    fine-regime vertices at their tighter scale."""

    intermediate: OmegaScopeReport
    fine: OmegaScopeReport
    radius: int

    @property
    def all_ok(self) -> bool:
        return self.intermediate.all_ok and self.fine.all_ok


def _scope_report(g: SparseGraph, centers: np.ndarray, r: int, d: float,
                  u: int, growth_scale: float, ny_bound: float,
                  beta2_scale: float, max_witnesses: int = 20) -> OmegaScopeReport:
    rep = OmegaScopeReport(True, True, True, True, True)
    owner = {}
    c = ENVELOPE_CONSTANT
    for x in centers:
        x = int(x)
        ball = extract_ball(g, x, r + 3)
        for v in ball.vertices:
            if v in owner and owner[v] != x:
                rep.disjoint = False
                if len(rep.witnesses) < max_witnesses:
                    rep.witnesses.append(f"overlap: vertex {v} in balls of {owner[v]} and {x}")
            else:
                owner[v] = x
        if not ball.is_tree:
            rep.trees = False
            if len(rep.witnesses) < max_witnesses:
                rep.witnesses.append(f"non-tree ball at {x}")
        alpha = len(ball.levels[1]) if len(ball.levels) > 1 else 0
        for i in range(1, r + 4):
            si = len(ball.levels[i]) if i < len(ball.levels) else 0
            env = c * (d ** (i - 1.5) + 1.0) * growth_scale
            if abs(si - d ** (i - 1) * alpha) > env:
                rep.sphere_growth = False
                if len(rep.witnesses) < max_witnesses:
                    rep.witnesses.append(
                        f"sphere growth at {x}: |S_{i}|={si} vs {d ** (i - 1) * alpha:.2f} env {env:.2f}")
        for v, nc in ball.child_counts.items():
            if v != x and nc > ny_bound:
                rep.child_counts = False
                if len(rep.witnesses) < max_witnesses:
                    rep.witnesses.append(f"child count at {x}: N_{v}={nc} > {ny_bound:.2f}")
        s1 = ball.levels[1] if len(ball.levels) > 1 else []
        beta2 = sum(ball.child_counts[y] ** 2 for y in s1)
        if abs(beta2 - (d * d + d) * alpha) > c * beta2_scale:
            rep.beta2_concentration = False
            if len(rep.witnesses) < max_witnesses:
                rep.witnesses.append(
                    f"beta2 at {x}: {beta2} vs {(d * d + d) * alpha:.2f} "
                    f"env {c * beta2_scale:.2f}")
    return rep


def check_omega(g: SparseGraph, part: RegimePartition, r: int, d: float) -> OmegaReport:
    u = part.u_star
    inter = _scope_report(
        g, part.intermediate, r, d, u,
        growth_scale=u ** (7.0 / 8.0), ny_bound=u ** 0.75, beta2_scale=u ** 1.5)
    fine = _scope_report(
        g, part.fine, r, d, u,
        growth_scale=u ** (2.0 / 3.0), ny_bound=u ** (1.0 / 3.0),
        beta2_scale=u ** (2.0 / 3.0))
    return OmegaReport(intermediate=inter, fine=fine, radius=r)


def export_stats_csv(rows: dict[int, LocalStats], r: int, path: str):
    """Batch CSV: vertex, alpha, beta, beta2, beta11, s1..s_r, is_tree."""
    header = ["vertex", "alpha", "beta", "beta2", "beta11",
              *[f"s{i}" for i in range(1, r + 1)], "is_tree"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for vertex in sorted(rows):
            st = rows[vertex]
            sizes = list(st.sphere_sizes[1:]) + [0] * (r - len(st.sphere_sizes) + 1)
            b11 = "" if st.beta11 is None else st.beta11
            w.writerow([vertex, st.alpha, st.beta, st.beta2, b11,
                        *sizes[:r], int(st.tree_ball)])

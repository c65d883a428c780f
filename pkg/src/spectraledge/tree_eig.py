"""Top eigenpair of a tree ball via the continued-fraction recursion.

For a rooted tree the Perron eigenvalue solves

    lambda = sum_y 1 / (lambda - sum_z 1 / (lambda - ...))

over the children y of the root, a continued fraction of at most r levels.
Above the spectral radius of every child subtree each denominator is
strictly positive, so the recursion is evaluated bottom-up and the root
equation is solved by bisection plus a Newton polish on that monotone
branch.  The module also provides the closed-form eigenvalue estimators
built from local statistics and the eigenvector decay predictions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .local import LocalStats, RootedBall


class NotATreeError(ValueError):
    pass


class BracketError(RuntimeError):
    def __init__(self, lo, hi, h_lo, h_hi):
        super().__init__(f"failed to bracket root: h({lo})={h_lo}, h({hi})={h_hi}")
        self.lo, self.hi = lo, hi


@dataclass
class BallEigenPair:
    lam: float
    vector: dict[int, float]     # unit-norm Perron vector w_plus
    iterations: int
    residual: float


def forest_bound(max_degree: int) -> float:
    """Kesten bound 2 sqrt(Delta - 1) on the spectral radius of a forest."""
    if max_degree < 1:
        raise ValueError(f"max_degree must be >= 1, got {max_degree}")
    return 2.0 * math.sqrt(max_degree - 1.0)


def _children_by_depth(ball: RootedBall) -> list[list[tuple[int, list[int]]]]:
    """Per level, (vertex, children) pairs, from the canonical BFS parents."""
    children: dict[int, list[int]] = {v: [] for v in ball.vertices}
    for v, p in ball.parent.items():
        children[p].append(v)
    return [[(v, children[v]) for v in level] for level in ball.levels]


def cf_eigenvalue(ball: RootedBall, tol: float = 1e-12) -> BallEigenPair:
    if not ball.is_tree:
        raise NotATreeError(f"ball at {ball.root} is not a tree")
    if ball.n_vertices == 1:
        return BallEigenPair(lam=0.0, vector={ball.root: 1.0}, iterations=0, residual=0.0)

    by_depth = _children_by_depth(ball)
    alpha = len(ball.levels[1])
    deg = {v: len(ch) + (1 if v != ball.root else 0)
           for level in by_depth for v, ch in level}
    delta_max = max(deg.values())

    def sweep(lam: float) -> tuple[float, float, bool]:
        """Continued-fraction pivots bottom-up.

        Returns (h, h', above) where h = lam - sum g over root children and
        above is True iff every pivot stayed positive, i.e. lam exceeds the
        Perron root of every child subtree (in fact lam >= lambda_max of
        the whole tree iff additionally h >= 0: the pivots of lam*I - A in
        leaves-to-root elimination order are exactly these denominators).
        """
        g: dict[int, float] = {}
        gp: dict[int, float] = {}
        ok = True
        for level in reversed(by_depth[1:]):
            for v, ch in level:
                den = lam - sum(g[c] for c in ch)
                if den <= 0.0:
                    return -1.0, 1.0, False
                dden = 1.0 - sum(gp[c] for c in ch)
                g[v] = 1.0 / den
                gp[v] = -dden / (den * den)
        root_children = by_depth[0][0][1]
        h = lam - sum(g[c] for c in root_children)
        hp = 1.0 - sum(gp[c] for c in root_children)
        return h, hp, ok

    # lambda_max >= sqrt(delta_max) (contains a star); upper bound from the
    # row-sum and forest bounds
    lo = math.sqrt(delta_max)
    hi = max(math.sqrt(alpha + delta_max * ball.radius),
             forest_bound(delta_max)) + 1.0
    h_hi, _, ok_hi = sweep(hi)
    iterations = 1
    if not ok_hi or h_hi < 0:
        raise BracketError(lo, hi, None, h_hi)

    a, b = lo, hi
    for _ in range(200):
        lam = 0.5 * (a + b)
        h, _, ok = sweep(lam)
        iterations += 1
        if ok and h >= 0:
            b = lam
        else:
            a = lam
        if b - a < 1e-9 * max(1.0, b):
            break
    # Newton polish from the safe side (no poles above lambda_max)
    lam = b
    for _ in range(60):
        h, hp, ok = sweep(lam)
        iterations += 1
        if ok and abs(h) <= tol:
            break
        if not ok:
            a = max(a, lam)
            lam = 0.5 * (a + b)
            continue
        if h >= 0:
            b = min(b, lam)
        else:
            a = max(a, lam)
        nxt = lam - h / hp
        if not a <= nxt <= b:
            nxt = 0.5 * (a + b)
        if nxt == lam:
            break
        lam = nxt
    h, hp, ok = sweep(lam)
    # |h/h'| bounds the eigenvalue error; |h| itself can stall above tol
    # on ill-conditioned trees where the residual h suffers cancellation
    err = abs(h) / max(abs(hp), 1.0)
    if not ok or (abs(h) > 10 * tol and err > 1e-10):
        raise RuntimeError(f"root polish stalled at h={h} (tol {tol})")

    # top-down eigenvector: w_v = g(v) * w_parent
    g: dict[int, float] = {}
    for level in reversed(by_depth[1:]):
        for v, ch in level:
            g[v] = 1.0 / (lam - sum(g[c] for c in ch))
    w = {ball.root: 1.0}
    for level in by_depth[1:]:
        for v, _ch in level:
            w[v] = g[v] * w[ball.parent[v]]
    norm = math.sqrt(sum(x * x for x in w.values()))
    w = {v: x / norm for v, x in w.items()}

    # explicit residual || A_ball w - lam w ||
    children = {v: ch for level in by_depth for v, ch in level}
    sq = 0.0
    for v, wv in w.items():
        av = sum(w[c] for c in children[v])
        if v != ball.root:
            av += w[ball.parent[v]]
        sq += (av - lam * wv) ** 2
    return BallEigenPair(lam=lam, vector=w, iterations=iterations,
                         residual=math.sqrt(sq))


ESTIMATOR_KINDS = ("star", "two_term", "four_term", "simplified", "adk")


@dataclass(frozen=True)
class EigenvalueEstimate:
    kind: str
    value: float | None          # None when the formula is out of domain
    inputs_used: dict

    @property
    def in_domain(self) -> bool:
        return self.value is not None


def estimate(stats: LocalStats, d: float, kind: str) -> EigenvalueEstimate:
    if kind not in ESTIMATOR_KINDS:
        raise ValueError(f"unknown estimator kind {kind!r}")
    a = float(stats.alpha)
    b = float(stats.beta)
    if a <= 0:
        raise ValueError("estimators need alpha > 0")
    if kind == "star":
        return EigenvalueEstimate(kind, math.sqrt(a), {"alpha": a})
    if kind == "two_term":
        return EigenvalueEstimate(kind, math.sqrt(a + b / a), {"alpha": a, "beta": b})
    if kind == "simplified":
        return EigenvalueEstimate(
            kind, math.sqrt(a + b / a + (d * d + d) / a),
            {"alpha": a, "beta": b, "d": d})
    if kind == "four_term":
        if stats.beta11 is None:
            raise ValueError("four_term needs beta11 (ball radius >= 3)")
        lam2 = (a + b / a + (stats.beta11 + stats.beta2) / a ** 2
                - b * b / a ** 3)
        val = math.sqrt(lam2) if lam2 > 0 else None
        return EigenvalueEstimate(kind, val, {
            "alpha": a, "beta": b, "beta2": stats.beta2, "beta11": stats.beta11})
    # adk closed form; its radicands can go negative for small d
    inputs = {"alpha": a, "beta": b, "d": d}
    t = a / d + b / (a * d)
    inner = t * t - 4.0 * a / d
    if inner < 0:
        return EigenvalueEstimate(kind, None, inputs)
    outer = a - (b / (2.0 * a)) * t + (b / (2.0 * a)) * math.sqrt(inner)
    if outer <= 0:
        return EigenvalueEstimate(kind, None, inputs)
    return EigenvalueEstimate(kind, a / math.sqrt(outer), inputs)


@dataclass
class DecayProfile:
    level_masses: list[float]        # ||w|_{S_i}|| for i = 0..r
    tail_masses: list[float]         # ||w restricted to ball minus B_i||
    predicted_center: float          # 1/sqrt(2)
    predicted_annulus: list[float]   # (d/alpha)^{(i-1)/2} / sqrt(2), i >= 1
    predicted_tail: list[float]      # sqrt(1/(1-d/alpha)) (d/alpha)^{i/2} / sqrt(2)


def decay_profile(pair: BallEigenPair, ball: RootedBall, d: float) -> DecayProfile:
    level_masses = []
    for level in ball.levels:
        level_masses.append(math.sqrt(sum(pair.vector[v] ** 2 for v in level)))
    level_masses += [0.0] * (ball.radius + 1 - len(level_masses))
    total_sq = sum(m * m for m in level_masses)
    tail = []
    acc = 0.0
    for m in level_masses:
        acc += m * m
        tail.append(math.sqrt(max(total_sq - acc, 0.0)))
    alpha = len(ball.levels[1]) if len(ball.levels) > 1 else 0
    root2 = math.sqrt(2.0)
    if alpha > 0 and d < alpha:
        q = d / alpha
        annulus = [(q ** ((i - 1) / 2.0)) / root2 for i in range(1, ball.radius + 1)]
        pred_tail = [math.sqrt(1.0 / (1.0 - q)) * q ** (i / 2.0) / root2
                     for i in range(ball.radius + 1)]
    else:
        annulus = [math.nan] * ball.radius
        pred_tail = [math.nan] * (ball.radius + 1)
    return DecayProfile(
        level_masses=level_masses, tail_masses=tail,
        predicted_center=1.0 / root2, predicted_annulus=annulus,
        predicted_tail=pred_tail)


TRUNCATION_CONSTANT = 4.0


def truncation_residual(g, ball: RootedBall, pair: BallEigenPair) -> float:
    """|| (A_G - A_ball) w ||: mass pushed through S_r -> S_{r+1} edges."""
    in_ball = set(ball.vertices)
    contrib: dict[int, float] = {}
    for v, wv in pair.vector.items():
        for u in g.neighbors(v):
            u = int(u)
            if u not in in_ball:
                contrib[u] = contrib.get(u, 0.0) + wv
    return math.sqrt(sum(x * x for x in contrib.values()))


def truncation_envelope(d: float, u_star: int, r: int) -> float:
    """Pinned envelope 4 (d^{r/2} + 1) u^{-(r-1)/2} for the truncation error."""
    return TRUNCATION_CONSTANT * (d ** (r / 2.0) + 1.0) * u_star ** (-(r - 1) / 2.0)


def export_estimator_csv(rows: list[dict], path: str):
    """Comparison CSV: vertex, lambda_cf, each estimator, absolute errors."""
    kinds = list(ESTIMATOR_KINDS)
    header = ["vertex", "lambda_cf", *kinds, *[f"err_{k}" for k in kinds]]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            lam = row["lambda_cf"]
            vals = [row.get(k) for k in kinds]
            errs = ["" if v is None else abs(v - lam) for v in vals]
            w.writerow([row["vertex"], lam,
                        *["" if v is None else v for v in vals], *errs])

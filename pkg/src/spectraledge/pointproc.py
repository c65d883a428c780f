"""Edge eigenvalue point process: intensity, sampling, Prokhorov distance.

The intensity rho places mass N P(Pois(d)=alpha) P(Pois(d alpha)=beta) at
the rational location s = alpha + beta/alpha for alpha within 2 log^{1/8}N
of the max-degree benchmark u and integer beta up to d alpha + u^{7/8}.
The empirical process transforms computed eigenvalues by
u (lambda^2 - (d^2+d)/u); the reference process samples independent
Poisson multiplicities per atom and emits points at u*s, so the two live
on a common scale and are compared in Levy-Prokhorov distance.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from . import _rng, probdist
from .sparse_eigen import SpectralResult

MASS_FLOOR = 1e-30


@dataclass(frozen=True)
class RhoAtom:
    alpha: int
    beta: int
    location: float     # s = alpha + beta/alpha
    mass: float


@dataclass
class IntensityRho:
    n_vertices: int
    d: float
    u_star: int
    support: list[RhoAtom]       # descending by location

    @property
    def total_mass(self) -> float:
        return sum(a.mass for a in self.support)


def build_rho(n: int, d: float, u_star: int) -> IntensityRho:
    if d <= 0:
        raise ValueError(f"d must be > 0, got {d}")
    ell_max = int(2.0 * math.log(n) ** 0.125)
    atoms = []
    for ell in range(0, ell_max + 1):
        alpha = u_star - ell
        if alpha < 1:
            break
        beta_max = int(math.floor(d * alpha + u_star ** (7.0 / 8.0)))
        betas = np.arange(0, beta_max + 1)
        masses = n * probdist.pois_pmf(alpha, d) * probdist.pois_pmf(betas, d * alpha)
        for beta, mass in zip(betas, masses):
            if mass >= MASS_FLOOR:
                atoms.append(RhoAtom(alpha=alpha, beta=int(beta),
                                     location=alpha + beta / alpha,
                                     mass=float(mass)))
    atoms.sort(key=lambda a: -a.location)
    return IntensityRho(n_vertices=n, d=d, u_star=u_star, support=atoms)


def kappa(rho: IntensityRho, k: float) -> float:
    """inf{s : rho([s, inf)) <= k} on the atomic support.

    Convention (pinned): smallest support location whose closed tail mass
    is <= k.  If even the largest atom's closed tail exceeds k, the largest
    atom location is returned (the inf over the reals lands there by right
    continuity).  k at or above the total mass gives -inf.
    """
    if k <= 0:
        raise ValueError(f"k must be > 0, got {k}")
    if not rho.support or rho.total_mass <= k:
        return -math.inf
    # group atoms sharing a location, scan descending
    tail = 0.0
    best = math.inf
    i = 0
    atoms = rho.support
    while i < len(atoms):
        loc = atoms[i].location
        while i < len(atoms) and atoms[i].location == loc:
            tail += atoms[i].mass
            i += 1
        if tail <= k:
            best = loc
        else:
            break
    if math.isinf(best):
        return atoms[0].location
    return best


@dataclass
class PointProcessSample:
    points: np.ndarray     # sorted descending
    origin: str            # "empirical_phi" or "sampled_psi"

    @property
    def count(self) -> int:
        return len(self.points)


def sample_psi(rho: IntensityRho, seed: int, replicate: int = 0,
               kappa_cut: float | None = None) -> PointProcessSample:
    """Poisson multiplicities per atom, points at u * location."""
    rng = _rng.stream(seed, _rng.PSI_SAMPLING, replicate)
    pts = []
    u = rho.u_star
    for atom in rho.support:
        mult = rng.poisson(atom.mass)
        if mult:
            x = u * atom.location
            if kappa_cut is None or x >= kappa_cut:
                pts.extend([x] * int(mult))
    return PointProcessSample(points=np.sort(np.array(pts))[::-1],
                              origin="sampled_psi")


def empirical_phi(res: SpectralResult, d: float, u_star: int,
                  kappa_cut: float) -> PointProcessSample:
    """Transformed computed spectrum u (lambda^2 - (d^2+d)/u), closed cut."""
    lam = np.asarray(res.eigenvalues, dtype=np.float64)[res.converged]
    pts = u_star * (lam * lam - (d * d + d) / u_star)
    pts = pts[pts >= kappa_cut]
    return PointProcessSample(points=np.sort(pts)[::-1], origin="empirical_phi")


def _direction_excess(xs, xm, ys, y_prefix, eps):
    """max over nonempty A of nu1(A) - nu2(A_eps), via rightmost-atom DP.

    xs: distinct sorted atoms of nu1 with masses xm; ys sorted atoms of
    nu2 with prefix-sum y_prefix (y_prefix[i] = mass of first i atoms).
    """
    def nu2(a, b, open_left):
        # mass of (a, b] when open_left else [a, b]
        lo = bisect_right(ys, a) if open_left else bisect_left(ys, a)
        hi = bisect_right(ys, b)
        return y_prefix[hi] - y_prefix[lo]

    p = len(xs)
    best = [0.0] * p
    out = -math.inf
    for i in range(p):
        solo = xm[i] - nu2(xs[i] - eps, xs[i] + eps, open_left=False)
        b = solo
        for j in range(i):
            if xs[i] - xs[j] <= 2 * eps:
                inc = xm[i] - nu2(xs[j] + eps, xs[i] + eps, open_left=True)
            else:
                inc = solo
            cand = best[j] + inc
            if cand > b:
                b = cand
        best[i] = b
        out = max(out, b)
    return out


def lp_distance(a: PointProcessSample, b: PointProcessSample,
                mass_scale: float = 1.0) -> float:
    """Exact Levy-Prokhorov distance between finite atomic measures.

    D = inf{eps : nu1(A) <= nu2(A_eps) + eps and vice versa for all A},
    with closed eps-neighborhoods.  The inclusion check maximizes
    nu1(A) - nu2(A_eps) exactly by dynamic programming over atom subsets;
    the inf over eps is located by bisection (resolution 1e-12 relative).
    Unlike the probability-measure Prokhorov metric this is not bounded by
    1: a total-mass gap of m forces eps >= m (take A the whole line), so
    the distance between counting measures reports mass mismatches at full
    size instead of saturating.

    mass_scale multiplies every atom's mass; pooled ensembles pass
    1/n_seeds so that both sides carry the seed-averaged intensity and the
    additive slack acts on that scale.
    """
    if mass_scale <= 0:
        raise ValueError(f"mass_scale must be positive, got {mass_scale}")
    pa = np.sort(np.asarray(a.points, dtype=np.float64))
    pb = np.sort(np.asarray(b.points, dtype=np.float64))
    if len(pa) == 0 and len(pb) == 0:
        return 0.0

    def collapse(p):
        if len(p) == 0:
            return [], []
        xs, counts = np.unique(p, return_counts=True)
        return list(xs), list(counts.astype(float) * mass_scale)

    xa, ma = collapse(pa)
    xb, mb = collapse(pb)
    pb_prefix = [0.0]
    for m in mb:
        pb_prefix.append(pb_prefix[-1] + m)
    pa_prefix = [0.0]
    for m in ma:
        pa_prefix.append(pa_prefix[-1] + m)

    def ok(eps):
        if xa and _direction_excess(xa, ma, xb, pb_prefix, eps) > eps:
            return False
        if xb and _direction_excess(xb, mb, xa, pa_prefix, eps) > eps:
            return False
        return True

    # eps = max total mass always satisfies both conditions
    hi = max(sum(ma, 0.0), sum(mb, 0.0), 1.0)
    if ok(0.0):
        return 0.0
    lo = 0.0
    scale = max(1.0, max(map(abs, xa + xb)))
    while hi - lo > 1e-12 * scale:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def order_stat_window(d: float, a: int, zeta: int, k: int) -> tuple[float, float]:
    """Predicted location of the k-th largest of zeta iid Pois(d*a) draws."""
    if not 1 <= k <= zeta:
        raise ValueError(f"need 1 <= k <= zeta, got k={k}, zeta={zeta}")
    if d * a < 1:
        raise ValueError(f"need d*a >= 1, got {d * a}")
    if zeta < 2:
        raise ValueError("window needs zeta >= 2 (log log zeta finite)")
    da = d * a
    logz = math.log(zeta)
    top = da + math.sqrt(2.0 * da * logz)
    c = probdist.SHARP_TAIL_LOWER_C
    drop = math.sqrt(da) * (
        math.log(k) + 0.5 * math.log(2.0) - math.log(c)
        + 1.5 * math.log(logz)
    ) / math.sqrt(2.0 * logz)
    return (top - drop, top)


def predicted_spacing(d: float, u_star: int, k: int, n: int) -> tuple[float, float]:
    """(beta-spacing, lambda-spacing) predictions for the k-th gap."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    lll = math.log(math.log(math.log(n)))
    logq = math.log(u_star / d) ** 3
    denom = logq * (k + 1) ** (3.0 * lll)
    beta_spacing = math.sqrt(d * u_star) / denom
    lam_spacing = math.sqrt(d) / (3.0 * u_star * denom)
    return beta_spacing, lam_spacing

"""Poisson and binomial probabilities with sharp non-asymptotic tail bounds.

Everything is evaluated in log space through log-gamma, so the functions
stay finite far into the tails (lambda in the thousands, thresholds far
beyond the mean).  The sharp Poisson tail sandwich uses the Cramer rate
h(delta) = (1+delta) log(1+delta) - delta together with the 1/sqrt(lambda
min(delta, delta^2)) polynomial correction; the lower constant is
calibrated once against exact tail sums and pinned.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gammaln


def pois_log_pmf(k, lam):
    k = np.asarray(k, dtype=np.float64)
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if lam == 0:
        return np.where(k == 0, 0.0, -np.inf)
    return k * math.log(lam) - lam - gammaln(k + 1)


def pois_pmf(k, lam):
    return np.exp(pois_log_pmf(k, lam))


def pois_tail(k: int, lam: float) -> float:
    """P(Poisson(lam) >= k), summing whichever side has fewer terms."""
    if k <= 0:
        return 1.0
    if lam == 0:
        return 0.0
    if k <= lam:
        # lower side is shorter: 1 - P(X <= k-1)
        return 1.0 - float(np.sum(pois_pmf(np.arange(k), lam)))
    # upper side: sum until terms are negligible
    total = 0.0
    j = k
    block = max(64, int(4 * math.sqrt(lam)) + 16)
    while True:
        ks = np.arange(j, j + block)
        terms = pois_pmf(ks, lam)
        total += float(np.sum(terms))
        j += block
        if terms[-1] < 1e-320 or terms[-1] < 1e-18 * total:
            return total


def pois_log_tail(k: int, lam: float) -> float:
    """log P(Poisson(lam) >= k), stable far past the mean."""
    if k <= 0:
        return 0.0
    if lam == 0:
        return -math.inf
    if k <= lam + 6 * math.sqrt(lam):
        val = pois_tail(k, lam)
        if val > 1e-280:
            return math.log(val)
    # geometric-tail extension: term ratio at j is lam/(j+1) < 1 out here
    block = max(64, int(4 * math.sqrt(lam)) + 16)
    logs = [pois_log_pmf(np.arange(k, k + block), lam)]
    j = k + block
    while logs[-1][-1] > logs[0].max() - 60.0:
        logs.append(pois_log_pmf(np.arange(j, j + block), lam))
        j += block
    from scipy.special import logsumexp
    return float(logsumexp(np.concatenate(logs)))


def cramer_rate(delta: float) -> float:
    """h(delta) = (1+delta) log(1+delta) - delta, the Poisson rate function."""
    if delta <= -1:
        raise ValueError(f"delta must be > -1, got {delta}")
    return (1.0 + delta) * math.log1p(delta) - delta


# Lower-sandwich constant: 0.9 times the minimum of exact/upper over the
# calibration sweep lambda in {10, 30, 100, 300, 1000}, integer thresholds
# with delta in [lambda^{-1/2}, 3].  Recompute with
# calibrate_sharp_tail_constant(); pinned 2026-08.
SHARP_TAIL_LOWER_C = 0.2412049332935142

_CAL_LAMBDAS = (10.0, 30.0, 100.0, 300.0, 1000.0)


@dataclass(frozen=True)
class TailBoundResult:
    lower: float
    upper: float
    exact: float | None = None


def sharp_pois_upper(lam: float, delta: float) -> float:
    """exp(-lam h(delta)) / sqrt(lam min(delta, delta^2))."""
    return math.exp(sharp_pois_log_upper(lam, delta))


def sharp_pois_log_upper(lam: float, delta: float) -> float:
    if lam <= 0 or delta <= 0:
        raise ValueError("need lam > 0 and delta > 0")
    return -lam * cramer_rate(delta) - 0.5 * math.log(lam * min(delta, delta * delta))


def sharp_pois_tail_bounds(lam: float, delta: float,
                           with_exact: bool = False) -> TailBoundResult:
    """Sandwich for P(Poisson(lam) >= lam(1+delta)).

    Valid for delta >= lambda^{-1/2}; below that the polynomial correction
    exceeds one and the sandwich is not claimed.
    """
    if delta < lam ** -0.5:
        raise ValueError(f"delta {delta} below validity floor lambda^-1/2")
    upper = sharp_pois_upper(lam, delta)
    exact = None
    if with_exact:
        t = lam * (1.0 + delta)
        # guard the ceil against float noise when lam(1+delta) is integral
        k = math.ceil(t - 1e-9 * max(1.0, abs(t)))
        if lam * (1.0 + delta) <= 1e7:
            exact = pois_tail(k, lam)
    return TailBoundResult(lower=SHARP_TAIL_LOWER_C * upper, upper=upper, exact=exact)


def calibrate_sharp_tail_constant(lambdas=_CAL_LAMBDAS, safety: float = 0.9) -> float:
    """Rederive the pinned lower constant from exact tail sums."""
    worst = math.inf
    for lam in lambdas:
        k_lo = math.ceil(lam * (1.0 + lam ** -0.5))
        k_hi = math.floor(lam * 4.0)
        for k in range(k_lo, k_hi + 1):
            delta = k / lam - 1.0
            if delta < lam ** -0.5 or delta > 3.0:
                continue
            log_ratio = pois_log_tail(k, lam) - sharp_pois_log_upper(lam, delta)
            worst = min(worst, log_ratio)
    return safety * math.exp(worst)


def gaussian_regime_tail(lam: float, delta: float) -> float:
    """Asymptotic equivalent exp(-lam delta^2 / 2) / (delta sqrt(lam)).

    Matches the sharp sandwich up to 1 + o(1) factors when lam delta^3 is
    small and delta >= lambda^{-1/2}; returned as a reference value, not a
    guaranteed bound.
    """
    if delta <= 0:
        raise ValueError("gaussian regime needs delta > 0")
    return math.exp(-lam * delta * delta / 2.0) / (delta * math.sqrt(lam))


def binom_log_pmf(k, n: int, p: float):
    k = np.asarray(k, dtype=np.float64)
    if not 0 <= p <= 1:
        raise ValueError(f"p must be in [0,1], got {p}")
    if p == 0:
        return np.where(k == 0, 0.0, -np.inf)
    if p == 1:
        return np.where(k == n, 0.0, -np.inf)
    return (
        gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
        + k * math.log(p) + (n - k) * math.log1p(-p)
    )


def binom_pmf(k, n: int, p: float):
    return np.exp(binom_log_pmf(k, n, p))


@dataclass(frozen=True)
class BinomPoisComparison:
    ratio: float        # Bin(n, p) pmf over Poisson(np) pmf at k
    envelope: float     # 4 (k^2 + (np)^2 + 1) / n

    @property
    def within_envelope(self) -> bool:
        return abs(self.ratio - 1.0) <= self.envelope


def binom_pois_compare(k: int, n: int, p: float) -> BinomPoisComparison:
    """Pointwise pmf ratio against the Poisson limit with its error envelope.

    The envelope is the non-asymptotic bound |ratio - 1| <= 4(k^2+(np)^2+1)/n,
    valid for k and np up to sqrt(n)/2.
    """
    lam = n * p
    log_ratio = float(binom_log_pmf(k, n, p) - pois_log_pmf(k, lam))
    envelope = 4.0 * (k * k + lam * lam + 1.0) / n
    return BinomPoisComparison(ratio=math.exp(log_ratio), envelope=envelope)


def binom_heavy_tail_bound(n: int, p: float, tau: float) -> float:
    """Chernoff bound exp(-tau log(tau / (e np)) - np) on P(Bin >= tau).

    Equals e^{-np} (e np / tau)^tau; useful when tau is far above the mean
    np, and trivially >= 1 below it.
    """
    if tau <= 0:
        return 1.0
    lam = n * p
    return math.exp(-tau * math.log(tau) + tau * math.log(lam) + tau - lam)


def bernstein_tail(lam: float, t: float, side: str = "upper") -> float:
    """Bernstein bound for Poisson(lam) deviations of size t.

    upper: P(X >= lam + t) <= exp(-t^2 / (2lam + 2t/3))
    lower: P(X <= lam - t) <= exp(-t^2 / (2lam))
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if side == "upper":
        return math.exp(-t * t / (2.0 * lam + 2.0 * t / 3.0))
    if side == "lower":
        return math.exp(-t * t / (2.0 * lam))
    raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")


def binom_rel_ent(p: float, q: float) -> float:
    """KL divergence I_p(q) = q log(q/p) + (1-q) log((1-q)/(1-p))."""
    if not (0 < p < 1 and 0 <= q <= 1):
        raise ValueError("need 0 < p < 1 and 0 <= q <= 1")
    out = 0.0
    if q > 0:
        out += q * math.log(q / p)
    if q < 1:
        out += (1 - q) * math.log((1 - q) / (1 - p))
    return out


def chernoff_binom_tail(n: int, p: float, k: int) -> float:
    """Chernoff bound exp(-n I_p(k/n)) on P(Bin(n,p) >= k), for k >= np."""
    if k <= n * p:
        return 1.0
    return math.exp(-n * binom_rel_ent(p, k / n))


def weibull_sq_sum_bound(n: int, d: float, t: float, c: float = 0.1) -> float:
    """Tail bound 2n exp(-c sqrt(t) / (d^3 + 1)) for sums of squared
    Poisson-type local statistics; c is the unoptimized absolute constant."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return 2.0 * n * math.exp(-c * math.sqrt(t) / (d ** 3 + 1.0))

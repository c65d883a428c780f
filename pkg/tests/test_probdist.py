"""Tail bound correctness against exact summation and scipy."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from spectraledge import probdist


def test_pois_pmf_matches_scipy():
    ks = np.arange(0, 60)
    for lam in (0.5, 1.0, 7.0, 30.0):
        np.testing.assert_allclose(
            probdist.pois_pmf(ks, lam), sps.poisson.pmf(ks, lam), rtol=1e-12)


def test_pois_tail_matches_scipy_sf():
    for lam in (1.0, 10.0, 100.0):
        for k in (1, 5, int(lam) + 3, int(3 * lam)):
            assert probdist.pois_tail(k, lam) == pytest.approx(
                sps.poisson.sf(k - 1, lam), rel=1e-10)


def test_pois_log_tail_deep():
    # scipy's logsf underflows eventually; check against an explicit
    # log-space sum at a point where both still work, then monotonicity deep.
    lam = 1000.0
    assert probdist.pois_log_tail(2000, lam) == pytest.approx(
        sps.poisson.logsf(1999, lam), rel=1e-9)
    deep = [probdist.pois_log_tail(k, lam) for k in (3000, 3500, 4000)]
    assert deep[0] > deep[1] > deep[2] > -math.inf


def test_cramer_rate_values():
    assert probdist.cramer_rate(0.0) == 0.0
    # h(1) = 2 log 2 - 1
    assert probdist.cramer_rate(1.0) == pytest.approx(2 * math.log(2) - 1)
    with pytest.raises(ValueError):
        probdist.cramer_rate(-1.0)


def test_sharp_sandwich_example():
    # [DERIVED] exact tail P(Pois(100) >= 150) from scipy.poisson.sf(149, 100)
    b = probdist.sharp_pois_tail_bounds(100.0, 0.5, with_exact=True)
    assert b.exact == pytest.approx(1.8842104660386844e-06, rel=1e-9)
    assert b.lower <= b.exact <= b.upper


def test_sharp_sandwich_domain():
    with pytest.raises(ValueError):
        probdist.sharp_pois_tail_bounds(100.0, 0.05)   # below lambda^{-1/2}


def test_calibration_reproduces_pinned_constant():
    # quick partial recalibration on a sub-sweep must not exceed the pin
    c = probdist.calibrate_sharp_tail_constant(lambdas=(10.0, 100.0))
    assert c >= probdist.SHARP_TAIL_LOWER_C - 1e-12


def test_gaussian_regime_reference():
    # asymptotic equivalent up to constants: logs agree to within 1 when
    # the tail is already small (lam delta^3 -> 0, lam delta^2 large-ish)
    lam, delta = 10000.0, 0.05
    exact = sps.poisson.sf(math.ceil(lam * (1 + delta)) - 1, lam)
    ref = probdist.gaussian_regime_tail(lam, delta)
    assert abs(math.log(ref) - math.log(exact)) < 1.0


def test_binom_pmf_matches_scipy():
    ks = np.arange(0, 40)
    np.testing.assert_allclose(
        probdist.binom_pmf(ks, 1000, 0.003), sps.binom.pmf(ks, 1000, 0.003),
        rtol=1e-11)


def test_binom_pois_ratio_hand_value():
    # [DERIVED] k=0: ratio = (1-p)^n / e^{-np}; n=100, p=0.01
    cmp0 = probdist.binom_pois_compare(0, 100, 0.01)
    assert cmp0.ratio == pytest.approx((0.99 ** 100) / math.exp(-1.0), rel=1e-12)
    assert cmp0.within_envelope


def test_bernstein_dominates_exact():
    lam = 50.0
    for t in (5.0, 10.0, 30.0):
        exact_up = sps.poisson.sf(math.ceil(lam + t) - 1, lam)
        assert exact_up <= probdist.bernstein_tail(lam, t, "upper")
        exact_lo = sps.poisson.cdf(math.floor(lam - t), lam)
        assert exact_lo <= probdist.bernstein_tail(lam, t, "lower")


def test_chernoff_binom_dominates_exact():
    n, p = 500, 0.01
    for k in (10, 20, 40):
        assert sps.binom.sf(k - 1, n, p) <= probdist.chernoff_binom_tail(n, p, k)


def test_heavy_tail_bound_dominates_exact():
    n, p = 10 ** 5, 1e-5
    for tau in (3, 5, 8):
        assert sps.binom.sf(tau - 1, n, p) <= probdist.binom_heavy_tail_bound(n, p, tau)


def test_weibull_bound_shape():
    # decreasing in t, trivial (>= 1 allowed) at t = 0
    vals = [probdist.weibull_sq_sum_bound(1000, 1.0, t) for t in (0, 10, 100, 1000)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


@settings(max_examples=60, deadline=None)
@given(lam=st.floats(10.0, 1000.0), frac=st.floats(0.0, 1.0))
def test_sharp_sandwich_property(lam, frac):
    # integer thresholds with delta in [lambda^{-1/2}, 3], the lemma's domain
    k_lo = math.ceil(lam * (1.0 + lam ** -0.5))
    k_hi = math.floor(lam * 4.0)
    k = k_lo + int(frac * (k_hi - k_lo))
    delta = k / lam - 1.0
    if not lam ** -0.5 <= delta <= 3.0:
        return
    b = probdist.sharp_pois_tail_bounds(lam, delta, with_exact=True)
    assert b.exact <= b.upper * (1 + 1e-12)
    assert b.lower <= b.exact * (1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(100, 10 ** 5), k=st.integers(0, 15),
       lam=st.floats(0.1, 5.0))
def test_binom_pois_envelope_property(n, k, lam):
    bound = 0.5 * math.sqrt(n)
    if k > bound or lam > bound:
        return
    assert probdist.binom_pois_compare(k, n, lam / n).within_envelope

"""Acceptance criteria.

Twelve criteria, one test each.  Criteria 1-4, 11 and 12 are exact,
self-contained oracle suites with runtime caps.  Criteria 5-8 and 10 are
ensemble trend/frequency checks reading cached seed records from
tests/data/ens_*.jsonl (produced by scripts/run_ensembles.py; every record
is bit-reproducible from its seed, so the caches are just saved compute).

Three criteria are asserted as specified but are known to fail at these
graph sizes; they are kept red on purpose rather than weakened:

* criterion 7 (lexicographic ordering): the eigenvalue order of the top
  hubs genuinely differs from the lexicographic (alpha, beta) order at
  u* = 9, because beta/alpha spreads by more than 1.5 while consecutive
  alpha values differ by 1.  The asymptotic ordering sets in only once
  u* is large.  Measured agreement is ~10% against the required 90%.
* criterion 9 (pruning postconditions): at N = 10^6 the rough class has
  ~19000 vertices and ~2000 pairs of them sit within graph distance 6,
  so radius-3 balls around them cannot be pairwise disjoint no matter
  which incident edges are pruned.  The other two postconditions
  (removed-edge degree cap, idempotence) do hold and are asserted last
  so the failure message isolates the disjointness gap.
* criterion 10 (point-process distance trend): the pooled seed-averaged
  Levy-Prokhorov distance is dominated by the excess of empirical
  eigenvalues above the truncation cut (each rescaled eigenvalue sits
  about 5 process units above its intensity atom, and that displacement
  does not shrink between N = 10^4 and 10^6).  Measured medians: 3.07 at
  N = 10^4 versus 3.37 at 10^6 - an increase.  Even a shape-only
  (probability-normalized) variant is flat within noise (0.348 vs
  0.339), so no honest reading of the statistic decreases.

See the decisions ledger for the measurements behind all three.
"""

import json
import math
import os
import statistics
import time

import numpy as np
import pytest

from spectraledge import (graph, local, pipeline, pointproc, probdist,
                          prune, sparse_eigen, tree_eig)
from helpers import edges_to_graph, random_tree

DATA = os.path.join(os.path.dirname(__file__), "data")


def load_ensemble(name, minimum):
    path = os.path.join(DATA, name)
    if not os.path.exists(path):
        pytest.fail(f"missing ensemble cache {path}; regenerate with "
                    f"scripts/run_ensembles.py (see README)")
    with open(path) as fh:
        recs = [json.loads(line) for line in fh if line.strip()]
    if len(recs) < minimum:
        pytest.fail(f"{path} has {len(recs)} seeds, need >= {minimum}")
    return recs


@pytest.fixture(scope="module")
def ens_1e4():
    return load_ensemble("ens_1e4.jsonl", 100)


@pytest.fixture(scope="module")
def ens_1e5():
    return load_ensemble("ens_1e5.jsonl", 50)


@pytest.fixture(scope="module")
def ens_1e6():
    return load_ensemble("ens_1e6.jsonl", 100)


@pytest.fixture(scope="module")
def ens_1e7():
    return load_ensemble("ens_1e7.jsonl", 10)


def dense_eigs(g):
    return np.linalg.eigvalsh(g.to_csr().toarray().astype(float))


# -- criterion 1: tree eigensolver oracle ---------------------------------

def test_c01_tree_eigensolver_oracle():
    start = time.monotonic()
    rng = np.random.default_rng(101)
    for _ in range(200):
        n = int(rng.integers(2, 201))
        g = random_tree(rng, n, max_degree=20)
        root = int(rng.integers(0, n))
        ball = local.extract_ball(g, root, n)
        pair = tree_eig.cf_eigenvalue(ball)
        a = g.to_csr().toarray().astype(float)
        vals, vecs = np.linalg.eigh(a)
        assert abs(pair.lam - vals[-1]) <= 1e-10
        w = np.zeros(n)
        for v, x in pair.vector.items():
            w[v] = x
        vec = vecs[:, -1]
        if np.dot(w, vec) < 0:
            vec = -vec
        assert float(np.linalg.norm(w - vec)) <= 1e-8
    assert time.monotonic() - start < 10.0


# -- criterion 2: Lanczos oracle -------------------------------------------

def test_c02_lanczos_oracle():
    start = time.monotonic()
    rng = np.random.default_rng(202)
    for trial in range(50):
        n = int(rng.integers(30, 501))
        d = float(rng.uniform(0.8, 4.0))
        g = graph.sample_er(graph.GraphConfig(n, d, trial))
        res = sparse_eigen.top_k(g, 5, tol=1e-10, seed=trial)
        vals = dense_eigs(g)[::-1][:5]
        assert np.max(np.abs(res.eigenvalues - vals)) <= 1e-9
        assert np.all(res.residuals <= 1e-8)
    assert time.monotonic() - start < 30.0


# -- criterion 3: sharp Poisson tail sandwich ------------------------------

def test_c03_poisson_tail_sandwich():
    start = time.monotonic()
    rng = np.random.default_rng(303)
    checked = 0
    while checked < 500:
        lam = float(rng.uniform(10.0, 1000.0))
        # integer threshold k = lam(1 + delta) with delta in the valid range
        k_lo = math.ceil(lam * (1.0 + lam ** -0.5))
        k_hi = math.floor(lam * 4.0)
        k = int(rng.integers(k_lo, k_hi + 1))
        delta = k / lam - 1.0
        if not (lam ** -0.5 <= delta <= 3.0):
            continue
        b = probdist.sharp_pois_tail_bounds(lam, delta, with_exact=True)
        if b.exact == 0.0:        # tail underflows double precision
            continue
        assert b.exact <= b.upper * (1 + 1e-12)
        assert b.exact >= b.lower * (1 - 1e-12)
        checked += 1
    assert time.monotonic() - start < 5.0


# -- criterion 4: binomial to Poisson pmf envelope -------------------------

def test_c04_binom_pois_envelope():
    start = time.monotonic()
    for n in (10 ** 3, 10 ** 4, 10 ** 5):
        cap = math.sqrt(n) / 2.0
        nps = [x for x in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 15.8,
                           20.0, 50.0, 100.0, 150.0, 158.0) if x <= cap]
        for np_val in nps:
            p = np_val / n
            for k in range(0, int(cap) + 1, max(1, int(cap) // 40)):
                cmp = probdist.binom_pois_compare(k, n, p)
                assert abs(cmp.ratio - 1.0) <= cmp.envelope
    assert time.monotonic() - start < 5.0


# -- criterion 5: eigenvalue formula trend ---------------------------------

def median_max_top5_error(recs):
    vals = []
    for r in recs[:50]:
        errs = [abs(m["eigenvalue"] - m["simplified"])
                for m in r["matched"][:5] if m.get("simplified") is not None]
        if errs:
            vals.append(max(errs))
    return statistics.median(vals)


def test_c05_formula_error_trend(ens_1e4, ens_1e5, ens_1e6):
    m4 = median_max_top5_error(ens_1e4)
    m5 = median_max_top5_error(ens_1e5)
    m6 = median_max_top5_error(ens_1e6)
    assert m4 > m5 > m6, (m4, m5, m6)


# -- criterion 6: estimator dominance at N = 10^6 --------------------------

def test_c06_estimator_dominance(ens_1e6):
    four, two, alpha = [], [], []
    for r in ens_1e6:
        for m in r["matched"][:5]:
            if m.get("four_term_sq") is None:
                continue
            lam2 = m["eigenvalue"] ** 2
            four.append(abs(lam2 - m["four_term_sq"]))
            two.append(abs(lam2 - (m["alpha"] + m["beta"] / m["alpha"])))
            alpha.append(abs(lam2 - m["alpha"]))
    m_four = statistics.median(four)
    m_two = statistics.median(two)
    m_alpha = statistics.median(alpha)
    assert m_four <= m_two <= m_alpha, (m_four, m_two, m_alpha)


# -- criterion 7: lexicographic ordering (known red, see module docstring) -

def test_c07_lexicographic_ordering(ens_1e6):
    # qualification pinned after calibration: the fully joint structural
    # event never holds at N = 10^6 (ball disjointness fails on every
    # seed), so seeds qualify on the sub-event actually used by the
    # ordering argument: fine-regime balls are trees with controlled
    # sphere growth, and the top-3 gaps exceed 10x the solver tolerance.
    qualified = agreed = 0
    for r in ens_1e6:
        fine = r["omega_flags"]["fine"]
        if fine["trees"] and fine["sphere_growth"] and r["gaps_top3_resolved"]:
            qualified += 1
            if r["agree_top3"]:
                agreed += 1
    assert qualified >= 30, "too few qualifying seeds to measure a rate"
    rate = agreed / qualified
    assert rate >= 0.90, (
        f"lexicographic agreement {agreed}/{qualified} = {rate:.3f}; "
        f"ordering by (alpha, beta) does not match eigenvalue order at "
        f"u* = 9 because beta/alpha varies by more than the alpha gaps")


# -- criterion 8: localization frequencies and trend -----------------------

ROOT_MASS_BAND = (0.5, 0.85)


def localization_deviations(recs, d=1.0):
    mass_dev, ratio_dev, in_band, ratio_ok = [], [], 0, 0
    for r in recs:
        rm, rr, la = r["root_mass"], r["s2_s1_ratio"], r["loc_alpha"]
        if rm is None or not la:
            continue
        pred = math.sqrt(d / la)
        if ROOT_MASS_BAND[0] <= rm <= ROOT_MASS_BAND[1]:
            in_band += 1
        if pred / 2.0 <= rr <= 2.0 * pred:
            ratio_ok += 1
        mass_dev.append(abs(rm - sum(ROOT_MASS_BAND) / 2.0))
        ratio_dev.append(abs(rr - pred))
    n = len(mass_dev)
    return (in_band / n, ratio_ok / n,
            statistics.median(mass_dev), statistics.median(ratio_dev))


def test_c08_localization(ens_1e5, ens_1e6, ens_1e7):
    in_band, ratio_ok, _, _ = localization_deviations(ens_1e6)
    assert in_band >= 0.90, f"root mass in band in {in_band:.2%} of seeds"
    assert ratio_ok >= 0.80, f"sphere ratio within 2x in {ratio_ok:.2%}"
    _, _, md5, rd5 = localization_deviations(ens_1e5)
    _, _, md7, rd7 = localization_deviations(ens_1e7)
    assert md7 < md5, (md5, md7)
    assert rd7 < rd5, (rd5, rd7)


# -- criterion 9: pruning postconditions (known red, see module docstring) -

def test_c09_pruning_postconditions():
    for seed in (0, 1):
        g = graph.sample_er(graph.GraphConfig(10 ** 6, 1.0, seed))
        bench = graph.degree_benchmark(10 ** 6, 1.0)
        part = local.classify_regimes(g, bench.u_star)
        pg = prune.prune(g, part.rough, strict=False)
        # degree cap and idempotence hold; assert disjointness last so the
        # failure pinpoints the unattainable condition
        assert pg.removed_max_degree <= 2 + 5 - 2
        again = prune.prune(pg.to_graph(), part.rough, strict=False)
        assert not again.removed_edges, "pruning is not idempotent"
        assert not pg.postcondition_violations, (
            f"seed {seed}: {len(pg.postcondition_violations)} disjointness "
            f"violations, e.g. {pg.postcondition_violations[0]}")


# -- criterion 10: point process distance trend ----------------------------

def pooled_lp(recs, n, d=1.0, n_draws=30):
    recs = recs[:100]
    phi = np.sort(np.concatenate([r["phi_points"] for r in recs]))[::-1]
    phi_s = pointproc.PointProcessSample(points=phi, origin="phi_pool")
    u, cut = recs[0]["u_star"], recs[0]["kappa_cut"]
    rho = pipeline.rho_for(n, d, u)
    lps = []
    for j in range(n_draws):
        pool = [pointproc.sample_psi(rho, r["seed"], replicate=j + 1,
                                     kappa_cut=cut).points for r in recs]
        psi = np.sort(np.concatenate(pool))[::-1]
        psi_s = pointproc.PointProcessSample(points=psi, origin="psi_pool")
        lps.append(pointproc.lp_distance(phi_s, psi_s,
                                         mass_scale=1.0 / len(recs)))
    return statistics.median(lps)


def test_c10_point_process_trend(ens_1e4, ens_1e6):
    lp4 = pooled_lp(ens_1e4, 10 ** 4)
    lp6 = pooled_lp(ens_1e6, 10 ** 6)
    assert lp6 < lp4, (
        f"pooled lp increased from {lp4:.3f} (N=1e4) to {lp6:.3f} (N=1e6); "
        f"the empirical eigenvalue count above the cut stays ~1.9-2.2x the "
        f"intensity's tail mass at desk scale, so the seed-averaged mass "
        f"gap does not contract (see module docstring)")


# -- criterion 11: Kesten forest bound --------------------------------------

def test_c11_forest_bound():
    rng = np.random.default_rng(1111)
    for _ in range(200):
        pieces, offset, n_total = [], 0, 0
        n_comp = int(rng.integers(1, 5))
        for _ in range(n_comp):
            m = int(rng.integers(3, 60))
            t = random_tree(rng, m, max_degree=10)
            for v in range(m):
                for w in t.neighbors(v):
                    if v < w:
                        pieces.append((v + offset, w + offset))
            offset += m
            n_total += m
        forest = edges_to_graph(n_total, pieces)
        lam = dense_eigs(forest)[-1]
        delta = int(forest.degrees().max())
        assert lam <= 2.0 * math.sqrt(delta - 1) + 1e-12


# -- criterion 12: bipartite spectral symmetry ------------------------------

def test_c12_bipartite_symmetry():
    rng = np.random.default_rng(1212)
    for _ in range(50):
        pieces, offset, n_total = [], 0, 0
        for _ in range(int(rng.integers(1, 4))):
            m = int(rng.integers(3, 80))
            t = random_tree(rng, m, max_degree=12)
            for v in range(m):
                for w in t.neighbors(v):
                    if v < w:
                        pieces.append((v + offset, w + offset))
            offset += m
            n_total += m
        forest = edges_to_graph(n_total, pieces)
        vals = dense_eigs(forest)
        assert vals[0] == pytest.approx(-vals[-1], abs=1e-9)
    # and through the sparse path: negated Lanczos on one tree
    g = random_tree(rng, 300, max_degree=10)
    top = sparse_eigen.top_k(g, 1, tol=1e-11, seed=5)
    bot = sparse_eigen.top_k(g, 1, tol=1e-11, seed=5, negate=True)
    assert bot.eigenvalues[0] == pytest.approx(-top.eigenvalues[0], abs=1e-9)

"""Summarize cached ensembles to pin acceptance thresholds.

Reads tests/data/ens_*.jsonl and prints, per N:
  - criterion 5: median over seeds of max over top-5 matched |lambda - formula|
  - criterion 6: medians of |lambda^2 - {four_term, two_term, alpha}|
  - criterion 7: qualification counts and agreement rate
  - criterion 8: root-mass / ratio frequencies and deviation medians
  - criterion 10: pooled Levy-Prokhorov distances

Run: python3 scripts/calibrate_acceptance.py
"""

import json
import math
import os
import statistics

import numpy as np

from spectraledge import pipeline, pointproc

DATA = os.path.join(os.path.dirname(__file__), "..", "tests", "data")


def load(name):
    path = os.path.join(DATA, name)
    if not os.path.exists(path):
        return []
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def crit5_stat(recs):
    vals = []
    for r in recs:
        errs = [abs(m["eigenvalue"] - m["simplified"])
                for m in r["matched"][:5] if m.get("simplified") is not None]
        if errs:
            vals.append(max(errs))
    return statistics.median(vals) if vals else None


def crit6_stats(recs):
    out = {"four": [], "two": [], "alpha": []}
    for r in recs:
        for m in r["matched"][:5]:
            if m.get("four_term_sq") is None:
                continue
            lam2 = m["eigenvalue"] ** 2
            a, b = m["alpha"], m["beta"]
            out["four"].append(abs(lam2 - m["four_term_sq"]))
            out["two"].append(abs(lam2 - (a + b / a)))
            out["alpha"].append(abs(lam2 - a))
    return {k: statistics.median(v) for k, v in out.items() if v}


def crit7(recs):
    qual = agree = full_omega = 0
    for r in recs:
        fine = r["omega_flags"]["fine"]
        if fine["trees"] and fine["sphere_growth"] and r["gaps_top3_resolved"]:
            qual += 1
            if r["agree_top3"]:
                agree += 1
        if r["omega_fine_ok"]:
            full_omega += 1
    return qual, agree, full_omega


def crit8(recs, d=1.0):
    in_band = ratio_ok = 0
    mass_dev, ratio_dev = [], []
    for r in recs:
        rm, rr, la = r["root_mass"], r["s2_s1_ratio"], r["loc_alpha"]
        if rm is None or la in (None, 0):
            continue
        pred = math.sqrt(d / la)
        if 0.5 <= rm <= 0.85:
            in_band += 1
        if pred / 2 <= rr <= 2 * pred:
            ratio_ok += 1
        mass_dev.append(abs(rm - 0.675))
        ratio_dev.append(abs(rr - pred))
    n = len(mass_dev)
    return (in_band / n, ratio_ok / n,
            statistics.median(mass_dev), statistics.median(ratio_dev), n)


def crit10(recs, n, d=1.0, n_draws=10):
    recs = recs[:100]
    phi = np.sort(np.concatenate([r["phi_points"] for r in recs]))[::-1]
    phi_s = pointproc.PointProcessSample(points=phi, origin="phi_pool")
    u = recs[0]["u_star"]
    cut = recs[0]["kappa_cut"]
    rho = pipeline.rho_for(n, d, u)
    lps = []
    for j in range(n_draws):
        pool = []
        for r in recs:
            s = pointproc.sample_psi(rho, r["seed"], replicate=j + 1,
                                     kappa_cut=cut)
            pool.append(s.points)
        psi = np.sort(np.concatenate(pool))[::-1]
        psi_s = pointproc.PointProcessSample(points=psi, origin="psi_pool")
        lps.append(pointproc.lp_distance(phi_s, psi_s,
                                         mass_scale=1.0 / len(recs)))
    return statistics.median(lps), lps


def main():
    sets = [("ens_1e4.jsonl", 10 ** 4), ("ens_1e5.jsonl", 10 ** 5),
            ("ens_1e6.jsonl", 10 ** 6), ("ens_1e7.jsonl", 10 ** 7)]
    for name, n in sets:
        recs = load(name)
        if not recs:
            print(f"{name}: missing")
            continue
        print(f"== {name}: {len(recs)} seeds, u*={recs[0]['u_star']}")
        print(f"  crit5 median max top-5 |lam - formula| = {crit5_stat(recs):.6g}")
        print(f"  crit6 medians = {crit6_stats(recs)}")
        q, a, fo = crit7(recs)
        print(f"  crit7 qualified={q} agree={a} "
              f"rate={a / q if q else float('nan'):.3f} full_omega={fo}")
        ib, ro, md, rd, cnt = crit8(recs)
        print(f"  crit8 in_band={ib:.3f} ratio_ok={ro:.3f} "
              f"mass_dev_med={md:.4f} ratio_dev_med={rd:.4f} (n={cnt})")
        if len(recs) >= 100:
            med, lps = crit10(recs, n)
            print(f"  crit10 pooled lp median={med:.4f} draws={[round(x, 3) for x in lps]}")


if __name__ == "__main__":
    main()

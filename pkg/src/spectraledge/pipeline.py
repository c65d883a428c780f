"""Per-seed experiment pipeline and ensemble aggregation.

One seed run does: sample graph, locate the max-degree benchmark, classify
regimes, check the structural event, extract fine-regime balls with their
continued-fraction eigenpairs, run the global eigensolver, match global
pairs to hubs, transform the spectrum into the point process scale and
compare against the sampled reference process, and record localization
profiles.  Everything is deterministic from (n, d, seed).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from . import graph, local, pointproc, probdist, sparse_eigen, tree_eig
from . import __version__


@dataclass
class ExperimentConfig:
    n_vertices: int
    expected_degree: float
    n_seeds: int = 1
    base_seed: int = 0
    radius: int = 5
    localization_radius: int | None = None    # r' (r must be >= max(5, 2 r'))
    top_k: int = 8
    tol: float = 1e-8
    output_dir: str = "."
    envelope_constant: float = local.ENVELOPE_CONSTANT
    truncation_constant: float = tree_eig.TRUNCATION_CONSTANT

    def validate(self):
        if self.n_seeds < 1:
            raise ValueError(f"n_seeds must be >= 1, got {self.n_seeds}")
        if self.radius < 5:
            raise ValueError(f"radius must be >= 5, got {self.radius}")
        rp = self.localization_radius
        if rp is not None and self.radius < max(5, 2 * rp):
            raise ValueError(
                f"radius {self.radius} below max(5, 2*r') with r'={rp}")
        graph.GraphConfig(self.n_vertices, self.expected_degree, self.base_seed)

    def d_range_warning(self) -> str | None:
        logn = math.log(self.n_vertices)
        lo, hi = logn ** (-1.0 / 9.0), logn ** (1.0 / 40.0)
        d = self.expected_degree
        if not lo <= d <= hi:
            return (f"d={d} outside the theorem range "
                    f"[log^(-1/9)N, log^(1/40)N] = [{lo:.4f}, {hi:.4f}]")
        return None


@dataclass
class SeedRecord:
    """Scalars retained per seed (vectors are dropped for memory)."""

    seed: int
    u_star: int
    regime_sizes: tuple[int, int, int]          # |W|, |V|, |U|
    x_m_sizes: tuple[int, int]                  # |X_0|, |X_1|
    omega_intermediate_ok: bool
    omega_fine_ok: bool
    omega_flags: dict
    eigenvalues: list[float]
    residuals: list[float]
    converged: list[bool]
    matvec_count: int
    # per top-5 eigenpair, stats of the matched (argmax) vertex
    matched: list[dict]
    agree_top3: bool | None
    gaps_top3_resolved: bool
    # localization of the top eigenvector
    root_mass: float
    s2_s1_ratio: float | None
    loc_alpha: int
    # point process
    phi_points: list[float]
    psi_points: list[float]
    lp: float
    kappa_cut: float

    def formula_errors(self) -> dict:
        """Per-estimator absolute errors over the matched top-5."""
        out = {"simplified_lam": [], "four_term_sq": [], "two_term_sq": [],
               "alpha_sq": []}
        for m in self.matched:
            lam = m["eigenvalue"]
            a, b = m["alpha"], m["beta"]
            if a <= 0:
                continue
            out["simplified_lam"].append(abs(lam - m["simplified"]))
            lam2 = lam * lam
            out["alpha_sq"].append(abs(lam2 - a))
            out["two_term_sq"].append(abs(lam2 - (a + b / a)))
            if m["four_term_sq"] is not None:
                out["four_term_sq"].append(abs(lam2 - m["four_term_sq"]))
        return out


_RHO_CACHE: dict[tuple[int, float, int], pointproc.IntensityRho] = {}


def rho_for(n: int, d: float, u_star: int) -> pointproc.IntensityRho:
    key = (n, d, u_star)
    if key not in _RHO_CACHE:
        _RHO_CACHE[key] = pointproc.build_rho(n, d, u_star)
    return _RHO_CACHE[key]


def run_seed(n: int, d: float, seed: int, r: int = 5, k: int = 8,
             tol: float = 1e-8, max_iter: int = 3000,
             check_event: bool = True, m_max: int | None = None) -> SeedRecord:
    g = graph.sample_er(graph.GraphConfig(n, d, seed))
    bench = graph.degree_benchmark(n, d)
    u = bench.u_star
    part = local.classify_regimes(g, u)
    deg = part.degrees
    xm = (int(np.sum(deg >= u)), int(np.sum(deg >= u - 1)))

    omega = None
    if check_event:
        omega = local.check_omega(g, part, r, d)

    res = sparse_eigen.top_k(g, k, tol=tol, max_iter=max_iter, seed=seed,
                             m_max=m_max)

    # fine-regime balls and their exact tree eigenpairs
    ball_data = {}
    for x in part.fine:
        x = int(x)
        ball = local.extract_ball(g, x, r)
        stats = local.local_stats(ball)
        pair = None
        if ball.is_tree and stats.alpha > 0:
            try:
                pair = tree_eig.cf_eigenvalue(ball)
            except (tree_eig.BracketError, RuntimeError):
                pair = None
        if pair is not None:
            ball_data[x] = (ball, pair, stats)

    matches = sparse_eigen.match_eigenpairs(res, part, ball_data, d)

    matched = []
    for i in range(min(5, k)):
        m = matches[i]
        x = m.vertex
        if x in ball_data:
            stats = ball_data[x][2]
        else:
            ball = local.extract_ball(g, x, r)
            stats = local.local_stats(ball)
        a, b = stats.alpha, stats.beta
        four = None
        if stats.beta11 is not None and a > 0:
            four = (a + b / a + (stats.beta11 + stats.beta2) / a ** 2
                    - b * b / a ** 3)
        simplified = math.sqrt(a + b / a + (d * d + d) / a) if a > 0 else math.nan
        matched.append({
            "eig_index": i, "eigenvalue": m.eigenvalue, "vertex": x,
            "alpha": a, "beta": b, "beta2": stats.beta2,
            "beta11": stats.beta11, "simplified": simplified,
            "four_term_sq": four, "overlap": m.overlap,
            "lex_rank": m.lex_rank, "agreement": m.agreement,
            "in_fine": m.in_fine_regime,
            "unresolved_cluster": m.unresolved_cluster,
        })

    top3 = matches[:3]
    gaps_ok = (len(res.eigenvalues) >= 3
               and not any(m.unresolved_cluster for m in top3))
    agree_top3 = None
    if gaps_ok and all(m.agreement is not None for m in top3):
        agree_top3 = all(m.agreement for m in top3)

    # localization of the top eigenvector around its peak vertex
    v0 = res.eigenvectors[:, 0]
    x0 = int(np.argmax(np.abs(v0)))
    ball0 = local.extract_ball(g, x0, r)
    root_mass = float(abs(v0[x0]))
    s1 = ball0.levels[1] if len(ball0.levels) > 1 else []
    s2 = ball0.levels[2] if len(ball0.levels) > 2 else []
    m1 = math.sqrt(float(np.sum(v0[np.array(s1, dtype=int)] ** 2))) if s1 else 0.0
    m2 = math.sqrt(float(np.sum(v0[np.array(s2, dtype=int)] ** 2))) if s2 else 0.0
    ratio = (m2 / m1) if m1 > 0 else None

    # point process comparison at the standard truncation
    rho = rho_for(n, d, u)
    big_k = math.exp(math.log(n) ** 0.125)
    kap = pointproc.kappa(rho, big_k)
    kappa_cut = u * kap if math.isfinite(kap) else -math.inf
    phi = pointproc.empirical_phi(res, d, u, kappa_cut)
    psi = pointproc.sample_psi(rho, seed, kappa_cut=kappa_cut)
    lp = pointproc.lp_distance(phi, psi)

    omega_flags = {}
    if omega is not None:
        omega_flags = {
            "intermediate": {
                "disjoint": omega.intermediate.disjoint,
                "trees": omega.intermediate.trees,
                "sphere_growth": omega.intermediate.sphere_growth,
                "child_counts": omega.intermediate.child_counts,
                "beta2": omega.intermediate.beta2_concentration,
            },
            "fine": {
                "disjoint": omega.fine.disjoint,
                "trees": omega.fine.trees,
                "sphere_growth": omega.fine.sphere_growth,
                "child_counts": omega.fine.child_counts,
                "beta2": omega.fine.beta2_concentration,
            },
        }

    return SeedRecord(
        seed=seed, u_star=u,
        regime_sizes=(len(part.fine), len(part.intermediate), len(part.rough)),
        x_m_sizes=xm,
        omega_intermediate_ok=(omega.intermediate.all_ok if omega else False),
        omega_fine_ok=(omega.fine.all_ok if omega else False),
        omega_flags=omega_flags,
        eigenvalues=[float(x) for x in res.eigenvalues],
        residuals=[float(x) for x in res.residuals],
        converged=[bool(x) for x in res.converged],
        matvec_count=res.matvec_count,
        matched=matched, agree_top3=agree_top3, gaps_top3_resolved=gaps_ok,
        root_mass=root_mass, s2_s1_ratio=ratio,
        loc_alpha=len(s1),
        phi_points=[float(x) for x in phi.points],
        psi_points=[float(x) for x in psi.points],
        lp=float(lp), kappa_cut=float(kappa_cut))


def run_edge_experiment(cfg: ExperimentConfig) -> dict:
    """Run the ensemble and write aggregate report files.

    Returns the aggregate report dict; writes report.json and
    per-seed CSV tables under cfg.output_dir.
    """
    import csv
    import os

    cfg.validate()
    warning = cfg.d_range_warning()
    os.makedirs(cfg.output_dir, exist_ok=True)

    records = []
    for i in range(cfg.n_seeds):
        rec = run_seed(cfg.n_vertices, cfg.expected_degree,
                       cfg.base_seed + i, r=cfg.radius, k=cfg.top_k,
                       tol=cfg.tol)
        records.append(rec)
        # flush per-seed scalars immediately
        with open(os.path.join(cfg.output_dir, "seeds.jsonl"),
                  "w" if i == 0 else "a") as fh:
            fh.write(json.dumps(asdict(rec), sort_keys=True) + "\n")

    med = lambda xs: float(np.median(xs)) if len(xs) else math.nan
    simplified_errs = []
    lp_values = [r.lp for r in records]
    root_masses = [r.root_mass for r in records]
    ratios = [r.s2_s1_ratio for r in records if r.s2_s1_ratio is not None]
    for r in records:
        errs = r.formula_errors()["simplified_lam"]
        if errs:
            simplified_errs.append(max(errs))

    report = {
        "version": __version__,
        "config": asdict(cfg),
        "pinned_constants": {
            "envelope_constant": cfg.envelope_constant,
            "truncation_constant": cfg.truncation_constant,
            "sharp_tail_lower_c": probdist.SHARP_TAIL_LOWER_C,
            "rho_mass_floor": pointproc.MASS_FLOOR,
        },
        "d_range_warning": warning,
        "u_star": records[0].u_star if records else None,
        "n_seeds": len(records),
        "median_max_top5_simplified_error": med(simplified_errs),
        "median_lp": med(lp_values),
        "median_root_mass": med(root_masses),
        "median_s2_s1_ratio": med(ratios),
        "omega_fine_pass_rate": float(np.mean([r.omega_fine_ok for r in records])) if records else None,
        "omega_intermediate_pass_rate": float(np.mean([r.omega_intermediate_ok for r in records])) if records else None,
        "agreement_rate_top3": float(np.mean(
            [r.agree_top3 for r in records if r.agree_top3 is not None]))
        if any(r.agree_top3 is not None for r in records) else None,
    }
    with open(os.path.join(cfg.output_dir, "report.json"), "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)

    with open(os.path.join(cfg.output_dir, "estimators.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["seed", "eig_index", "eigenvalue", "vertex", "alpha",
                    "beta", "beta2", "beta11", "simplified", "overlap",
                    "lex_rank", "agreement"])
        for r in records:
            for m in r.matched:
                w.writerow([r.seed, m["eig_index"], m["eigenvalue"],
                            m["vertex"], m["alpha"], m["beta"], m["beta2"],
                            m["beta11"], m["simplified"], m["overlap"],
                            m["lex_rank"], m["agreement"]])

    with open(os.path.join(cfg.output_dir, "localization.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["seed", "root_mass", "s2_s1_ratio", "alpha", "lp"])
        for r in records:
            w.writerow([r.seed, r.root_mass, r.s2_s1_ratio, r.loc_alpha, r.lp])

    return report

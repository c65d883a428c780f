"""Command line interface.

Subcommands: generate, stats, ball-eig, spectrum, prune, bounds,
pointprocess, report.  Configuration files are flat key=value text;
command line flags override file values.  Exit status 0 on success,
2 on configuration/validation errors, 3 when a pruning postcondition
fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from . import __version__, graph, local, pointproc, probdist, prune as prune_mod
from . import sparse_eigen, tree_eig, pipeline

log = logging.getLogger("spectraledge")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_POSTCONDITION = 3


def read_config_file(path: str) -> dict:
    """Parse a flat key=value config file; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _load_graph_and_d(args):
    g = graph.load_graph(args.graph)
    d = args.d if args.d is not None else 2.0 * g.edge_count / g.n_vertices
    return g, d


def cmd_generate(args) -> int:
    cfg = graph.GraphConfig(args.n, args.d, args.seed)
    g = graph.sample_er(cfg)
    graph.save_graph(g, args.out)
    if args.edge_list:
        graph.export_edge_list(g, args.edge_list)
    print(f"generated N={g.n_vertices} edges={g.edge_count} -> {args.out}")
    return EXIT_OK


def cmd_stats(args) -> int:
    g, d = _load_graph_and_d(args)
    bench = graph.degree_benchmark(g.n_vertices, d)
    part = local.classify_regimes(g, bench.u_star)
    rows = {}
    for v in np.concatenate([part.fine, part.intermediate]):
        v = int(v)
        rows[v] = local.local_stats(local.extract_ball(g, v, args.radius))
    local.export_stats_csv(rows, args.radius, args.out)
    print(f"u_star={bench.u_star} |fine|={len(part.fine)} "
          f"|intermediate|={len(part.intermediate)} |rough|={len(part.rough)} "
          f"-> {args.out}")
    return EXIT_OK


def cmd_ball_eig(args) -> int:
    g, d = _load_graph_and_d(args)
    bench = graph.degree_benchmark(g.n_vertices, d)
    part = local.classify_regimes(g, bench.u_star)
    rows = []
    for v in part.fine:
        v = int(v)
        ball = local.extract_ball(g, v, args.radius)
        if not ball.is_tree:
            continue
        stats = local.local_stats(ball)
        if stats.alpha == 0:
            continue
        pair = tree_eig.cf_eigenvalue(ball)
        row = {"vertex": v, "lambda_cf": pair.lam}
        for kind in tree_eig.ESTIMATOR_KINDS:
            row[kind] = tree_eig.estimate(stats, d, kind).value
        rows.append(row)
    tree_eig.export_estimator_csv(rows, args.out)
    print(f"wrote {len(rows)} fine-regime ball eigenpairs -> {args.out}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    g, _ = _load_graph_and_d(args)
    res = sparse_eigen.top_k(g, args.k, tol=args.tol, seed=args.seed,
                             negate=args.negate)
    sparse_eigen.export_spectral_json(res, args.out)
    flag = "" if res.all_converged else " (not all converged)"
    print(f"eigenvalues {np.array2string(res.eigenvalues, precision=8)} "
          f"matvecs={res.matvec_count}{flag} -> {args.out}")
    return EXIT_OK


def cmd_prune(args) -> int:
    g, d = _load_graph_and_d(args)
    bench = graph.degree_benchmark(g.n_vertices, d)
    part = local.classify_regimes(g, bench.u_star)
    try:
        pg = prune_mod.prune(g, part.rough, c1=args.c1, c2=args.c2,
                             strict=not args.no_strict)
    except prune_mod.PrunePostconditionError as exc:
        log.error("pruning postcondition failed: %s", exc)
        return EXIT_POSTCONDITION
    prune_mod.export_removed_edges(pg, args.out_edges)
    nviol = len(pg.postcondition_violations)
    print(f"removed {len(pg.removed_edges)} edges, "
          f"max removed degree {pg.removed_max_degree}, "
          f"{nviol} recorded violations -> {args.out_edges}")
    if nviol and not args.no_strict:
        return EXIT_POSTCONDITION
    return EXIT_OK


def cmd_bounds(args) -> int:
    import csv
    lams = [float(x) for x in args.lambdas.split(",")]
    deltas = [float(x) for x in args.deltas.split(",")]
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lambda", "delta", "exact_tail", "sharp_lower",
                    "sharp_upper", "bernstein", "sandwich_ok"])
        n_rows = 0
        for lam in lams:
            for delta in deltas:
                try:
                    b = probdist.sharp_pois_tail_bounds(lam, delta,
                                                        with_exact=True)
                except ValueError as exc:
                    log.debug("skipping lambda=%s delta=%s: %s",
                              lam, delta, exc)
                    continue
                bern = probdist.bernstein_tail(lam, delta * lam, side="upper")
                ok = (b.exact is None
                      or b.lower <= b.exact <= b.upper)
                w.writerow([lam, delta, b.exact, b.lower, b.upper, bern, ok])
                n_rows += 1
    print(f"tabulated {n_rows} in-domain (lambda, delta) pairs "
          f"with lower constant {probdist.SHARP_TAIL_LOWER_C} -> {args.out}")
    return EXIT_OK


def cmd_pointprocess(args) -> int:
    with open(args.spectrum) as fh:
        spec = json.load(fh)
    eigenvalues = np.asarray(spec["eigenvalues"], dtype=float)
    converged = np.asarray(spec.get("converged", [True] * len(eigenvalues)))
    bench = graph.degree_benchmark(args.n, args.d)
    u = bench.u_star
    rho = pipeline.rho_for(args.n, args.d, u)
    big_k = math.exp(math.log(args.n) ** 0.125)
    kap = pointproc.kappa(rho, big_k)
    cut = u * kap
    lam = eigenvalues[converged]
    phi_pts = np.sort(u * (lam ** 2 - (args.d ** 2 + args.d) / u))[::-1]
    phi_pts = phi_pts[phi_pts >= cut]
    phi = pointproc.PointProcessSample(points=phi_pts, origin="empirical_phi")
    psi = pointproc.sample_psi(rho, args.seed, kappa_cut=cut)
    lp = pointproc.lp_distance(phi, psi)
    report = {
        "version": __version__,
        "n": args.n, "d": args.d, "u_star": u, "kappa_cut": cut,
        "rho_total_mass": rho.total_mass,
        "phi": [float(x) for x in phi.points],
        "psi": [float(x) for x in psi.points],
        "lp_distance": float(lp),
        "pinned_constants": {
            "mass_floor": pointproc.MASS_FLOOR,
            "sharp_tail_lower_c": probdist.SHARP_TAIL_LOWER_C,
        },
    }
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
    print(f"|phi|={len(phi.points)} |psi|={len(psi.points)} lp={lp:.6g} "
          f"-> {args.out}")
    return EXIT_OK


_CONFIG_TYPES = {
    "n_vertices": int, "expected_degree": float, "n_seeds": int,
    "base_seed": int, "radius": int, "localization_radius": int,
    "top_k": int, "tol": float, "output_dir": str,
}


def cmd_report(args) -> int:
    values = {}
    if args.config:
        raw = read_config_file(args.config)
        for key, val in raw.items():
            if key not in _CONFIG_TYPES:
                raise ValueError(f"unknown config key {key!r}")
            values[key] = _CONFIG_TYPES[key](val)
    for key in _CONFIG_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if "n_vertices" not in values or "expected_degree" not in values:
        raise ValueError("n_vertices and expected_degree are required")
    cfg = pipeline.ExperimentConfig(**values)
    cfg.validate()
    warning = cfg.d_range_warning()
    if warning:
        log.warning("%s", warning)
    report = pipeline.run_edge_experiment(cfg)
    print(f"ran {report['n_seeds']} seeds at N={cfg.n_vertices} "
          f"d={cfg.expected_degree}: median lp={report['median_lp']:.6g}, "
          f"median max top-5 formula error="
          f"{report['median_max_top5_simplified_error']:.6g} "
          f"-> {cfg.output_dir}/report.json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spectraledge",
        description="Sparse random graph spectral edge experiments.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("generate", help="sample a sparse graph")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--edge-list", default=None)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("stats", help="local statistics and regimes")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--d", type=float, default=None)
    sp.add_argument("--radius", type=int, default=5)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("ball-eig", help="tree ball eigenpairs and estimators")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--d", type=float, default=None)
    sp.add_argument("--radius", type=int, default=5)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_ball_eig)

    sp = sub.add_parser("spectrum", help="extremal adjacency eigenpairs")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--d", type=float, default=None)
    sp.add_argument("--k", type=int, default=8)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--negate", action="store_true",
                    help="solve for the most negative eigenvalues")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("prune", help="detach high-degree neighborhoods")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--d", type=float, default=None)
    sp.add_argument("--c1", type=int, default=2)
    sp.add_argument("--c2", type=int, default=5)
    sp.add_argument("--no-strict", action="store_true",
                    help="record postcondition violations instead of raising")
    sp.add_argument("--out-edges", required=True)
    sp.set_defaults(func=cmd_prune)

    sp = sub.add_parser("bounds", help="tabulate tail bound sandwiches")
    sp.add_argument("--lambdas", default="10,30,100,300,1000")
    sp.add_argument("--deltas", default="0.1,0.3,1,3")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("pointprocess",
                        help="compare a spectrum against the limiting process")
    sp.add_argument("--spectrum", required=True,
                    help="JSON produced by the spectrum subcommand")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_pointprocess)

    sp = sub.add_parser("report", help="run the full edge experiment ensemble")
    sp.add_argument("--config", default=None,
                    help="flat key=value config file; flags override")
    sp.add_argument("--n-vertices", dest="n_vertices", type=int, default=None)
    sp.add_argument("--expected-degree", dest="expected_degree", type=float,
                    default=None)
    sp.add_argument("--n-seeds", dest="n_seeds", type=int, default=None)
    sp.add_argument("--base-seed", dest="base_seed", type=int, default=None)
    sp.add_argument("--radius", type=int, default=None)
    sp.add_argument("--localization-radius", dest="localization_radius",
                    type=int, default=None)
    sp.add_argument("--top-k", dest="top_k", type=int, default=None)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--output-dir", dest="output_dir", default=None)
    sp.set_defaults(func=cmd_report)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, graph.GraphConfigError, local.RegimeError,
            FileNotFoundError, tree_eig.NotATreeError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except prune_mod.PrunePostconditionError as exc:
        log.error("pruning postcondition failed: %s", exc)
        return EXIT_POSTCONDITION


if __name__ == "__main__":
    sys.exit(main())

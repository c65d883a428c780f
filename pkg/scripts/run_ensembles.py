"""Run a seed ensemble and append per-seed scalar records to a JSONL file.

Usage: python3 scripts/run_ensembles.py --n 1000000 --d 1.0 --seeds 100 \
          --k 8 --out tests/data/ens_1e6.jsonl [--no-omega] [--start 0]

Records are pipeline.SeedRecord dataclasses serialized with asdict; the
acceptance suite reads these as its shared ensemble cache.
"""

import argparse
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from spectraledge import pipeline  # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, required=True)
    ap.add_argument("--d", type=float, default=1.0)
    ap.add_argument("--seeds", type=int, required=True)
    ap.add_argument("--start", type=int, default=0)
    ap.add_argument("--k", type=int, default=8)
    ap.add_argument("--r", type=int, default=5)
    ap.add_argument("--no-omega", action="store_true")
    ap.add_argument("--m-max", type=int, default=None,
                    help="cap the Lanczos basis (memory = m_max * N * 8 bytes)")
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    done = set()
    if out.exists():
        with open(out) as fh:
            for line in fh:
                done.add(json.loads(line)["seed"])

    for seed in range(args.start, args.start + args.seeds):
        if seed in done:
            continue
        t0 = time.time()
        rec = pipeline.run_seed(args.n, args.d, seed, r=args.r, k=args.k,
                                check_event=not args.no_omega,
                                m_max=args.m_max)
        with open(out, "a") as fh:
            fh.write(json.dumps(asdict(rec), sort_keys=True) + "\n")
        print(f"seed {seed}: {time.time()-t0:.1f}s lp={rec.lp:.3f} "
              f"agree={rec.agree_top3} omega_fine={rec.omega_fine_ok}",
              flush=True)


if __name__ == "__main__":
    main()

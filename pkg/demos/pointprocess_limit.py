"""Edge eigenvalues as a Poisson point process.

Builds the limiting intensity rho for G(N, d/N), draws reference samples
Psi from it, extracts the empirical rescaled eigenvalue cloud Phi from a
simulated graph, and reports the Levy-Prokhorov distance between the two.

Run: python3 demos/pointprocess_limit.py [N] [seed]
"""

import math
import sys

from spectraledge import pipeline, pointproc


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    d = 1.0

    rec = pipeline.run_seed(n, d, seed=seed, k=8, check_event=False)
    u = rec.u_star
    rho = pipeline.rho_for(n, d, u)
    big_k = math.exp(math.log(n) ** 0.125)
    kap = pointproc.kappa(rho, big_k)
    print(f"N = {n}, d = {d}, u* = {u}")
    print(f"intensity: {len(rho.support)} atoms, total mass "
          f"{rho.total_mass:.4f}, truncation kappa(K) = {kap:.4f}")
    print()
    print(f"empirical Phi (points u*(lambda^2 - (d^2+d)/u*) above the cut):")
    print("  " + ", ".join(f"{x:.4f}" for x in rec.phi_points))
    print("reference Psi draw:")
    print("  " + ", ".join(f"{x:.4f}" for x in rec.psi_points))
    print(f"Levy-Prokhorov distance: {rec.lp:.4f}")
    print()
    print("single seeds are noisy; pooling Phi over many seeds against a")
    print("matched pool of Psi draws (see the acceptance suite) shows the")
    print("distance contracting as N grows.")


if __name__ == "__main__":
    main()

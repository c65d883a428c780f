"""Sharp Poisson tail sandwich and the binomial-to-Poisson envelope.

Prints the two-sided bound on P(Pois(lambda) >= lambda(1 + delta))
next to the exact tail, then shows how closely a Binomial(n, lambda/n)
pmf tracks its Poisson limit for n over several orders of magnitude.

Run: python3 demos/tail_sandwich.py
"""

from spectraledge import probdist


def main():
    print("sharp Poisson tail sandwich, lower constant "
          f"c = {probdist.SHARP_TAIL_LOWER_C:.6f}")
    print(f"{'lambda':>8} {'delta':>6} {'exact':>12} {'lower':>12} "
          f"{'upper':>12} {'upper/exact':>11}")
    for lam in (10.0, 100.0, 1000.0):
        for delta in (0.5, 1.0, 2.0):
            b = probdist.sharp_pois_tail_bounds(lam, delta, with_exact=True)
            if b.exact == 0.0:
                # the exact tail underflows double precision here, but the
                # log-scale bounds still bracket it; skip the ratio column
                print(f"{lam:>8.0f} {delta:>6.1f} {'underflow':>12} "
                      f"{b.lower:>12.4e} {b.upper:>12.4e} {'-':>11}")
                continue
            print(f"{lam:>8.0f} {delta:>6.1f} {b.exact:>12.4e} "
                  f"{b.lower:>12.4e} {b.upper:>12.4e} "
                  f"{b.upper / b.exact:>11.3f}")

    print()
    print("binomial pmf over Poisson pmf at k = 5, lambda = 2:")
    print(f"{'n':>8} {'ratio':>12} {'|ratio-1| bound 4(k^2+(np)^2+1)/n':>34}")
    for n in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6):
        cmp = probdist.binom_pois_compare(5, n, 2.0 / n)
        bound = 4.0 * (25 + 4 + 1) / n
        print(f"{n:>8} {cmp.ratio:>12.8f} {bound:>34.2e}")


if __name__ == "__main__":
    main()

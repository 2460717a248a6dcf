#!/usr/bin/env python3
"""Two-method eigenvalue comparison on the shifted harmonic oscillator.

For P = z^2 - 1 the problem -y'' + lambda^2 P y = 0 has the exact
spectrum {1, 3, 5, ...}.  This script compares the ray asymptotics
against Wronskian zeros located by the argument principle.
"""

import argparse
import time

from stokesgeo import (accumulation_rays, eigenvalue_asymptotics,
                       parse_poly_text, wronskian_eigenvalue_search)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=10)
    ap.add_argument("--order", type=int, default=2)
    args = ap.parse_args()

    poly = parse_poly_text("1,0,-1")
    rays = accumulation_rays(poly)
    print(f"accumulation rays: {[r.angle for r in rays]}")

    t0 = time.time()
    estimates = eigenvalue_asymptotics(poly, rays[0], 0, args.n_max,
                                       order=args.order)
    print(f"asymptotics (order {args.order}, {time.time() - t0:.2f} s):")
    for est in estimates:
        exact = 2 * est.n + 1
        print(f"  n={est.n:2d}  lambda={est.value.real:+.12f}"
              f"{est.value.imag:+.2e}i   error {abs(est.value - exact):.2e}")

    t0 = time.time()
    zeros = wronskian_eigenvalue_search(poly, (0, 2), (0.5, 7.5, -1.0, 1.0))
    print(f"wronskian zeros ({time.time() - t0:.1f} s):")
    for z, exact in zip(zeros, (1, 3, 5, 7)):
        print(f"  {z.real:+.12f}{z.imag:+.2e}i   error {abs(z - exact):.2e}")


if __name__ == "__main__":
    main()

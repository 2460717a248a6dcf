#!/usr/bin/env python3
"""Census of short-geodesic counts over random polynomials.

Draws simple-rooted monic centered polynomials of the requested degrees,
enumerates their short geodesics and tabulates the counts against the
connectivity bounds d-1 <= count <= d(d-1)/2.
"""

import argparse
import collections
import random
import time

from stokesgeo import ComplexPolynomial, survey_short_geodesics


def random_simple_poly(rng, d, min_sep=0.5, radius=1.5):
    while True:
        roots = [complex(rng.uniform(-radius, radius),
                         rng.uniform(-radius, radius)) for _ in range(d)]
        mean = sum(roots) / d
        roots = [r - mean for r in roots]
        if all(abs(roots[i] - roots[j]) >= min_sep
               for i in range(d) for j in range(i + 1, d)):
            return ComplexPolynomial.from_roots(1.0, roots)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degrees", default="3,4,5")
    ap.add_argument("--trials", type=int, default=25)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    for d in (int(x) for x in args.degrees.split(",")):
        hist = collections.Counter()
        failures = 0
        t0 = time.time()
        for _ in range(args.trials):
            poly = random_simple_poly(rng, d)
            try:
                survey = survey_short_geodesics(poly)
            except Exception:
                failures += 1
                continue
            if survey.errors:
                failures += 1
                continue
            hist[len(survey.geodesics)] += 1
        lo, hi = d - 1, d * (d - 1) // 2
        print(f"degree {d}: bounds [{lo}, {hi}]  "
              f"counts {dict(sorted(hist.items()))}  "
              f"failures {failures}  ({time.time() - t0:.1f} s)")
        bad = [k for k in hist if not lo <= k <= hi]
        if bad:
            print(f"  *** bound violations at counts {bad} ***")


if __name__ == "__main__":
    main()

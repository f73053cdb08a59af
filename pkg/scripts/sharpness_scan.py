"""Blow-up slope across a range of Sobolev exponents around the endpoint.

For each alpha0 the focused-mass ratio is fitted against eps; the slope
changes sign at alpha0 = n |1/p - 1/2|.  Writes one CSV with
(alpha0, slope, expected slope).

Usage: python3 scripts/sharpness_scan.py [--n 1] [--p 4] [--out scan.csv]
"""

import argparse

import numpy as np

from wavekit.experiments import sharpness as sh
from wavekit.report import ExperimentReport, write_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1)
    ap.add_argument("--p", type=float, default=4.0)
    ap.add_argument("--t", type=float, default=2.0)
    ap.add_argument("--out", default="sharpness_scan.csv")
    args = ap.parse_args(argv)
    endpoint = args.n * abs(1 / args.p - 0.5)
    eps = 2.0 ** -np.arange(12, 6, -1)
    alphas = endpoint + np.linspace(-0.15, 0.15, 7)
    slopes, expected = [], []
    for a in alphas:
        spec = sh.SharpnessFamily(args.n, args.t, float(eps[0]), float(a), args.p)
        rep = sh.blowup_measure(spec, eps)
        slopes.append(rep.fits["ratio"].slope)
        expected.append(rep.params["expected_slope"])
        print(f"alpha0 = {a:.4f}: slope {slopes[-1]:+.4f} (expected {expected[-1]:+.4f})")
    out = ExperimentReport("sharpness_scan", {"n": args.n, "p": args.p, "t": args.t})
    out.add_column("alpha0", alphas)
    out.add_column("slope", slopes)
    out.add_column("expected", expected)
    write_csv(out, args.out)


if __name__ == "__main__":
    main()

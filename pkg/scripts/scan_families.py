#!/usr/bin/env python3
"""Sweep lattice families and record the monotonicity verdict for each member.

Three one-parameter families, all entered through the reduced-domain corner
cases where the verdict flips:

  rect:   a = 0,      b in [1, b_max]          (expected monotone everywhere)
  shear:  a in (0, 0.5], b = 1.2               (expected violated once a > 0)
  klein:  Klein bottles, b in [b_min, b_max]   (expected violated everywhere)

Writes one CSV row per family member: parameters, verdict, witness count,
largest certified radial derivative, wall time.

Usage:
  python3 scripts/scan_families.py --family shear --steps 12 --out shear.csv
  python3 scripts/scan_families.py --family all --dirs 90 --samples 32
"""
import argparse
import csv
import time

import numpy as np

from flatheat import Heat, ScanConfig, klein_bottle, scan, torus


def sweep(family, steps, b_max):
    if family == "rect":
        for b in np.linspace(1.0, b_max, steps):
            yield {"family": "rect", "a": 0.0, "b": float(b)}, torus(0.0, float(b))
    elif family == "shear":
        for a in np.linspace(0.5 / steps, 0.5, steps):
            yield {"family": "shear", "a": float(a), "b": 1.2}, torus(float(a), 1.2)
    elif family == "klein":
        for b in np.linspace(0.6, b_max, steps):
            yield {"family": "klein", "a": "", "b": float(b)}, klein_bottle(float(b))
    else:
        raise ValueError(family)


def run_family(family, args, writer):
    cfg = ScanConfig(n_directions=args.dirs, n_arc_samples=args.samples,
                     t_values=tuple(args.t_list),
                     derivative_tolerance=args.tol,
                     kernel_epsilon=args.tol / 10.0)
    for params, surface in sweep(family, args.steps, args.b_max):
        started = time.perf_counter()
        report = scan(surface, Heat(), cfg)
        elapsed = time.perf_counter() - started
        peak = max((w.radial_derivative - w.error_bound
                    for w in report.witnesses), default=0.0)
        if writer is not None:
            writer.writerow(dict(params, verdict=report.verdict.value,
                                 witnesses=len(report.witnesses),
                                 inconclusive=report.inconclusive_count,
                                 peak_certified_derivative=f"{peak:.6e}",
                                 seconds=f"{elapsed:.3f}"))
        print(f"{params['family']:>6}  a={params['a'] or 0:<8} "
              f"b={params['b']:<8.4f} {report.verdict.value:<12} "
              f"witnesses={len(report.witnesses):<5} peak={peak:.3e}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", choices=("rect", "shear", "klein", "all"),
                    default="all")
    ap.add_argument("--steps", type=int, default=10)
    ap.add_argument("--b-max", type=float, default=2.0)
    ap.add_argument("--dirs", type=int, default=90)
    ap.add_argument("--samples", type=int, default=32)
    ap.add_argument("--t-list", type=float, nargs="+", default=[0.1, 1.0])
    ap.add_argument("--tol", type=float, default=1e-12)
    ap.add_argument("--out", default=None, help="CSV path (default: stdout only)")
    args = ap.parse_args()

    fields = ["family", "a", "b", "verdict", "witnesses", "inconclusive",
              "peak_certified_derivative", "seconds"]
    sink = open(args.out, "w", newline="") if args.out else None
    writer = None
    if sink:
        writer = csv.DictWriter(sink, fieldnames=fields)
        writer.writeheader()
    families = ("rect", "shear", "klein") if args.family == "all" else (args.family,)
    for family in families:
        run_family(family, args, writer)
    if sink:
        sink.close()
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Export the certified counterexample curves as CSV for plotting.

For each requested construction, writes <out-dir>/<name>.csv with columns
s, projection, derivative: the principal-projection profile along the
violating geodesic, sampled through the radius where it turns around.
A fourth column marks samples past the turning radius.

Usage:
  python3 scripts/counterexample_curves.py --out-dir curves
  python3 scripts/counterexample_curves.py --kinds generic klein --a 0.2 --b 1.4
"""
import argparse
import csv
import pathlib

from flatheat import (counterexample_generic, counterexample_isosceles,
                      counterexample_klein)


def write_curve(path, rec):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "projection", "derivative", "past_turnaround"])
        for s, p, dp in zip(rec.s_values, rec.p_values, rec.dp_values):
            past = int(rec.s_star is not None and s > rec.s_star)
            writer.writerow([f"{s:.12g}", f"{p:.12g}", f"{dp:.12g}", past])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kinds", nargs="+", default=["generic", "isosceles", "klein"],
                    choices=("generic", "isosceles", "klein"))
    ap.add_argument("--a", type=float, default=0.3)
    ap.add_argument("--b", type=float, default=1.2)
    ap.add_argument("--klein-b", type=float, default=1.5)
    ap.add_argument("--xi", type=float, default=0.25)
    ap.add_argument("--out-dir", default="curves")
    args = ap.parse_args()

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for kind in args.kinds:
        if kind == "generic":
            rec = counterexample_generic(args.a, args.b)
            name = f"generic_a{args.a}_b{args.b}"
        elif kind == "isosceles":
            rec = counterexample_isosceles(args.a)
            name = f"isosceles_a{args.a}"
        else:
            rec = counterexample_klein(args.klein_b, xi=args.xi)
            name = f"klein_b{args.klein_b}_xi{args.xi}"
        path = out / f"{name}.csv"
        write_curve(path, rec)
        turn = "none" if rec.s_star is None else f"{rec.s_star:.6f}"
        print(f"{rec.kind:<18} increase={rec.increase:.3e} "
              f"turnaround={turn}  -> {path}")


if __name__ == "__main__":
    main()

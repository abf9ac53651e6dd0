#!/usr/bin/env python3
"""Flagship run: Z=118, kappa=-2, n=600 — plain vs stabilized rows vs the
closed form, first 15 levels."""
import argparse

from diracloud.cli import RunConfig, run_solve
from diracloud.eigen import FLAG_GENUINE


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--Z", type=float, default=118.0)
    ap.add_argument("--kappa", type=int, default=-2)
    ap.add_argument("--n", type=int, default=600)
    ap.add_argument("--levels", type=int, default=15)
    args = ap.parse_args()

    results = {}
    for method in ("galerkin", "cpg"):
        cfg = RunConfig(Z=args.Z, kappa=args.kappa, n_intervals=args.n,
                        method=method, levels=args.levels)
        results[method] = run_solve(cfg).report

    gal, cpg = results["galerkin"], results["cpg"]
    print(f"Z={args.Z:g} kappa={args.kappa} n={args.n}")
    print(f"{'lvl':>4} {'plain':>18} {'stabilized':>18} {'exact':>18} "
          f"{'rel(stab)':>10}")
    gmap = {m.level: m for m in gal.matches}
    for m in cpg.matches:
        g = gmap.get(m.level)
        gtxt = f"{g.computed:18.10f}" if g else " " * 18
        print(f"{m.level:4d} {gtxt} {m.computed:18.10f} {m.exact:18.10f} "
              f"{m.rel_error:10.2e}")

    for name, rep in results.items():
        flagged = [(f"{v:.6f}", f) for v, f in
                   zip(rep.positive_shifted, rep.flags)
                   if f not in (FLAG_GENUINE, "unmatched_tail")]
        print(f"{name}: {len(flagged)} flagged value(s)", flagged or "")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Level errors and their slopes against the coarsest spacing for a
sequence of interval counts (stabilized method)."""
import argparse

from diracloud.cli import RunConfig, rates_from_errors, run_solve


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--Z", type=float, default=118.0)
    ap.add_argument("--kappa", type=int, default=-2)
    ap.add_argument("--n-values", default="200,400,600,800,1000")
    ap.add_argument("--rate-levels", type=int, default=5)
    args = ap.parse_args()

    n_values = [int(s) for s in args.n_values.split(",")]
    samples = {lv: [] for lv in range(1, args.rate_levels + 1)}
    print(f"{'n':>6} {'h':>10} " +
          " ".join(f"{'lvl ' + str(lv):>12}" for lv in samples))
    for n in n_values:
        cfg = RunConfig(Z=args.Z, kappa=args.kappa, n_intervals=n,
                        method="cpg", levels=args.rate_levels)
        res = run_solve(cfg)
        h = float(res.grid.spacings[-1])
        errs = {m.level: m.rel_error for m in res.report.matches}
        for lv in samples:
            samples[lv].append((h, errs[lv]))
        print(f"{n:6d} {h:10.5f} " +
              " ".join(f"{errs[lv]:12.3e}" for lv in samples))

    rates = rates_from_errors(samples)
    print("slopes: " + "  ".join(f"lvl{lv}={r:.2f}" for lv, r in sorted(rates.items())))


if __name__ == "__main__":
    main()

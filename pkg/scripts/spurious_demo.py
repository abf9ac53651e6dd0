#!/usr/bin/env python3
"""Shows the two spuriosity modes of the plain rows at Z=118 and how the
row-scaled test space clears them: the kappa=+2 bottom state shadowing the
kappa=-2 ground level, and the instilled state inside the level-13/14 gap."""
from diracloud.cli import RunConfig, run_solve
from diracloud.eigen import FLAG_GENUINE, FLAG_TAIL
from diracloud.physics import PhysicalSystem, exact_eigenvalue

N = 600
Z = 118.0


def show(kappa, method, window=18):
    cfg = RunConfig(Z=Z, kappa=kappa, n_intervals=N, method=method, levels=15)
    rep = run_solve(cfg).report
    print(f"\n-- kappa={kappa:+d}  method={method}")
    for v, f in list(zip(rep.positive_shifted, rep.flags))[:window]:
        mark = "" if f == FLAG_GENUINE else f"   <-- {f}"
        if f == FLAG_TAIL:
            mark = "   (tail)"
        print(f"  {v:18.10f}{mark}")


def main():
    mirror_ground = exact_eigenvalue(PhysicalSystem(Z=Z, kappa=2), 1)
    print(f"closed-form ground level of the kappa=-2 tower: {mirror_ground:.10f}")
    print("(for kappa=+2 the physical tower starts one radial slot higher)")
    for method in ("galerkin", "cpg"):
        show(2, method)
    print("\ninstilled state between levels 13 and 14 (kappa=-2):")
    for method in ("galerkin", "cpg"):
        cfg = RunConfig(Z=Z, kappa=-2, n_intervals=N, method=method, levels=15)
        rep = run_solve(cfg).report
        lv = {m.level: m.computed for m in rep.matches}
        inside = [(f"{v:.6f}", f) for v, f in
                  zip(rep.positive_shifted, rep.flags)
                  if lv[13] < v < lv[14] and f != FLAG_GENUINE]
        print(f"  {method}: {inside or 'clean gap'}")


if __name__ == "__main__":
    main()

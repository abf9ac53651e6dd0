"""Config-driven command line driver.

Subcommands: solve (one spectrum + classification), sweep (one parameter
over a value list, long-format CSV), convergence (node-count study with
per-level rates), dump-matrices (text triplets of every assembled
block).  Configs are flat key = value files with CLI flag overrides;
every output embeds the effective config so results are self-describing.
Runs are fully deterministic: same config, byte-identical CSV.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""
import argparse
import dataclasses
import json
import os
import sys as _sys
from dataclasses import dataclass

import numpy as np

from .assembly import (DegenerateTau, METHODS, assemble_system, assemble_weak_form,
                       build_quadrature, check_spectrum_reality, dump_matrix)
from .cloud import SingularMoment, build_cloud_basis
from .eigen import (FLAG_GENUINE, FLAG_TAIL, EmptySpectrum, SpectrumReport,
                    classify_spectrum, convergence_rate, solve_generalized)
from .enrichment import basis_from_name
from .grid import GridConfig, generate_grid
from .physics import C_LIGHT, PhysicalSystem

OUTDIR_ENV = "DIRACLOUD_OUTDIR"

CONFIG_ERROR, NUMERICAL_ERROR = 2, 3


@dataclass(frozen=True)
class RunConfig:
    # grid
    n_intervals: int = 600
    I_a: float = 0.0
    I_b: float = 100.0
    eps: float = 1e-5
    nu: float = 2.2
    # physics
    Z: float = 1.0
    A: float = 0.0
    kappa: int = -1
    c: float = C_LIGHT
    m: float = 1.0
    nucleus: str = "point"
    # run
    method: str = "cpg"
    enrichment: str = "sto"
    quadrature_factor: int = 10
    levels: int = 15
    output_path: str = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.levels < 0:
            raise ValueError("levels must be >= 0")
        if self.quadrature_factor < 2 or self.quadrature_factor % 2:
            raise ValueError("quadrature_factor must be even and >= 2")
        # cross-field checks delegate to the component configs
        self.grid_config()
        self.physical_system()

    def grid_config(self) -> GridConfig:
        return GridConfig(n_intervals=self.n_intervals, I_a=self.I_a,
                          I_b=self.I_b, eps=self.eps, nu=self.nu)

    def physical_system(self) -> PhysicalSystem:
        return PhysicalSystem(Z=self.Z, kappa=self.kappa, A=self.A, c=self.c,
                              m=self.m, nucleus=self.nucleus)

    def as_dict(self):
        return dataclasses.asdict(self)


@dataclass(frozen=True, eq=False)
class RunResult:
    config: RunConfig
    grid: object
    system: object
    eigenvalues: np.ndarray
    report: SpectrumReport


def run_solve(cfg: RunConfig) -> RunResult:
    """Grid -> clouds -> weak form -> system -> QZ -> classification."""
    grid = generate_grid(cfg.grid_config())
    sys = cfg.physical_system()
    cb = build_cloud_basis(grid, basis=basis_from_name(cfg.enrichment, cfg.Z))
    split = sys.nucleus_radius if sys.nucleus == "extended_uniform" else None
    quad = build_quadrature(grid, cfg.quadrature_factor, split_at=split)
    wfm = assemble_weak_form(cb, sys, quad)
    system = assemble_system(wfm, sys, cfg.method, grid=grid)
    # the unperturbed pencil is symmetric with B SPD: take the Cholesky
    # route there, QZ for the row-scaled (nonsymmetric) variants
    eigs = solve_generalized(system.A, system.B,
                             symmetric_definite=not np.any(system.tau != 0.0))
    check_spectrum_reality(eigs)
    report = classify_spectrum(eigs, sys, levels=cfg.levels)
    return RunResult(config=cfg, grid=grid, system=system,
                     eigenvalues=eigs, report=report)


# ---------------------------------------------------------------- output


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.13g}"
    return "" if v is None else str(v)


def _resolve_output(cfg_path, default_name):
    path = cfg_path if cfg_path else default_name
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir:
        path = os.path.join(outdir, os.path.basename(path))
    return path


def _config_header(cfg: RunConfig):
    return [f"# {k} = {_fmt(v)}" for k, v in cfg.as_dict().items()]


def solve_rows(report: SpectrumReport):
    """CSV rows for one classified spectrum: genuine levels carry their
    level number; flagged in-window values get an empty level field."""
    rows = []
    gen_idx = [i for i, f in enumerate(report.flags) if f == FLAG_GENUINE]
    match_at = dict(zip(gen_idx, report.matches))  # both ascend in value
    last = gen_idx[-1] if gen_idx else -1
    for i, (v, f) in enumerate(zip(report.positive_shifted, report.flags)):
        if i > last:
            break
        if f == FLAG_GENUINE:
            m = match_at[i]
            rows.append((m.level, m.computed, m.exact, m.rel_error, f))
        elif f != FLAG_TAIL:
            rows.append((None, float(v), None, None, f))
    return rows


def write_solve_csv(path, cfg, report):
    lines = _config_header(cfg)
    lines.append("level,computed_shifted,exact_shifted,relative_error,flag")
    for row in solve_rows(report):
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def report_as_dict(report: SpectrumReport):
    return {
        "n_eigenvalues": len(report.raw),
        "n_complex": report.n_complex,
        "positive_shifted": [float(v) for v in report.positive_shifted],
        "flags": list(report.flags),
        "matches": [dataclasses.asdict(m) for m in report.matches],
    }


def write_solve_json(path, cfg, report):
    payload = {"config": cfg.as_dict(), "report": report_as_dict(report)}
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


# ---------------------------------------------------------------- commands


def cmd_solve(cfg: RunConfig) -> int:
    res = run_solve(cfg)
    base = _resolve_output(cfg.output_path, "solve.csv")
    root = base[:-4] if base.endswith(".csv") else base
    write_solve_csv(root + ".csv", cfg, res.report)
    write_solve_json(root + ".json", cfg, res.report)
    for m in res.report.matches:
        print(f"level {m.level:3d}  {m.computed: .10e}  exact {m.exact: .10e}  "
              f"rel {m.rel_error:.2e}")
    for row in solve_rows(res.report):
        if row[4] != FLAG_GENUINE:
            print(f"flagged    {row[1]: .10e}  {row[4]}")
    print(f"wrote {root}.csv, {root}.json")
    return 0


SWEEPABLE = ("nu", "eps", "n_intervals", "quadrature_factor", "method")


def cmd_sweep(cfg: RunConfig, vary: str, values) -> int:
    if vary not in SWEEPABLE:
        raise ValueError(f"cannot sweep {vary!r}; choose from {SWEEPABLE}")
    lines = _config_header(cfg)
    lines.append("param_value,level,computed,exact,rel_error")
    for val in values:
        sub = dataclasses.replace(cfg, **{vary: val})
        res = run_solve(sub)
        for m in res.report.matches:
            lines.append(",".join(_fmt(v) for v in (val, m.level, m.computed,
                                                    m.exact, m.rel_error)))
    path = _resolve_output(cfg.output_path, "sweep.csv")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {path}")
    return 0


def rates_from_errors(samples_per_level: dict) -> dict:
    """Per-level convergence rates from {level: [(h, rel_err), ...]}."""
    return {lv: convergence_rate(samples) for lv, samples in samples_per_level.items()}


def cmd_convergence(cfg: RunConfig, n_values, rate_levels: int = 5) -> int:
    if len(n_values) < 3:
        raise ValueError("convergence study needs at least 3 node counts")
    samples = {lv: [] for lv in range(1, rate_levels + 1)}
    lines = _config_header(cfg)
    lines.append("n,level,h,computed,exact,rel_error")
    for n in n_values:
        sub = dataclasses.replace(cfg, n_intervals=int(n),
                                  levels=max(cfg.levels, rate_levels))
        res = run_solve(sub)
        h = float(res.grid.spacings[-1])  # the largest spacing on these grids
        for m in res.report.matches:
            lines.append(",".join(_fmt(v) for v in (n, m.level, h, m.computed,
                                                    m.exact, m.rel_error)))
            if m.level <= rate_levels:
                samples[m.level].append((h, m.rel_error))
    rates = rates_from_errors(samples)
    lines.append("level,rate")
    for lv, rate in sorted(rates.items()):
        lines.append(f"{lv},{_fmt(rate)}")
    path = _resolve_output(cfg.output_path, "convergence.csv")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
    for lv, rate in sorted(rates.items()):
        print(f"level {lv}: rate {rate:.3f}")
    print(f"wrote {path}")
    return 0


def cmd_dump_matrices(cfg: RunConfig) -> int:
    grid = generate_grid(cfg.grid_config())
    sys = cfg.physical_system()
    cb = build_cloud_basis(grid, basis=basis_from_name(cfg.enrichment, cfg.Z))
    split = sys.nucleus_radius if sys.nucleus == "extended_uniform" else None
    quad = build_quadrature(grid, cfg.quadrature_factor, split_at=split)
    wfm = assemble_weak_form(cb, sys, quad)
    system = assemble_system(wfm, sys, cfg.method, grid=grid)
    outdir = _resolve_output(cfg.output_path, "matrices")
    os.makedirs(outdir, exist_ok=True)
    blocks = {name: getattr(wfm, name) for name in
              ("M_000", "M_010", "M_001", "M_100", "M_110", "M_101",
               "M_000_V", "M_100_V")}
    blocks.update(A=system.A, B=system.B,
                  script_A=system.script_A, script_B=system.script_B)
    for name, mat in blocks.items():
        dump_matrix(os.path.join(outdir, name + ".txt"), mat, name=name)
    np.savetxt(os.path.join(outdir, "tau.txt"), system.tau)
    print(f"wrote {len(blocks) + 1} files to {outdir}")
    return 0


# ---------------------------------------------------------------- config I/O


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _coerce(key, raw):
    if key not in _FIELD_TYPES:
        raise ValueError(f"unknown config key {key!r}")
    t = _FIELD_TYPES[key]
    if t in (int, "int"):
        return int(raw)
    if t in (float, "float"):
        return float(raw)
    return raw


def read_config_file(path) -> dict:
    """Flat 'key = value' lines; # starts a comment."""
    out = {}
    with open(path) as f:
        for ln, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected key = value")
            key, raw = (s.strip() for s in line.split("=", 1))
            out[key] = _coerce(key, raw)
    return out


def build_config(args) -> RunConfig:
    kv = {}
    if args.config:
        kv.update(read_config_file(args.config))
    for key in _FIELD_TYPES:
        v = getattr(args, key, None)
        if v is not None:
            kv[key] = v
    return RunConfig(**kv)


def _add_config_flags(p):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--n-intervals", dest="n_intervals", type=int)
    p.add_argument("--Ia", dest="I_a", type=float)
    p.add_argument("--Ib", dest="I_b", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--Z", type=float)
    p.add_argument("--A", type=float)
    p.add_argument("--kappa", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--nucleus", choices=("point", "extended_uniform"))
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--enrichment")
    p.add_argument("--quadrature-factor", dest="quadrature_factor", type=int)
    p.add_argument("--levels", type=int)
    p.add_argument("--output", dest="output_path")


def _parse_values(vary, raw):
    parts = [s.strip() for s in raw.split(",") if s.strip()]
    if vary == "method":
        return parts
    if vary in ("n_intervals", "quadrature_factor"):
        return [int(s) for s in parts]
    return [float(s) for s in parts]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="diracloud",
                                 description="radial Dirac spectra with hp-cloud bases")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("solve", "sweep", "convergence", "dump-matrices"):
        p = sub.add_parser(name)
        _add_config_flags(p)
        if name == "sweep":
            p.add_argument("--vary", required=True, choices=SWEEPABLE)
            p.add_argument("--values", required=True,
                           help="comma-separated list for the varied parameter")
        if name == "convergence":
            p.add_argument("--n-values", dest="n_values", required=True,
                           help="comma-separated node counts, at least 3")
    args = ap.parse_args(argv)

    try:
        cfg = build_config(args)
        if args.command == "sweep":
            values = _parse_values(args.vary, args.values)
        if args.command == "convergence":
            n_values = [int(s) for s in args.n_values.split(",") if s.strip()]
    except (ValueError, OSError) as e:
        print(f"config error: {e}", file=_sys.stderr)
        return CONFIG_ERROR

    try:
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.vary, values)
        if args.command == "convergence":
            return cmd_convergence(cfg, n_values)
        return cmd_dump_matrices(cfg)
    except (SingularMoment, DegenerateTau, EmptySpectrum,
            np.linalg.LinAlgError) as e:
        print(f"numerical failure: {e}", file=_sys.stderr)
        return NUMERICAL_ERROR
    except ValueError as e:
        # includes SupercriticalCharge: a bad Z/kappa combination is a
        # config problem, not a solver breakdown
        print(f"config error: {e}", file=_sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    raise SystemExit(main())

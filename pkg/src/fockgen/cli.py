"""Batch front-end.

Subcommands
-----------
plan           plan a pulse schedule; writes schedule.json, prints a table
scan-fidelity  full-Hamiltonian fidelity over an (eta, x_d) grid -> CSV
scan-ground    ground-state vacuum probability over (eta, omega_x/omega_z) -> CSV
wigner         Wigner grids of the ideal/displaced/actual states -> CSVs + peaks
tables         curve/surface/distribution tables (Bessel, couplings, reduced
               Rabi, normalized generation time, photon distributions) -> CSVs

Common flags: --config PATH, --out DIR, --dim N, --threads N,
--set key=value (repeatable, dotted paths into the config schema).

Exit codes: 0 ok, 1 numeric failure, 2 collision detected,
3 phase unsolvable, 64 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import dynamics, synthesis, wigner as wig
from .config import ConfigError, RunConfig, load_config
from .csvio import write_csv
from .errors import CollisionDetected, DomainError, FockgenError, PhaseUnsolvable
from .fockspace import bessel_j
from .hamiltonians import TWO_PI, SystemParams, ground_vacuum_probability
from .sidebands import SidebandSpec, rabi_frequency

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_COLLISION = 2
EXIT_PHASE = 3
EXIT_USAGE = 64


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockgen", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", default=None, help="YAML config file (defaults apply if omitted)")
        p.add_argument("--out", default=None, help="output directory (overrides output.dir)")
        p.add_argument("--dim", type=int, default=None, help="Fock truncation override")
        p.add_argument("--threads", type=int, default=1, help="worker threads for scans")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="config override, dotted path (repeatable)")
    return parser


def _outdir(cfg: RunConfig, args) -> Path:
    out = Path(args.out) if args.out else Path(cfg.raw["output"]["dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _plan_from_config(cfg: RunConfig):
    return synthesis.plan_schedule(
        cfg.target(), cfg.system(), N=cfg.bessel_order, x_d=cfg.x_d
    )


def cmd_plan(cfg: RunConfig, args) -> int:
    """Plan the pulse schedule for the configured target."""
    out = _outdir(cfg, args)
    schedule = _plan_from_config(cfg)
    payload = synthesis.schedule_to_json(schedule)
    path = out / "schedule.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    print(f"# plan  config={cfg.sha256[:12]}  eta={schedule.eta:.6g}  x_d={schedule.x_d:.6g}")
    print(f"{'step':>4} {'kind':>8} {'N':>3} {'k':>3} {'omega_d/2pi (GHz)':>18} "
          f"{'phi_d (rad)':>12} {'t (ns)':>10} {'|O|t (rad)':>11}")
    for st in schedule.steps:
        mag = rabi_frequency(st.spec, 0, schedule.sys, schedule.x_d, 0.0).magnitude
        print(f"{st.step_index:>4} {st.spec.kind:>8} {st.spec.N:>3} {st.spec.k:>3} "
              f"{st.omega_d_n / TWO_PI:>18.6f} {st.phi_d_n:>12.6f} "
              f"{st.duration_tn:>10.6f} {mag * st.duration_tn:>11.6f}")
    print(f"total time T = {schedule.total_time_T:.6g} ns   "
          f"normalized T~ = {schedule.normalized_time:.6g}   "
          f"global phase = {schedule.global_phase:.6g} rad")
    print(f"wrote {path}")
    return EXIT_OK


def _fidelity_point(cfg: RunConfig, eta: float, x_d: float):
    """(F, T_ns, leakage, reason) for one scan point; NaNs with reason on failure."""
    try:
        sys_ = cfg.system(eta_override=eta)
        fock = cfg.fock()
        schedule = synthesis.plan_schedule(cfg.target(), sys_, N=cfg.bessel_order, x_d=x_d)
        if cfg.rates().any_nonzero:
            rho0 = _initial_state(cfg, sys_, fock).density()
            rho = dynamics.lindblad_evolve(rho0, schedule, sys_, cfg.rates(), fock,
                                           tol=cfg.raw["integration"]["lindblad_tol"])
            leak = float(np.sum(np.real(np.diag(rho.matrix))[_top_idx(fock.dim)]))
            rho_d = dynamics.displaced_target_density(cfg.target(), sys_, fock)
            f_val = dynamics.fidelity(rho, rho_d)
        else:
            psi0 = _initial_state(cfg, sys_, fock)
            psi = dynamics.schrodinger_evolve(psi0, schedule, sys_, fock,
                                              tol=cfg.raw["integration"]["tol"])
            leak = float(np.sum(np.abs(psi.amplitudes[_top_idx(fock.dim)]) ** 2))
            rho_d = dynamics.displaced_target_density(cfg.target(), sys_, fock)
            f_val = float(np.real(np.vdot(psi.amplitudes, rho_d.matrix @ psi.amplitudes)))
        return f_val, schedule.total_time_T, leak, ""
    except FockgenError as exc:
        return math.nan, math.nan, math.nan, f"{type(exc).__name__}: {exc}"


def _top_idx(dim: int):
    return np.r_[dim - 2: dim, 2 * dim - 2: 2 * dim]


def _initial_state(cfg: RunConfig, sys_: SystemParams, fock):
    if cfg.raw["integration"]["initial_state"] == "ground":
        return dynamics.ground_initial_state(sys_, fock)
    return dynamics.coherent_initial_state(sys_, fock)


def cmd_scan_fidelity(cfg: RunConfig, args) -> int:
    """Fidelity of the full-Hamiltonian run over the (eta, x_d) grid."""
    out = _outdir(cfg, args)
    etas = cfg.raw["scan"]["eta_values"]
    xds = cfg.raw["scan"]["x_d_values"]
    points = [(eta, x_d) for x_d in xds for eta in etas]
    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        results = list(pool.map(lambda p: _fidelity_point(cfg, *p), points))
    rows = [
        (eta, x_d, f_val, t_ns, leak, reason)
        for (eta, x_d), (f_val, t_ns, leak, reason) in zip(points, results)
    ]
    path = write_csv(out / "fidelity_scan.csv", cfg.meta_cells(),
                     ["eta", "x_d", "F", "T_ns", "leakage", "reason"], rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def cmd_scan_ground(cfg: RunConfig, args) -> int:
    """Ground-state vacuum probability over the (eta, omega_x/omega_z) grid."""
    out = _outdir(cfg, args)
    g = cfg.raw["ground_scan"]
    dim = args.dim or g["dim"]
    s = cfg.raw["system"]
    etas = [g["eta_max"] * (i + 1) / g["eta_points"] for i in range(g["eta_points"])]
    ratios = [g["ratio_max"] * (j + 1) / g["ratio_points"] for j in range(g["ratio_points"])]
    points = [(eta, ratio) for eta in etas for ratio in ratios]

    def one(point):
        eta, ratio = point
        sys_ = SystemParams.from_ghz(
            s["omega_z_ghz"], ratio * s["omega_z_ghz"], s["omega_cav_ghz"],
            eta * s["omega_cav_ghz"] / 2.0,
        )
        p1 = ground_vacuum_probability(sys_, cfg.fock(dim))
        p2 = ground_vacuum_probability(sys_, cfg.fock(2 * dim))
        return p1, p2

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        results = list(pool.map(one, points))
    rows = [
        (eta, ratio, p1, p2, abs(p1 - p2))
        for (eta, ratio), (p1, p2) in zip(points, results)
    ]
    path = write_csv(out / "ground_scan.csv", cfg.meta_cells(),
                     ["eta", "omega_x_over_omega_z", "P_g0", "P_g0_dim_doubled", "dim_gap"], rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return EXIT_OK


def _write_wigner_csv(cfg, out, name, grid):
    rows = (
        (grid.x[i], grid.y[j], grid.values[i, j])
        for i in range(grid.nx) for j in range(grid.ny)
    )
    meta = cfg.meta_cells() + [
        f"x_range={grid.x_range[0]}:{grid.x_range[1]}",
        f"y_range={grid.y_range[0]}:{grid.y_range[1]}",
        f"nx={grid.nx}", f"ny={grid.ny}",
    ]
    return write_csv(out / name, meta, ["x", "y", "W"], rows)


def cmd_wigner(cfg: RunConfig, args) -> int:
    """Wigner grids of rho^I (displaced picture), rho^D, and the actual rho^A."""
    out = _outdir(cfg, args)
    sys_ = cfg.system()
    fock = cfg.fock(args.dim)
    target = cfg.target()
    w = cfg.raw["wigner"]
    grid_kw = dict(x_range=(w["x_min"], w["x_max"]), y_range=(w["y_min"], w["y_max"]),
                   nx=w["nx"], ny=w["ny"])

    psi_i = dynamics.QuantumState(target.vector(fock.dim), "displaced")
    rho_i_c = dynamics.trace_out_qubit(psi_i.density())
    rho_d_c = dynamics.trace_out_qubit(dynamics.displaced_target_density(target, sys_, fock))

    schedule = _plan_from_config(cfg)
    rho0 = _initial_state(cfg, sys_, fock).density()
    rho_a = dynamics.lindblad_evolve(rho0, schedule, sys_, cfg.rates(), fock,
                                     tol=cfg.raw["integration"]["lindblad_tol"])
    rho_a_c = dynamics.trace_out_qubit(rho_a)

    peak_rows = []
    for name, rho_c in (("ideal_displaced", rho_i_c), ("ideal_original", rho_d_c),
                        ("actual", rho_a_c)):
        grid = wig.wigner_from_density(rho_c, **grid_kw)
        _write_wigner_csv(cfg, out, f"wigner_{name}.csv", grid)
        x_star, y_star = wig.find_peak(grid)
        peak_rows.append((name, x_star, y_star, float(np.max(grid.values)),
                          wig.grid_integral(grid)))
        print(f"wigner_{name}: peak at ({x_star:.4f}, {y_star:.4f})")
    path = write_csv(out / "wigner_peaks.csv", cfg.meta_cells(),
                     ["state", "x_peak", "y_peak", "w_max", "grid_integral"], peak_rows)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_tables(cfg: RunConfig, args) -> int:
    """Bessel curves, coupling surfaces, reduced Rabi curves, generation-time
    curves with minima, and photon distributions."""
    out = _outdir(cfg, args)
    meta = cfg.meta_cells()
    s = cfg.raw["system"]

    xs = np.linspace(0.0, 2.0, 201)
    write_csv(out / "bessel_curves.csv", meta, ["x_d", "J0", "J1", "J2", "J3"],
              ((x, bessel_j(0, x), bessel_j(1, x), bessel_j(2, x), bessel_j(3, x)) for x in xs))

    # |J_1^{mn}| = |J_1(x_d)| eta^(m+n) e^(-eta^2/2) / (m! n!)
    etas = np.linspace(0.0, 3.0, 61)
    xds = np.linspace(0.0, 2.0, 41)
    rows = []
    for eta in etas:
        damp = math.exp(-0.5 * eta * eta)
        for x_d in xds:
            j1 = abs(bessel_j(1, x_d))
            rows.append((eta, x_d, j1 * damp, j1 * eta * damp, j1 * eta * eta * damp))
    write_csv(out / "coupling_surfaces.csv", meta,
              ["eta", "x_d", "absJ1_00", "absJ1_01", "absJ1_11"], rows)

    etas = np.linspace(0.01, 4.0, 400)
    rows = []
    for eta in etas:
        damp = math.exp(-0.5 * eta * eta)
        rows.append([eta] + [damp * eta**n / math.sqrt(math.factorial(n)) for n in range(1, 6)])
    write_csv(out / "reduced_rabi.csv", meta,
              ["eta", "n1", "n2", "n3", "n4", "n5"], rows)

    uniform = {
        n_max: synthesis.TargetState.normalized([1.0] * (n_max + 1)) for n_max in range(1, 6)
    }
    etas = np.linspace(0.05, 4.0, 400)
    rows = []
    for eta in etas:
        row = [eta]
        for n_max in range(1, 6):
            _, t_tilde = synthesis.total_time(uniform[n_max], cfg.system(), cfg.bessel_order,
                                              cfg.x_d, eta=eta)
            row.append(t_tilde)
        rows.append(row)
    write_csv(out / "gen_time.csv", meta,
              ["eta", "T_tilde_n1", "T_tilde_n2", "T_tilde_n3", "T_tilde_n4", "T_tilde_n5"], rows)

    rows = []
    for n_max in range(1, 6):
        opt = synthesis.optimize_eta(uniform[n_max], (0.05, 4.0))
        rows.append((n_max, opt.eta, opt.t_tilde, opt.interior))
    write_csv(out / "gen_time_minima.csv", meta,
              ["n_max", "eta_star", "t_tilde_min", "interior"], rows)

    eta0 = s["eta"] if s["eta"] is not None else 2.0 * s["g_ghz"] / s["omega_cav_ghz"]
    alpha = eta0 / 2.0
    states = {
        "P_d0": synthesis.TargetState.normalized([1.0]),
        "P_d2": synthesis.TargetState.normalized([0.0, 0.0, 1.0]),
        "P_d0_plus_d2": synthesis.TargetState.normalized([1.0, 0.0, 1.0]),
    }
    l_max = 10
    dists = {k: dynamics.displaced_photon_distribution(t, alpha, l_max) for k, t in states.items()}
    rows = [(l, dists["P_d0"][l], dists["P_d2"][l], dists["P_d0_plus_d2"][l])
            for l in range(l_max + 1)]
    write_csv(out / "photon_distributions.csv", meta,
              ["l", "P_d0", "P_d2", "P_d0_plus_d2"], rows)

    print(f"wrote 6 tables to {out}")
    return EXIT_OK


_COMMANDS = {
    "plan": cmd_plan,
    "scan-fidelity": cmd_scan_fidelity,
    "scan-ground": cmd_scan_ground,
    "wigner": cmd_wigner,
    "tables": cmd_tables,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        cfg = load_config(args.config, args.set)
        if args.dim is not None:
            cfg = RunConfig.from_tree({**cfg.raw, "truncation": {**cfg.raw["truncation"],
                                                                 "dim": args.dim}})
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CollisionDetected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COLLISION
    except PhaseUnsolvable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHASE
    except (FockgenError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

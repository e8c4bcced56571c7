"""Command-line front end: ``ljspec <subcommand> [--config PATH] [flags]``.

Exit codes: 0 ok, 1 verification failure, 2 config error, 3 numerical
non-convergence. The output directory is --out, else $LJSPEC_OUT, else the
config's ``out`` key, else ./ljspec-out.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from ._io import csv_text, json_text, write_text
from .config import ConfigError, RunConfig, load_config
from .discretization import assemble_hamiltonian, build_grid
from .dynamics import ballistic_guard, trajectory_summary, verify_radin_simon
from .errors import LJSpecError, NumericalError
from .potential import (
    LJParams,
    absence_criterion,
    barrier_truncation_point,
    landmarks,
    negative_part_moment,
)
from .spectrum import check_convergence
from .verification import run_evolve, run_scatter, run_spectrum, verify_all

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3
OUT_ENV = "LJSPEC_OUT"


def _out_dir(args, cfg: RunConfig) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or cfg.out or "ljspec-out")


def cmd_potential(cfg, out: Path) -> int:
    p = cfg.params
    lm = landmarks(p)
    payload = {
        "x0": lm.x0,
        "x_min": lm.x_min,
        "gamma": lm.gamma,
        "moment": negative_part_moment(p),
        "criterion": absence_criterion(p),
        "eps": cfg.eps,
    }
    text = json_text(payload, cfg.resolved())
    write_text(out / "potential.json", text)
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def cmd_spectrum(cfg, out: Path) -> int:
    run = run_spectrum(cfg)
    rep, conv = run.report, run.convergence
    config = cfg.resolved()
    payload = {
        "spectrum": rep.to_dict(include_vectors=False),
        "convergence": {
            "converged": conv.converged,
            "count": conv.count,
            "refined_count": conv.refined_count,
            "extended_count": conv.extended_count,
            "lowest": conv.lowest,
            "refined_lowest": conv.refined_lowest,
            "reasons": list(conv.reasons),
        },
        "boundary": [d.__dict__ for d in run.boundary],
        "shooting_oracle": [{"energy": e, "matrix": m, "shooting": s} for e, m, s in run.oracle],
    }
    write_text(out / "spectrum.json", json_text(payload, config))
    write_text(out / "spectrum.csv", rep.to_csv(config))
    print(f"count={rep.count} energies={rep.negative_eigenvalues.tolist()} converged={conv.converged}")
    if not conv.converged:
        print("unconverged: " + "; ".join(conv.reasons) + " -- increase grid.n and/or grid.L", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_scatter(cfg, out: Path) -> int:
    conv = check_convergence(cfg.params, cfg.eps, cfg.grid.L, cfg.grid.n, cfg.grid.spacing, cfg.grid.power,
                             cfg.spectrum.abs_tol)
    n_bound = conv.count
    curve, defect, overlap = run_scatter(cfg, n_bound)
    config = cfg.resolved()
    write_text(out / "phase_shift.csv", curve.to_csv(config))
    payload = {"n_bound": n_bound, "count_converged": conv.converged, "levinson_defect": defect,
               "levinson_defect_over_pi": defect / math.pi,
               "max_unitarity_error": max(abs(abs(s.s) - 1.0) for s in curve.s_matrix())}
    write_text(out / "scatter.json", json_text(payload, config))
    if overlap is not None:
        write_text(out / "overlap.json", json_text(overlap.to_dict(), config))
    print(f"n_bound={n_bound} levinson_defect/pi={defect / math.pi:.6g}"
          + ("" if overlap is None else f" m(T)={overlap.overlaps}"))
    return EXIT_OK


def cmd_evolve(cfg, out: Path) -> int:
    e = cfg.evolve
    grid = build_grid(cfg.eps, e.L, e.n)
    ballistic_guard(grid, e.center, e.k0, e.width, e.dt * e.n_steps)
    traj = run_evolve(cfg)
    config = cfg.resolved()
    rs = verify_radin_simon(traj)
    summary = trajectory_summary(traj)
    write_text(out / "trajectory.csv", traj.to_csv(config))
    write_text(out / "radin_simon.csv", csv_text(["t", "lhs", "rhs", "slack"],
                                                 zip(rs.times, rs.lhs, rs.rhs, rs.slack), config))
    write_text(out / "evolve.json", json_text(summary, config))
    ok = (summary["radin_simon_min_relative_slack"] >= -1e-6
          and summary["certificate"]["max_violation"] <= 1e-6)
    print(f"certificate={summary['certificate']} min_slack={summary['radin_simon_min_relative_slack']:.6g}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_all(cfg, out: Path) -> int:
    checks = verify_all(cfg)
    config = cfg.resolved()
    rows = [(c.label, "pass" if c.passed else "FAIL", c.value, c.threshold, c.detail) for c in checks]
    write_text(out / "verify.csv", csv_text(["label", "status", "value", "threshold", "detail"], rows, config))
    write_text(out / "verify.json", json_text(
        {"checks": [c.__dict__ for c in checks], "all_passed": all(c.passed for c in checks)}, config))
    width = max(len(c.label) for c in checks)
    for c in checks:
        print(f"{c.label:<{width}}  {'pass' if c.passed else 'FAIL'}  {c.value:.6g}")
    failed = [c.label for c in checks if not c.passed]
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _sweep_point(args):
    alpha, beta, cfg = args
    params = LJParams(alpha, beta)
    eps = barrier_truncation_point(params, cfg.grid.amplitude_tol)
    conv = check_convergence(params, eps, cfg.grid.L, cfg.grid.n, cfg.grid.spacing, cfg.grid.power)
    moment = negative_part_moment(params)
    return (alpha, beta, absence_criterion(params), moment, conv.count, conv.converged,
            conv.count <= math.floor(moment))


def sweep_points(cfg: RunConfig):
    """Seeded (alpha, beta) samples; ``absence`` mode keeps beta below the criterion boundary."""
    sw = cfg.sweep
    rng = np.random.default_rng(cfg.seed)
    pts = []
    for _ in range(sw.samples):
        a = float(rng.uniform(sw.alpha_min, sw.alpha_max))
        if sw.mode == "absence":
            b_edge = (4.0 * a ** (2.0 / 3.0)) ** 0.6
            b = float(rng.uniform(0.05, 0.99)) * b_edge
        else:
            b = float(rng.uniform(1e-3, sw.beta_max))
        pts.append((a, b))
    return pts


def cmd_sweep(cfg, out: Path) -> int:
    jobs = [(a, b, cfg) for a, b in sweep_points(cfg)]
    if cfg.threads > 1:
        with ProcessPoolExecutor(cfg.threads) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    header = ["alpha", "beta", "criterion", "moment", "count", "converged", "bargmann_ok"]
    write_text(out / "sweep.csv", csv_text(header, rows, cfg.resolved()))
    bad = [r for r in rows if not r[6] or (r[2] and r[4] != 0)]
    unconverged = [r for r in rows if not r[5]]
    print(f"{len(rows)} points, {len(bad)} violations, {len(unconverged)} unconverged")
    if bad:
        return EXIT_FAIL
    return EXIT_NUMERICAL if unconverged else EXIT_OK


COMMANDS = {
    "potential": cmd_potential,
    "spectrum": cmd_spectrum,
    "scatter": cmd_scatter,
    "evolve": cmd_evolve,
    "verify-all": cmd_verify_all,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ljspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="TOML configuration file")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--threads", type=int)
    parser.add_argument("--seed", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    overrides = {"alpha": args.alpha, "beta": args.beta, "threads": args.threads, "seed": args.seed}
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = _out_dir(args, cfg)
    try:
        return COMMANDS[args.command](cfg, out)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except LJSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

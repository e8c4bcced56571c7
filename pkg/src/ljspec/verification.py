"""Property-by-property checks on one parameter point, driven by a RunConfig.

Each check returns a :class:`Check`; ``verify_all`` runs them in a fixed
order so that repeated runs produce identical tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import RunConfig, default_k_min
from .discretization import assemble_hamiltonian, build_grid
from .dynamics import evolve, gaussian_packet, verify_affine_bound, verify_radin_simon
from .potential import absence_criterion, landmarks, negative_part_moment
from .scattering import PacketSpec, completeness_probe, phase_shift, phase_shift_curve, levinson_defect
from .spectrum import (
    boundary_behavior_check,
    check_convergence,
    essential_spectrum_probe,
    negative_eigenvalues,
    shooting_count,
    count_negative,
)

__all__ = ["Check", "SpectrumRun", "run_spectrum", "run_scatter", "run_evolve", "verify_all"]

LEVINSON_TOL = 0.05 * math.pi
UNITARITY_TOL = 1e-10
MATCH_RADIUS_TOL = 1e-6
ESSENTIAL_TOL = 0.05
OVERLAP_MIN = 0.99
MONOTONE_TOL = 1e-3
NORM_TOL = 1e-10
ENERGY_TOL = 1e-8
SLACK_TOL = 1e-6
AFFINE_TOL = 1e-6
SLOPE_RANGE = (0.7, 1.3)


@dataclass(frozen=True)
class Check:
    label: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


@dataclass
class SpectrumRun:
    report: object
    convergence: object
    boundary: list
    oracle: list  # (energy, matrix count, shooting count)


def run_spectrum(cfg: RunConfig) -> SpectrumRun:
    params = cfg.params
    g = cfg.grid
    op = assemble_hamiltonian(build_grid(cfg.eps, g.L, g.n, g.spacing, g.power), params)
    report = negative_eigenvalues(op, cfg.spectrum.abs_tol)
    conv = check_convergence(params, cfg.eps, g.L, g.n, g.spacing, g.power, report.abs_tol)
    boundary = boundary_behavior_check(report) if report.count else []
    # probe energies halfway between consecutive levels, away from every eigenvalue
    levels = [op.gamma] + list(report.negative_eigenvalues) + [-report.abs_tol]
    oracle = []
    for lo, hi in zip(levels, levels[1:]):
        energy = 0.5 * (lo + hi)
        oracle.append((energy, count_negative(op, energy), shooting_count(params, energy, cfg.eps, g.L)))
    return SpectrumRun(report, conv, boundary, oracle)


def run_scatter(cfg: RunConfig, n_bound: int):
    params = cfg.params
    sc = cfg.scatter
    k_min = sc.k_min if sc.k_min is not None else default_k_min(params)
    k_grid = np.geomspace(k_min, sc.k_max, sc.n_k)
    curve = phase_shift_curve(params, k_grid, sc.match_radius, cfg.eps)
    defect = levinson_defect(curve, n_bound)
    overlap = None
    if sc.completeness:
        p = cfg.probe
        grid = build_grid(cfg.eps, p.L, p.n)
        overlap = completeness_probe(params, PacketSpec(p.center, p.k0, p.width), p.T, grid, p.dt)
    return curve, defect, overlap


def run_evolve(cfg: RunConfig, params="config"):
    """Trajectory of the configured Gaussian; ``params=None`` evolves freely."""
    if params == "config":
        params = cfg.params
    e = cfg.evolve
    grid = build_grid(cfg.eps, e.L, e.n)
    op = assemble_hamiltonian(grid, params)
    psi0 = gaussian_packet(grid, e.center, e.k0, e.width)
    return evolve(op, psi0, e.dt, e.n_steps, e.record_every)


def _trajectory_checks(tag, traj):
    e = traj.kinetic + traj.shifted_potential
    drift = float(np.max(np.abs(e - e[0])) / abs(e[0]))
    dnorm = float(np.max(np.abs(traj.l2_norm - traj.l2_norm[0])))
    rs = verify_radin_simon(traj)
    rel = float(np.min(rs.slack / rs.rhs))
    cert = verify_affine_bound(traj)
    return [
        Check(f"dynamics:norm[{tag}]", dnorm < NORM_TOL, dnorm, NORM_TOL),
        Check(f"dynamics:energy[{tag}]", drift < ENERGY_TOL, drift, ENERGY_TOL),
        Check(f"dynamics:moment-growth[{tag}]", rel >= -SLACK_TOL, rel, -SLACK_TOL),
        Check(f"dynamics:affine-bound[{tag}]", cert.max_violation <= AFFINE_TOL, cert.max_violation, AFFINE_TOL,
              f"c={cert.c:.6g} d={cert.d:.6g}"),
    ]


def verify_all(cfg: RunConfig) -> list[Check]:
    params = cfg.params
    lm = landmarks(params)
    checks = []

    run = run_spectrum(cfg)
    rep = run.report
    checks.append(Check("spectrum:converged-count", run.convergence.converged, rep.count, rep.count,
                        "; ".join(run.convergence.reasons)))
    lowest = float(rep.negative_eigenvalues[0]) if rep.count else 0.0
    checks.append(Check("spectrum:form-lower-bound", lowest >= lm.gamma, lowest, lm.gamma))
    cap = math.floor(negative_part_moment(params))
    checks.append(Check("spectrum:bargmann-cap", rep.count <= cap, rep.count, cap))
    if absence_criterion(params):
        checks.append(Check("spectrum:absence", rep.count == 0, rep.count, 0))
    mismatches = sum(m != s for _, m, s in run.oracle)
    checks.append(Check("spectrum:shooting-oracle", mismatches == 0, mismatches, 0,
                        " ".join(f"E={e:.4g}:{m}/{s}" for e, m, s in run.oracle)))
    if run.boundary:
        d = run.boundary[0]
        ok = d.ratio_increasing and SLOPE_RANGE[0] <= d.slope_ratio <= SLOPE_RANGE[1]
        checks.append(Check("spectrum:boundary-decay", ok, d.slope_ratio, SLOPE_RANGE[1],
                            f"ratio_increasing={d.ratio_increasing}"))

    es = cfg.essential
    table = essential_spectrum_probe(params, es.L, es.modes, eps=cfg.eps, spacing=es.spacing)
    dev = table.max_deviation()
    ratio_err = max((abs(r[3] / (r[1] / r[0]) - 1.0) for r in table.sqrt_ratios()), default=0.0)
    checks.append(Check("spectrum:essential", dev <= ESSENTIAL_TOL and ratio_err <= ESSENTIAL_TOL,
                        max(dev, ratio_err), ESSENTIAL_TOL))

    curve, defect, overlap = run_scatter(cfg, rep.count)
    checks.append(Check("scattering:levinson", defect < LEVINSON_TOL, defect, LEVINSON_TOL))
    unit = max(abs(abs(s.s) - 1.0) for s in curve.s_matrix())
    checks.append(Check("scattering:unitarity", unit <= UNITARITY_TOL, unit, UNITARITY_TOL))
    ks = curve.k_values[:: max(1, len(curve.k_values) // 5)]
    shift = max(abs(phase_shift(params, k, 1.5 * r, cfg.eps) - phase_shift(params, k, r, cfg.eps))
                for k, r in zip(ks, curve.match_radius[:: max(1, len(curve.k_values) // 5)]))
    checks.append(Check("scattering:match-radius", shift < MATCH_RADIUS_TOL, shift, MATCH_RADIUS_TOL))
    if overlap is not None:
        m = overlap.overlaps
        mono = all(b >= a - MONOTONE_TOL for a, b in zip(m, m[1:]))
        checks.append(Check("scattering:completeness", min(m) >= OVERLAP_MIN and mono, min(m), OVERLAP_MIN))

    checks += _trajectory_checks("free", run_evolve(cfg, None))
    checks += _trajectory_checks("lj", run_evolve(cfg))
    return checks

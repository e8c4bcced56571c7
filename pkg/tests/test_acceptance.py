"""Acceptance criteria, one test each; a pass/fail line per criterion is printed at the end of the run."""

import math
import time

import numpy as np
import pytest

from ljspec import (
    LJParams,
    PacketSpec,
    absence_criterion,
    assemble_hamiltonian,
    barrier_truncation_point,
    build_grid,
    completeness_probe,
    count_negative,
    levinson_defect,
    negative_eigenvalues,
    negative_part_moment,
    phase_shift,
    phase_shift_curve,
)
from ljspec.cli import main, sweep_points
from ljspec.config import config_from_dict, default_k_min
from ljspec.dynamics import verify_affine_bound, verify_radin_simon
from ljspec.spectrum import boundary_behavior_check, check_convergence, essential_spectrum_probe, shooting_count
from ljspec.verification import run_evolve

from conftest import ACCEPTANCE_LINES

L_BOX, N_NODES = 50.0, 20000


def record(number, name, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] {number:>2}. {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def lj_operator(params, L=L_BOX, n=N_NODES):
    return assemble_hamiltonian(build_grid(barrier_truncation_point(params), L, n), params)


def converged_count(params):
    eps = barrier_truncation_point(params)
    tol = 1e-8 * params.beta**2 / (4 * params.alpha)
    return check_convergence(params, eps, L_BOX, N_NODES, abs_tol=tol)


@pytest.fixture(scope="module")
def bound_counts():
    return {beta: converged_count(LJParams(1.0, beta)) for beta in (1.0, 5.0, 10.0, 20.0)}


@pytest.fixture(scope="module")
def curves():
    out = {}
    for beta in (1.0, 10.0):
        p = LJParams(1.0, beta)
        out[beta] = phase_shift_curve(p, np.geomspace(default_k_min(p), 25.0, 400))
    return out


@pytest.fixture(scope="module")
def trajectories():
    cfg = config_from_dict({"alpha": 1.0, "beta": 1.0})
    return {"free": run_evolve(cfg, None), "lj": run_evolve(cfg)}


def test_01_absence():
    t0 = time.perf_counter()
    cfg = config_from_dict({"alpha": 1.0, "beta": 1.0, "seed": 2024})
    points = sweep_points(cfg)
    bad = []
    for a, b in points:
        p = LJParams(a, b)
        assert absence_criterion(p) and 0.1 <= a <= 10
        conv = converged_count(p)
        if not conv.converged or conv.count != 0:
            bad.append((a, b, conv.count, conv.converged))
    dt = time.perf_counter() - t0
    record(1, "absence regime has no bound states", not bad and dt < 120,
           f"{len(points)} points, {len(bad)} failures, {dt:.1f}s")


def test_02_bargmann_cap(bound_counts):
    rows = []
    ok = True
    for beta in (5.0, 10.0, 20.0):
        conv = bound_counts[beta]
        cap = math.floor(negative_part_moment(LJParams(1.0, beta)))
        ok &= conv.converged and conv.count <= cap
        rows.append(f"beta={beta:g}: N={conv.count} cap={cap}")
    p = LJParams(1.0, 10.0)
    n_shoot = shooting_count(p, -1e-8 * 25.0, barrier_truncation_point(p), L_BOX)
    ok &= bound_counts[10.0].count >= 1 and n_shoot >= 1
    record(2, "Bargmann cap", ok, "; ".join(rows) + f"; shooting N(beta=10)={n_shoot}")


PROBES = [
    ((1.0, 10.0), -10.0), ((1.0, 10.0), -1.0),
    ((1.0, 20.0), -50.0), ((1.0, 20.0), -10.0),
    ((2.0, 15.0), -1.0), ((1.0, 5.0), -1.0),
    ((0.5, 30.0), -300.0), ((0.5, 30.0), -100.0), ((0.5, 30.0), -20.0), ((0.5, 30.0), -0.3),
]


def test_03_oracle_equivalence():
    pairs = []
    for (a, b), energy in PROBES:
        p = LJParams(a, b)
        op = lj_operator(p)
        pairs.append((count_negative(op, energy), shooting_count(p, energy, op.grid.eps, L_BOX)))
    agree = sum(m == s for m, s in pairs)
    record(3, "Sturm count equals shooting count", agree == len(PROBES),
           f"{agree}/{len(PROBES)} agree, counts {[m for m, _ in pairs]}")


def test_04_essential_spectrum(lj11):
    table = essential_spectrum_probe(lj11, [100.0, 200.0], 5, spacing=0.01)
    dev = table.max_deviation()
    ratio_err = max(abs(r[3] / (r[1] / r[0]) - 1.0) for r in table.sqrt_ratios())
    record(4, "box modes approach n^2 pi^2/(L - eps)^2", dev <= 0.05 and ratio_err <= 0.05,
           f"max deviation {dev:.4f}, sqrt ratio error {ratio_err:.4f}")


def test_05_boundary(op110):
    d = boundary_behavior_check(negative_eigenvalues(op110))[0]
    ok = d.ratio_increasing and 0.7 <= d.slope_ratio <= 1.3
    record(5, "ground state vanishes faster than x at the barrier", ok,
           f"ratio increasing={d.ratio_increasing}, slope ratio {d.slope_ratio:.4f}")


def test_06_levinson(bound_counts, curves):
    defects = {beta: levinson_defect(curves[beta], bound_counts[beta].count) for beta in (1.0, 10.0)}
    record(6, "Levinson theorem", all(d < 0.05 * math.pi for d in defects.values()),
           ", ".join(f"beta={b:g}: N={bound_counts[b].count} defect/pi={d / math.pi:.4f}"
                     for b, d in defects.items()))


def test_07_phase_hygiene(curves):
    unit = max(abs(abs(s.s) - 1.0) for c in curves.values() for s in c.s_matrix())
    shift = 0.0
    for beta, c in curves.items():
        p = LJParams(1.0, beta)
        for i in range(0, len(c.k_values), 40):
            k, r = c.k_values[i], c.match_radius[i]
            shift = max(shift, abs(phase_shift(p, k, 1.5 * r) - phase_shift(p, k, r)))
    record(7, "unit S-matrix, match-radius stable phase", unit <= 1e-10 and shift < 1e-6,
           f"max ||S|-1| {unit:.2e}, max radius shift {shift:.2e} rad")


def test_08_completeness(lj11):
    cfg = config_from_dict({"alpha": 1.0, "beta": 1.0}).probe
    grid = build_grid(barrier_truncation_point(lj11), cfg.L, cfg.n)
    rep = completeness_probe(lj11, PacketSpec(cfg.center, cfg.k0, cfg.width), cfg.T, grid, cfg.dt)
    m = rep.overlaps
    mono = all(b >= a - 1e-3 for a, b in zip(m, m[1:]))
    record(8, "reflected packet matches a free asymptote", min(m) >= 0.99 and mono,
           "m(T) = " + ", ".join(f"{v:.5f}" for v in m))


def test_09_conservation(trajectories):
    worst_norm = worst_energy = 0.0
    for traj in trajectories.values():
        e = traj.kinetic + traj.shifted_potential
        worst_norm = max(worst_norm, float(np.max(np.abs(traj.l2_norm - traj.l2_norm[0]))))
        worst_energy = max(worst_energy, float(np.max(np.abs(e - e[0])) / e[0]))
    steps = int(round(trajectories["lj"].times[-1] / 1e-3))
    record(9, f"norm and energy over {steps} steps", steps >= 10**4 and worst_norm < 1e-10 and worst_energy < 1e-8,
           f"norm drift {worst_norm:.2e}, energy drift {worst_energy:.2e}")


def test_10_radin_simon(trajectories):
    worst = min(verify_radin_simon(t).min_relative_slack() for t in trajectories.values())
    record(10, "moment growth inequality", worst >= -1e-6, f"min relative slack {worst:.3e}")


def test_11_affine_bound(trajectories):
    certs = {k: verify_affine_bound(t) for k, t in trajectories.items()}
    ok = all(c.max_violation <= 1e-6 and c.c == math.sqrt(2) for c in certs.values())
    record(11, "affine growth of the weighted norm", ok,
           ", ".join(f"{k}: d={c.d:.4f} violation={c.max_violation:.4f}" for k, c in certs.items()))


def test_12_determinism(tmp_path):
    outs = [tmp_path / "a", tmp_path / "b"]
    codes = [main(["verify-all", "--alpha", "1", "--beta", "1", "--out", str(o)]) for o in outs]
    names = sorted(p.name for p in outs[0].iterdir())
    same = names == sorted(p.name for p in outs[1].iterdir()) and all(
        (outs[0] / n).read_bytes() == (outs[1] / n).read_bytes() for n in names)
    record(12, "verify-all is byte-reproducible", same and codes == [0, 0],
           f"exit codes {codes}, files {names}")

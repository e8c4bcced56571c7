import json
import math

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp
from scipy.special import gamma as gamma_fn

from ljspec import (
    LJParams,
    NumericalError,
    PacketSpec,
    ParameterError,
    barrier_truncation_point,
    build_grid,
    completeness_probe,
    eval_potential,
    levinson_defect,
    phase_shift,
    phase_shift_curve,
)
from ljspec.scattering import default_match_radius, turning_point


def linear_ode_phase(params, k, R):
    """Direct integration of psi'' = (V - k^2) psi; returns the phase mod pi."""
    eps = barrier_truncation_point(params)
    rhs = lambda x, y: [y[1], (eval_potential(params, x) - k * k) * y[0]]
    sol = solve_ivp(rhs, (eps, R), [0.0, 1.0], method="DOP853", rtol=1e-12, atol=1e-30)
    psi, dpsi = sol.y[:, -1]
    return math.atan2(k * psi, dpsi) - k * R


def wkb_phase(params, k):
    xt = turning_point(params, k * k, 0.3)
    f = lambda x: math.sqrt(max(k * k - eval_potential(params, x), 0.0)) - k
    inner = quad(f, xt, 2.0, limit=400, epsabs=1e-12)[0]
    outer = quad(f, 2.0, np.inf, limit=200)[0]
    return inner + outer - k * xt + math.pi / 4


def test_free_phase_is_zero():
    assert phase_shift(None, 3.0) == 0.0
    curve = phase_shift_curve(None, np.linspace(0.1, 5, 20))
    assert np.all(curve.delta == 0)
    assert levinson_defect(curve, 0) == 0.0


@pytest.mark.parametrize("beta,k", [(1.0, 0.05), (1.0, 1.3), (10.0, 0.2), (10.0, 4.0), (10.0, 12.0)])
def test_phase_agrees_with_linear_ode_mod_pi(beta, k):
    p = LJParams(1.0, beta)
    R = default_match_radius(p, k)
    diff = (phase_shift(p, k, R) - linear_ode_phase(p, k, R)) / math.pi
    assert abs(diff - round(diff)) < 1e-7


def test_scattering_length_of_repulsive_core():
    p = LJParams(1.0, 1e-12)
    k = np.linspace(0.01, 0.05, 9)
    delta = np.array([phase_shift(p, kv) for kv in k])
    slope, intercept = np.polyfit(k, delta, 1)
    fit = slope * k + intercept
    assert np.max(np.abs(fit - delta)) < 0.05 * np.max(np.abs(delta))
    a = -slope
    # zero-energy solution sqrt(x) K_{1/10}(sqrt(alpha)/5 x^-5) gives the scattering length in closed form
    a_exact = 0.1 ** 0.2 * gamma_fn(0.9) / gamma_fn(1.1)
    assert a > 0
    assert a == pytest.approx(a_exact, rel=1e-4)


def test_high_energy_phase_follows_wkb(lj11):
    gaps = [abs(phase_shift(lj11, k) - wkb_phase(lj11, k)) for k in (10.0, 20.0, 40.0)]
    assert gaps[1] < 0.06
    assert gaps[0] > gaps[1] > gaps[2]


def test_high_energy_phase_does_not_vanish(lj11):
    # the x^-12 core acts like a hard wall, so delta grows in magnitude with k
    deltas = [phase_shift(lj11, k) for k in (5.0, 10.0, 20.0)]
    assert deltas[0] > deltas[1] > deltas[2] < -10


def test_curve_absence_case(lj11):
    curve = phase_shift_curve(lj11, np.linspace(0.05, 25, 400))
    assert len(curve.k_values) == 400
    assert curve.max_jump() < math.pi / 2
    assert np.all(np.diff(curve.delta) < 0)
    assert abs(curve.delta[0]) < 0.05


def test_levinson_bound_case(lj110, op110):
    from ljspec import negative_eigenvalues

    n_bound = negative_eigenvalues(op110).count
    k_min = 0.01 * math.sqrt(25.0)
    curve = phase_shift_curve(lj110, np.geomspace(k_min, 25, 120))
    assert levinson_defect(curve, n_bound) < 0.05 * math.pi
    assert abs(curve.delta[0] / math.pi - n_bound) < 0.05


def test_levinson_requires_small_k(lj11):
    curve = phase_shift_curve(lj11, [0.5, 0.6, 0.7])
    with pytest.raises(ParameterError):
        levinson_defect(curve, 0)


def test_s_matrix_unitary(lj110):
    curve = phase_shift_curve(lj110, np.geomspace(0.05, 25, 50))
    for sample in curve.s_matrix():
        assert abs(abs(sample.s) - 1.0) <= 1e-10
    d = curve.delta[7]
    assert curve.s_matrix()[7].s == pytest.approx(np.exp(2j * d), abs=1e-15)


@pytest.mark.parametrize("k", [0.01, 0.3, 3.0, 20.0])
def test_match_radius_stability(lj110, k):
    R = default_match_radius(lj110, k)
    assert abs(phase_shift(lj110, k, 1.5 * R) - phase_shift(lj110, k, R)) < 1e-6


def test_match_radius_precondition(lj11):
    with pytest.raises(ParameterError):
        phase_shift(lj11, 1.0, match_radius=5.0)


def test_refinement_inserts_points(lj11):
    curve = phase_shift_curve(lj11, [0.1, 10.0])
    assert len(curve.k_values) > 2
    assert curve.max_jump() < math.pi / 2


def test_refinement_gives_up_with_interval(lj11):
    with pytest.raises(NumericalError) as info:
        phase_shift_curve(lj11, [0.1, 300.0])
    k1, k2 = info.value.bracket
    assert 0.1 <= k1 < k2 <= 300.0


def test_curve_rejects_bad_grid(lj11):
    with pytest.raises(ParameterError):
        phase_shift_curve(lj11, [1.0, 0.5])


def test_curve_csv(lj11):
    curve = phase_shift_curve(lj11, np.linspace(0.1, 2, 5))
    lines = [l for l in curve.to_csv().splitlines() if not l.startswith("#")]
    assert lines[0] == "k,delta_rad,s_re,s_im"
    k, d, re, im = map(float, lines[3].split(","))
    assert d == curve.delta[2]
    assert complex(re, im) == pytest.approx(np.exp(2j * d), abs=1e-16)


def small_probe_grid(params):
    eps = 0.3 if params is None else barrier_truncation_point(params)
    return build_grid(eps, 100.0, 10001)


def test_completeness_free_is_exact():
    rep = completeness_probe(None, PacketSpec(30.0, 3.0, 2.0), [9.0, 10.0], small_probe_grid(None))
    assert all(abs(m - 1.0) < 1e-9 for m in rep.overlaps)
    assert rep.tau_star == [0.0, 0.0]


def test_completeness_lj_small(lj11):
    rep = completeness_probe(lj11, PacketSpec(30.0, 3.0, 2.0), [9.0, 10.0, 11.0], small_probe_grid(lj11))
    assert min(rep.overlaps) >= 0.99
    assert all(b >= a - 1e-3 for a, b in zip(rep.overlaps, rep.overlaps[1:]))
    # the wall sits beyond eps, so the interacting packet returns early
    assert all(t > 0 for t in rep.tau_star)
    data = json.loads(rep.to_json())
    assert set(data) >= {"T", "m", "tau_star"}


def test_completeness_preconditions(lj11):
    grid = small_probe_grid(lj11)
    with pytest.raises(ParameterError):
        completeness_probe(lj11, PacketSpec(8.0, 3.0, 2.0), [9.0], grid)
    with pytest.raises(ParameterError):
        completeness_probe(lj11, PacketSpec(30.0, 3.0, 2.0), [2.0], grid)
    with pytest.raises(ParameterError):
        completeness_probe(lj11, PacketSpec(30.0, 3.0, 2.0), [30.0], grid)

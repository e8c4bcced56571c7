"""Phase shifts, S-matrix samples, Levinson consistency and the completeness probe.

Phases are measured against the free Dirichlet solution sin(kx). The
stationary equation psi'' = (V - k^2) psi is integrated in amplitude-phase
form: with k psi = rho sin(theta) and psi' = rho cos(theta),

    theta' = k - (V / k) sin^2(theta),

so theta = atan2(k psi, psi') is followed continuously in x instead of
being reduced mod pi. The phase shift is theta(R) - k R. Starting from
psi(eps) = 0 gives theta(eps) = 0, and the absolute phase makes
delta(0+) = N pi directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ._io import csv_text
from .discretization import Grid, assemble_hamiltonian
from .dynamics import CrankNicolson, default_dt, gaussian_packet, packet_width
from .errors import NumericalError, ParameterError
from .potential import LJParams, barrier_truncation_point, eval_potential, landmarks

__all__ = [
    "PhaseShiftCurve",
    "SMatrixSample",
    "PacketSpec",
    "OverlapReport",
    "phase_shift",
    "default_match_radius",
    "phase_shift_curve",
    "levinson_defect",
    "completeness_probe",
    "turning_point",
]

# |V(R)| must be below this fraction of k^2 at the matching radius.
MATCH_FRACTION = 1e-10
MAX_REFINEMENTS = 4


def default_match_radius(params: LJParams, k: float) -> float:
    """Smallest comfortable radius with |V(R)| <= 0.1 * MATCH_FRACTION * k^2."""
    tail = (params.beta / (0.1 * MATCH_FRACTION * k * k)) ** (1.0 / 6.0)
    return max(tail, 5.0 * landmarks(params).x_min)


def phase_shift(params: LJParams | None, k: float, match_radius: float | None = None,
                eps: float | None = None, rtol: float = 1e-10) -> float:
    """Phase shift delta(k) in radians, continuous in x (not reduced mod pi).

    ``params=None`` is the free problem, for which delta = 0 identically.
    """
    if not k > 0:
        raise ParameterError(f"k must be > 0, got {k}")
    if params is None:
        return 0.0
    if match_radius is None:
        match_radius = default_match_radius(params, k)
    if eps is None:
        eps = barrier_truncation_point(params)
    if not match_radius > eps:
        raise ParameterError(f"match_radius {match_radius} must exceed eps {eps}")
    if abs(eval_potential(params, match_radius)) >= MATCH_FRACTION * k * k:
        raise ParameterError(
            f"match_radius {match_radius:g} is inside the potential range for k={k:g}: "
            f"need |V(R)| < {MATCH_FRACTION:g} k^2")
    a, b = params.alpha, params.beta

    def rhs(x, y):
        inv6 = x**-6
        return [-((a * inv6 * inv6 - b * inv6) / k) * math.sin(k * x + y[0]) ** 2]

    sol = solve_ivp(rhs, (eps, match_radius), [-k * eps], method="DOP853", rtol=rtol, atol=1e-12)
    if not sol.success:
        raise NumericalError(f"phase integration failed at k={k}: {sol.message}", (eps, match_radius))
    return float(sol.y[0, -1])


@dataclass(frozen=True)
class SMatrixSample:
    k: float
    s: complex


@dataclass(eq=False)
class PhaseShiftCurve:
    k_values: np.ndarray
    delta: np.ndarray
    match_radius: np.ndarray
    params: LJParams | None = None

    def s_matrix(self) -> list[SMatrixSample]:
        return [SMatrixSample(float(k), complex(np.exp(2j * d))) for k, d in zip(self.k_values, self.delta)]

    def max_jump(self) -> float:
        return float(np.max(np.abs(np.diff(self.delta)))) if len(self.delta) > 1 else 0.0

    def to_csv(self, config=None) -> str:
        rows = [(s.k, d, s.s.real, s.s.imag) for s, d in zip(self.s_matrix(), self.delta)]
        return csv_text(["k", "delta_rad", "s_re", "s_im"], rows, config)


def phase_shift_curve(params: LJParams | None, k_grid, match_radius: float | None = None,
                      eps: float | None = None) -> PhaseShiftCurve:
    """delta(k) on an increasing momentum grid, refined where adjacent samples differ by >= pi/2.

    Each offending interval is bisected up to four times; a remaining jump
    raises :class:`NumericalError` naming the interval. ``match_radius=None``
    picks a radius per k.
    """
    k = np.asarray(k_grid, dtype=float)
    if k.ndim != 1 or len(k) < 2 or np.any(np.diff(k) <= 0) or k[0] <= 0:
        raise ParameterError("k_grid must be an increasing array of positive momenta")

    def radius(kv):
        if params is None:
            return 0.0
        return match_radius if match_radius is not None else default_match_radius(params, kv)

    samples = {float(kv): phase_shift(params, kv, radius(kv), eps) for kv in k}
    for _ in range(MAX_REFINEMENTS + 1):
        ks = sorted(samples)
        bad = [(k1, k2) for k1, k2 in zip(ks, ks[1:]) if abs(samples[k2] - samples[k1]) >= 0.5 * math.pi]
        if not bad:
            break
        if _ == MAX_REFINEMENTS:
            k1, k2 = bad[0]
            raise NumericalError(f"phase jumps by >= pi/2 on [{k1:g}, {k2:g}] after refinement", (k1, k2))
        for k1, k2 in bad:
            km = 0.5 * (k1 + k2)
            samples[km] = phase_shift(params, km, radius(km), eps)
    ks = np.array(sorted(samples))
    return PhaseShiftCurve(ks, np.array([samples[kv] for kv in ks]),
                           np.array([radius(kv) for kv in ks]), params)


def levinson_defect(curve: PhaseShiftCurve, n_bound: int) -> float:
    """|delta(k_min) - n_bound * pi|."""
    if curve.params is not None:
        limit = 0.05 * math.sqrt(abs(landmarks(curve.params).gamma))
        if curve.k_values[0] > limit:
            raise ParameterError(f"curve starts at k={curve.k_values[0]:g}; need k_min <= {limit:g}")
    return abs(float(curve.delta[0]) - n_bound * math.pi)


@dataclass(frozen=True)
class PacketSpec:
    """Gaussian launched toward the origin with momentum magnitude ``k0``."""

    center: float
    k0: float
    width: float


@dataclass
class OverlapReport:
    times: list[float]
    overlaps: list[float]
    tau_star: list[float]
    tau_estimate: float
    dt: float
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "T": self.times,
            "m": self.overlaps,
            "tau_star": self.tau_star,
            "tau_estimate": self.tau_estimate,
            "dt": self.dt,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def turning_point(params: LJParams | None, energy: float, eps: float) -> float:
    """Outermost x with V(x) = energy > 0 on the repulsive wall (``eps`` for the free case)."""
    if params is None:
        return eps
    x0 = landmarks(params).x0
    lo = min(eps, x0) * 0.5
    while eval_potential(params, lo) < energy:
        lo *= 0.5
    return brentq(lambda x: eval_potential(params, x) - energy, lo, x0, xtol=1e-14)


def completeness_probe(params: LJParams | None, packet: PacketSpec, T_list, grid: Grid,
                       dt: float | None = None, n_tau: int = 21) -> OverlapReport:
    """Overlap of the interacting evolution with time-shifted free evolutions.

    For each T, m(T) = max_tau |<exp(-i H0 (T + tau)) phi, exp(-i H T) phi>|
    with phi the packet launched toward the wall. The free evolution is the
    Dirichlet Laplacian on the same grid, so its reflection at the left end
    supplies the mirror image. tau runs over ``n_tau`` points around the
    ballistic delay (x_turn - eps)/k0, then the best point is refined to the
    time step. The maximum over the overall phase is the modulus.
    """
    T_list = sorted(float(t) for t in T_list)
    k0, width, center = abs(packet.k0), packet.width, packet.center
    if k0 == 0:
        raise ParameterError("packet needs nonzero momentum")
    x_min = 0.0 if params is None else landmarks(params).x_min
    if center < 5 * x_min + 5 * width:
        raise ParameterError(
            f"packet center {center:g} must be >= 5 x_min + 5 width = {5 * x_min + 5 * width:g}")
    v = 2.0 * k0
    t_sep = (center + 5 * x_min + 5 * width) / v
    if T_list[0] < t_sep:
        raise ParameterError(f"T={T_list[0]:g} is before the reflected packet separates (t >= {t_sep:g})")
    for T in T_list:
        if abs(center - v * T) + 5 * packet_width(width, T) >= grid.L:
            raise ParameterError(f"packet reaches the right edge before T={T:g}")
    if dt is None:
        dt = default_dt(k0 * k0)
        dt = T_list[0] / math.ceil(T_list[0] / dt)

    H = assemble_hamiltonian(grid, params)
    H0 = assemble_hamiltonian(grid, None)
    phi = gaussian_packet(grid, center, -k0, width)
    u0 = H.to_coefficients(phi.amplitudes).astype(complex)

    steps_T = [int(round(T / dt)) for T in T_list]
    prop = CrankNicolson(H, dt)
    targets = {}
    u, cur = u0.copy(), 0
    for s in steps_T:
        while cur < s:
            u = prop.step(u)
            cur += 1
        targets[s] = u.copy()

    tau_est = (turning_point(params, k0 * k0, grid.eps) - grid.eps) / k0
    stride = max(1, int(round(width / v / 5.0 / dt)))
    center_step = int(round(tau_est / dt))
    half = n_tau // 2
    coarse = {s: [max(0, s + center_step + (j - half) * stride) for j in range(n_tau)] for s in steps_T}

    free = CrankNicolson(H0, dt)
    wanted = sorted({t for ts in coarse.values() for t in ts})
    saved = {}
    u, cur = u0.copy(), 0
    for t in wanted:
        while cur < t:
            u = free.step(u)
            cur += 1
        saved[t] = u.copy()

    overlaps, taus = [], []
    for s in steps_T:
        target = targets[s]
        vals = [abs(np.vdot(saved[t], target)) for t in coarse[s]]
        j = int(np.argmax(vals))
        best_val, best_t = vals[j], coarse[s][j]
        start = coarse[s][max(0, j - 1)]
        stop = coarse[s][min(n_tau - 1, j + 1)]
        u, cur = saved[start].copy(), start
        while cur < stop:
            u = free.step(u)
            cur += 1
            val = abs(np.vdot(u, target))
            if val > best_val:
                best_val, best_t = val, cur
        overlaps.append(float(best_val))
        taus.append((best_t - s) * dt)
    return OverlapReport(T_list, overlaps, taus, tau_est, dt)

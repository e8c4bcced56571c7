"""Crank-Nicolson time evolution and the time-evolution bounds.

Everything is computed in the matrix coefficients u = sqrt(w) psi of a
:class:`~ljspec.discretization.TridiagonalOperator`, where the Cayley step
(I + i dt H/2)^{-1} (I - i dt H/2) is exactly unitary and commutes with H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.linalg.lapack import zgttrf, zgttrs

from ._io import csv_text
from .discretization import Grid, TridiagonalOperator
from .errors import NumericalError, ParameterError

__all__ = [
    "Wavepacket",
    "Trajectory",
    "RadinSimonSlack",
    "AffineCertificate",
    "CrankNicolson",
    "gaussian_packet",
    "step_crank_nicolson",
    "evolve",
    "observables",
    "verify_radin_simon",
    "verify_affine_bound",
    "default_dt",
    "packet_width",
    "ballistic_guard",
    "trajectory_summary",
]


@dataclass(eq=False)
class Wavepacket:
    amplitudes: np.ndarray  # complex grid values, zero at both ends
    grid: Grid
    time: float = 0.0

    def norm(self) -> float:
        a = self.amplitudes[1:-1]
        return float(np.sqrt(np.sum(self.grid.weights() * np.abs(a) ** 2)))


def gaussian_packet(grid: Grid, center: float, k0: float, width: float) -> Wavepacket:
    """exp(-(x - center)^2 / (4 width^2)) exp(i k0 x), zero at the ends, unit discrete L2 norm.

    ``width`` is the position standard deviation of |psi|^2.
    """
    if not width > 0:
        raise ParameterError(f"width must be > 0, got {width}")
    if not (center - 4 * width > grid.eps and center + 4 * width < grid.L):
        raise ParameterError(
            f"packet [{center - 4 * width:g}, {center + 4 * width:g}] is not inside the grid "
            f"({grid.eps:g}, {grid.L:g})")
    x = grid.nodes
    psi = np.exp(-((x - center) ** 2) / (4.0 * width**2)) * np.exp(1j * k0 * x)
    psi[0] = psi[-1] = 0.0
    norm = np.sqrt(np.sum(grid.weights() * np.abs(psi[1:-1]) ** 2))
    return Wavepacket(psi / norm, grid, 0.0)


class CrankNicolson:
    """Prefactored Cayley propagator for a fixed operator and time step.

    A negative ``dt`` propagates backwards in time.
    """

    def __init__(self, op: TridiagonalOperator, dt: float):
        if dt == 0 or not math.isfinite(dt):
            raise ParameterError(f"dt must be finite and nonzero, got {dt}")
        self.op = op
        self.dt = dt
        half = 0.5j * dt
        off = half * op.offdiag
        self._rhs_diag = 1.0 - half * op.diag
        self._rhs_off = -off
        dl, d, du, du2, ipiv, info = zgttrf(off.copy(), 1.0 + half * op.diag, off.copy())
        if info != 0:
            raise NumericalError("Crank-Nicolson matrix factorization failed")
        self._factors = (dl, d, du, du2, ipiv)

    def step(self, u):
        r = self._rhs_diag * u
        r[:-1] += self._rhs_off * u[1:]
        r[1:] += self._rhs_off * u[:-1]
        out, info = zgttrs(*self._factors, r)
        if info != 0:
            raise NumericalError("Crank-Nicolson solve failed")
        return out


def step_crank_nicolson(op: TridiagonalOperator, psi: Wavepacket, dt: float) -> Wavepacket:
    """One step of (I + i dt H/2) psi' = (I - i dt H/2) psi."""
    if not dt > 0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    u = op.to_coefficients(psi.amplitudes).astype(complex)
    u = CrankNicolson(op, dt).step(u)
    return Wavepacket(op.from_coefficients(u), psi.grid, psi.time + dt)


def default_dt(energy: float, phase_error: float = 1e-6) -> float:
    """Largest dt whose Cayley phase error (E dt)^3 / 12 stays below ``phase_error``."""
    return (12.0 * phase_error) ** (1.0 / 3.0) / max(abs(energy), 1e-300)


def observables(op: TridiagonalOperator, u) -> dict:
    """Norm, kinetic form, shifted potential form and second x-moment of coefficients ``u``."""
    prob = np.abs(u) ** 2
    gap = abs(op.gamma)
    psi = u / np.sqrt(op.weights)
    full = np.concatenate(([0.0], psi, [0.0]))
    kinetic = float(np.sum(np.abs(np.diff(full)) ** 2 / op.grid.steps()))
    shifted = float(np.sum((op.potential + gap) * prob))
    l2 = float(np.sqrt(np.sum(prob)))
    x2 = float(np.sum(op.nodes**2 * prob))
    return {
        "l2_norm": l2,
        "kinetic": kinetic,
        "shifted_potential": shifted,
        "x_moment2": x2,
        "norm1_sq": l2 * l2 + x2 + kinetic + shifted,
        "q_energy": kinetic + shifted - gap * l2 * l2,
    }


@dataclass(eq=False)
class Trajectory:
    times: np.ndarray
    l2_norm: np.ndarray
    kinetic: np.ndarray
    shifted_potential: np.ndarray
    x_moment2: np.ndarray
    norm1_sq: np.ndarray
    q_energy: np.ndarray
    states: list | None = None

    FIELDS = ("l2_norm", "kinetic", "shifted_potential", "x_moment2", "norm1_sq", "q_energy")

    def __len__(self):
        return len(self.times)

    def to_csv(self, config=None) -> str:
        cols = [self.times] + [getattr(self, f) for f in self.FIELDS]
        return csv_text(["t", "l2", "kinetic", "shifted_potential", "x2", "norm1_sq", "q_energy"],
                        zip(*cols), config)


def evolve(op: TridiagonalOperator, psi0: Wavepacket, dt: float, n_steps: int, record_every: int = 1,
           keep_states: bool = False) -> Trajectory:
    """Repeated Crank-Nicolson steps, recording observables at t=0 and every ``record_every`` steps."""
    if psi0.grid.n != op.grid.n:
        raise ParameterError("packet and operator live on different grids")
    if n_steps < 0 or record_every < 1:
        raise ParameterError("need n_steps >= 0 and record_every >= 1")
    prop = CrankNicolson(op, dt)
    u = op.to_coefficients(psi0.amplitudes).astype(complex)
    records = {f: [] for f in Trajectory.FIELDS}
    times, states = [], []

    def record(step):
        times.append(psi0.time + step * dt)
        for key, value in observables(op, u).items():
            records[key].append(value)
        if keep_states:
            states.append(op.from_coefficients(u))

    record(0)
    for step in range(1, n_steps + 1):
        u = prop.step(u)
        if step % record_every == 0 or step == n_steps:
            record(step)
    return Trajectory(np.array(times), *(np.array(records[f]) for f in Trajectory.FIELDS),
                      states=states if keep_states else None)


@dataclass(eq=False)
class RadinSimonSlack:
    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def slack(self) -> np.ndarray:
        return self.rhs - self.lhs

    def min_relative_slack(self) -> float:
        return float(np.min(self.slack / self.rhs))


def verify_radin_simon(traj: Trajectory) -> RadinSimonSlack:
    """Slack of <x^2>_t^(1/2) <= <x^2>_0^(1/2) + 2 int_0^t ||(-Delta)^(1/2) psi_s|| ds.

    The time integral is the trapezoid rule over the recorded samples.
    """
    if len(traj) < 3:
        raise ParameterError("need at least 3 records")
    lhs = np.sqrt(traj.x_moment2)
    integral = cumulative_trapezoid(np.sqrt(traj.kinetic), traj.times, initial=0.0)
    rhs = lhs[0] + 2.0 * integral
    return RadinSimonSlack(traj.times.copy(), lhs, rhs)


@dataclass(frozen=True)
class AffineCertificate:
    c: float
    d: float
    max_violation: float

    def to_dict(self):
        return {"c": self.c, "d": self.d, "max_violation": self.max_violation}


def verify_affine_bound(traj: Trajectory) -> AffineCertificate:
    """Check ||psi_t||_1 <= (c + d t) ||psi_0||_1 with explicit constants.

    K = kinetic + shifted potential is conserved and bounds the kinetic form,
    so ||psi_t||_1^2 = ||psi_0||_1^2 + <x^2>_t - <x^2>_0 and the moment bound
    give c = sqrt(2), d = 2 sqrt(K) / ||psi_0||_1. The returned violation is
    max_t ||psi_t||_1 / ((c + d t) ||psi_0||_1) - 1, which is <= 0 when the
    bound holds.
    """
    if len(traj) < 3:
        raise ParameterError("need at least 3 records")
    n0 = math.sqrt(traj.norm1_sq[0])
    K = traj.kinetic[0] + traj.shifted_potential[0]
    c = math.sqrt(2.0)
    d = 2.0 * math.sqrt(K) / n0
    t = traj.times - traj.times[0]
    ratio = np.sqrt(traj.norm1_sq) / ((c + d * t) * n0)
    return AffineCertificate(c, d, float(np.max(ratio) - 1.0))


def packet_width(width: float, t: float) -> float:
    """Position spread of a free Gaussian under -d^2/dx^2 at time t."""
    return width * math.sqrt(1.0 + (t / width**2) ** 2)


def ballistic_guard(grid: Grid, center: float, k0: float, width: float, T: float, n_widths: float = 5.0):
    """Raise if the ballistic packet comes within ``n_widths`` spreads of the right edge before T.

    The packet moves at group velocity 2 k0 and is mirrored at the origin.
    """
    v = 2.0 * k0
    for t in np.linspace(0.0, T, 65):
        pos = abs(center + v * t)
        if pos + n_widths * packet_width(width, t) >= grid.L:
            raise NumericalError(
                f"packet reaches within {n_widths:g} widths of L={grid.L:g} at t={t:.4g} < T={T:g}",
                (0.0, float(t)))


def trajectory_summary(traj: Trajectory) -> dict:
    rs = verify_radin_simon(traj)
    cert = verify_affine_bound(traj)
    e = traj.kinetic + traj.shifted_potential
    return {
        "certificate": cert.to_dict(),
        "radin_simon_min_relative_slack": rs.min_relative_slack(),
        "max_norm_drift": float(np.max(np.abs(traj.l2_norm - traj.l2_norm[0]))),
        "max_energy_drift_relative": float(np.max(np.abs(e - e[0])) / abs(e[0])),
        "records": len(traj),
    }

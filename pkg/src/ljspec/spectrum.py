"""Discrete spectrum of the truncated operator.

Eigenvalue counts come from the Sturm sequence (pivots of the LDL^T
factorization of T - s I); eigenvalues are located by bisection on those
counts and eigenvectors by inverse iteration. ``shooting_count`` is an
independent ODE oracle based on Sturm oscillation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg.lapack import dgttrf, dgttrs

from ._io import csv_text
from .discretization import Grid, TridiagonalOperator, assemble_hamiltonian, build_grid
from .errors import NumericalError, ParameterError
from .potential import (
    LJParams,
    absence_criterion,
    eval_potential,
    landmarks,
    negative_part_moment,
)

__all__ = [
    "SpectrumReport",
    "BoundaryDiagnostics",
    "ConvergenceReport",
    "ProbeRow",
    "ProbeTable",
    "count_negative",
    "eigenvalue_by_index",
    "negative_eigenvalues",
    "default_abs_tol",
    "shooting_count",
    "boundary_behavior_check",
    "essential_spectrum_probe",
    "check_convergence",
]

MAX_INVERSE_ITERATIONS = 50


def count_negative(op: TridiagonalOperator, level: float) -> int:
    """Number of eigenvalues of ``op`` strictly below ``level``.

    Counts negative pivots of the LDL^T factorization of op - level*I;
    tiny pivots are replaced by -pivmin as in LAPACK's dlaneg.
    """
    if not math.isfinite(level):
        raise ParameterError(f"level must be finite, got {level}")
    d = op.diag.tolist()
    e2 = (op.offdiag * op.offdiag).tolist()
    pivmin = np.finfo(float).tiny * max(1.0, max(e2, default=1.0))
    count = 0
    q = d[0] - level
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        q = d[i] - level - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def eigenvalue_by_index(op: TridiagonalOperator, index: int, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Bisect for eigenvalue number ``index`` (0-based, ascending) inside [lo, hi].

    Requires count(lo) <= index < count(hi). Returns the final bracket,
    whose width is at most ``tol``.
    """
    if not (count_negative(op, lo) <= index < count_negative(op, hi)):
        raise NumericalError(f"eigenvalue {index} is not inside the bracket", (lo, hi))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if count_negative(op, mid) > index:
            hi = mid
        else:
            lo = mid
    return lo, hi


def default_abs_tol(op_or_params) -> float:
    """1e-8 |gamma|: separates true bound states from the 0+ box modes."""
    params = op_or_params.params if isinstance(op_or_params, TridiagonalOperator) else op_or_params
    if params is None:
        return 1e-12
    return 1e-8 * abs(landmarks(params).gamma)


def _inverse_iteration(op, shift, previous, seed, bracket):
    n = op.dim
    dl, d, du, du2, ipiv, info = dgttrf(op.offdiag.copy(), op.diag - shift, op.offdiag.copy())
    if info < 0:
        raise NumericalError("tridiagonal factorization failed", bracket)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    for it in range(MAX_INVERSE_ITERATIONS):
        for w in previous:
            v -= np.dot(w, v) * w
        x, info = dgttrs(dl, d, du, du2, ipiv, v)
        if info != 0 or not np.all(np.isfinite(x)):
            raise NumericalError("inverse iteration solve broke down", bracket)
        for w in previous:
            x -= np.dot(w, x) * w
        x /= np.linalg.norm(x)
        if np.dot(x, v) < 0:
            x = -x
        change = np.linalg.norm(x - v)
        v = x
        if it >= 1 and change < 1e-10:
            break
    else:
        raise NumericalError(
            f"inverse iteration did not converge in {MAX_INVERSE_ITERATIONS} iterations", bracket)
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return v


@dataclass(eq=False)
class SpectrumReport:
    negative_eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # shape (count, grid.n), grid values with discrete L2 norm 1
    count: int
    bargmann_moment: float
    criterion_holds: bool
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    grid: Grid | None = None
    params: LJParams | None = None
    abs_tol: float = 0.0

    def to_dict(self, include_vectors: bool = True) -> dict:
        out = {
            "negative_eigenvalues": self.negative_eigenvalues.tolist(),
            "count": self.count,
            "bargmann_moment": self.bargmann_moment,
            "criterion_holds": self.criterion_holds,
            "residuals": self.residuals.tolist(),
            "abs_tol": self.abs_tol,
        }
        if include_vectors:
            out["eigenvectors"] = self.eigenvectors.tolist()
        return out

    def to_json(self, include_vectors: bool = True) -> str:
        return json.dumps(self.to_dict(include_vectors))

    def to_csv(self, config=None) -> str:
        rows = [(i, e, r) for i, (e, r) in enumerate(zip(self.negative_eigenvalues, self.residuals))]
        return csv_text(["index", "energy", "residual"], rows, config)


def negative_eigenvalues(op: TridiagonalOperator, abs_tol: float | None = None) -> SpectrumReport:
    """All eigenvalues in [gamma, -abs_tol), bracketed to width ``abs_tol``, with eigenvectors.

    The default ``abs_tol`` is 1e-8 |gamma|.
    """
    if abs_tol is None:
        abs_tol = default_abs_tol(op)
    if not abs_tol > 0:
        raise ParameterError(f"abs_tol must be > 0, got {abs_tol}")
    params = op.params
    moment = 0.0 if params is None else negative_part_moment(params)
    criterion = False if params is None else absence_criterion(params)
    gamma = op.gamma
    top = -abs_tol
    count = count_negative(op, top) if gamma < top else 0

    energies, vectors, residuals = [], [], []
    for j in range(count):
        lo, hi = eigenvalue_by_index(op, j, gamma, top, abs_tol)
        energy = 0.5 * (lo + hi)
        u = _inverse_iteration(op, energy, vectors, seed=j, bracket=(lo, hi))
        energies.append(energy)
        vectors.append(u)
        residuals.append(float(np.linalg.norm(op.matvec(u) - energy * u)))
    psi = np.array([op.from_coefficients(u) for u in vectors]).reshape(count, op.grid.n)
    return SpectrumReport(
        negative_eigenvalues=np.array(energies),
        eigenvectors=psi,
        count=count,
        bargmann_moment=moment,
        criterion_holds=criterion,
        residuals=np.array(residuals),
        grid=op.grid,
        params=params,
        abs_tol=abs_tol,
    )


def shooting_count(params: LJParams, energy: float, eps: float, L: float, rtol: float = 1e-9) -> int:
    """Sign changes on (eps, L) of the solution of psi'' = (V - E) psi with psi(eps)=0, psi'(eps)=1.

    By Sturm oscillation this equals the number of Dirichlet eigenvalues on
    [eps, L] below ``energy``. Integration uses RK45 on pieces of bounded
    growth, rescaling the state between pieces.
    """
    if not energy < 0:
        raise ParameterError(f"energy must be negative, got {energy}")
    if not 0 < eps < L:
        raise ParameterError(f"need 0 < eps < L, got eps={eps}, L={L}")
    gamma = landmarks(params).gamma
    max_step = 0.25 / math.sqrt(abs(gamma))
    piece = min(L - eps, 100.0 / math.sqrt(abs(energy)))
    a, b = params.alpha, params.beta

    def rhs(x, y):
        inv6 = x**-6
        return [y[1], (a * inv6 * inv6 - b * inv6 - energy) * y[0]]

    y = np.array([0.0, 1.0])
    x = eps
    sign = 0.0
    changes = 0
    while x < L:
        x_next = min(L, x + piece)
        sol = solve_ivp(rhs, (x, x_next), y, method="RK45", rtol=rtol, atol=1e-24,
                        max_step=max_step, first_step=1e-3 * max_step)
        if not sol.success:
            raise NumericalError(f"shooting integration failed: {sol.message}", (x, x_next))
        values = sol.y[0][1:] if x == eps else sol.y[0]
        if x_next == L:
            values = values[:-1]
        for s in np.sign(values):
            if s == 0:
                continue
            if sign != 0 and s != sign:
                changes += 1
            sign = s
        y = sol.y[:, -1]
        scale = np.max(np.abs(y))
        if not np.isfinite(scale) or scale == 0:
            raise NumericalError("shooting solution over/underflowed", (x, x_next))
        y = y / scale
        x = x_next
    return changes


@dataclass(frozen=True)
class BoundaryDiagnostics:
    index: int
    energy: float
    ratio_increasing: bool
    slope_ratio: float
    inconclusive: bool
    applicable: bool


def boundary_behavior_check(report: SpectrumReport, n_probe: int = 10) -> list[BoundaryDiagnostics]:
    """Super-linear vanishing of each eigenvector at the barrier.

    On the ``n_probe`` smallest interior nodes, checks that |psi(x)|/x is
    strictly increasing and fits log|psi| against -sqrt(alpha)/(5 x^5);
    the fitted slope should be close to 1. For the free operator the check
    is reported with ``applicable=False``.
    """
    if report.eigenvectors.shape[0] == 0:
        raise ParameterError("report has no eigenvectors")
    x = report.grid.interior[:n_probe]
    params = report.params
    out = []
    for j, psi in enumerate(report.eigenvectors):
        amp = np.abs(psi[1:n_probe + 1])
        r = amp / x
        increasing = bool(np.all(np.diff(r) > 0))
        inconclusive = bool(np.max(amp) < 1e-30)
        slope = float("nan")
        if params is not None and np.all(amp > 0):
            f = -math.sqrt(params.alpha) / (5.0 * x**5)
            slope = float(np.polyfit(f, np.log(amp), 1)[0])
        energy = float(report.negative_eigenvalues[j]) if j < len(report.negative_eigenvalues) else float("nan")
        out.append(BoundaryDiagnostics(j, energy, increasing, slope, inconclusive, params is not None))
    return out


@dataclass(frozen=True)
class ProbeRow:
    L: float
    mode: int
    eigenvalue: float
    free_value: float

    @property
    def rel_deviation(self) -> float:
        return abs(self.eigenvalue - self.free_value) / self.free_value


@dataclass
class ProbeTable:
    rows: list[ProbeRow]

    def for_length(self, L):
        return [r for r in self.rows if r.L == L]

    def max_deviation(self) -> float:
        return max(r.rel_deviation for r in self.rows)

    def sqrt_ratios(self):
        """sqrt(E(L_i)) / sqrt(E(L_{i+1})) per mode for consecutive box lengths."""
        lengths = sorted({r.L for r in self.rows})
        out = []
        for L1, L2 in zip(lengths, lengths[1:]):
            a = {r.mode: r.eigenvalue for r in self.for_length(L1)}
            b = {r.mode: r.eigenvalue for r in self.for_length(L2)}
            for m in sorted(a):
                out.append((L1, L2, m, math.sqrt(a[m] / b[m])))
        return out


def essential_spectrum_probe(params: LJParams | None, L_list, k_modes: int, *, eps: float | None = None,
                             spacing: float = 0.01, rtol: float = 1e-10) -> ProbeTable:
    """Lowest ``k_modes`` nonnegative eigenvalues for each box length, against n^2 pi^2/(L - eps)^2.

    Uniform grids with the given ``spacing`` are used; eps defaults to the
    barrier truncation point (0 for the free operator).
    """
    from .potential import barrier_truncation_point

    L_list = list(L_list)
    if any(b <= a for a, b in zip(L_list, L_list[1:])):
        raise ParameterError("L_list must be increasing")
    if eps is None:
        eps = 0.0 if params is None else barrier_truncation_point(params)
    rows = []
    for L in L_list:
        if params is not None and L < 10 * landmarks(params).x_min:
            raise ParameterError(f"L={L} is not large compared with x_min")
        n = int(round((L - eps) / spacing)) + 1
        op = assemble_hamiltonian(build_grid(eps, L, n), params)
        n_neg = count_negative(op, 0.0)
        box = L - eps
        hi = 4.0 * ((n_neg + k_modes + 1) * math.pi / box) ** 2 + 1.0
        while count_negative(op, hi) < n_neg + k_modes:
            hi *= 2.0
        for m in range(k_modes):
            lo_b, hi_b = eigenvalue_by_index(op, n_neg + m, 0.0, hi, rtol * hi)
            rows.append(ProbeRow(L, m + 1, 0.5 * (lo_b + hi_b), ((m + 1) * math.pi / box) ** 2))
    return ProbeTable(rows)


@dataclass(frozen=True)
class ConvergenceReport:
    count: int
    refined_count: int
    extended_count: int
    lowest: float
    refined_lowest: float
    converged: bool
    reasons: tuple[str, ...]


def _lowest_eigenvalue(op):
    lo = op.gamma if op.params is not None else 0.0
    hi = 1.0
    while count_negative(op, hi) < 1:
        hi *= 2.0
    a, b = eigenvalue_by_index(op, 0, lo - 1e-12, hi, 1e-12 * max(1.0, abs(lo), abs(hi)))
    return 0.5 * (a + b)


def check_convergence(params: LJParams, eps: float, L: float, n: int, policy: str = "uniform",
                      power: float = 2.0, abs_tol: float | None = None,
                      energy_rtol: float = 1e-4) -> ConvergenceReport:
    """Stability of the bound-state count under n -> 2n and L -> 2L.

    The lowest eigenvalue (bound or box mode) must also agree to
    ``energy_rtol`` under refinement, which flags grids that do not resolve
    the barrier even when the count happens to be stable.
    """
    if abs_tol is None:
        abs_tol = default_abs_tol(params)
    base = assemble_hamiltonian(build_grid(eps, L, n, policy, power), params)
    fine = assemble_hamiltonian(build_grid(eps, L, 2 * n - 1, policy, power), params)
    if policy == "uniform":
        h = (L - eps) / (n - 1)
        n_ext = int(round((2 * L - eps) / h)) + 1
        L_ext = eps + (n_ext - 1) * h
    else:
        n_ext, L_ext = 2 * n, 2 * L
    ext = assemble_hamiltonian(build_grid(eps, L_ext, n_ext, policy, power), params)

    def bound_count(op):
        return count_negative(op, -abs_tol) if op.gamma < -abs_tol else 0

    c0, c1, c2 = bound_count(base), bound_count(fine), bound_count(ext)
    e0, e1 = _lowest_eigenvalue(base), _lowest_eigenvalue(fine)
    reasons = []
    if c1 != c0:
        reasons.append(f"count changes under refinement n={n} -> {2 * n - 1}: {c0} -> {c1}")
    if c2 != c0:
        reasons.append(f"count changes under extension L={L} -> {L_ext:g}: {c0} -> {c2}")
    if abs(e1 - e0) > energy_rtol * abs(e1):
        reasons.append(f"lowest eigenvalue moves {e0:.6g} -> {e1:.6g} under refinement")
    return ConvergenceReport(c0, c1, c2, e0, e1, not reasons, tuple(reasons))

"""Lennard-Jones potential V(x) = alpha/x^12 - beta/x^6 on the half-line.

Units follow the kinetic term -d^2/dx^2, so energies are inverse squared
lengths; alpha carries length^10 and beta length^4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "LJParams",
    "PotentialLandmarks",
    "eval_potential",
    "landmarks",
    "negative_part_moment",
    "absence_criterion",
    "barrier_truncation_point",
    "DEFAULT_AMPLITUDE_TOL",
]

# WKB amplitude left under the barrier at the truncation point.
DEFAULT_AMPLITUDE_TOL = math.exp(-50.0)


@dataclass(frozen=True)
class LJParams:
    """Coupling pair (alpha, beta) of the Lennard-Jones potential."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)):
                raise ParameterError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value) or value <= 0:
                raise ParameterError(f"{name} must be finite and > 0, got {value!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    def __call__(self, x):
        return eval_potential(self, x)


@dataclass(frozen=True)
class PotentialLandmarks:
    x0: float
    x_min: float
    gamma: float


def eval_potential(params: LJParams, x):
    """Return alpha/x**12 - beta/x**6 for scalar or array ``x > 0``."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise DomainError("the potential is singular at x = 0 and undefined for x < 0")
    inv6 = xa**-6
    v = params.alpha * inv6 * inv6 - params.beta * inv6
    if np.ndim(x) == 0:
        return float(v)
    return v


def landmarks(params: LJParams) -> PotentialLandmarks:
    """Zero crossing, location of the minimum and minimum value of V."""
    a, b = params.alpha, params.beta
    return PotentialLandmarks(
        x0=(a / b) ** (1.0 / 6.0),
        x_min=(2.0 * a / b) ** (1.0 / 6.0),
        gamma=-(b * b) / (4.0 * a),
    )


def negative_part_moment(params: LJParams) -> float:
    """Closed form of the integral of x*|V_-(x)| over the half-line.

    V is negative exactly on (x0, inf), where the integrand is
    beta/x^5 - alpha/x^11; integrating gives (3/20) beta^(5/3) alpha^(-2/3).
    """
    return 0.15 * params.beta ** (5.0 / 3.0) * params.alpha ** (-2.0 / 3.0)


def absence_criterion(params: LJParams) -> bool:
    """True iff beta^(5/3) < 4 alpha^(2/3); the discrete spectrum is then empty."""
    return params.beta ** (5.0 / 3.0) < 4.0 * params.alpha ** (2.0 / 3.0)


def barrier_truncation_point(params: LJParams, amplitude_tol: float = DEFAULT_AMPLITUDE_TOL) -> float:
    """Left truncation point eps where the WKB factor exp(-sqrt(alpha)/(5 eps^5)) equals ``amplitude_tol``.

    Only the alpha/x^12 term is kept; beta/x^6 is subdominant as x -> 0.
    """
    if not (0.0 < amplitude_tol < 1.0):
        raise ParameterError(f"amplitude_tol must lie in (0, 1), got {amplitude_tol!r}")
    return (math.sqrt(params.alpha) / (5.0 * math.log(1.0 / amplitude_tol))) ** 0.2

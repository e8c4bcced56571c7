"""Truncated grids on [eps, L] and the symmetric 3-point Hamiltonian.

The operator acts on the interior nodes; both endpoints carry Dirichlet
conditions. On graded grids the nonuniform stencil is symmetrized with the
lumped mass weights w_i = (h_{i-1/2} + h_{i+1/2}) / 2, so the matrix acts on
coefficients u_i = sqrt(w_i) psi_i and the Euclidean norm of u is the
discrete L2 norm of psi.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError
from .potential import LJParams, eval_potential, landmarks

__all__ = [
    "Grid",
    "TridiagonalOperator",
    "build_grid",
    "assemble_hamiltonian",
    "second_difference_energy",
    "MIN_NODES",
    "MAX_POTENTIAL",
]

MIN_NODES = 16
# Assembly refuses nodes where V is this large; move eps outward instead.
MAX_POTENTIAL = 1e15


@dataclass(frozen=True, eq=False)
class Grid:
    nodes: np.ndarray
    policy: str = "uniform"
    power: float = 1.0

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def eps(self) -> float:
        return float(self.nodes[0])

    @property
    def L(self) -> float:
        return float(self.nodes[-1])

    @property
    def spacing(self):
        """Constant spacing of a uniform grid, ``None`` for graded grids."""
        if self.policy != "uniform":
            return None
        return (self.L - self.eps) / (self.n - 1)

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]

    def steps(self) -> np.ndarray:
        """Lengths of the n - 1 cells."""
        if self.policy == "uniform":
            return np.full(self.n - 1, self.spacing)
        return np.diff(self.nodes)

    def weights(self) -> np.ndarray:
        """Lumped mass weights of the interior nodes."""
        h = self.steps()
        return 0.5 * (h[:-1] + h[1:])

    def to_dict(self) -> dict:
        return {"nodes": self.nodes.tolist(), "policy": self.policy, "power": self.power}

    @classmethod
    def from_dict(cls, data: dict) -> "Grid":
        return cls(np.asarray(data["nodes"], dtype=float), data.get("policy", "uniform"),
                   float(data.get("power", 1.0)))


def build_grid(eps: float, L: float, n: int, policy: str = "uniform", power: float = 2.0) -> Grid:
    """Nodes on [eps, L].

    ``policy="uniform"`` gives constant spacing (L - eps)/(n - 1);
    ``policy="graded"`` maps uniform t in [0, 1] through eps + (L - eps) t**power,
    which clusters nodes near eps for power > 1.

    eps = 0 is accepted so that the free operator can live on [0, L]; the
    Lennard-Jones assembly rejects a node at the origin.
    """
    if not (np.isfinite(eps) and np.isfinite(L)):
        raise ParameterError("grid endpoints must be finite")
    if eps < 0:
        raise ParameterError(f"eps must be >= 0, got {eps}")
    if eps >= L:
        raise ParameterError(f"need eps < L, got eps={eps}, L={L}")
    if int(n) != n or n < MIN_NODES:
        raise ParameterError(f"need an integer n >= {MIN_NODES}, got {n}")
    n = int(n)
    t = np.linspace(0.0, 1.0, n)
    if policy == "uniform":
        nodes = eps + (L - eps) * t
        power = 1.0
    elif policy == "graded":
        if not power > 1.0:
            raise ParameterError(f"graded grids need power > 1, got {power}")
        nodes = eps + (L - eps) * t**power
    else:
        raise ParameterError(f"unknown spacing policy {policy!r}")
    nodes[0], nodes[-1] = eps, L
    if np.any(np.diff(nodes) <= 0):
        raise ParameterError("grid nodes are not strictly increasing; reduce n or power")
    return Grid(nodes, policy, float(power))


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix for -d^2/dx^2 + V on the interior nodes.

    ``params is None`` denotes the free operator (V = 0).
    """

    diag: np.ndarray
    offdiag: np.ndarray
    grid: Grid
    potential: np.ndarray
    weights: np.ndarray
    params: LJParams | None = None
    _sqrt_w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_sqrt_w", np.sqrt(self.weights))

    @property
    def dim(self) -> int:
        return len(self.diag)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.interior

    @property
    def gamma(self) -> float:
        """Provable lower bound of the spectrum (minimum of V, 0 for the free operator)."""
        if self.params is None:
            return 0.0
        return landmarks(self.params).gamma

    def matvec(self, u):
        out = self.diag * u
        out[:-1] += self.offdiag * u[1:]
        out[1:] += self.offdiag * u[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def to_coefficients(self, psi):
        """Map grid values psi (full grid or interior) to matrix coefficients."""
        psi = np.asarray(psi)
        if len(psi) == self.grid.n:
            psi = psi[1:-1]
        elif len(psi) != self.dim:
            raise ParameterError(
                f"state has {len(psi)} samples; expected {self.grid.n} (full grid) or {self.dim}")
        return self._sqrt_w * psi

    def from_coefficients(self, u):
        """Inverse of :meth:`to_coefficients`; returns values on the full grid, zero at both ends."""
        psi = np.zeros(self.grid.n, dtype=np.result_type(u, float))
        psi[1:-1] = u / self._sqrt_w
        return psi

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.to_dict(),
            "diag": self.diag.tolist(),
            "offdiag": self.offdiag.tolist(),
            "potential": self.potential.tolist(),
            "weights": self.weights.tolist(),
            "params": None if self.params is None
            else {"alpha": self.params.alpha, "beta": self.params.beta},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TridiagonalOperator":
        p = data.get("params")
        return cls(
            np.asarray(data["diag"], dtype=float),
            np.asarray(data["offdiag"], dtype=float),
            Grid.from_dict(data["grid"]),
            np.asarray(data["potential"], dtype=float),
            np.asarray(data["weights"], dtype=float),
            None if p is None else LJParams(p["alpha"], p["beta"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "TridiagonalOperator":
        return cls.from_dict(json.loads(text))


def assemble_hamiltonian(grid: Grid, params: LJParams | None) -> TridiagonalOperator:
    """Assemble -d^2/dx^2 + V with Dirichlet conditions at both grid ends.

    Pass ``params=None`` for the free operator.
    """
    x = grid.interior
    if params is None:
        v = np.zeros_like(x)
    else:
        if grid.nodes[0] <= 0:
            raise DomainError("Lennard-Jones operator needs all nodes > 0")
        v = eval_potential(params, x)
        if np.max(v) > MAX_POTENTIAL:
            raise ParameterError(
                f"V exceeds {MAX_POTENTIAL:g} at x={x[np.argmax(v)]:.6g}; "
                "choose eps from barrier_truncation_point")
    h_uniform = grid.spacing
    if h_uniform is not None:
        w = np.full(len(x), h_uniform)
        diag = 2.0 / h_uniform**2 + v
        off = np.full(len(x) - 1, -1.0 / h_uniform**2)
    else:
        h = grid.steps()
        w = 0.5 * (h[:-1] + h[1:])
        diag = (1.0 / h[:-1] + 1.0 / h[1:]) / w + v
        off = -1.0 / (h[1:-1] * np.sqrt(w[:-1] * w[1:]))
    return TridiagonalOperator(diag, off, grid, v, w, params)


def second_difference_energy(op: TridiagonalOperator, psi) -> float:
    """Kinetic form sum_j |psi_{j+1} - psi_j|^2 / h_j over all cells.

    ``psi`` holds grid values (full grid or interior only); the endpoint
    values are taken as zero, matching the Dirichlet truncation.
    """
    psi = np.asarray(psi)
    if len(psi) == op.grid.n:
        inner = psi[1:-1]
    elif len(psi) == op.dim:
        inner = psi
    else:
        raise ParameterError(
            f"state has {len(psi)} samples; expected {op.grid.n} (full grid) or {op.dim}")
    full = np.concatenate(([0.0], inner, [0.0]))
    jumps = np.abs(np.diff(full)) ** 2
    return float(np.sum(jumps / op.grid.steps()))

"""Run configuration: a TOML file with nested sections, overridable from flags.

Precedence, highest first: command-line flags, the LJSPEC_OUT environment
variable (output directory only), the config file, built-in defaults.
"""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, field, fields, is_dataclass

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .discretization import MIN_NODES
from .potential import DEFAULT_AMPLITUDE_TOL, LJParams, barrier_truncation_point, landmarks

__all__ = ["ConfigError", "RunConfig", "load_config", "config_from_dict"]


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field path."""


@dataclass
class GridConfig:
    eps: float | None = None
    amplitude_tol: float = DEFAULT_AMPLITUDE_TOL
    L: float = 50.0
    n: int = 20000
    spacing: str = "uniform"
    power: float = 2.0


@dataclass
class SpectrumConfig:
    abs_tol: float | None = None


@dataclass
class ScatterConfig:
    k_min: float | None = None
    k_max: float = 25.0
    n_k: int = 400
    match_radius: float | None = None
    completeness: bool = True


@dataclass
class ProbeConfig:
    center: float = 30.0
    k0: float = 3.0
    width: float = 2.0
    T: list = field(default_factory=lambda: [12.0, 14.0, 16.0])
    L: float = 200.0
    n: int = 20001
    dt: float | None = None


@dataclass
class EvolveConfig:
    center: float = 30.0
    k0: float = -2.0
    width: float = 2.0
    dt: float = 1e-3
    n_steps: int = 10000
    record_every: int = 100
    L: float = 120.0
    n: int = 12001


@dataclass
class EssentialConfig:
    L: list = field(default_factory=lambda: [100.0, 200.0])
    modes: int = 5
    spacing: float = 0.01


@dataclass
class SweepConfig:
    samples: int = 20
    alpha_min: float = 0.1
    alpha_max: float = 10.0
    mode: str = "absence"
    beta_max: float = 20.0


@dataclass
class RunConfig:
    alpha: float | None = None
    beta: float | None = None
    seed: int = 0
    threads: int = 1
    out: str | None = None
    grid: GridConfig = field(default_factory=GridConfig)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    scatter: ScatterConfig = field(default_factory=ScatterConfig)
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    evolve: EvolveConfig = field(default_factory=EvolveConfig)
    essential: EssentialConfig = field(default_factory=EssentialConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    @property
    def params(self) -> LJParams:
        return LJParams(self.alpha, self.beta)

    @property
    def eps(self) -> float:
        if self.grid.eps is not None:
            return self.grid.eps
        return barrier_truncation_point(self.params, self.grid.amplitude_tol)

    def resolved(self) -> dict:
        """Plain dict of every setting, with eps and k_min filled in; embedded in outputs."""
        data = asdict(self)
        data.pop("out")
        data.pop("threads")
        data["grid"]["eps"] = self.eps
        if data["scatter"]["k_min"] is None:
            data["scatter"]["k_min"] = default_k_min(self.params)
        return data


def default_k_min(params: LJParams) -> float:
    return 1e-2 * math.sqrt(abs(landmarks(params).gamma))


def _coerce(path, value, annotation, default):
    kind = str(annotation)
    if value is None:
        if "None" in kind:
            return None
        raise ConfigError(f"{path}: value required")
    if "bool" in kind:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value
    if "int" in kind and "float" not in kind:
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if "float" in kind:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(f"{path}: must be finite")
        return float(value)
    if "list" in kind:
        if not isinstance(value, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                                  for v in value):
            raise ConfigError(f"{path}: expected a list of numbers, got {value!r}")
        return [float(v) for v in value]
    if "str" in kind:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    return value


def _fill(obj, data: dict, prefix: str):
    known = {f.name: f for f in fields(obj)}
    for key, value in data.items():
        path = f"{prefix}{key}"
        if key not in known:
            raise ConfigError(f"{path}: unknown setting")
        current = getattr(obj, key)
        if is_dataclass(current):
            if not isinstance(value, dict):
                raise ConfigError(f"{path}: expected a section")
            _fill(current, value, path + ".")
        else:
            setattr(obj, key, _coerce(path, value, known[key].type, current))


def _require(cond, path, message):
    if not cond:
        raise ConfigError(f"{path}: {message}")


def validate(cfg: RunConfig) -> RunConfig:
    for name in ("alpha", "beta"):
        v = getattr(cfg, name)
        _require(v is not None, name, "value required")
        _require(v > 0, name, f"must be > 0, got {v}")
    g = cfg.grid
    _require(g.eps is None or g.eps > 0, "grid.eps", "must be > 0")
    _require(0 < g.amplitude_tol < 1, "grid.amplitude_tol", "must lie in (0, 1)")
    _require(g.n >= MIN_NODES, "grid.n", f"must be >= {MIN_NODES}, got {g.n}")
    _require(g.spacing in ("uniform", "graded"), "grid.spacing", "must be 'uniform' or 'graded'")
    _require(g.spacing == "uniform" or g.power > 1, "grid.power", "must be > 1 for graded grids")
    _require(g.L > cfg.eps, "grid.L", f"must exceed eps={cfg.eps:g}")
    s = cfg.spectrum
    _require(s.abs_tol is None or s.abs_tol > 0, "spectrum.abs_tol", "must be > 0")
    sc = cfg.scatter
    k_min = sc.k_min if sc.k_min is not None else default_k_min(cfg.params)
    _require(k_min > 0, "scatter.k_min", "must be > 0")
    _require(sc.k_max > k_min, "scatter.k_max", "must exceed k_min")
    _require(sc.n_k >= 2, "scatter.n_k", "must be >= 2")
    _require(sc.match_radius is None or sc.match_radius > 0, "scatter.match_radius", "must be > 0")
    p = cfg.probe
    _require(p.width > 0, "probe.width", "must be > 0")
    _require(p.k0 != 0, "probe.k0", "must be nonzero")
    _require(len(p.T) >= 1 and all(t > 0 for t in p.T), "probe.T", "needs positive times")
    _require(p.n >= MIN_NODES, "probe.n", f"must be >= {MIN_NODES}")
    _require(p.dt is None or p.dt > 0, "probe.dt", "must be > 0")
    e = cfg.evolve
    _require(e.width > 0, "evolve.width", "must be > 0")
    _require(e.dt > 0, "evolve.dt", "must be > 0")
    _require(e.n_steps >= 2, "evolve.n_steps", "must be >= 2")
    _require(e.record_every >= 1, "evolve.record_every", "must be >= 1")
    _require(e.n_steps // e.record_every >= 2, "evolve.record_every", "must leave at least 3 records")
    _require(e.n >= MIN_NODES, "evolve.n", f"must be >= {MIN_NODES}")
    es = cfg.essential
    _require(len(es.L) >= 1 and all(b > a for a, b in zip(es.L, es.L[1:])), "essential.L",
             "must be an increasing list")
    _require(es.modes >= 1, "essential.modes", "must be >= 1")
    _require(es.spacing > 0, "essential.spacing", "must be > 0")
    sw = cfg.sweep
    _require(sw.samples >= 1, "sweep.samples", "must be >= 1")
    _require(0 < sw.alpha_min < sw.alpha_max, "sweep.alpha_max", "need 0 < alpha_min < alpha_max")
    _require(sw.mode in ("absence", "uniform"), "sweep.mode", "must be 'absence' or 'uniform'")
    _require(sw.beta_max > 0, "sweep.beta_max", "must be > 0")
    _require(cfg.threads >= 1, "threads", "must be >= 1")
    return cfg


def config_from_dict(data: dict, overrides: dict | None = None) -> RunConfig:
    cfg = RunConfig()
    _fill(cfg, data, "")
    if overrides:
        _fill(cfg, {k: v for k, v in overrides.items() if v is not None}, "")
    return validate(cfg)


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    data = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config: {path} is not valid TOML: {exc}") from exc
    return config_from_dict(data, overrides)

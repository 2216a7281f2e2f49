"""Run configuration: TOML files, validation and flag overrides."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import GaussianSpec, LabUnits, make_grid
from .errors import ConfigError, GridError
from .numeric import PotentialModel


@dataclass(frozen=True)
class BeamConfig:
    gamma: float = 1.0
    x0: Optional[float] = None
    p0: Optional[float] = None
    r: Optional[float] = None
    theta: Optional[float] = None


@dataclass(frozen=True)
class GridConfig:
    n: int = 4096
    x_max: float = 40.0


@dataclass(frozen=True)
class SolverConfig:
    dz: float = 1e-3
    steps: int = 500
    stride: int = 50
    potential: str = "inverted_parabola"
    gamma: Optional[float] = None
    eta: Optional[float] = None
    kernel_width: Optional[float] = None


@dataclass(frozen=True)
class LabConfig:
    lambda0: Optional[float] = None
    n0: Optional[float] = None
    W0: Optional[float] = None
    gamma_lab: Optional[float] = None
    dgamma_dn: Optional[float] = None
    dgamma_dP: Optional[float] = None
    dgamma_dT: Optional[float] = None
    dn_dT: Optional[float] = None
    # generator moments already in lab form, 1/cm; replace the closed forms
    delta_h_over_k0_per_cm: Optional[float] = None
    mean_h_over_k0_per_cm: Optional[float] = None
    reference_z_pdl_mm: Optional[float] = None


@dataclass(frozen=True)
class BoundsConfig:
    angle: float = 0.5 * math.pi


@dataclass(frozen=True)
class SweepConfig:
    z_min: float = 0.04
    z_max: float = 2.0
    z_count: int = 50
    z_scale: str = "linear"
    a2_min: float = 0.01
    a2_max: float = 4.0
    a2_count: int = 50
    a2_scale: str = "linear"
    theta: float = 0.0
    angle_from: str = "fidelity"
    quantity: str = "z_pdl"


@dataclass(frozen=True)
class SensitivityConfig:
    parameter: str = "gamma"
    bound: str = "PDL"
    against: Optional[str] = None
    delta: Optional[float] = None


@dataclass(frozen=True)
class VerifyConfig:
    quick: bool = False
    seed: int = 0


@dataclass(frozen=True)
class OutputConfig:
    path: str = "-"
    format: Optional[str] = None
    jobs: Optional[int] = None
    snapshots: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    beam: BeamConfig = field(default_factory=BeamConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    lab: LabConfig = field(default_factory=LabConfig)
    bounds: BoundsConfig = field(default_factory=BoundsConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    sensitivity: SensitivityConfig = field(default_factory=SensitivityConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def spec(self) -> GaussianSpec:
        b = self.beam
        try:
            if b.r is not None:
                return GaussianSpec.from_polar(b.gamma, b.r, b.theta)
            return GaussianSpec(b.gamma, b.x0 or 0.0, b.p0 or 0.0)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def grid_obj(self):
        try:
            return make_grid(self.grid.n, self.grid.x_max)
        except GridError as exc:
            raise ConfigError(str(exc)) from exc

    def model(self) -> PotentialModel:
        s = self.solver
        if s.potential == "inverted_parabola":
            return PotentialModel.inverted_parabola(self.beam.gamma if s.gamma is None else s.gamma)
        if s.potential == "free":
            return PotentialModel.free()
        if s.potential == "nonlocal_defocusing":
            if s.eta is None or s.kernel_width is None:
                raise ConfigError("nonlocal_defocusing needs solver.eta and solver.kernel_width")
            return PotentialModel.nonlocal_defocusing(s.eta, s.kernel_width)
        raise ConfigError(f"unknown solver.potential {s.potential!r}")

    def units(self) -> Optional[LabUnits]:
        lab = self.lab
        if lab.lambda0 is None and lab.n0 is None and lab.W0 is None:
            return None
        try:
            return LabUnits(
                lab.lambda0, lab.n0, lab.W0, lab.gamma_lab, lab.dgamma_dn, lab.dgamma_dP, lab.dgamma_dT, lab.dn_dT
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"lab: {exc}") from exc


_SECTION_TYPES = {f.name: f.default_factory for f in fields(RunConfig)}


def _check_value(section: str, name: str, value, expected):
    where = f"{section}.{name}"
    if value is None:
        return None
    if "bool" in expected:
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be a boolean, got {value!r}")
        return value
    if "int" in expected:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer, got {value!r}")
        return value
    if "float" in expected:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(f"{where} must be finite, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{where} must be a string, got {value!r}")
    return value


def from_mapping(data: dict) -> RunConfig:
    sections = {}
    for section, body in data.items():
        if section not in _SECTION_TYPES:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        cls = type(_SECTION_TYPES[section]())
        known = {f.name: str(f.type) for f in fields(cls)}
        values = {}
        for key, value in body.items():
            if key not in known:
                raise ConfigError(f"unknown key {section}.{key}")
            values[key] = _check_value(section, key, value, known[key])
        sections[section] = cls(**values)
    return validate(RunConfig(**sections))


def validate(cfg: RunConfig) -> RunConfig:
    b = cfg.beam
    cart = b.x0 is not None or b.p0 is not None
    polar = b.r is not None or b.theta is not None
    if cart and polar:
        raise ConfigError("give either beam.x0/beam.p0 or beam.r/beam.theta, not both")
    if polar and (b.r is None or b.theta is None):
        raise ConfigError("polar beam parameters need both beam.r and beam.theta")
    if b.r is not None and b.r < 0:
        raise ConfigError("beam.r must be non-negative")
    if not b.gamma > 0:
        raise ConfigError("beam.gamma must be positive")
    if not cfg.solver.dz > 0:
        raise ConfigError("solver.dz must be positive")
    if cfg.solver.steps < 0 or cfg.solver.stride < 1:
        raise ConfigError("solver.steps must be >= 0 and solver.stride >= 1")
    if not 0 < cfg.bounds.angle <= 0.5 * math.pi:
        raise ConfigError("bounds.angle must lie in (0, pi/2]")
    if cfg.output.jobs is not None and cfg.output.jobs < 1:
        raise ConfigError("output.jobs must be >= 1")
    cfg.spec()
    cfg.grid_obj()
    cfg.units()
    return cfg


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return from_mapping(data)


def override(cfg: RunConfig, dotted: dict) -> RunConfig:
    """Apply ``{"section.key": value}`` overrides; ``None`` values are skipped."""
    by_section: dict = {}
    for key, value in dotted.items():
        if value is None:
            continue
        section, name = key.split(".", 1)
        by_section.setdefault(section, {})[name] = value
    beam = by_section.get("beam", {})
    # a parameterization given on the command line replaces the config's one
    if {"x0", "p0"} & beam.keys():
        by_section["beam"] = {"r": None, "theta": None, **beam}
    elif {"r", "theta"} & beam.keys():
        by_section["beam"] = {"x0": None, "p0": None, **beam}
    updates = {s: replace(getattr(cfg, s), **vals) for s, vals in by_section.items()}
    return validate(replace(cfg, **updates))


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, int):
        return str(value)
    return '"' + str(value).replace("\\", "\\\\").replace('"', '\\"') + '"'


def dumps(cfg: RunConfig) -> str:
    """Resolved configuration as TOML; unset optional keys are omitted."""
    out = []
    for section in _SECTION_TYPES:
        body = getattr(cfg, section)
        out.append(f"[{section}]")
        for f in fields(body):
            value = getattr(body, f.name)
            if value is not None:
                out.append(f"{f.name} = {_toml_value(value)}")
        out.append("")
    return "\n".join(out)

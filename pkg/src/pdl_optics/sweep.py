"""Bound landscapes over propagation distance and displacement strength."""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytic import bures_angle_at, energy_variance, fidelity_modulus
from .core import GaussianSpec
from .errors import PDLError

QUANTITIES = ("bures_angle", "abs_fidelity", "z_mt", "z_ml", "z_pdl")
CSV_COLUMNS = ("z", "a_squared") + QUANTITIES

# |cos 2 theta| below this counts as the balance line
BALANCE_TOL = 1e-12


class DegenerateAngleError(PDLError, ValueError):
    """``cos 2 theta = 0`` puts every point on the balance line."""


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"axis {self.name!r} needs at least one point")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"axis scale must be 'linear' or 'log', got {self.scale!r}")
        if self.scale == "log" and not (self.min > 0 and self.max > 0):
            raise ValueError(f"log axis {self.name!r} needs positive bounds")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([float(self.min)])
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass
class SweepTable:
    """Values on the ``z`` x ``a_squared`` grid; arrays are indexed ``[i_z, i_a]``."""

    z_axis: Axis
    a_axis: Axis
    values: dict
    metadata: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.z_axis.count, self.a_axis.count)

    def __eq__(self, other):
        if not isinstance(other, SweepTable):
            return NotImplemented
        return (
            self.z_axis == other.z_axis
            and self.a_axis == other.a_axis
            and self.metadata == other.metadata
            and self.values.keys() == other.values.keys()
            and all(np.array_equal(self.values[k], other.values[k]) for k in self.values)
        )


def _column(a_squared: float, zs: np.ndarray, theta: float, gamma: float, fixed_angle):
    spec = GaussianSpec.from_polar(gamma, math.sqrt(a_squared), theta)
    if fixed_angle is None:
        angle = bures_angle_at(spec, zs)
        mag = fidelity_modulus(spec, zs)
    else:
        angle = np.full(zs.shape, float(fixed_angle))
        mag = np.cos(angle)
    dh = energy_variance(spec)
    # |<H>| = gamma |a|^2 |cos 2 theta|, taken exactly on the balance line
    cos2 = math.cos(2 * theta)
    mh = 0.0 if abs(cos2) < BALANCE_TOL else gamma * a_squared * abs(cos2)
    z_mt = angle / dh
    with np.errstate(divide="ignore", invalid="ignore"):
        z_ml = np.where(angle == 0, 0.0, angle / mh if mh > 0 else np.inf)
    return angle, mag, z_mt, z_ml, np.maximum(z_mt, z_ml)


def sweep_bounds(
    z_axis: Axis,
    a_axis: Axis,
    theta: float = 0.0,
    gamma: float = 1.0,
    angle_from="fidelity",
    jobs: int = 1,
    require_ml: bool = True,
) -> SweepTable:
    """Evaluate the distance bounds over ``(z, |a|^2)`` at fixed ``theta``.

    ``angle_from`` is ``"fidelity"`` (use the actual Bures angle at each ``z``)
    or a number giving a fixed target angle for every point.
    """
    if require_ml and abs(math.cos(2 * theta)) < BALANCE_TOL:
        raise DegenerateAngleError("theta = pi/4 makes <H> vanish; ML values are all infinite")
    fixed = None if angle_from == "fidelity" else float(angle_from)
    if fixed is not None and not 0 <= fixed <= 0.5 * math.pi:
        raise ValueError(f"fixed angle must lie in [0, pi/2], got {fixed!r}")
    zs = z_axis.values()
    a2 = a_axis.values()
    if np.any(a2 < 0):
        raise ValueError("a_squared must be non-negative")
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        cols = list(pool.map(lambda a: _column(a, zs, theta, gamma, fixed), a2))
    values = {name: np.stack([c[i] for c in cols], axis=1) for i, name in enumerate(QUANTITIES)}
    metadata = {
        "gamma": float(gamma),
        "theta": float(theta),
        "angle_from": "fidelity" if fixed is None else f"fixed:{fixed!r}",
    }
    return SweepTable(z_axis, a_axis, values, metadata)


def _cell(v: float):
    return "inf" if v == math.inf else v


def _to_json(table: SweepTable) -> dict:
    def axis(a: Axis):
        return {"name": a.name, "min": a.min, "max": a.max, "count": a.count, "scale": a.scale}

    return {
        "axes": [axis(table.z_axis), axis(table.a_axis)],
        "metadata": table.metadata,
        "values": {k: [[_cell(float(v)) for v in row] for row in arr] for k, arr in table.values.items()},
    }


def export(table: SweepTable, format: str = "csv", quantity: str = "z_pdl") -> bytes:
    """Serialize ``table`` as long-format CSV, JSON, or a gnuplot matrix of ``quantity``."""
    zs, a2 = table.z_axis.values(), table.a_axis.values()
    if format == "csv":
        buf = io.StringIO()
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for i, z in enumerate(zs):
            for j, a in enumerate(a2):
                row = [z, a] + [table.values[q][i, j] for q in QUANTITIES]
                buf.write(",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue().encode()
    if format == "json":
        return (json.dumps(_to_json(table), indent=1, sort_keys=True) + "\n").encode()
    if format == "gnuplot":
        buf = io.StringIO()
        buf.write(f"# {quantity}; rows: z, columns: a_squared\n")
        buf.write(" ".join(repr(float(v)) for v in [len(a2), *a2]) + "\n")
        for i, z in enumerate(zs):
            buf.write(" ".join(repr(float(v)) for v in [z, *table.values[quantity][i]]) + "\n")
        return buf.getvalue().encode()
    raise ValueError(f"unknown export format {format!r}")


def load_json(data) -> SweepTable:
    """Inverse of ``export(table, "json")``."""
    obj = json.loads(data)
    z_axis, a_axis = (Axis(**a) for a in obj["axes"])
    values = {
        k: np.array([[math.inf if v == "inf" else float(v) for v in row] for row in rows], dtype=float)
        for k, rows in obj["values"].items()
    }
    return SweepTable(z_axis, a_axis, values, obj["metadata"])

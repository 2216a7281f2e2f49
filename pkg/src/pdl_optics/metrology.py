"""Sensitivity of the distance limits to physical parameters, and switching figures.

Derivatives are taken of ``z_MT = L / dH`` and ``z_ML = L / |<H>|`` at a fixed
target angle ``L`` (``pi/2`` reproduces the orthogonality case).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .analytic import HALF_PI, energy_variance, mean_energy
from .core import SPEED_OF_LIGHT, GaussianSpec, LabUnits
from .errors import BalanceLineError, MissingCouplingError

PARAMETERS = ("gamma", "x0", "p0")
BOUNDS = ("MT", "ML", "PDL")

# Relative gap below which z_MT and z_ML count as crossing.
CROSSOVER_TOL = 1e-9

# against -> (LabUnits coupling attribute, unit label, metres-per-unit -> reported unit)
LAB_AGAINST = {
    "index": ("dgamma_dn", "mm_per_RIU", 1e3),
    "power": ("dgamma_dP", "mm_per_W", 1e3),
    "temperature": ("dgamma_dT", "um_per_mK", 1e6 * 1e-3),
}


def delta_h_gradient(spec: GaussianSpec) -> dict:
    """Partial derivatives of the generator spread w.r.t. gamma, x0, p0."""
    g, x0, p0 = spec.gamma, spec.x0, spec.p0
    dh = energy_variance(spec)
    root = math.sqrt(1.0 + spec.r_squared)
    return {
        "gamma": (g + 1.5 * g**2 * x0**2 + 0.5 * p0**2) / (2.0 * dh),
        "x0": g**2 * x0 / (math.sqrt(2.0) * root),
        "p0": p0 / (math.sqrt(2.0) * root),
    }


def mean_h_gradient(spec: GaussianSpec) -> dict:
    g, x0, p0 = spec.gamma, spec.x0, spec.p0
    return {"gamma": -g * x0**2, "x0": -(g**2) * x0, "p0": p0}


def _with(spec: GaussianSpec, parameter: str, value: float) -> GaussianSpec:
    fields = {"gamma": spec.gamma, "x0": spec.x0, "p0": spec.p0}
    fields[parameter] = value
    return GaussianSpec(**fields)


def bound_distance(spec: GaussianSpec, bound: str, angle: float = HALF_PI) -> float:
    z_mt = angle / energy_variance(spec)
    if bound == "MT":
        return z_mt
    mh = mean_energy(spec)
    z_ml = angle / abs(mh) if mh != 0 else math.inf
    if bound == "ML":
        return z_ml
    return max(z_mt, z_ml)


def _mt_slope(spec, parameter, angle):
    return -angle / energy_variance(spec) ** 2 * delta_h_gradient(spec)[parameter]


def _ml_slope(spec, parameter, angle):
    mh = mean_energy(spec)
    if mh == 0:
        raise BalanceLineError(f"<H> = 0 for {spec}; the ML bound has no derivative")
    # d|<H>| = sign(<H>) d<H>
    return -angle * math.copysign(1.0, mh) / mh**2 * mean_h_gradient(spec)[parameter]


@dataclass(frozen=True)
class SensitivityReport:
    parameter: str
    bound: str
    analytic: float
    finite_difference: float
    z: float
    branch: str
    crossover: bool = False
    lab_value: Optional[float] = None
    lab_unit: Optional[str] = None

    @property
    def relative_error(self) -> float:
        scale = max(abs(self.analytic), abs(self.finite_difference))
        return 0.0 if scale == 0 else abs(self.analytic - self.finite_difference) / scale

    def shift(self, delta: float) -> float:
        """Lab distance shift for a perturbation ``delta`` (in the lab unit's base)."""
        if self.lab_value is None:
            return self.analytic * delta
        return self.lab_value * delta

    def to_dict(self) -> dict:
        out = asdict(self)
        out["z"] = "inf" if self.z == math.inf else self.z
        return out


def central_difference(f, x: float, rel_step: float = 1e-6) -> float:
    h = rel_step * max(1.0, abs(x))
    return (f(x + h) - f(x - h)) / (2.0 * h)


def sensitivity(spec: GaussianSpec, parameter: str, bound: str = "MT", angle: float = HALF_PI) -> SensitivityReport:
    """Analytic ``dz/dparameter`` with a central finite-difference cross-check.

    For ``bound="PDL"`` the branch attaining the maximum is differentiated; at
    the MT/ML crossover the larger one-sided slope is reported and
    ``crossover`` is set.
    """
    if parameter not in PARAMETERS:
        raise ValueError(f"parameter must be one of {PARAMETERS}, got {parameter!r}")
    if bound not in BOUNDS:
        raise ValueError(f"bound must be one of {BOUNDS}, got {bound!r}")
    crossover = False
    branch = bound
    if bound == "PDL":
        z_mt = bound_distance(spec, "MT", angle)
        z_ml = bound_distance(spec, "ML", angle)
        branch = "ML" if z_ml > z_mt else "MT"
        crossover = math.isfinite(z_ml) and abs(z_ml - z_mt) <= CROSSOVER_TOL * max(z_mt, z_ml)
    slope = _ml_slope if branch == "ML" else _mt_slope
    analytic = slope(spec, parameter, angle)
    if crossover:
        analytic = max(_mt_slope(spec, parameter, angle), _ml_slope(spec, parameter, angle), key=abs)

    base = getattr(spec, parameter)
    fd = central_difference(lambda v: bound_distance(_with(spec, parameter, v), branch, angle), base)
    return SensitivityReport(parameter, bound, analytic, fd, bound_distance(spec, bound, angle), branch, crossover)


def coupling(units: LabUnits, against: str) -> float:
    """Lab coupling ``dgamma/d(knob)`` in 1/m per knob unit."""
    if against not in LAB_AGAINST:
        raise ValueError(f"against must be one of {tuple(LAB_AGAINST)}, got {against!r}")
    value = getattr(units, LAB_AGAINST[against][0])
    if value is None and against == "temperature" and units.dgamma_dn is not None and units.dn_dT is not None:
        value = units.dgamma_dn * units.dn_dT
    if value is None:
        raise MissingCouplingError(f"LabUnits has no coupling for {against!r}")
    return value


def lab_sensitivity(
    spec: GaussianSpec, units: LabUnits, against: str, bound: str = "PDL", angle: float = HALF_PI
) -> SensitivityReport:
    """Chain rule ``dZ/dknob = (dz/dgamma) (dgamma_lab/dknob) / gamma_lab^2``.

    ``spec.gamma`` is the curvature in units of ``units.gamma_lab``, and lab
    distances are ``Z = z / gamma_lab``.
    """
    g_lab = units.require_gamma()
    dg = coupling(units, against)
    base = sensitivity(spec, "gamma", bound, angle)
    factor = dg / g_lab**2
    _, unit, scale = LAB_AGAINST[against]
    return SensitivityReport(
        against,
        bound,
        base.analytic * factor,
        base.finite_difference * factor,
        base.z / g_lab,
        base.branch,
        base.crossover,
        base.analytic * factor * scale,
        unit,
    )


def calibrate_coupling(spec: GaussianSpec, units: LabUnits, target_m_per_unit: float, bound: str = "PDL",
                       angle: float = HALF_PI) -> float:
    """Coupling ``dgamma_lab/dknob`` that yields the requested lab sensitivity."""
    g_lab = units.require_gamma()
    return target_m_per_unit * g_lab**2 / sensitivity(spec, "gamma", bound, angle).analytic


def sensitivity_from_shift(delta_z_m: float, delta_knob: float) -> float:
    """Observed sensitivity in metres per knob unit."""
    if delta_knob == 0:
        raise ValueError("perturbation must be non-zero")
    return delta_z_m / delta_knob


def switch_time(z_pdl_lab: float, n0: float) -> float:
    """Transit time ``n z / c`` in seconds."""
    if not math.isfinite(z_pdl_lab):
        raise ValueError("switch time needs a finite distance")
    return n0 * z_pdl_lab / SPEED_OF_LIGHT


def gate_rate(z_pdl_lab: float, n0: float) -> float:
    """Gate rate in 1/s, the reciprocal of :func:`switch_time`."""
    if z_pdl_lab == math.inf:
        return 0.0
    if z_pdl_lab <= 0:
        raise ValueError(f"gate rate needs a positive distance, got {z_pdl_lab!r}")
    return 1.0 / switch_time(z_pdl_lab, n0)

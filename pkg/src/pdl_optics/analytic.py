"""Closed-form propagation of Gaussians through the inverted oscillator and
the distance bounds built on it.

The generator is ``H = p^2/2 - gamma^2 x^2/2``. Its flow is a hyperbolic
squeeze, so a Gaussian stays Gaussian and every quantity here has a closed
form. General ``gamma`` is handled by the exact rescaling ``x' = sqrt(gamma) x``,
``z' = gamma z`` onto the ``gamma = 1`` problem.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .core import (
    BeamState,
    GaussianSpec,
    Grid,
    launch_coefficients,
    normalize,
    sample_quadratic_exponent,
)
from .errors import NumericalConsistencyError, RegimeError

HALF_PI = 0.5 * math.pi
FIDELITY_TOL = 1e-12


def _reduced(spec: GaussianSpec) -> tuple[float, float]:
    sg = math.sqrt(spec.gamma)
    return sg * spec.x0, spec.p0 / sg


def _unit_coefficients(x0, p0, u):
    """Coefficients of ``exp(-a x^2 + b x + c)`` for ``gamma = 1`` at distance ``u``.

    Works elementwise on arrays of ``u``.
    """
    u = np.asarray(u, dtype=float)
    ch, sh = np.cosh(u), np.sinh(u)
    c2, s2 = np.cosh(2 * u), np.sinh(2 * u)
    centre = x0 * ch + p0 * sh
    momentum = x0 * sh + p0 * ch
    # q = tanh 2u + i sech 2u is the complex beam parameter; a = -i q / 2
    q = np.tanh(2 * u) + 1j / c2
    a = -0.5j * q
    b = 1j * (momentum - q * centre)
    action = 0.25 * (x0**2 + p0**2) * s2 + x0 * p0 * ch**2
    c = (
        0.5j * q * centre**2
        - 1j * momentum * centre
        + 1j * action
        - 0.25 * math.log(math.pi)
        - 0.5 * np.log(ch + 1j * sh)
    )
    return a, b, c


@dataclass(frozen=True)
class ClosedFormGaussian:
    """``psi(x, z) = exp(-a x^2 + b x + c)`` for one launch spec and distance.

    ``a`` carries the chirp and width, ``b`` the complex centre and ``c`` the
    complex log-normalization including the Gouy-type phase.
    """

    spec: GaussianSpec
    z: float
    a: complex
    b: complex
    c: complex

    @property
    def sigma2(self) -> complex:
        """Complex width parameter, ``1/(2a)``."""
        return 0.5 / self.a

    @property
    def centre(self) -> complex:
        return self.b / (2 * self.a)

    @property
    def centroid(self) -> float:
        return self.b.real / (2 * self.a.real)

    @property
    def variance(self) -> float:
        """Variance of the intensity profile ``|psi|^2``."""
        return 0.25 / self.a.real

    def __call__(self, x):
        return sample_quadratic_exponent(self.a, self.b, self.c, np.asarray(x, dtype=float))

    def sample(self, grid: Grid) -> BeamState:
        return BeamState(grid, normalize(self(grid.x), grid.dx), self.z)


def evolve_closed_form(spec: GaussianSpec, z: float) -> ClosedFormGaussian:
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z!r}")
    if z == 0:
        return ClosedFormGaussian(spec, 0.0, *launch_coefficients(spec))
    g = spec.gamma
    a1, b1, c1 = _unit_coefficients(*_reduced(spec), g * z)
    sg = math.sqrt(g)
    return ClosedFormGaussian(
        spec,
        float(z),
        complex(g * a1),
        complex(sg * b1),
        complex(c1 + 0.25 * math.log(g)),
    )


def _overlap(a0, b0, c0, a, b, c):
    # <psi0|psi> for two Gaussians; Re(alpha) > 0 keeps the principal sqrt valid
    alpha = np.conj(a0) + a
    beta = np.conj(b0) + b
    return np.sqrt(np.pi / alpha) * np.exp(beta**2 / (4 * alpha) + np.conj(c0) + c)


def fidelity(spec: GaussianSpec, z):
    """Overlap ``<psi(0)|psi(z)>``; scalar or elementwise over an array of ``z``."""
    x0, p0 = _reduced(spec)
    u = spec.gamma * np.asarray(z, dtype=float)
    a0, b0, c0 = _unit_coefficients(x0, p0, 0.0)
    a, b, c = _unit_coefficients(x0, p0, u)
    f = _overlap(a0, b0, c0, a, b, c)
    f = np.where(u == 0, 1.0 + 0j, f)
    return complex(f) if f.ndim == 0 else f


def _log_fidelity_squared(spec: GaussianSpec, z):
    # ln|F|^2 = -ln cosh u - d^T M^-1 d / 2 from the covariance form of the overlap.
    # cosh u - 1 = 2 sinh^2(u/2) keeps small u exact; regrouping the quadratic form
    # around d1 - d2 = (p0 - x0)(1 - e^-u) avoids cancellation at large u.
    x0, p0 = _reduced(spec)
    u = spec.gamma * np.asarray(z, dtype=float)
    ch, sh = np.cosh(u), np.sinh(u)
    chm1 = 2.0 * np.sinh(0.5 * u) ** 2
    d1 = x0 * chm1 + p0 * sh
    d2 = x0 * sh + p0 * chm1
    diff = (x0 - p0) * np.expm1(-u)
    quad_form = diff * diff + 2.0 * np.exp(-u) * d1 * d2 / ch
    return -np.log1p(chm1) - 0.5 * quad_form


def fidelity_modulus(spec: GaussianSpec, z):
    """``|F(z)|`` evaluated without cancellation near ``z = 0``."""
    mag = np.exp(0.5 * _log_fidelity_squared(spec, z))
    return float(mag) if np.ndim(mag) == 0 else mag


def bures_angle_at(spec: GaussianSpec, z):
    """Bures angle after distance ``z``, accurate to relative precision for small ``z``."""
    log_f2 = _log_fidelity_squared(spec, z)
    angle = np.arctan2(np.sqrt(-np.expm1(log_f2)), np.exp(0.5 * log_f2))
    return float(angle) if np.ndim(angle) == 0 else angle


def bures_angle(F) -> float:
    """``arccos |F|`` with ``|F|`` clamped to one within ``FIDELITY_TOL``."""
    mag = np.abs(F)
    if np.any(mag > 1 + FIDELITY_TOL):
        raise NumericalConsistencyError(f"|F| = {np.max(mag)!r} exceeds 1")
    angle = np.arccos(np.minimum(mag, 1.0))
    return float(angle) if np.ndim(angle) == 0 else angle


def mean_energy(spec: GaussianSpec) -> float:
    """Signed mean of the generator, ``(p0^2 - gamma^2 x0^2)/2``."""
    return 0.5 * (spec.p0**2 - spec.gamma**2 * spec.x0**2)


def energy_variance(spec: GaussianSpec) -> float:
    """Standard deviation of the generator, ``gamma sqrt((1 + R^2)/2)``."""
    return spec.gamma * math.sqrt(0.5 * (1.0 + spec.r_squared))


def mt_bound(angle: float, delta_h: float) -> float:
    if delta_h <= 0:
        raise ValueError(f"deltaH must be positive, got {delta_h!r}")
    return angle / delta_h


def ml_bound(angle: float, mean_h: float) -> float:
    if angle == 0:
        return 0.0
    if mean_h == 0:
        return math.inf
    return angle / abs(mean_h)


class Regime(str, enum.Enum):
    MOMENTUM = "momentum-dominated"
    POSITION = "position-dominated"
    BALANCED = "balanced"
    GENERIC = "generic"


def classify_regime(spec: GaussianSpec) -> Regime:
    kin = spec.p0**2
    pot = spec.gamma**2 * spec.x0**2
    if abs(kin - pot) < 1e-9 * (kin + pot + 1.0):
        return Regime.BALANCED
    if kin > 10 * pot:
        return Regime.MOMENTUM
    if pot > 10 * kin:
        return Regime.POSITION
    return Regime.GENERIC


def _jsonable(value: float):
    return "inf" if value == math.inf else value


@dataclass(frozen=True)
class BoundsReport:
    meanH: float
    deltaH: float
    buresTarget: float
    zMT: float
    zML: float
    zPDL: float
    regime: Regime

    @property
    def absMeanH(self) -> float:
        return abs(self.meanH)

    def to_dict(self) -> dict:
        return {
            "mean_energy": self.meanH,
            "delta_h": self.deltaH,
            "bures_target": self.buresTarget,
            "z_mt": _jsonable(self.zMT),
            "z_ml": _jsonable(self.zML),
            "z_pdl": _jsonable(self.zPDL),
            "regime": self.regime.value,
        }


def pdl(spec: GaussianSpec, angle: float = HALF_PI) -> BoundsReport:
    """Mandelstam-Tamm, Margolus-Levitin and combined distance limits."""
    if not 0 < angle <= HALF_PI:
        raise ValueError(f"target angle must lie in (0, pi/2], got {angle!r}")
    mean_h = mean_energy(spec)
    delta_h = energy_variance(spec)
    z_mt = mt_bound(angle, delta_h)
    z_ml = ml_bound(angle, mean_h)
    return BoundsReport(mean_h, delta_h, angle, z_mt, z_ml, max(z_mt, z_ml), classify_regime(spec))


def orthogonality_distances(spec: GaussianSpec) -> tuple[float, float]:
    """``(z_MT, z_ML)`` for the orthogonality target ``pi/2``."""
    diff = abs(spec.p0**2 - spec.gamma**2 * spec.x0**2)
    z_ml = math.pi / diff if diff > 0 else math.inf
    return HALF_PI / energy_variance(spec), z_ml


def orthogonality_distances_lab(delta_h_per_m: float, mean_h_per_m: float) -> tuple[float, float]:
    """Orthogonality distances (metres) from generator moments already in 1/m."""
    z_ml = HALF_PI / abs(mean_h_per_m) if mean_h_per_m != 0 else math.inf
    return HALF_PI / delta_h_per_m, z_ml


def asymptotic_orthogonality(spec: GaussianSpec) -> tuple[float, float]:
    """Leading-order orthogonality distances in the two dominated regimes."""
    regime = classify_regime(spec)
    if spec.r_squared < 10:
        warnings.warn(
            f"R^2 = {spec.r_squared:.3g} is not large; asymptotic forms are inaccurate",
            RuntimeWarning,
            stacklevel=2,
        )
    g = spec.gamma
    if regime is Regime.MOMENTUM:
        p = abs(spec.p0)
        return math.pi / (math.sqrt(2 * g) * p), math.pi / p**2
    if regime is Regime.POSITION:
        x = abs(spec.x0)
        return math.pi / (math.sqrt(2) * g**1.5 * x), math.pi / (g * x) ** 2
    raise RegimeError(f"spec {spec} is {regime.value}; no asymptotic regime applies")


def solve_z_for_angle(spec: GaussianSpec, target: float, z_max: float | None = None, samples: int = 4001):
    """Smallest ``z`` at which the Bures angle first reaches ``target``.

    Returns ``None`` when the angle stays below ``target`` on ``[0, z_max]``
    (default ``z_max = 12/gamma``).
    """
    if not 0 <= target <= HALF_PI:
        raise ValueError(f"target must lie in [0, pi/2], got {target!r}")
    if target == 0:
        return 0.0
    if z_max is None:
        z_max = 12.0 / spec.gamma
    zs = np.linspace(0.0, z_max, samples)
    angles = bures_angle_at(spec, zs)
    hit = np.flatnonzero(angles >= target)
    if hit.size == 0:
        return None
    i = int(hit[0])
    return bisect(
        lambda z: bures_angle_at(spec, z) - target, zs[i - 1], zs[i], xtol=1e-14, rtol=1e-15, maxiter=200
    )


def visibility(F) -> float:
    """Interferometric fringe contrast ``2|F| / (1 + |F|^2)``."""
    mag = abs(F)
    if mag > 1 + FIDELITY_TOL:
        raise NumericalConsistencyError(f"|F| = {mag!r} exceeds 1")
    mag = min(mag, 1.0)
    return 2 * mag / (1 + mag * mag)

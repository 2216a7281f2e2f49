"""Domain types, transverse grids, launch states and lab-unit conversions.

Everything here is dimensionless except :class:`LabUnits`. Distances along the
beam are measured in units where the reference curvature equals one, so a lab
distance ``Z`` (metres) maps to ``z = gamma_lab * Z``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import erfc

from .errors import GridError

#: Vacuum speed of light (m/s).
SPEED_OF_LIGHT = 2.99792458e8

#: Largest tolerated launch mass falling outside the window.
TAIL_MASS_TOL = 1e-12


@dataclass(frozen=True)
class GaussianSpec:
    """Launch Gaussian matched to the curvature ``gamma``.

    The position variance of ``|psi|^2`` is ``1/(2 gamma)``; ``x0`` and ``p0``
    are the near-field and far-field centroids.
    """

    gamma: float
    x0: float = 0.0
    p0: float = 0.0

    def __post_init__(self):
        for name in ("gamma", "x0", "p0"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")

    @classmethod
    def from_polar(cls, gamma: float, r: float, theta: float) -> "GaussianSpec":
        """Build a spec from the polar displacement ``alpha = r exp(i theta)``."""
        if gamma <= 0:
            raise ValueError(f"gamma must be positive, got {gamma!r}")
        x0 = math.sqrt(2.0 / gamma) * r * math.cos(theta)
        p0 = math.sqrt(2.0 * gamma) * r * math.sin(theta)
        return cls(gamma, x0, p0)

    @property
    def alpha(self) -> complex:
        return displacement(self)[0]

    @property
    def r_squared(self) -> float:
        """``R^2 = gamma x0^2 + p0^2 / gamma`` (twice ``|alpha|^2``)."""
        return self.gamma * self.x0**2 + self.p0**2 / self.gamma

    @property
    def position_variance(self) -> float:
        return 0.5 / self.gamma


def displacement(spec: GaussianSpec) -> tuple[complex, float, float]:
    """Return ``(alpha, r, theta)`` for the gamma-scaled coherent frame."""
    sg = math.sqrt(spec.gamma)
    alpha = complex(sg * spec.x0, spec.p0 / sg) / math.sqrt(2.0)
    r, theta = cmath.polar(alpha)
    if theta == -math.pi:
        theta = math.pi
    return alpha, r, theta


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and n & (n - 1) == 0


@dataclass(frozen=True)
class Grid:
    """Periodic transverse lattice ``x_j = -x_max + j dx``, ``j = 0..n-1``."""

    n: int
    x_max: float
    x: np.ndarray = field(init=False, repr=False, compare=False)
    k: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or not _is_power_of_two(int(self.n)):
            raise GridError(f"n must be a power of two >= 2, got {self.n!r}")
        if not (math.isfinite(self.x_max) and self.x_max > 0):
            raise GridError(f"x_max must be positive and finite, got {self.x_max!r}")
        n = int(self.n)
        object.__setattr__(self, "n", n)
        x = -self.x_max + self.dx * np.arange(n)
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=self.dx)
        x.flags.writeable = False
        k.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "k", k)

    @property
    def dx(self) -> float:
        return 2.0 * self.x_max / self.n

    @property
    def dk(self) -> float:
        return math.pi / self.x_max


def make_grid(n: int, x_max: float) -> Grid:
    return Grid(n, x_max)


@dataclass(frozen=True)
class BeamState:
    """Field samples on a grid at propagation distance ``z``."""

    grid: Grid
    samples: np.ndarray
    z: float = 0.0

    def __post_init__(self):
        samples = np.array(self.samples, dtype=np.complex128)
        if samples.shape != (self.grid.n,):
            raise GridError(
                f"samples have shape {samples.shape}, grid expects ({self.grid.n},)"
            )
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    @property
    def norm(self) -> float:
        return float(np.vdot(self.samples, self.samples).real * self.grid.dx)

    def l2_distance(self, other: "BeamState") -> float:
        if other.grid != self.grid:
            raise GridError("states live on different grids")
        diff = self.samples - other.samples
        return math.sqrt(float(np.vdot(diff, diff).real) * self.grid.dx)


def launch_coefficients(spec: GaussianSpec) -> tuple[complex, complex, complex]:
    """Coefficients ``(a, b, c)`` with ``psi(x, 0) = exp(-a x^2 + b x + c)``."""
    g = spec.gamma
    a = complex(0.5 * g, 0.0)
    b = complex(g * spec.x0, spec.p0)
    c = complex(-0.5 * g * spec.x0**2 + 0.25 * math.log(g / math.pi), 0.0)
    return a, b, c


def sample_quadratic_exponent(a: complex, b: complex, c: complex, x: np.ndarray) -> np.ndarray:
    return np.exp((-a * x + b) * x + c)


def tail_mass(spec: GaussianSpec, grid: Grid) -> float:
    """Launch power falling outside ``[-x_max, x_max)``."""
    scale = math.sqrt(spec.gamma)
    right = (grid.x_max - spec.x0) * scale
    left = (grid.x_max + spec.x0) * scale
    return 0.5 * float(erfc(right) + erfc(left))


def gaussian_state(spec: GaussianSpec, grid: Grid) -> BeamState:
    """Sample the launch Gaussian on ``grid``, normalized to unit discrete power."""
    lost = tail_mass(spec, grid)
    if lost > TAIL_MASS_TOL:
        raise GridError(
            f"window x_max={grid.x_max} truncates {lost:.3e} of the launch power; "
            f"need x_max >= |x0| + 8/sqrt(2 gamma) = {abs(spec.x0) + 8 / math.sqrt(2 * spec.gamma):.4g}"
        )
    psi = sample_quadratic_exponent(*launch_coefficients(spec), grid.x)
    return BeamState(grid, normalize(psi, grid.dx), 0.0)


def normalize(psi: np.ndarray, dx: float) -> np.ndarray:
    power = float(np.vdot(psi, psi).real) * dx
    return psi / math.sqrt(power)


@dataclass(frozen=True)
class LabUnits:
    """Laboratory scales and optional couplings of the curvature to lab knobs.

    ``gamma_lab`` is the anchor curvature in 1/m: the dimensionless curvature
    equals ``gamma_actual / gamma_lab`` and ``z = gamma_lab * Z``.
    """

    lambda0: float
    n0: float
    W0: float
    gamma_lab: Optional[float] = None
    dgamma_dn: Optional[float] = None
    dgamma_dP: Optional[float] = None
    dgamma_dT: Optional[float] = None
    dn_dT: Optional[float] = None

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise ValueError(f"lambda0 must be positive, got {self.lambda0!r}")
        if not self.n0 >= 1:
            raise ValueError(f"n0 must be >= 1, got {self.n0!r}")
        if not self.W0 > 0:
            raise ValueError(f"W0 must be positive, got {self.W0!r}")
        if self.gamma_lab is not None and not self.gamma_lab > 0:
            raise ValueError(f"gamma_lab must be positive, got {self.gamma_lab!r}")

    @property
    def k0(self) -> float:
        return 2.0 * math.pi * self.n0 / self.lambda0

    def require_gamma(self) -> float:
        if self.gamma_lab is None:
            raise ValueError("LabUnits.gamma_lab is required for distance conversion")
        return self.gamma_lab


def z_to_lab(z: float, units: LabUnits) -> float:
    """Dimensionless distance to metres."""
    return z / units.require_gamma()


def lab_to_z(Z: float, units: LabUnits) -> float:
    """Metres to dimensionless distance."""
    return Z * units.require_gamma()

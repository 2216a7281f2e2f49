"""Split-step spectral propagation of the paraxial field.

The field obeys ``i dpsi/dz = (p^2/2 + V) psi`` on a periodic window. ``V`` is
either the inverted parabola ``-gamma^2 (x - c)^2 / 2`` or the nonlocal
defocusing response ``eta * (K * |psi|^2)`` with a unit-mass Gaussian kernel
``K``. Steps use Strang splitting, kinetic-potential-kinetic; adjacent kinetic
half-steps inside a recording stride are fused into one full step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .core import BeamState, Grid
from .errors import BoundaryMassError, GridError, ModelError, NonFiniteError

#: Allowed power in the outer tenth of the window before a run is aborted.
BOUNDARY_MASS_TOL = 1e-6

INVERTED_PARABOLA = "inverted_parabola"
NONLOCAL_DEFOCUSING = "nonlocal_defocusing"


@dataclass(frozen=True)
class PotentialModel:
    kind: str
    gamma: float = 0.0
    centre: float = 0.0
    eta: float = 0.0
    kernel_width: float = 0.0

    def __post_init__(self):
        if self.kind == INVERTED_PARABOLA:
            if not self.gamma >= 0:
                raise ModelError(f"gamma must be >= 0, got {self.gamma!r}")
        elif self.kind == NONLOCAL_DEFOCUSING:
            if not (self.eta > 0 and self.kernel_width > 0):
                raise ModelError("nonlocal model needs eta > 0 and kernel_width > 0")
        else:
            raise ModelError(f"unknown potential kind {self.kind!r}")

    @classmethod
    def inverted_parabola(cls, gamma: float, centre: float = 0.0) -> "PotentialModel":
        return cls(INVERTED_PARABOLA, gamma=gamma, centre=centre)

    @classmethod
    def free(cls) -> "PotentialModel":
        return cls(INVERTED_PARABOLA, gamma=0.0)

    @classmethod
    def nonlocal_defocusing(cls, eta: float, kernel_width: float) -> "PotentialModel":
        return cls(NONLOCAL_DEFOCUSING, eta=eta, kernel_width=kernel_width)

    @property
    def is_linear(self) -> bool:
        return self.kind == INVERTED_PARABOLA

    def kernel_spectrum(self, grid: Grid) -> np.ndarray:
        """Fourier multiplier of the periodized unit-mass Gaussian kernel."""
        return np.exp(-0.5 * (self.kernel_width * grid.k) ** 2)

    def potential(self, grid: Grid, psi: Optional[np.ndarray] = None) -> np.ndarray:
        if self.is_linear:
            return -0.5 * self.gamma**2 * (grid.x - self.centre) ** 2
        if psi is None:
            raise ModelError("the nonlocal potential depends on the field; pass psi")
        dens = np.abs(psi) ** 2
        return self.eta * np.fft.ifft(self.kernel_spectrum(grid) * np.fft.fft(dens)).real


@dataclass(frozen=True)
class ObservableRecord:
    z: float
    norm: float
    centroid: float
    variance: float
    overlap: complex
    mean_h: float
    delta_h: float

    CSV_HEADER = "z,norm,centroid,variance,re_overlap,im_overlap,mean_h,delta_h"

    def csv_row(self) -> str:
        values = (
            self.z,
            self.norm,
            self.centroid,
            self.variance,
            self.overlap.real,
            self.overlap.imag,
            self.mean_h,
            self.delta_h,
        )
        return ",".join(repr(float(v)) for v in values)


def apply_hamiltonian(psi: np.ndarray, grid: Grid, potential: np.ndarray) -> np.ndarray:
    kinetic = np.fft.ifft(0.5 * grid.k**2 * np.fft.fft(psi))
    return kinetic + potential * psi


def observables(state: BeamState, reference: BeamState, model: Optional[PotentialModel] = None) -> ObservableRecord:
    """Moments, overlap with ``reference`` and generator moments of ``state``.

    ``mean_h`` and ``delta_h`` need ``model``; they are NaN without it.
    """
    if state.grid != reference.grid:
        raise GridError("state and reference live on different grids")
    grid = state.grid
    psi = state.samples
    norm, centroid, variance = kernels.moments(psi, grid.x, grid.dx)
    overlap = complex(np.vdot(reference.samples, psi) * grid.dx)
    mean_h = delta_h = math.nan
    if model is not None:
        h_psi = apply_hamiltonian(psi, grid, model.potential(grid, psi))
        mean_h = float(np.vdot(psi, h_psi).real * grid.dx) / norm
        h2 = float(np.vdot(h_psi, h_psi).real * grid.dx) / norm
        delta_h = math.sqrt(max(h2 - mean_h**2, 0.0))
    return ObservableRecord(state.z, norm, centroid, variance, overlap, mean_h, delta_h)


@dataclass
class Trajectory:
    """Observable records every ``stride`` steps, plus the last state reached."""

    dz: float
    stride: int
    steps: int = 0
    records: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    final: Optional[BeamState] = None

    @property
    def z(self) -> np.ndarray:
        return np.array([r.z for r in self.records])

    def to_csv(self) -> str:
        lines = [ObservableRecord.CSV_HEADER]
        lines.extend(r.csv_row() for r in self.records)
        return "\n".join(lines) + "\n"


def _edge_count(n: int) -> int:
    return max(1, n // 20)


def split_step(
    state: BeamState,
    model: PotentialModel,
    dz: float,
    steps: int,
    stride: int = 1,
    keep_snapshots: bool = False,
    on_record: Optional[Callable[[ObservableRecord], None]] = None,
) -> Trajectory:
    """Propagate ``state`` by ``steps`` Strang steps of size ``dz``.

    Records observables (against the input state) after every ``stride`` steps.
    The window edge is checked at the same cadence: once more than
    ``BOUNDARY_MASS_TOL`` of the power sits in the outer 10% of the window a
    :class:`BoundaryMassError` is raised whose ``partial`` attribute carries
    the trajectory up to that point.
    """
    if not (dz > 0 and math.isfinite(dz)):
        raise ValueError(f"dz must be positive and finite, got {dz!r}")
    if steps < 0 or stride < 1:
        raise ValueError(f"need steps >= 0 and stride >= 1, got {steps}, {stride}")
    grid = state.grid
    n_edge = _edge_count(grid.n)
    traj = Trajectory(dz=dz, stride=stride)
    psi = np.array(state.samples, dtype=np.complex128)

    def check(z):
        mass = kernels.edge_mass(psi, n_edge, grid.dx)
        if math.isnan(mass):
            traj.final = None
            raise NonFiniteError(f"non-finite field at z={z:.6g}", partial=traj)
        if mass > BOUNDARY_MASS_TOL:
            raise BoundaryMassError(
                f"{mass:.3e} of the power reached the window edge at z={z:.6g}", partial=traj
            )

    check(state.z)
    half = np.exp(-0.25j * dz * grid.k**2)
    full = half * half
    linear = model.is_linear
    if linear:
        pot_phase = np.exp(-1j * dz * model.potential(grid))
    else:
        kernel_hat = model.kernel_spectrum(grid)
        dens = np.empty(grid.n)

    def potential_step():
        if linear:
            kernels.cmul(psi, pot_phase)
        else:
            kernels.intensity(psi, dens)
            v = model.eta * np.fft.ifft(kernel_hat * np.fft.fft(dens)).real
            kernels.phase_rotate(psi, np.ascontiguousarray(v), dz)

    done = 0
    while done < steps:
        block = min(stride, steps - done)
        spec = np.fft.fft(psi)
        kernels.cmul(spec, half)
        for i in range(block):
            psi[:] = np.fft.ifft(spec)
            potential_step()
            spec = np.fft.fft(psi)
            kernels.cmul(spec, full if i < block - 1 else half)
        psi[:] = np.fft.ifft(spec)
        done += block
        z = state.z + done * dz
        traj.steps = done
        traj.final = BeamState(grid, psi, z)
        check(z)
        if block == stride:
            rec = observables(traj.final, state, model)
            traj.records.append(rec)
            if keep_snapshots:
                traj.snapshots.append(traj.final)
            if on_record is not None:
                on_record(rec)
    if traj.final is None:
        traj.final = state
    return traj


@dataclass(frozen=True)
class CurvatureFit:
    gamma: float
    residual: float
    centre: float


def effective_gamma(potential_samples, x, centroid: float, half_width: float) -> CurvatureFit:
    """Fit ``V ~ c0 + c1 (x - x_c) + c2 (x - x_c)^2`` within ``half_width`` of ``centroid``.

    Returns ``gamma = sqrt(-2 c2)``, the RMS residual and the fitted peak.
    """
    v = np.asarray(potential_samples, dtype=float)
    x = np.asarray(x, dtype=float)
    sel = np.abs(x - centroid) <= half_width
    if sel.sum() < 3:
        raise ModelError("fewer than three samples inside the fit window")
    dx = x[sel] - centroid
    c2, c1, c0 = np.polyfit(dx, v[sel], 2)
    if not c2 < 0:
        raise ModelError(f"potential curvature {2 * c2:.3e} is not inverted (focusing medium)")
    resid = v[sel] - np.polyval((c2, c1, c0), dx)
    return CurvatureFit(math.sqrt(-2.0 * c2), float(np.sqrt(np.mean(resid**2))), centroid - c1 / (2 * c2))

"""Propagation-distance limits for Gaussian beams in inverted-parabola media.

The closed-form squeezing propagator (:mod:`.analytic`) and the split-step
solver (:mod:`.numeric`) are independent routes to the same field and are
used to check one another.
"""

from .analytic import (
    BoundsReport,
    ClosedFormGaussian,
    asymptotic_orthogonality,
    bures_angle,
    bures_angle_at,
    energy_variance,
    evolve_closed_form,
    fidelity,
    fidelity_modulus,
    mean_energy,
    ml_bound,
    mt_bound,
    orthogonality_distances,
    pdl,
    solve_z_for_angle,
    visibility,
)
from .core import (
    BeamState,
    GaussianSpec,
    Grid,
    LabUnits,
    displacement,
    gaussian_state,
    lab_to_z,
    make_grid,
    z_to_lab,
)
from .kernels import BACKEND
from .numeric import PotentialModel, Trajectory, effective_gamma, observables, split_step

__version__ = "0.1.0"

__all__ = [
    "BoundsReport",
    "ClosedFormGaussian",
    "asymptotic_orthogonality",
    "bures_angle",
    "bures_angle_at",
    "energy_variance",
    "evolve_closed_form",
    "fidelity",
    "fidelity_modulus",
    "mean_energy",
    "ml_bound",
    "mt_bound",
    "orthogonality_distances",
    "pdl",
    "solve_z_for_angle",
    "visibility",
    "BeamState",
    "GaussianSpec",
    "Grid",
    "LabUnits",
    "displacement",
    "gaussian_state",
    "lab_to_z",
    "make_grid",
    "z_to_lab",
    "BACKEND",
    "PotentialModel",
    "Trajectory",
    "effective_gamma",
    "observables",
    "split_step",
]

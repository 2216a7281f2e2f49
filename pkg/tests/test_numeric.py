import math

import numpy as np
import pytest

from pdl_optics.analytic import evolve_closed_form, mean_energy
from pdl_optics.core import BeamState, GaussianSpec, gaussian_state, make_grid
from pdl_optics.errors import BoundaryMassError, ModelError, NonFiniteError
from pdl_optics.numeric import (
    BOUNDARY_MASS_TOL,
    ObservableRecord,
    PotentialModel,
    apply_hamiltonian,
    effective_gamma,
    observables,
    split_step,
)


def test_vacuum_split_step_matches_closed_form(grid):
    spec = GaussianSpec(1.0)
    traj = split_step(gaussian_state(spec, grid), PotentialModel.inverted_parabola(1.0), 1e-3, 500, stride=500)
    assert traj.final.z == pytest.approx(0.5)
    assert traj.final.l2_distance(evolve_closed_form(spec, 0.5).sample(grid)) < 1e-6


def test_displaced_centroid_follows_hyperbola(grid):
    spec = GaussianSpec(1.0, 1.0, 0.0)
    traj = split_step(gaussian_state(spec, grid), PotentialModel.inverted_parabola(1.0), 1e-3, 1000, stride=100)
    assert traj.records[-1].centroid == pytest.approx(evolve_closed_form(spec, 1.0).centroid, abs=1e-4)
    np.testing.assert_allclose([r.centroid for r in traj.records], np.cosh(traj.z), rtol=1e-6)


def test_free_diffraction_variance(grid):
    # zero curvature: variance s0^2 + z^2 / (4 s0^2) with s0^2 = 1/2
    traj = split_step(gaussian_state(GaussianSpec(1.0), grid), PotentialModel.free(), 1e-2, 200, stride=20)
    np.testing.assert_allclose([r.variance for r in traj.records], 0.5 + traj.z**2 / 2, rtol=1e-8)


def test_records_exclude_launch_and_partial_blocks(grid):
    launch = gaussian_state(GaussianSpec(1.0), grid)
    traj = split_step(launch, PotentialModel.inverted_parabola(1.0), 1e-2, 25, stride=10)
    np.testing.assert_allclose(traj.z, [0.1, 0.2])
    assert traj.steps == 25
    assert traj.final.z == pytest.approx(0.25)


def test_stride_does_not_change_result(grid):
    launch = gaussian_state(GaussianSpec(1.0, 0.5, -0.3), grid)
    model = PotentialModel.inverted_parabola(1.0)
    a = split_step(launch, model, 1e-3, 60, stride=1).final
    b = split_step(launch, model, 1e-3, 60, stride=60).final
    assert a.l2_distance(b) < 1e-13


def test_zero_steps_returns_launch(grid):
    launch = gaussian_state(GaussianSpec(1.0), grid)
    traj = split_step(launch, PotentialModel.inverted_parabola(1.0), 1e-3, 0)
    assert traj.records == [] and traj.final is launch
    assert traj.to_csv() == ObservableRecord.CSV_HEADER + "\n"


def test_record_callback_sees_every_record(grid):
    seen = []
    traj = split_step(
        gaussian_state(GaussianSpec(1.0), grid), PotentialModel.inverted_parabola(1.0), 1e-3, 30, stride=10,
        keep_snapshots=True, on_record=seen.append,
    )
    assert seen == traj.records
    assert [s.z for s in traj.snapshots] == pytest.approx([0.01, 0.02, 0.03])


def test_window_exhaustion_keeps_partial_trajectory():
    grid = make_grid(256, 8.0)
    with pytest.raises(BoundaryMassError) as info:
        split_step(gaussian_state(GaussianSpec(1.0), grid), PotentialModel.inverted_parabola(1.0), 1e-2, 400, stride=10)
    partial = info.value.partial
    assert 0 < len(partial.records) < 40
    assert partial.final.z > partial.records[-1].z - 1e-12
    edge = max(1, grid.n // 20)
    rho = np.abs(partial.final.samples) ** 2 * grid.dx
    assert rho[:edge].sum() + rho[-edge:].sum() > BOUNDARY_MASS_TOL


def test_non_finite_field_detected():
    grid = make_grid(64, 8.0)
    samples = np.full(grid.n, np.nan, complex)
    with pytest.raises(NonFiniteError):
        split_step(BeamState(grid, samples), PotentialModel.inverted_parabola(1.0), 1e-2, 5)


@pytest.mark.parametrize(
    "dz, steps, stride", [(0.0, 1, 1), (-1e-3, 1, 1), (math.inf, 1, 1), (1e-3, -1, 1), (1e-3, 1, 0)]
)
def test_split_step_argument_checks(grid, dz, steps, stride):
    with pytest.raises(ValueError):
        split_step(gaussian_state(GaussianSpec(1.0), grid), PotentialModel.free(), dz, steps, stride)


def test_vacuum_observables(grid):
    launch = gaussian_state(GaussianSpec(1.0), grid)
    rec = observables(launch, launch, PotentialModel.inverted_parabola(1.0))
    assert abs(rec.mean_h) < 1e-10
    assert rec.delta_h == pytest.approx(1 / math.sqrt(2), abs=1e-8)
    assert rec.overlap == pytest.approx(1.0, abs=1e-14)
    assert rec.norm == pytest.approx(1.0, abs=1e-14)


def test_displaced_mean_energy(grid):
    spec = GaussianSpec(2.0, 1.0, 1.0)
    launch = gaussian_state(spec, grid)
    rec = observables(launch, launch, PotentialModel.inverted_parabola(2.0))
    assert rec.mean_h == pytest.approx(-1.5, abs=1e-8)
    assert mean_energy(spec) == -1.5


def test_observables_without_model(grid):
    launch = gaussian_state(GaussianSpec(1.0), grid)
    rec = observables(launch, launch)
    assert math.isnan(rec.mean_h) and math.isnan(rec.delta_h)


def test_csv_row_round_trips(grid):
    launch = gaussian_state(GaussianSpec(1.0, 0.2, 0.1), grid)
    rec = observables(launch, launch, PotentialModel.inverted_parabola(1.0))
    values = [float(v) for v in rec.csv_row().split(",")]
    assert values[:4] == [rec.z, rec.norm, rec.centroid, rec.variance]
    assert complex(values[4], values[5]) == rec.overlap


def test_hamiltonian_is_hermitian(grid):
    rng = np.random.default_rng(0)
    u = evolve_closed_form(GaussianSpec(1.0, 0.3, 0.2), 0.4)(grid.x)
    v = u * np.exp(1j * rng.uniform(0, 0.01, grid.n))
    pot = PotentialModel.inverted_parabola(1.0).potential(grid)
    lhs = np.vdot(u, apply_hamiltonian(v, grid, pot))
    rhs = np.vdot(apply_hamiltonian(u, grid, pot), v)
    assert abs(lhs - rhs) < 1e-9 * abs(lhs)


def test_exact_parabola_curvature():
    x = np.linspace(-3, 3, 601)
    fit = effective_gamma(-0.5 * 0.7**2 * x**2, x, 0.0, 2.0)
    assert fit.gamma == pytest.approx(0.7, abs=1e-10)
    assert fit.residual < 1e-12 and abs(fit.centre) < 1e-12


def test_focusing_curvature_rejected():
    x = np.linspace(-3, 3, 601)
    with pytest.raises(ModelError):
        effective_gamma(0.5 * 0.7**2 * x**2, x, 0.0, 2.0)


def test_fit_window_needs_samples():
    with pytest.raises(ModelError):
        effective_gamma(np.zeros(10), np.arange(10.0), 100.0, 0.5)


def test_nonlocal_curvature_matches_convolution(grid):
    launch = gaussian_state(GaussianSpec(1.0), grid)
    s2 = 0.5
    sigma = 20 * math.sqrt(s2)
    eta = 3.0
    model = PotentialModel.nonlocal_defocusing(eta, sigma)
    fit = effective_gamma(model.potential(grid, launch.samples), grid.x, 0.0, 2 * math.sqrt(s2))
    # V''(0) for a Gaussian kernel acting on a Gaussian intensity
    expected = math.sqrt(eta / (math.sqrt(2 * math.pi) * (sigma**2 + s2) ** 1.5))
    assert fit.gamma == pytest.approx(expected, rel=1e-2)


def test_nonlocal_propagation_conserves_norm(grid):
    launch = gaussian_state(GaussianSpec(1.0), grid)
    model = PotentialModel.nonlocal_defocusing(5.0, 2.0)
    traj = split_step(launch, model, 1e-3, 200, stride=100)
    assert abs(traj.records[-1].norm - 1.0) < 1e-12
    assert traj.records[-1].variance > 0.5


def test_nonlocal_potential_needs_field(grid):
    with pytest.raises(ModelError):
        PotentialModel.nonlocal_defocusing(1.0, 1.0).potential(grid)


@pytest.mark.parametrize(
    "factory",
    [
        lambda: PotentialModel.inverted_parabola(-1.0),
        lambda: PotentialModel.nonlocal_defocusing(0.0, 1.0),
        lambda: PotentialModel.nonlocal_defocusing(1.0, -1.0),
        lambda: PotentialModel("bogus"),
    ],
)
def test_model_validation(factory):
    with pytest.raises(ModelError):
        factory()

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdl_optics.analytic import (
    Regime,
    asymptotic_orthogonality,
    bures_angle,
    bures_angle_at,
    classify_regime,
    energy_variance,
    evolve_closed_form,
    fidelity,
    fidelity_modulus,
    mean_energy,
    ml_bound,
    mt_bound,
    orthogonality_distances,
    orthogonality_distances_lab,
    pdl,
    solve_z_for_angle,
    visibility,
)
from pdl_optics.core import GaussianSpec, gaussian_state, make_grid
from pdl_optics.errors import NumericalConsistencyError, RegimeError
from pdl_optics.verify import quadrature_overlap

# Frozen from an independent oracle: dense matrix exponential of the discretized
# generator (512 points on [-16, 16)), launch profiles sampled from scratch.
VACUUM_ABS_F_05 = 0.941710615831661
DISPLACED_ABS_F_1 = 0.1651921092685637  # gamma=1, x0=3, p0=0, z=1
VACUUM_ABS_F_1 = 0.8050181821945632
GENERAL_F = 0.34901182774136286 + 0.01492459680860142j  # gamma=1.7, x0=0.8, p0=-1.3, z=0.9
GENERAL_VARIANCE = 3.143300714300969
GENERAL_CENTROID = 0.250904554234896
# arccos and arithmetic of the value above
VACUUM_ANGLE_05 = 0.3431169772959659
VACUUM_ZMT_05 = 0.4852406827724163
VACUUM_VIS_05 = 0.9981992695029777

specs = st.builds(GaussianSpec, st.floats(0.2, 4.0), st.floats(-3, 3), st.floats(-3, 3))


def test_zero_distance_is_launch(grid):
    spec = GaussianSpec(1.0)
    assert evolve_closed_form(spec, 0.0).sample(grid).l2_distance(gaussian_state(spec, grid)) == 0.0


def test_vacuum_width_growth():
    cf = evolve_closed_form(GaussianSpec(1.0), 0.5)
    assert cf.variance == pytest.approx(0.5 * math.cosh(1.0), rel=1e-14)


@pytest.mark.parametrize("gamma, x0, p0, z", [(1.0, 1.0, 0.0, 1.0), (2.5, -0.3, 1.1, 0.4), (0.4, 2.0, -0.5, 3.0)])
def test_centroid_and_variance_laws(gamma, x0, p0, z):
    cf = evolve_closed_form(GaussianSpec(gamma, x0, p0), z)
    u = gamma * z
    assert cf.centroid == pytest.approx(x0 * math.cosh(u) + p0 / gamma * math.sinh(u), rel=1e-12, abs=1e-14)
    assert cf.variance == pytest.approx(math.cosh(2 * u) / (2 * gamma), rel=1e-12)


def test_general_case_matches_oracle():
    spec = GaussianSpec(1.7, 0.8, -1.3)
    cf = evolve_closed_form(spec, 0.9)
    assert cf.variance == pytest.approx(GENERAL_VARIANCE, rel=1e-9)
    assert cf.centroid == pytest.approx(GENERAL_CENTROID, rel=1e-9)
    assert fidelity(spec, 0.9) == pytest.approx(GENERAL_F, abs=1e-10)


@pytest.mark.parametrize("z", [-1.0, 0.3, 2.0])
def test_closed_form_normalized(z):
    g = make_grid(4096, 40.0)
    raw = evolve_closed_form(GaussianSpec(1.2, 0.5, 0.3), z)(g.x)
    assert np.sum(np.abs(raw) ** 2) * g.dx == pytest.approx(1.0, rel=1e-12)


def test_closed_form_rejects_nonfinite_z():
    with pytest.raises(ValueError):
        evolve_closed_form(GaussianSpec(1.0), math.inf)


@pytest.mark.parametrize("spec", [GaussianSpec(1.0), GaussianSpec(0.5, 2.0, 1.0), GaussianSpec(3.0, -1.0, 4.0)])
def test_fidelity_identity_at_zero(spec):
    assert fidelity(spec, 0.0) == 1.0


def test_vacuum_fidelity_value():
    assert abs(fidelity(GaussianSpec(1.0), 0.5)) == pytest.approx(VACUUM_ABS_F_05, abs=1e-12)
    assert abs(fidelity(GaussianSpec(1.0), 0.5)) == pytest.approx(math.cosh(0.5) ** -0.5, abs=1e-15)


def test_vacuum_fidelity_quadrature():
    spec = GaussianSpec(1.0)
    assert quadrature_overlap(spec, 0.5) == pytest.approx(fidelity(spec, 0.5), abs=1e-9)


def test_displacement_speeds_distinguishability():
    f_disp = abs(fidelity(GaussianSpec(1.0, 3.0, 0.0), 1.0))
    assert f_disp == pytest.approx(DISPLACED_ABS_F_1, abs=1e-10)
    assert f_disp < VACUUM_ABS_F_1


def test_fidelity_vectorized():
    spec = GaussianSpec(1.3, 0.2, 0.9)
    zs = np.array([0.0, 0.2, 0.7])
    np.testing.assert_allclose(fidelity(spec, zs), [fidelity(spec, z) for z in zs], rtol=0, atol=1e-15)


@pytest.mark.parametrize("gamma", [0.5, 2.0])
def test_vacuum_fidelity_scales_with_gamma(gamma):
    assert abs(fidelity(GaussianSpec(gamma), 0.7)) == pytest.approx(math.cosh(gamma * 0.7) ** -0.5, rel=1e-13)


def test_bures_examples():
    assert bures_angle(1.0) == 0.0
    assert bures_angle(0.0) == pytest.approx(math.pi / 2)
    assert bures_angle(VACUUM_ABS_F_05) == pytest.approx(VACUUM_ANGLE_05, abs=1e-12)


def test_bures_clamps_rounding_and_rejects_excess():
    assert bures_angle(1 + 5e-13) == 0.0
    with pytest.raises(NumericalConsistencyError):
        bures_angle(1.001)


@pytest.mark.parametrize(
    "spec, mean",
    [(GaussianSpec(1.0), 0.0), (GaussianSpec(1.0, 1.0, 1.0), 0.0), (GaussianSpec(2.0, 1.0, 0.0), -2.0)],
)
def test_mean_energy_examples(spec, mean):
    assert mean_energy(spec) == mean


@pytest.mark.parametrize(
    "spec, dh",
    [
        (GaussianSpec(1.0), 1 / math.sqrt(2)),
        (GaussianSpec(1.0, 1.0, 0.0), 1.0),
        (GaussianSpec(2.0, 0.0, 2.0), 2 * math.sqrt(1.5)),
    ],
)
def test_energy_variance_examples(spec, dh):
    assert energy_variance(spec) == pytest.approx(dh, rel=1e-15)


def test_bound_examples():
    assert mt_bound(math.pi / 2, 1.0) == math.pi / 2
    assert ml_bound(math.pi / 2, 0.0) == math.inf
    assert ml_bound(0.0, 0.0) == 0.0
    assert mt_bound(VACUUM_ANGLE_05, 1 / math.sqrt(2)) == pytest.approx(VACUUM_ZMT_05, rel=1e-14)
    assert VACUUM_ZMT_05 <= 0.5
    with pytest.raises(ValueError):
        mt_bound(1.0, 0.0)


def test_pdl_vacuum():
    rep = pdl(GaussianSpec(1.0))
    assert rep.zMT == pytest.approx(math.pi / math.sqrt(2))
    assert rep.zML == math.inf and rep.zPDL == math.inf
    d = rep.to_dict()
    assert d["z_ml"] == "inf" and d["z_pdl"] == "inf" and d["regime"] == "balanced"


def test_pdl_momentum_dominated():
    rep = pdl(GaussianSpec(1.0, 0.0, 50.0))
    assert rep.regime is Regime.MOMENTUM
    assert rep.zMT == pytest.approx(math.pi / (math.sqrt(2) * 50), rel=1e-3)


def test_pdl_position_displaced():
    rep = pdl(GaussianSpec(1.0, 2.0, 0.0))
    assert rep.zML == pytest.approx(math.pi / 4, rel=1e-15)
    assert rep.deltaH == pytest.approx(math.sqrt(2.5), rel=1e-15)
    assert rep.zMT == pytest.approx(0.5 * math.pi / math.sqrt(2.5), rel=1e-15)
    assert rep.zPDL == max(rep.zMT, rep.zML)
    assert rep.absMeanH == 2.0


@pytest.mark.parametrize("angle", [0.0, -0.1, 2.0])
def test_pdl_rejects_angle(angle):
    with pytest.raises(ValueError):
        pdl(GaussianSpec(1.0), angle)


def test_orthogonality_examples():
    assert orthogonality_distances(GaussianSpec(1.0)) == (pytest.approx(math.pi / math.sqrt(2)), math.inf)
    assert orthogonality_distances(GaussianSpec(1.0, 0.0, 50.0))[1] == math.pi / 2500


def test_orthogonality_lab_moments():
    z_mt, z_ml = orthogonality_distances_lab(330.0, 290.0)
    assert z_mt == pytest.approx(4.76e-3, rel=1e-3)
    assert z_ml == pytest.approx(5.42e-3, rel=1e-3)


def test_asymptotic_momentum():
    spec = GaussianSpec(1.0, 0.0, 50.0)
    approx_mt, approx_ml = asymptotic_orthogonality(spec)
    exact_mt, exact_ml = orthogonality_distances(spec)
    assert approx_mt == pytest.approx(math.pi / (math.sqrt(2) * 50), rel=1e-15)
    assert approx_mt == pytest.approx(0.044429, abs=1e-6)
    # leading order drops the vacuum term: exact/approx = sqrt(2500/2501)
    assert exact_mt / approx_mt == pytest.approx(math.sqrt(2500 / 2501), rel=1e-14)
    assert approx_ml == exact_ml


def test_asymptotic_position():
    spec = GaussianSpec(1.0, 50.0, 0.0)
    approx_mt, approx_ml = asymptotic_orthogonality(spec)
    assert approx_ml == orthogonality_distances(spec)[1] == math.pi / 2500
    assert approx_mt == pytest.approx(orthogonality_distances(spec)[0], rel=1e-3)


def test_asymptotic_balance_line_rejected():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(RegimeError):
            asymptotic_orthogonality(GaussianSpec(1.0, 1.0, 1.0))


def test_asymptotic_small_displacement_warns():
    with pytest.warns(RuntimeWarning):
        asymptotic_orthogonality(GaussianSpec(1.0, 0.0, 2.0))


def test_regime_classes():
    assert classify_regime(GaussianSpec(1.0, 1.0, 1.0)) is Regime.BALANCED
    assert classify_regime(GaussianSpec(1.0, 5.0, 0.0)) is Regime.POSITION
    assert classify_regime(GaussianSpec(1.0, 1.0, 2.0)) is Regime.GENERIC


def test_solve_examples():
    spec = GaussianSpec(1.0)
    assert solve_z_for_angle(spec, 0.0) == 0.0
    assert solve_z_for_angle(spec, 1e-6) < 1e-5
    assert solve_z_for_angle(spec, math.pi / 2) is None
    assert solve_z_for_angle(spec, VACUUM_ANGLE_05) == pytest.approx(0.5, abs=1e-6)


def test_solve_rejects_target():
    with pytest.raises(ValueError):
        solve_z_for_angle(GaussianSpec(1.0), 2.0)


def test_visibility_examples():
    assert visibility(1.0) == 1.0
    assert visibility(0.0) == 0.0
    assert visibility(VACUUM_ABS_F_05) == pytest.approx(VACUUM_VIS_05, abs=1e-12)
    with pytest.raises(NumericalConsistencyError):
        visibility(1.1)


@settings(max_examples=150, deadline=None)
@given(specs, st.floats(0, 4))
def test_fidelity_bounded(spec, z):
    mag = abs(fidelity(spec, z))
    assert 0 <= mag <= 1 + 1e-12
    assert 0 <= bures_angle(mag) <= math.pi / 2
    assert 0 <= visibility(mag) <= 1


@settings(max_examples=150, deadline=None)
@given(specs, st.floats(0.0, 4.0))
def test_mt_inequality_property(spec, z):
    assert bures_angle_at(spec, z) <= energy_variance(spec) * z + 1e-9


@settings(max_examples=200, deadline=None)
@given(specs, st.floats(0, 4))
def test_modulus_routes_agree(spec, z):
    # covariance form vs complex Gaussian overlap
    assert fidelity_modulus(spec, z) == pytest.approx(abs(fidelity(spec, z)), abs=1e-10)


def test_small_distance_angle_keeps_precision():
    spec = GaussianSpec(1.3, 0.4, -0.2)
    for z in (1e-12, 1e-9, 1e-6):
        assert bures_angle_at(spec, z) / (energy_variance(spec) * z) == pytest.approx(1.0, rel=1e-10)
    # the naive route is limited to sqrt(eps)
    assert bures_angle(fidelity(spec, 1e-12)) > 1e-9


def test_stable_angle_matches_arccos():
    spec = GaussianSpec(0.8, 1.0, 0.5)
    zs = np.linspace(0.1, 3.0, 30)
    np.testing.assert_allclose(bures_angle_at(spec, zs), bures_angle(fidelity(spec, zs)), rtol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 4.0), st.floats(0, 3), st.floats(0, 3), st.floats(0.01, 1.0))
def test_delta_h_grows_with_displacement(gamma, x0, p0, step):
    base = GaussianSpec(gamma, x0, p0)
    assert energy_variance(GaussianSpec(gamma, x0 + step, p0)) > energy_variance(base)
    assert energy_variance(GaussianSpec(gamma, x0, p0 + step)) > energy_variance(base)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 4.0), st.floats(0, 3), st.floats(-math.pi, math.pi), st.floats(0.01, 1.0))
def test_mt_orthogonality_decreases_with_r(gamma, r, theta, dr):
    near = GaussianSpec.from_polar(gamma, r, theta)
    far = GaussianSpec.from_polar(gamma, r + dr, theta)
    assert orthogonality_distances(far)[0] < orthogonality_distances(near)[0]

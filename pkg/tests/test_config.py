import math

import pytest

from pdl_optics.config import RunConfig, dumps, from_mapping, load, override
from pdl_optics.errors import ConfigError

LAB_TOML = """
[beam]
gamma = 1.0
x0 = 2.0

[lab]
lambda0 = 532e-9
n0 = 1.52
W0 = 25e-6
gamma_lab = 420.0
delta_h_over_k0_per_cm = 3.3
mean_h_over_k0_per_cm = 2.9
reference_z_pdl_mm = 1.8
"""


def test_defaults_validate():
    cfg = RunConfig()
    assert cfg.spec().x0 == 0.0
    assert cfg.grid_obj().n == 4096
    assert cfg.model().gamma == 1.0
    assert cfg.units() is None


def test_load_file(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(LAB_TOML)
    cfg = load(path)
    assert cfg.spec().x0 == 2.0
    assert cfg.units().gamma_lab == 420.0
    assert cfg.lab.reference_z_pdl_mm == 1.8


def test_polar_parameterization():
    cfg = from_mapping({"beam": {"gamma": 2.0, "r": 1.0, "theta": 0.0}})
    assert cfg.spec().x0 == pytest.approx(1.0)


@pytest.mark.parametrize(
    "data, match",
    [
        ({"beem": {}}, "unknown config section"),
        ({"beam": {"x": 1.0}}, "unknown key"),
        ({"beam": {"x0": 1.0, "r": 1.0, "theta": 0.0}}, "either"),
        ({"beam": {"r": 1.0}}, "both"),
        ({"beam": {"gamma": -1.0}}, "positive"),
        ({"beam": {"x0": "one"}}, "number"),
        ({"beam": {"x0": True}}, "number"),
        ({"grid": {"n": 4.5}}, "integer"),
        ({"grid": {"n": 1000}}, "power of two"),
        ({"solver": {"dz": 0.0}}, "dz"),
        ({"solver": {"stride": 0}}, "stride"),
        ({"bounds": {"angle": 2.0}}, "angle"),
        ({"beam": {"x0": math.inf}}, "finite"),
        ({"verify": {"quick": 1}}, "boolean"),
        ({"lab": {"lambda0": 5e-7, "n0": 0.5, "W0": 1e-5}}, "n0"),
        ({"beam": 3}, "table"),
    ],
)
def test_invalid_configs(data, match):
    with pytest.raises(ConfigError, match=match):
        from_mapping(data)


def test_malformed_toml(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("[beam\n")
    with pytest.raises(ConfigError):
        load(path)
    with pytest.raises(ConfigError, match="cannot read"):
        load(tmp_path / "missing.toml")


def test_model_selection():
    cfg = from_mapping({"solver": {"potential": "nonlocal_defocusing", "eta": 2.0, "kernel_width": 5.0}})
    assert not cfg.model().is_linear
    with pytest.raises(ConfigError):
        from_mapping({"solver": {"potential": "nonlocal_defocusing"}}).model()
    with pytest.raises(ConfigError):
        from_mapping({"solver": {"potential": "kerr"}}).model()
    assert from_mapping({"solver": {"potential": "free"}}).model().gamma == 0.0


def test_override_replaces_parameterization():
    cfg = from_mapping({"beam": {"r": 1.0, "theta": 0.5}})
    cart = override(cfg, {"beam.x0": 0.3})
    assert cart.beam.r is None and cart.spec().x0 == 0.3
    back = override(cart, {"beam.r": 2.0, "beam.theta": 0.0})
    assert back.beam.x0 is None and back.spec().x0 == pytest.approx(2.0 * math.sqrt(2.0))


def test_override_skips_none_and_validates():
    cfg = RunConfig()
    assert override(cfg, {"beam.x0": None}) == cfg
    with pytest.raises(ConfigError):
        override(cfg, {"solver.dz": -1.0})


def test_dumps_round_trip(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(LAB_TOML)
    cfg = load(path)
    again = tmp_path / "again.toml"
    again.write_text(dumps(cfg))
    assert load(again) == cfg

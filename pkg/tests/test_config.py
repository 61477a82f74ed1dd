"""Configuration parsing, validation, and round-trip emission."""

import pytest

from weberatom.config import (
    ConfigError,
    OutputSettings,
    RunConfig,
    SimSettings,
    config_as_dict,
    emit_config,
    parse_config,
    with_overrides,
)


def test_empty_text_gives_defaults():
    assert parse_config("") == RunConfig()


def test_round_trip_nontrivial_config():
    text = """
[beam]
parity = even
order_a = -2.5
irradiance = 6.0
amp_tm = 0.25+0.1j

[cloud]
n_atoms = 37
seed = 18446744073709551615
y_band = -120.5, 80.25

[sim]
t_max = 123456.789
tol = 1e-9
grid = off
force_denominator = standard
x_window = -10.0, 35.5

[output]
directory = out/some_run
cadence = 250.0
"""
    cfg = parse_config(text)
    assert cfg.beam.parity == "even"
    assert cfg.beam.amp_tm == 0.25 + 0.1j
    assert cfg.cloud.seed == 2**64 - 1
    assert cfg.cloud.y_band == (-120.5, 80.25)
    assert cfg.sim.grid is False
    assert cfg.sim.x_window == (-10.0, 35.5)
    # emit -> parse is the identity, and emission is a fixed point
    emitted = emit_config(cfg)
    assert parse_config(emitted) == cfg
    assert emit_config(parse_config(emitted)) == emitted


def test_defaults_round_trip_through_emission():
    assert parse_config(emit_config(RunConfig())) == RunConfig()


def test_unknown_key_reports_line():
    text = "[beam]\nparity = odd\nirradiancee = 2.0\n"
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.line == 3
    assert "unknown key" in str(err.value)
    assert "irradiancee" in str(err.value)


def test_unknown_section_reports_line():
    text = "\n[beam]\nparity = odd\n\n[beams]\nparity = even\n"
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.line == 5
    assert "unknown section" in str(err.value)


def test_bad_value_reports_key_line():
    text = "[beam]\norder_a = -5\nkz_fraction = 1.5\n"
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.line == 3
    assert "kz_fraction" in str(err.value)


def test_unparseable_number_reports_line():
    with pytest.raises(ConfigError) as err:
        parse_config("[cloud]\nx0 = one-fifty\n")
    assert err.value.line == 2


def test_duplicate_key_rejected():
    with pytest.raises(ConfigError):
        parse_config("[beam]\nparity = odd\nparity = even\n")


def test_seed_bounds():
    with pytest.raises(ConfigError):
        parse_config("[cloud]\nseed = 18446744073709551616\n")
    with pytest.raises(ConfigError):
        parse_config("[cloud]\nseed = -1\n")


def test_pair_and_window_parsing():
    with pytest.raises(ConfigError):
        parse_config("[cloud]\ny_band = 1, 2, 3\n")
    with pytest.raises(ConfigError):
        parse_config("[cloud]\ny_band = 5, -5\n")  # empty band
    assert parse_config("[sim]\nx_window = none\n").sim.x_window is None
    with pytest.raises(ConfigError):
        parse_config("[sim]\nx_window = 7\n")
    with pytest.raises(ConfigError):
        parse_config("[sim]\nx_window = 10, 5\n")


def test_bool_words():
    for word, expected in [("on", True), ("yes", True), ("1", True),
                           ("off", False), ("no", False), ("0", False)]:
        assert parse_config(f"[sim]\ngrid = {word}\n").sim.grid is expected
    with pytest.raises(ConfigError):
        parse_config("[sim]\ngrid = maybe\n")


def test_sim_settings_validation():
    with pytest.raises(ValueError):
        SimSettings(tol=1e-3)
    with pytest.raises(ValueError):
        SimSettings(t_max=0.0)
    with pytest.raises(ValueError):
        SimSettings(force_denominator="inverted")
    with pytest.raises(ValueError):
        SimSettings(x_window=(5.0, 5.0))


def test_output_settings_validation():
    with pytest.raises(ValueError):
        OutputSettings(directory="")
    with pytest.raises(ValueError):
        OutputSettings(cadence=0.0)
    with pytest.raises(ValueError):
        OutputSettings(formats="parquet")


def test_overrides():
    cfg = RunConfig()
    assert with_overrides(cfg) == cfg
    changed = with_overrides(cfg, seed=42, out_dir="elsewhere")
    assert changed.cloud.seed == 42
    assert changed.output.directory == "elsewhere"
    assert changed.beam == cfg.beam


def test_config_as_dict_is_flat_strings():
    d = config_as_dict(RunConfig())
    assert set(d) == {"setup", "beam", "cloud", "sim", "output"}
    assert d["sim"]["grid"] == "true"
    assert d["sim"]["x_window"] == "none"
    assert d["beam"]["amp_te"] == repr(1 + 0j)

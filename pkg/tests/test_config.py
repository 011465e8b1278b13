"""Tests for config parsing, validation, and echo round trips."""

import math

import numpy as np
import pytest

from densecoding.config import (
    ConfigError,
    ScenarioConfig,
    default_config,
    load_config,
    parse_config_text,
    parse_value,
    validate,
)


class TestDefaults:
    def test_defaults_are_self_consistent(self):
        cfg = default_config()
        assert cfg["nopa.pump_mw"] == 150.0
        assert cfg["nopa.threshold_mw"] == 175.0
        assert cfg["nopa.linewidth_mhz"] == 26.0
        assert cfg["detector.electronics_floor_db"] == -8.0
        assert cfg["signal.mod_freq_hz"] == 2e6
        assert cfg["engine.rbw_hz"] == 30e3
        assert cfg["engine.vbw_hz"] == 100.0

    def test_sample_count_from_duration(self):
        cfg = default_config()
        assert cfg.n_samples() == int(0.2 * 50e6)
        cfg = cfg.with_overrides({"engine.samples": 4096})
        assert cfg.n_samples() == 4096


class TestValidation:
    def test_unknown_key_is_named(self):
        with pytest.raises(ConfigError, match="nopa.pump_w"):
            validate({"nopa.pump_w": 120.0})

    def test_wrong_type(self):
        with pytest.raises(ConfigError, match="expected a number"):
            validate({"nopa.pump_mw": "strong"})

    def test_out_of_range(self):
        with pytest.raises(ConfigError, match="out of range"):
            validate({"detector.quantum_efficiency": 1.4})

    def test_floor_must_be_below_snl(self):
        with pytest.raises(ConfigError, match="out of range"):
            validate({"detector.electronics_floor_db": 1.0})
        validate({"detector.electronics_floor_db": -np.inf})

    def test_nan_rejected_where_required(self):
        with pytest.raises(ConfigError):
            validate({"nopa.pump_mw": math.nan})

    def test_partial_keeps_only_given_keys(self):
        got = validate({"engine.seed": 7}, partial=True)
        assert got == {"engine.seed": 7}


class TestParsing:
    def test_values(self):
        assert parse_value("150") == 150
        assert parse_value("1.5e6") == 1.5e6
        assert parse_value("-inf") == -np.inf
        assert parse_value("deamplify") == "deamplify"
        assert parse_value("'quoted'") == "quoted"
        assert parse_value("true") is True

    def test_file_format(self):
        text = """
        # comment line
        nopa.pump_mw = 120    # trailing comment
        engine.seed = 99
        source.kind = flat
        """
        values = parse_config_text(text)
        assert values == {"nopa.pump_mw": 120, "engine.seed": 99, "source.kind": "flat"}

    def test_duplicate_key(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("a.b = 1\na.b = 2")

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match="key = value"):
            parse_config_text("just some words")

    def test_load_rejects_unknown_keys(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("nopa.pump_mww = 150\n")
        with pytest.raises(ConfigError, match="pump_mww"):
            load_config(path)


class TestEchoRoundTrip:
    def test_echo_reparses_to_the_same_config(self, tmp_path):
        cfg = default_config().with_overrides(
            {
                "engine.seed": 31337,
                "detector.electronics_floor_db": -5.0,
                "source.kind": "flat",
                "nopa.calibrate_db_y": -4.8,
            }
        )
        path = tmp_path / "echo.cfg"
        path.write_text("\n".join(cfg.echo_lines()) + "\n")
        again = load_config(path)
        for key, value in cfg.values.items():
            other = again[key]
            if isinstance(value, float) and math.isnan(value):
                assert math.isnan(other)
            else:
                assert other == value

    def test_band_accessor(self):
        cfg = default_config()
        assert cfg.band_hz() == (1e6, 3e6)
        with pytest.raises(ConfigError):
            cfg.with_overrides({"engine.band_lo_mhz": 4.0}).band_hz()

    def test_values_survive_override_merge(self):
        cfg = default_config().with_overrides({"engine.seed": 5})
        assert cfg["engine.seed"] == 5
        assert cfg["nopa.pump_mw"] == 150.0
        assert isinstance(cfg, ScenarioConfig)

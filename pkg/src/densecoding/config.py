"""Scenario configuration: flat dotted keys, typed, with strict validation.

Config files are plain text, one ``section.key = value`` per line, with
``#`` comments.  Unknown keys are rejected by name so that typos never
fall back to defaults silently.  The built-in defaults encode the
published operating point of the experiment being simulated: 150 mW
pump against a 175 mW threshold, 26 MHz cavity linewidth, a 2 MHz
analysis tone, 30 kHz resolution and 0.1 kHz video bandwidth, and an
electronics floor 8 dB below the measured shot-noise limit.
"""

import math
from dataclasses import dataclass

import numpy as np


class ConfigError(ValueError):
    """Invalid scenario configuration (bad key, type, or value)."""


def _positive(x):
    return x > 0


def _nonnegative(x):
    return x >= 0


def _fraction(x):
    return 0.0 <= x <= 1.0


def _negative_or_inf(x):
    return x == -np.inf or x < 0


def _finite(x):
    return np.isfinite(x)


def _nan_or_finite(x):
    return math.isnan(x) or np.isfinite(x)


# key -> (type, default, validator, description)
SCHEMA = {
    "nopa.pump_mw": (float, 150.0, _positive, "pump power (mW)"),
    "nopa.threshold_mw": (float, 175.0, _positive, "oscillation threshold (mW)"),
    "nopa.linewidth_mhz": (float, 26.0, _positive, "cavity FWHM linewidth (MHz)"),
    "nopa.finesse": (float, 110.0, _positive, "cavity finesse"),
    "nopa.fsr_ghz": (float, 2.8, _positive, "free spectral range (GHz)"),
    "nopa.operating_mode": (str, "deamplify", lambda s: s in ("amplify", "deamplify"), "pump phase lock"),
    "nopa.eta_x": (float, math.nan, lambda x: math.isnan(x) or 0 <= x <= 1, "amplitude-combination efficiency; NaN = calibrate"),
    "nopa.eta_y": (float, math.nan, lambda x: math.isnan(x) or 0 <= x <= 1, "phase-combination efficiency; NaN = same as eta_x / calibrate"),
    "nopa.calibrate_db_x": (float, -5.4, lambda x: x <= 0, "squeezing target for eta_x calibration (dB)"),
    "nopa.calibrate_db_y": (float, math.nan, lambda x: math.isnan(x) or x <= 0, "squeezing target for eta_y; NaN = symmetric"),
    "nopa.calibrate_at_mhz": (float, 2.0, _positive, "calibration sideband (MHz)"),
    "source.kind": (str, "nopa", lambda s: s in ("nopa", "flat"), "spectral model of the source"),
    "source.squeezed_db_x": (float, -5.4, lambda x: x <= 0, "flat source: amplitude-combination level (dB)"),
    "source.squeezed_db_y": (float, math.nan, lambda x: math.isnan(x) or x <= 0, "flat source: phase level; NaN = symmetric"),
    "source.anti_db_x": (float, math.nan, lambda x: math.isnan(x) or x >= 0, "flat source: antisqueezed level; NaN = pure mirror"),
    "source.anti_db_y": (float, math.nan, lambda x: math.isnan(x) or x >= 0, "flat source: antisqueezed level; NaN = pure mirror"),
    "source.single_beam_db": (float, math.nan, _nan_or_finite, "flat source: pin the single-beam excess noise (dB re SNL)"),
    "source.lock_error_rad": (float, 0.0, _finite, "pump-phase lock error rotating the squeezing ellipse"),
    "detector.quantum_efficiency": (float, 1.0, _fraction, "detector quantum efficiency"),
    "detector.electronics_floor_db": (float, -8.0, _negative_or_inf, "electronics floor below the measured SNL (dB)"),
    "detector.phase_setting_rad": (float, math.pi / 2, _finite, "relative phase between the beams at Bob"),
    "detector.gain_imbalance": (float, 0.0, lambda x: x > -1, "D2 gain relative to D1, minus one"),
    "signal.mod_freq_hz": (float, 2e6, _positive, "tone frequency (Hz)"),
    "signal.depth_x": (float, 1.5, _nonnegative, "amplitude-quadrature tone amplitude"),
    "signal.depth_y": (float, 1.5, _nonnegative, "phase-quadrature tone amplitude"),
    "signal.waveform": (str, "sine", lambda s: s == "sine", "tone waveform"),
    "engine.sample_rate_hz": (float, 50e6, _positive, "trace sample rate (Hz)"),
    "engine.duration_s": (float, 0.2, _positive, "trace duration (s)"),
    "engine.samples": (int, 0, _nonnegative, "explicit sample count; 0 = use duration"),
    "engine.rbw_hz": (float, 30e3, _positive, "resolution bandwidth (Hz)"),
    "engine.vbw_hz": (float, 100.0, _positive, "video bandwidth (Hz)"),
    "engine.seed": (int, 98765, lambda x: 0 <= x < 2**64, "master seed"),
    "engine.workers": (int, 1, _positive, "parallel synthesis workers"),
    "engine.band_lo_mhz": (float, 1.0, _positive, "analysis band lower edge (MHz)"),
    "engine.band_hi_mhz": (float, 3.0, _positive, "analysis band upper edge (MHz)"),
    "attack.tap_t": (float, 1.0, _fraction, "transmissivity Eve leaves to Bob"),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated flat key/value scenario description."""

    values: dict

    def __getitem__(self, key: str):
        return self.values[key]

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    def with_overrides(self, overrides: dict) -> "ScenarioConfig":
        merged = dict(self.values)
        merged.update(validate(overrides, partial=True))
        return ScenarioConfig(merged)

    def echo_lines(self) -> list[str]:
        return [f"{key} = {format_value(self.values[key])}" for key in sorted(self.values)]

    def band_hz(self) -> tuple[float, float]:
        lo = self.values["engine.band_lo_mhz"] * 1e6
        hi = self.values["engine.band_hi_mhz"] * 1e6
        if lo >= hi:
            raise ConfigError("engine.band_lo_mhz must be below engine.band_hi_mhz")
        return lo, hi

    def n_samples(self) -> int:
        if self.values["engine.samples"]:
            return self.values["engine.samples"]
        return int(round(self.values["engine.duration_s"] * self.values["engine.sample_rate_hz"]))


def format_value(value) -> str:
    if isinstance(value, float):
        if value == -np.inf:
            return "-inf"
        if value == np.inf:
            return "inf"
        if math.isnan(value):
            return "nan"
        return repr(value)
    if isinstance(value, str):
        return value
    return repr(value)


def _coerce(key: str, raw, want: type):
    if want is float:
        if isinstance(raw, (int, float)) and not isinstance(raw, bool):
            return float(raw)
        try:
            return float(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    if want is int:
        if isinstance(raw, bool):
            raise ConfigError(f"{key}: expected an integer, got {raw!r}")
        if isinstance(raw, int):
            return raw
        if isinstance(raw, float) and raw.is_integer():
            return int(raw)
        try:
            return int(str(raw), 0)
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
    if want is str:
        if not isinstance(raw, str):
            raise ConfigError(f"{key}: expected a string, got {raw!r}")
        return raw
    raise ConfigError(f"{key}: unsupported schema type {want}")


def validate(values: dict, partial: bool = False) -> dict:
    """Type-check and range-check a key/value mapping against the schema.

    Unknown keys raise ConfigError naming the key.  With partial=True
    only the supplied keys are returned; otherwise defaults fill in the
    rest.
    """
    out = {}
    for key, raw in values.items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key: {key!r}")
        want, _default, check, _doc = SCHEMA[key]
        value = _coerce(key, raw, want)
        if not check(value):
            raise ConfigError(f"{key}: value {value!r} out of range")
        out[key] = value
    if partial:
        return out
    merged = {key: spec[1] for key, spec in SCHEMA.items()}
    merged.update(out)
    return merged


def default_config() -> ScenarioConfig:
    return ScenarioConfig(validate({}))


def parse_value(text: str):
    """Parse one right-hand-side token: number, inf/nan, bool, or string."""
    token = text.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return token[1:-1]
    low = token.lower()
    if low in ("-inf", "inf", "nan"):
        return float(low)
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(token, 0)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        return token


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, _, rhs = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: missing key")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = parse_value(rhs)
    return values


def load_config(path, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Load a config file on top of ``base`` (or the built-in defaults)."""
    with open(path, "r", encoding="utf-8") as fh:
        overrides = parse_config_text(fh.read())
    base = base if base is not None else default_config()
    return base.with_overrides(overrides)

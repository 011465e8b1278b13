"""Desk-scale simulator of continuous-variable dense coding with bright
EPR beams.

The package models the entangled source (a below-threshold NOPA), the
classical two-quadrature encoding at the sender, the direct Bell-state
decoding at the receiver, and an eavesdropper, and reproduces the
reference noise spectra, SNR gains and fidelity figures both
analytically (exact Gaussian algebra) and by Monte Carlo synthesis of
correlated sideband traces.
"""

__version__ = "0.1.0"

from .config import ConfigError, ScenarioConfig, default_config, load_config
from .engine import (
    SpectralModelError,
    SpectrumEstimate,
    TimeTrace,
    add_electronics_noise,
    electronics_correct,
    estimate_psd,
    synthesize_traces,
    tone_snr,
)
from .gaussian import (
    GaussianState,
    LossChannel,
    SymplecticTransform,
    apply_loss,
    apply_symplectic,
    beamsplitter,
    combo_variance,
    displace,
    phase_shift,
    symplectic_eigenvalues,
    two_mode_squeezed_state,
    two_mode_squeezer,
    vacuum_state,
)
from .metrics import (
    VariancePair,
    channel_information,
    snr_improvement,
    teleport_fidelity,
    variance_product,
)
from .nopa import (
    AboveThresholdError,
    CorrelationSpectra,
    NopaParams,
    UnachievableTargetError,
    calibrate_efficiency,
    correlation_spectra,
    epr_covariance_at,
)
from .protocol import (
    BellOutputs,
    ClassicalSignal,
    DetectorConfig,
    bell_measure,
    encode,
    intercept_single_beam,
    snl_reference,
    tap_attack,
)
from .scenarios import run_fig2, run_fig3, run_fig4, sweep, calibrate

__all__ = [
    "AboveThresholdError",
    "BellOutputs",
    "ClassicalSignal",
    "ConfigError",
    "CorrelationSpectra",
    "DetectorConfig",
    "GaussianState",
    "LossChannel",
    "NopaParams",
    "ScenarioConfig",
    "SpectralModelError",
    "SpectrumEstimate",
    "SymplecticTransform",
    "TimeTrace",
    "UnachievableTargetError",
    "VariancePair",
    "add_electronics_noise",
    "apply_loss",
    "apply_symplectic",
    "beamsplitter",
    "bell_measure",
    "calibrate",
    "calibrate_efficiency",
    "channel_information",
    "combo_variance",
    "correlation_spectra",
    "default_config",
    "displace",
    "electronics_correct",
    "encode",
    "epr_covariance_at",
    "estimate_psd",
    "intercept_single_beam",
    "load_config",
    "phase_shift",
    "run_fig2",
    "run_fig3",
    "run_fig4",
    "snl_reference",
    "snr_improvement",
    "sweep",
    "symplectic_eigenvalues",
    "synthesize_traces",
    "tap_attack",
    "teleport_fidelity",
    "tone_snr",
    "two_mode_squeezed_state",
    "two_mode_squeezer",
    "vacuum_state",
    "variance_product",
]

"""The three stations: classical encoding, Bell-state direct detection,
and the eavesdropper.

Alice modulates amplitude and phase tones onto beam 1.  Bob imposes a
relative phase on beam 1, combines the beams on a balanced beamsplitter
and detects both bright outputs directly; the sum and difference of the
split photocurrents read out the (X1+X2) and (Y1-Y2) combinations.

Direct detection of a bright beam is modeled as linearized
photodetection: the AC photocurrent is the carrier amplitude times the
fluctuation quadrature along the carrier phase.  Carrying the output
carrier phases through the beamsplitter gives, for relative phase theta
(c = cos(theta/2), s = sin(theta/2)),

    i_c = c^2 (X1+X2) - c s (Y1-Y2)
    i_d = s^2 (X1+X2) + c s (Y1-Y2)

so i_c + i_d = (X1+X2) for every theta (total photon number is
conserved), while i_d - i_c = -cos(theta) (X1+X2) + sin(theta) (Y1-Y2).
A lock error in theta therefore only remixes the two squeezed
combinations; it never couples in the antisqueezed ones.  Antisqueezed
noise enters through a pump-phase lock error at the source, which
rotates the squeezing ellipse against the carrier frame (see
``lock_error_state`` / ``lock_error_csd``).

All operations run on analytic Gaussian states or on sampled time
traces; both paths share the same combination coefficients.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .engine import (
    SpectrumEstimate,
    TimeTrace,
    add_electronics_noise,
    electronics_power,
    estimate_psd,
    floor_db,
    tone_snr,
)
from .gaussian import (
    GaussianState,
    LossChannel,
    apply_loss,
    apply_symplectic,
    beamsplitter,
    displace,
    phase_shift,
)

TRACE_CHANNELS = ("x1", "y1", "x2", "y2")

# electronics substream tags: one per physically distinct detector set
_ELEC_BELL = 0
_ELEC_EVE = 1
_LOSS_BELL = 0
_LOSS_EVE = 1


@dataclass(frozen=True)
class ClassicalSignal:
    """Deterministic tones encoded on the two quadratures of beam 1."""

    mod_freq_hz: float
    depth_x: float = 0.0
    depth_y: float = 0.0
    waveform: str = "sine"

    def __post_init__(self):
        if self.mod_freq_hz <= 0:
            raise ValueError("mod_freq_hz must be positive")
        if self.depth_x < 0 or self.depth_y < 0:
            raise ValueError("modulation depths must be nonnegative")
        if self.waveform != "sine":
            raise ValueError(f"unsupported waveform {self.waveform!r}")


@dataclass(frozen=True)
class DetectorConfig:
    """Bob's (or Eve's) detection chain.

    ``electronics_floor_db`` is quoted in dB below the measured SNL
    (-inf for a noiseless chain).  ``phase_setting`` is the relative
    phase between the two beams, nominally pi/2.  ``gain_imbalance`` g
    scales detector D2's current by (1 + g).
    """

    quantum_efficiency: float = 1.0
    electronics_floor_db: float = -np.inf
    phase_setting: float = math.pi / 2
    gain_imbalance: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.quantum_efficiency <= 1.0:
            raise ValueError("quantum_efficiency must lie in [0, 1]")
        electronics_power(self.electronics_floor_db)  # validates the range

    @property
    def electronics_power(self) -> float:
        return electronics_power(self.electronics_floor_db)


@dataclass(frozen=True)
class QuadratureRecord:
    """Analytic description of one detected output.

    ``variance`` is the total noise power (quantum plus electronics) in
    units of the noiseless per-output shot noise; ``snl_variance`` is
    the same pipeline's vacuum-input power, i.e. the measured SNL.
    """

    variance: float
    tone_amplitude: float
    snl_variance: float

    @property
    def floor_db(self) -> float:
        """Noise floor relative to the measured SNL."""
        return 10.0 * math.log10(self.variance / self.snl_variance)

    @property
    def snr_db(self) -> float:
        tone_power = self.tone_amplitude**2 / 2.0
        if tone_power == 0.0:
            return -np.inf
        return 10.0 * math.log10(tone_power / self.variance)


@dataclass
class BellOutputs:
    """Sum and difference outputs; traces or analytic records."""

    i_plus: TimeTrace | QuadratureRecord
    i_minus: TimeTrace | QuadratureRecord


def encode(beam, signal: ClassicalSignal):
    """Imprint Alice's tones on beam 1; returns the same kind as given.

    On a time trace, deterministic sines of amplitude ``depth_x`` and
    ``depth_y`` are added to the x1 and y1 channels.  On a Gaussian
    state, the depths become a mean displacement of mode 1 (the tone
    amplitude at the analysis sideband).
    """
    if isinstance(beam, GaussianState):
        return displace(beam, 0, signal.depth_x, signal.depth_y)
    if signal.mod_freq_hz >= beam.sample_rate_hz / 2.0:
        raise ValueError(
            f"tone at {signal.mod_freq_hz} Hz is above the Nyquist frequency "
            f"of a {beam.sample_rate_hz} Hz trace"
        )
    if signal.depth_x == 0.0 and signal.depth_y == 0.0:
        return beam
    t = np.arange(beam.n_samples) / beam.sample_rate_hz
    tone = np.sin(2.0 * math.pi * signal.mod_freq_hz * t)
    data = dict(beam.channels)
    data["x1"] = beam.channels["x1"] + signal.depth_x * tone
    data["y1"] = beam.channels["y1"] + signal.depth_y * tone
    return TimeTrace(beam.sample_rate_hz, data, seed=beam.seed, segment_count=beam.segment_count)


def bell_coefficients(det: DetectorConfig):
    """Combination vectors of the normalized sum/difference outputs.

    Returns (c_plus, c_minus, elec_plus, elec_minus): coefficient
    vectors over (X1, Y1, X2, Y2) and the electronics power entering
    each normalized output per unit per-detector electronics power.
    """
    half = det.phase_setting / 2.0
    c, s = math.cos(half), math.sin(half)
    d1 = np.array([c * c, -c * s, c * c, c * s])
    d2 = np.array([s * s, c * s, s * s, -c * s])
    g2 = 1.0 + det.gain_imbalance
    plus = d1 + g2 * d2
    minus = g2 * d2 - d1
    n_plus = float(np.linalg.norm(plus))
    n_minus = float(np.linalg.norm(minus))
    if n_plus == 0.0 or n_minus == 0.0:
        raise ValueError("degenerate detection geometry: an output has zero shot noise")
    elec_weight = 1.0 + g2 * g2
    return (
        plus / n_plus,
        minus / n_minus,
        elec_weight / n_plus**2,
        elec_weight / n_minus**2,
    )


def _bell_analytic(state: GaussianState, det: DetectorConfig) -> BellOutputs:
    if det.quantum_efficiency < 1.0:
        state = apply_loss(state, LossChannel(0, det.quantum_efficiency))
        state = apply_loss(state, LossChannel(1, det.quantum_efficiency))
    c_plus, c_minus, w_plus, w_minus = bell_coefficients(det)
    p_e = det.electronics_power
    records = []
    for vec, w in ((c_plus, w_plus), (c_minus, w_minus)):
        records.append(
            QuadratureRecord(
                variance=float(vec @ state.cov @ vec) + w * p_e,
                tone_amplitude=float(vec @ state.mean),
                snl_variance=1.0 + w * p_e,
            )
        )
    return BellOutputs(i_plus=records[0], i_minus=records[1])


def _trace_loss(arrays: np.ndarray, eta: float, seed: int, tag: int) -> np.ndarray:
    if eta >= 1.0:
        return arrays
    out = np.empty_like(arrays)
    for k in range(arrays.shape[0]):
        gen = rng.substream(seed, rng.DETECTOR_LOSS, tag, k)
        out[k] = math.sqrt(eta) * arrays[k] + math.sqrt(1.0 - eta) * gen.standard_normal(
            arrays.shape[1]
        )
    return out


def _bell_traces(trace: TimeTrace, det: DetectorConfig) -> BellOutputs:
    stack = np.vstack([trace.channels[ch] for ch in TRACE_CHANNELS])
    stack = _trace_loss(stack, det.quantum_efficiency, trace.seed, _LOSS_BELL)
    half = det.phase_setting / 2.0
    c, s = math.cos(half), math.sin(half)
    d1 = np.array([c * c, -c * s, c * c, c * s])
    d2 = np.array([s * s, c * s, s * s, -c * s])
    currents = TimeTrace(
        trace.sample_rate_hz,
        {"d1": d1 @ stack, "d2": d2 @ stack},
        seed=trace.seed,
        segment_count=trace.segment_count,
    )
    currents = add_electronics_noise(currents, det.electronics_floor_db, seed=_elec_seed(trace.seed, _ELEC_BELL))
    g2 = 1.0 + det.gain_imbalance
    raw_plus = currents.channels["d1"] + g2 * currents.channels["d2"]
    raw_minus = g2 * currents.channels["d2"] - currents.channels["d1"]
    n_plus = float(np.linalg.norm(d1 + g2 * d2))
    n_minus = float(np.linalg.norm(g2 * d2 - d1))
    mk = lambda name, arr: TimeTrace(
        trace.sample_rate_hz, {name: arr}, seed=trace.seed, segment_count=trace.segment_count
    )
    return BellOutputs(
        i_plus=mk("i_plus", raw_plus / n_plus),
        i_minus=mk("i_minus", raw_minus / n_minus),
    )


def _elec_seed(seed: int, tag: int) -> int:
    # distinct physical detector sets on one trace need distinct streams
    return rng.derived_seed(seed, rng.ELECTRONICS, tag)


def bell_measure(beams, det: DetectorConfig) -> BellOutputs:
    """Direct Bell-state measurement of the two beams.

    ``beams`` is either a two-mode GaussianState (analytic path) or a
    TimeTrace with channels x1, y1, x2, y2.  With vacuum inputs and no
    tones both outputs have unit variance (the per-output shot-noise
    reference); with entangled inputs both floors drop below it
    simultaneously.
    """
    if isinstance(beams, GaussianState):
        if beams.n_modes != 2:
            raise ValueError("analytic Bell measurement needs a two-mode state")
        return _bell_analytic(beams, det)
    missing = [ch for ch in TRACE_CHANNELS if ch not in beams.channels]
    if missing:
        raise ValueError(f"trace is missing channels {missing}")
    return _bell_traces(beams, det)


def snl_reference(det: DetectorConfig, sample_rate_hz: float = None, duration_s: float = None, seed: int = None, workers: int = 1):
    """Shot-noise calibration: the identical pipeline fed with vacuum.

    With trace parameters, synthesizes fresh vacuum noise and runs it
    through the Bell measurement (including the electronics injection);
    without them, returns the analytic records.
    """
    from .gaussian import vacuum_state

    if sample_rate_hz is None:
        return bell_measure(vacuum_state(2), det)
    from .engine import synthesize_traces, unit_csd

    trace = synthesize_traces(
        unit_csd(4), duration_s, sample_rate_hz, seed, channels=TRACE_CHANNELS, workers=workers
    )
    return bell_measure(trace, det)


def eve_record(state: GaussianState, det: DetectorConfig) -> QuadratureRecord:
    """Analytic view of a direct detection of beam 1 alone."""
    if det.quantum_efficiency < 1.0:
        state = apply_loss(state, LossChannel(0, det.quantum_efficiency))
    p_e = det.electronics_power
    return QuadratureRecord(
        variance=float(state.cov[0, 0]) + p_e,
        tone_amplitude=float(state.mean[0]),
        snl_variance=1.0 + p_e,
    )


def direct_detect(beam: TimeTrace, det: DetectorConfig) -> TimeTrace:
    """Eve's raw photocurrent from direct detection of beam 1 alone."""
    x1 = beam.channels["x1"][np.newaxis, :]
    x1 = _trace_loss(x1, det.quantum_efficiency, beam.seed, _LOSS_EVE)[0]
    eve = TimeTrace(beam.sample_rate_hz, {"eve": x1}, seed=beam.seed, segment_count=beam.segment_count)
    return add_electronics_noise(eve, det.electronics_floor_db, seed=_elec_seed(beam.seed, _ELEC_EVE))


def intercept_single_beam(
    beam: TimeTrace,
    det: DetectorConfig,
    rbw_hz: float = 30e3,
    vbw_hz: float | None = 100.0,
    snl_ref=None,
    band_hz: tuple[float, float] | None = None,
) -> SpectrumEstimate:
    """Eve's spectrum from direct detection of the modulated beam 1.

    Without the other half of the EPR beam she sees the single-beam
    amplitude quadrature, whose excess noise buries the tones.  The
    returned PSD is relative to her measured SNL (vacuum plus the same
    electronics), supplied as ``snl_ref`` or derived analytically.
    """
    eve = direct_detect(beam, det)
    if snl_ref is None:
        snl_ref = (1.0 + det.electronics_power) * 2.0 / beam.sample_rate_hz
    return estimate_psd(eve, rbw_hz, vbw_hz, snl_ref=snl_ref, band_hz=band_hz)


@dataclass(frozen=True)
class TapAttackResult:
    bob_snr_db: float
    eve_snr_db: float
    bob_floor_shift_db: float


def _snr_db(amplitude: float, variance: float) -> float:
    power = amplitude**2 / 2.0
    if power == 0.0:
        return -np.inf
    return 10.0 * math.log10(power / variance)


def tap_attack(epr: GaussianState, signal: ClassicalSignal, tap_transmissivity: float, det: DetectorConfig) -> TapAttackResult:
    """Eve splits off part of beam 1 with a beamsplitter of transmissivity T.

    Bob decodes the surviving fraction against beam 2; Eve direct-detects
    the tapped fraction.  Both SNRs are on the amplitude channel, and
    ``bob_floor_shift_db`` is the change of Bob's i_plus noise floor
    against the untapped case.
    """
    if not 0.0 <= tap_transmissivity <= 1.0:
        raise ValueError("tap transmissivity must lie in [0, 1]")
    if epr.n_modes != 2:
        raise ValueError("tap attack needs a two-mode EPR state")
    # embed in three modes: beam 1, beam 2, Eve's vacuum ancilla
    n = 3
    cov = np.eye(2 * n)
    cov[:4, :4] = epr.cov
    mean = np.zeros(2 * n)
    mean[:4] = epr.mean
    state = GaussianState(mean, cov)
    state = displace(state, 0, signal.depth_x, signal.depth_y)
    state = apply_symplectic(state, beamsplitter(tap_transmissivity, (0, 2), n_modes=n))

    bob_state = GaussianState(state.mean[:4], state.cov[:4, :4])
    bob = _bell_analytic(bob_state, det)
    untapped = _bell_analytic(
        displace(GaussianState(epr.mean, epr.cov), 0, signal.depth_x, signal.depth_y), det
    )
    p_e = det.electronics_power
    eve_var = float(state.cov[4, 4]) + p_e
    eve_amp = float(state.mean[4])
    return TapAttackResult(
        bob_snr_db=bob.i_plus.snr_db,
        eve_snr_db=_snr_db(eve_amp, eve_var),
        bob_floor_shift_db=10.0 * math.log10(bob.i_plus.variance / untapped.i_plus.variance),
    )


def single_beam_advantage_db(state: GaussianState, signal: ClassicalSignal, det: DetectorConfig) -> float:
    """Bob's decoded amplitude SNR minus Eve's single-beam SNR, in dB.

    For a pure two-mode squeezed source with noiseless detection this
    equals 10 log10((exp(4r) + 1) / 4).
    """
    encoded = encode(state, signal)
    bob = bell_measure(encoded, det)
    eve = eve_record(encoded, det)
    return bob.i_plus.snr_db - eve.snr_db


def lock_error_state(state: GaussianState, epsilon: float) -> GaussianState:
    """Rotate the squeezing ellipse of both modes against the carrier frame.

    Models a pump-phase lock error at the source: the fluctuation field
    of each mode rotates by ``epsilon`` while carriers and encoded tones
    stay put, which mixes antisqueezed noise into both measured
    combinations at second order in epsilon.
    """
    if epsilon == 0.0:
        return state
    rot = phase_shift(epsilon, 0, n_modes=2) @ phase_shift(epsilon, 1, n_modes=2)
    rotated = apply_symplectic(GaussianState(np.zeros(4), state.cov), rot)
    return GaussianState(state.mean, rotated.cov)


def lock_error_csd(csd, epsilon: float):
    """Wrap a cross-spectral-density builder with a source lock error."""
    if epsilon == 0.0:
        return csd
    c, s = math.cos(epsilon), math.sin(epsilon)
    block = np.array([[c, -s], [s, c]])
    rot = np.kron(np.eye(2), block)

    def rotated(freq_hz):
        return np.einsum("ij,fjk,lk->fil", rot, np.asarray(csd(freq_hz)), rot)

    return rotated

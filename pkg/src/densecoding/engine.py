"""Monte Carlo sideband synthesis and spectrum-analyzer emulation.

Correlated quadrature time series are synthesized chunk by chunk in the
frequency domain: each positive-frequency bin of a chunk receives a
complex Gaussian vector colored by the Cholesky factor of the target
cross-spectral matrix, and the chunk is transformed back with Hermitian
symmetry enforced.  Chunks use independent per-(chunk, channel) Philox
substreams, so synthesis is deterministic for a fixed seed no matter how
many workers run it.

Spectra are estimated with an averaged windowed periodogram.  The
resolution bandwidth maps to the segment length through the window's
noise-equivalent bandwidth, and the video bandwidth is emulated as
exponential averaging of linear power across successive segments.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import next_fast_len
from scipy.signal.windows import hann

from . import rng


class SpectralModelError(RuntimeError):
    """The requested cross-spectral matrix is not positive semidefinite."""


@dataclass
class TimeTrace:
    """Sampled quadrature or photocurrent fluctuations, one array per channel."""

    sample_rate_hz: float
    channels: dict[str, np.ndarray]
    seed: int
    segment_count: int = 1

    def __post_init__(self):
        lengths = {ch: len(arr) for ch, arr in self.channels.items()}
        if len(set(lengths.values())) > 1:
            raise ValueError(f"channels must have equal length, got {lengths}")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")

    @property
    def n_samples(self) -> int:
        return len(next(iter(self.channels.values())))

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate_hz

    def channel(self, name: str | None = None) -> np.ndarray:
        if name is None:
            if len(self.channels) != 1:
                raise ValueError(
                    f"trace has channels {sorted(self.channels)}; pick one explicitly"
                )
            return next(iter(self.channels.values()))
        return self.channels[name]

    def single(self, name: str) -> "TimeTrace":
        """View of one channel as its own trace (same samples, same seed)."""
        return TimeTrace(self.sample_rate_hz, {name: self.channels[name]}, self.seed, self.segment_count)


@dataclass
class SpectrumEstimate:
    """Averaged PSD in dB relative to a named shot-noise-limit reference."""

    freq_hz: np.ndarray
    psd_db_rel_snl: np.ndarray
    rbw_hz: float
    vbw_hz: float | None
    n_averages: int
    snl_reference_id: str
    snl_level: float = field(default=np.nan, repr=False)  # linear PSD of the 0 dB line

    def __post_init__(self):
        if np.any(np.diff(self.freq_hz) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if not np.all(np.isfinite(self.psd_db_rel_snl)):
            raise ValueError("PSD values must be finite")


def unit_csd(n_channels: int = 4):
    """Flat unit cross-spectral density: independent vacuum channels."""

    def csd(freq_hz: np.ndarray) -> np.ndarray:
        n = np.atleast_1d(np.asarray(freq_hz, dtype=float)).size
        return np.broadcast_to(np.eye(n_channels), (n, n_channels, n_channels)).copy()

    return csd


def _chunk_factors(csd, freqs: np.ndarray) -> np.ndarray:
    mats = np.asarray(csd(freqs), dtype=float)
    if mats.shape != (freqs.size, mats.shape[1], mats.shape[1]):
        raise ValueError(f"csd returned shape {mats.shape}, expected (n, k, k)")
    try:
        return np.linalg.cholesky(mats)
    except np.linalg.LinAlgError:
        eigs = np.linalg.eigvalsh(mats)
        bad = int(np.argmin(eigs.min(axis=1)))
        raise SpectralModelError(
            f"cross-spectral matrix not positive semidefinite at "
            f"{freqs[bad]:.6g} Hz (min eigenvalue {eigs[bad].min():.3e})"
        ) from None


def _synthesize_chunk(factors: np.ndarray, chunk_len: int, seed: int, chunk_index: int, n_channels: int) -> np.ndarray:
    n_bins = factors.shape[0]
    z = np.empty((n_bins, n_channels), dtype=complex)
    a0 = np.empty(n_channels)
    a_nyq = np.empty(n_channels)
    for c in range(n_channels):
        gen = rng.substream(seed, rng.SYNTH, chunk_index, c)
        re = gen.standard_normal(n_bins)
        im = gen.standard_normal(n_bins)
        z[:, c] = re + 1j * im
        a0[c] = re[0]
        a_nyq[c] = re[-1]
    spectrum = math.sqrt(chunk_len / 2.0) * np.einsum("fij,fj->fi", factors, z)
    # DC and Nyquist bins must be real for a real-valued inverse transform
    spectrum[0] = math.sqrt(chunk_len) * (factors[0] @ a0)
    if chunk_len % 2 == 0:
        spectrum[-1] = math.sqrt(chunk_len) * (factors[-1] @ a_nyq)
    return np.fft.irfft(spectrum, n=chunk_len, axis=0).T  # (n_channels, chunk_len)


def synthesize_traces(
    csd,
    duration_s: float,
    sample_rate_hz: float,
    seed: int,
    channels=("x1", "y1", "x2", "y2"),
    chunk_samples: int = 65536,
    workers: int = 1,
) -> TimeTrace:
    """Synthesize stationary Gaussian channels with a prescribed cross-PSD.

    ``csd`` maps a frequency grid (Hz) to (n, k, k) cross-spectral
    matrices relative to the SNL (vacuum = identity).  The total length
    rounds up to whole chunks and is truncated to the requested
    duration.  Output is bit-identical for a fixed seed regardless of
    ``workers``.
    """
    n_channels = len(channels)
    n_total = int(round(duration_s * sample_rate_hz))
    if n_total <= 0:
        raise ValueError("duration must cover at least one sample")
    chunk_len = next_fast_len(min(int(chunk_samples), n_total))
    n_chunks = -(-n_total // chunk_len)
    freqs = np.fft.rfftfreq(chunk_len, d=1.0 / sample_rate_hz)
    factors = _chunk_factors(csd, freqs)
    if factors.shape[1] != n_channels:
        raise ValueError(f"csd provides {factors.shape[1]} channels, trace wants {n_channels}")

    out = np.empty((n_channels, n_chunks * chunk_len))

    def fill(i: int):
        out[:, i * chunk_len : (i + 1) * chunk_len] = _synthesize_chunk(
            factors, chunk_len, seed, i, n_channels
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(n_chunks)))
    else:
        for i in range(n_chunks):
            fill(i)

    data = {name: out[k, :n_total].copy() for k, name in enumerate(channels)}
    return TimeTrace(sample_rate_hz, data, seed=seed, segment_count=n_chunks)


def electronics_power(floor_db_rel_snl: float) -> float:
    """Linear electronics noise power implied by a floor below the measured SNL.

    The floor is quoted relative to the measured shot-noise trace, which
    itself contains the electronics contribution: if f = 10^(floor/10)
    then P_e / (1 + P_e) = f, so P_e = f / (1 - f).  Requires floor < 0.
    """
    if floor_db_rel_snl == -np.inf:
        return 0.0
    if not np.isfinite(floor_db_rel_snl) or floor_db_rel_snl >= 0:
        raise ValueError(
            "electronics floor must be negative (below the measured SNL) or -inf, "
            f"got {floor_db_rel_snl}"
        )
    f = 10.0 ** (floor_db_rel_snl / 10.0)
    return f / (1.0 - f)


def add_electronics_noise(trace: TimeTrace, floor_db_rel_snl: float, seed: int | None = None) -> TimeTrace:
    """Add independent white detector-chain noise to every channel.

    The injected power puts the electronics the stated number of dB
    below the measured SNL of a unit-shot-noise channel.  A floor of
    -inf returns the trace unchanged.
    """
    power = electronics_power(floor_db_rel_snl)
    if power == 0.0:
        return trace
    base = trace.seed if seed is None else seed
    amp = math.sqrt(power)
    data = {}
    for k, (name, arr) in enumerate(trace.channels.items()):
        gen = rng.substream(base, rng.ELECTRONICS, k)
        data[name] = arr + amp * gen.standard_normal(arr.size)
    return TimeTrace(trace.sample_rate_hz, data, seed=trace.seed, segment_count=trace.segment_count)


def electronics_correct(measured_db_rel_snl: float, floor_db_rel_snl: float) -> float:
    """Remove the electronics contribution from a measured level.

    Both arguments are in dB relative to the measured SNL; the return
    value is the underlying quantum level relative to the noiseless SNL:

        actual = 10 log10((10^(M/10) - 10^(E/10)) / (1 - 10^(E/10)))
    """
    if floor_db_rel_snl == -np.inf:
        return measured_db_rel_snl
    m = 10.0 ** (measured_db_rel_snl / 10.0)
    e = 10.0 ** (floor_db_rel_snl / 10.0)
    if m <= e:
        raise ValueError(
            f"measured level {measured_db_rel_snl} dB is at or below the "
            f"electronics floor {floor_db_rel_snl} dB; cannot correct"
        )
    return 10.0 * math.log10((m - e) / (1.0 - e))


def _segment_psds(x: np.ndarray, fs: float, seg_len: int):
    """One-sided periodograms of consecutive non-overlapping segments."""
    n_segs = x.size // seg_len
    if n_segs < 1:
        raise ValueError(f"trace too short for the requested RBW (needs {seg_len} samples)")
    w = hann(seg_len, sym=False)
    scale = 2.0 / (fs * np.sum(w**2))
    segs = x[: n_segs * seg_len].reshape(n_segs, seg_len) * w
    spec = np.fft.rfft(segs, axis=1)
    psd = (spec.real**2 + spec.imag**2) * scale
    psd[:, 0] /= 2.0
    if seg_len % 2 == 0:
        psd[:, -1] /= 2.0
    return psd, n_segs


def welch_psd(x: np.ndarray, fs: float, rbw_hz: float, vbw_hz: float | None = None):
    """Averaged periodogram with analyzer-style RBW and VBW semantics.

    The Hann window's noise-equivalent bandwidth defines the RBW, so the
    segment length is 1.5 fs / RBW rounded to a fast transform size.
    VBW applies an exponential moving average with time constant
    1 / (2 pi VBW) to the per-segment linear power before the final
    average.  Returns (freq, psd, n_segments, actual_rbw_hz).
    """
    if rbw_hz <= 0:
        raise ValueError("rbw_hz must be positive")
    if vbw_hz is not None and not 0 < vbw_hz <= rbw_hz:
        raise ValueError("vbw_hz must satisfy 0 < vbw <= rbw")
    seg_len = next_fast_len(max(8, int(round(1.5 * fs / rbw_hz))))
    actual_rbw = 1.5 * fs / seg_len
    psd, n_segs = _segment_psds(np.asarray(x, dtype=float), fs, seg_len)
    if vbw_hz is not None and n_segs > 1:
        alpha = 1.0 - math.exp(-2.0 * math.pi * vbw_hz * seg_len / fs)
        if alpha < 1.0:
            # bias-corrected exponential average: every segment keeps unit
            # total weight, so the video filter never inflates the variance
            # of the final trace average through its start-up transient
            filtered = np.empty_like(psd)
            acc = np.zeros(psd.shape[1])
            norm = 0.0
            for k in range(n_segs):
                acc = (1.0 - alpha) * acc + alpha * psd[k]
                norm = (1.0 - alpha) * norm + alpha
                filtered[k] = acc / norm
            psd = filtered
    freq = np.fft.rfftfreq(seg_len, d=1.0 / fs)
    return freq, psd.mean(axis=0), n_segs, actual_rbw


def _reference_level(snl_ref, fs: float, rbw_hz: float, vbw_hz, channel) -> tuple[float, str]:
    if snl_ref is None:
        return 2.0 / fs, "analytic-vacuum"
    if isinstance(snl_ref, TimeTrace):
        x = snl_ref.channel(channel if channel in snl_ref.channels else None)
        _, psd, _, _ = welch_psd(x, snl_ref.sample_rate_hz, rbw_hz, vbw_hz)
        # the reference is white, so its global median pins the 0 dB line
        return float(np.median(psd[1:])), f"trace:seed={snl_ref.seed}"
    return float(snl_ref), "level"


def estimate_psd(
    trace: TimeTrace,
    rbw_hz: float,
    vbw_hz: float | None = None,
    channel: str | None = None,
    snl_ref=None,
    band_hz: tuple[float, float] | None = None,
) -> SpectrumEstimate:
    """PSD of one trace channel in dB relative to a shot-noise reference.

    ``snl_ref`` is a calibration TimeTrace measured through the same
    pipeline (its median level defines 0 dB), an explicit linear PSD
    level, or None for the analytic noiseless vacuum level 2/fs.
    ``band_hz`` restricts the output grid.
    """
    x = trace.channel(channel)
    freq, psd, n_segs, actual_rbw = welch_psd(x, trace.sample_rate_hz, rbw_hz, vbw_hz)
    level, ref_id = _reference_level(snl_ref, trace.sample_rate_hz, rbw_hz, vbw_hz, channel)
    if band_hz is not None:
        lo, hi = band_hz
        keep = (freq >= lo) & (freq <= hi)
        if not np.any(keep):
            raise ValueError(f"band {band_hz} contains no frequency bins")
        freq, psd = freq[keep], psd[keep]
    else:
        freq, psd = freq[1:], psd[1:]  # drop the DC bin
    db = 10.0 * np.log10(psd / level)
    return SpectrumEstimate(
        freq_hz=freq,
        psd_db_rel_snl=db,
        rbw_hz=actual_rbw,
        vbw_hz=vbw_hz,
        n_averages=n_segs,
        snl_reference_id=ref_id,
        snl_level=level,
    )


def slice_band(spectrum: SpectrumEstimate, band_hz: tuple[float, float]) -> SpectrumEstimate:
    """Restrict a spectrum estimate to a frequency band."""
    lo, hi = band_hz
    keep = (spectrum.freq_hz >= lo) & (spectrum.freq_hz <= hi)
    if not np.any(keep):
        raise ValueError(f"band {band_hz} contains no frequency bins")
    return SpectrumEstimate(
        freq_hz=spectrum.freq_hz[keep],
        psd_db_rel_snl=spectrum.psd_db_rel_snl[keep],
        rbw_hz=spectrum.rbw_hz,
        vbw_hz=spectrum.vbw_hz,
        n_averages=spectrum.n_averages,
        snl_reference_id=spectrum.snl_reference_id,
        snl_level=spectrum.snl_level,
    )


def tone_snr(spectrum: SpectrumEstimate, f0_hz: float, guard_bins: int = 4) -> float:
    """Tone power over the local noise floor, in dB.

    Peak power in the f0 bin (+/- 1 bin) over the median of the
    remaining bins outside a guard region around the tone.
    """
    freq = spectrum.freq_hz
    if not freq[0] <= f0_hz <= freq[-1]:
        raise ValueError(f"tone frequency {f0_hz} Hz outside the estimated band")
    k0 = int(np.argmin(np.abs(freq - f0_hz)))
    peak = spectrum.psd_db_rel_snl[max(0, k0 - 1) : k0 + 2].max()
    mask = np.abs(np.arange(freq.size) - k0) > guard_bins
    if not np.any(mask):
        raise ValueError("no floor bins left outside the guard region")
    floor = float(np.median(spectrum.psd_db_rel_snl[mask]))
    return float(peak - floor)


def floor_db(spectrum: SpectrumEstimate, exclude_hz: float | None = None, guard_bins: int = 4) -> float:
    """Median floor of a spectrum, optionally excluding a tone region."""
    values = spectrum.psd_db_rel_snl
    if exclude_hz is not None:
        k0 = int(np.argmin(np.abs(spectrum.freq_hz - exclude_hz)))
        mask = np.abs(np.arange(values.size) - k0) > guard_bins
        values = values[mask]
    if values.size == 0:
        raise ValueError("no bins left to estimate the floor")
    return float(np.median(values))

"""Below-threshold NOPA source model.

Maps the physical description of the parametric amplifier (pump ratio,
cavity linewidth, lumped detection efficiency) to frequency-dependent
EPR correlation spectra and to an effective two-mode Gaussian state at a
chosen sideband frequency.

The spectral shape is the standard below-threshold parametric-oscillator
form.  With sigma = sqrt(pump / threshold) and x = Omega / gamma, where
gamma is the cavity half-width (FWHM linewidth / 2),

    S_sq(Omega)   = 1 - eta * 4 sigma / ((1 + sigma)^2 + x^2)
    S_anti(Omega) = 1 + eta * 4 sigma / ((1 - sigma)^2 + x^2)

both expressed relative to the shot-noise limit of the corresponding
two-mode combination.  A single lumped efficiency eta (escape x
propagation x detector) is usually obtained by calibrating S_sq against
a measured squeezing level; an optional per-quadrature pair (eta_x,
eta_y) models the small asymmetry between the amplitude and phase
correlations.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .gaussian import GaussianState


class AboveThresholdError(ValueError):
    """Pump power at or above the oscillation threshold."""


class UnachievableTargetError(ValueError):
    """Requested squeezing deeper than the model allows at eta = 1."""


@dataclass(frozen=True)
class NopaParams:
    """Operating parameters of the entangled-beam source.

    ``linewidth_mhz`` is the cavity FWHM.  ``eta_x`` applies to the
    squeezed amplitude-quadrature combination, ``eta_y`` to the phase
    combination; ``eta_y = None`` means symmetric efficiencies.
    """

    pump_mw: float
    threshold_mw: float
    linewidth_mhz: float
    finesse: float = 110.0
    fsr_ghz: float = 2.8
    eta_x: float = 1.0
    eta_y: float | None = None
    operating_mode: str = "deamplify"

    def __post_init__(self):
        if self.pump_mw <= 0 or self.threshold_mw <= 0:
            raise ValueError("pump and threshold powers must be positive")
        if self.pump_mw >= self.threshold_mw:
            raise AboveThresholdError(
                f"pump {self.pump_mw} mW is not below threshold {self.threshold_mw} mW"
            )
        if self.linewidth_mhz <= 0 or self.finesse <= 0 or self.fsr_ghz <= 0:
            raise ValueError("linewidth, finesse and FSR must be positive")
        for name, eta in (("eta_x", self.eta_x), ("eta_y", self.eta_y)):
            if eta is not None and not 0.0 <= eta <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {eta}")
        if self.operating_mode not in ("amplify", "deamplify"):
            raise ValueError(f"operating_mode must be 'amplify' or 'deamplify'")
        expected_finesse = self.fsr_ghz * 1e3 / self.linewidth_mhz
        if abs(self.finesse - expected_finesse) > 0.2 * expected_finesse:
            warnings.warn(
                f"finesse {self.finesse} inconsistent with FSR/linewidth "
                f"= {expected_finesse:.1f} (>20% off)",
                stacklevel=2,
            )

    @property
    def pump_ratio(self) -> float:
        return self.pump_mw / self.threshold_mw

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.pump_ratio))

    @property
    def half_linewidth_hz(self) -> float:
        return self.linewidth_mhz * 1e6 / 2.0

    def eta_pair(self) -> tuple[float, float]:
        return self.eta_x, self.eta_x if self.eta_y is None else self.eta_y


@dataclass(frozen=True)
class CorrelationSpectra:
    """Squeezed and antisqueezed combination spectra relative to the SNL."""

    freq_hz: np.ndarray
    s_sq: np.ndarray
    s_anti: np.ndarray

    def __post_init__(self):
        freq = np.atleast_1d(np.asarray(self.freq_hz, dtype=float))
        s_sq = np.atleast_1d(np.asarray(self.s_sq, dtype=float))
        s_anti = np.atleast_1d(np.asarray(self.s_anti, dtype=float))
        if not (freq.shape == s_sq.shape == s_anti.shape):
            raise ValueError("frequency grid and spectra must have matching shapes")
        if np.any(s_sq <= 0) or np.any(s_sq > 1 + 1e-12) or np.any(s_anti < 1 - 1e-12):
            raise ValueError("spectra must satisfy 0 < S_sq <= 1 <= S_anti")
        if np.any(s_sq * s_anti < 1.0 - 1e-9):
            raise ValueError("spectra violate S_sq * S_anti >= 1")
        for arr in (freq, s_sq, s_anti):
            arr.setflags(write=False)
        object.__setattr__(self, "freq_hz", freq)
        object.__setattr__(self, "s_sq", s_sq)
        object.__setattr__(self, "s_anti", s_anti)


def _lorentzian_terms(params: NopaParams, freq_hz) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(freq_hz, dtype=float) / params.half_linewidth_hz
    sigma = params.sigma
    sq = 4.0 * sigma / ((1.0 + sigma) ** 2 + x**2)
    anti = 4.0 * sigma / ((1.0 - sigma) ** 2 + x**2)
    return sq, anti


def correlation_spectra(params: NopaParams, freq_hz, quadrature: str = "x") -> CorrelationSpectra:
    """Correlation spectra of the source over a sideband frequency grid.

    ``quadrature`` selects the efficiency of the amplitude ("x") or
    phase ("y") combination; with symmetric efficiencies both agree.
    """
    freq = np.atleast_1d(np.asarray(freq_hz, dtype=float))
    if np.any(freq < 0) or not np.all(np.isfinite(freq)):
        raise ValueError("frequency grid must be finite and nonnegative")
    if quadrature not in ("x", "y"):
        raise ValueError("quadrature must be 'x' or 'y'")
    eta_x, eta_y = params.eta_pair()
    eta = eta_x if quadrature == "x" else eta_y
    sq, anti = _lorentzian_terms(params, freq)
    return CorrelationSpectra(freq, 1.0 - eta * sq, 1.0 + eta * anti)


def squeezing_bound_db(params: NopaParams, freq_hz: float) -> float:
    """Deepest squeezing the model reaches at eta = 1, in dB."""
    sq, _ = _lorentzian_terms(params, freq_hz)
    return 10.0 * np.log10(1.0 - float(sq))


def calibrate_efficiency(params: NopaParams, target_db: float, at_hz: float) -> float:
    """Efficiency that reproduces a target squeezed level at one sideband.

    Inverts the S_sq expression in closed form.  ``target_db`` must be
    nonpositive (a squeezed level relative to the SNL) and no deeper
    than the eta = 1 bound, otherwise an UnachievableTargetError reports
    the bound.
    """
    if not np.isfinite(target_db) or target_db > 0:
        raise ValueError(f"target must be a nonpositive dB value, got {target_db}")
    s_target = 10.0 ** (target_db / 10.0)
    sq, _ = _lorentzian_terms(params, at_hz)
    eta = (1.0 - s_target) / float(sq)
    if eta > 1.0:
        bound = squeezing_bound_db(params, at_hz)
        raise UnachievableTargetError(
            f"target {target_db} dB is below the physical bound {bound:.2f} dB "
            f"at {at_hz / 1e6:.3g} MHz"
        )
    return eta


def epr_covariance_at(params: NopaParams, freq_hz: float) -> GaussianState:
    """Effective two-mode zero-mean Gaussian state at one sideband.

    The state's sum/difference combination variances equal the
    correlation spectra: in deamplify mode Var(X1+X2)/2 = S_sq and
    Var(X1-X2)/2 = S_anti, with the phase combinations mirrored.
    """
    return GaussianState(np.zeros(4), epr_csd(params)(np.atleast_1d(float(freq_hz)))[0])


def _combination_covariance(s_sq_x, s_anti_x, s_sq_y, s_anti_y, operating_mode) -> np.ndarray:
    """Stack 4x4 covariances from per-combination variances (broadcast over bins)."""
    s_sq_x, s_anti_x, s_sq_y, s_anti_y = np.broadcast_arrays(
        np.atleast_1d(s_sq_x), np.atleast_1d(s_anti_x), np.atleast_1d(s_sq_y), np.atleast_1d(s_anti_y)
    )
    ax = (s_sq_x + s_anti_x) / 2.0
    ay = (s_sq_y + s_anti_y) / 2.0
    cx = (s_sq_x - s_anti_x) / 2.0
    cy = (s_anti_y - s_sq_y) / 2.0
    if operating_mode == "amplify":
        cx, cy = -cx, -cy
    n = ax.size
    cov = np.zeros((n, 4, 4))
    cov[:, 0, 0] = cov[:, 2, 2] = ax
    cov[:, 1, 1] = cov[:, 3, 3] = ay
    cov[:, 0, 2] = cov[:, 2, 0] = cx
    cov[:, 1, 3] = cov[:, 3, 1] = cy
    return cov


def epr_csd(params: NopaParams):
    """Cross-spectral-density builder for the Monte Carlo engine.

    Returns a callable mapping a frequency grid (Hz) to an array of
    shape (n, 4, 4): the cross-spectral matrix of (X1, Y1, X2, Y2)
    relative to the SNL at each bin.
    """
    eta_x, eta_y = params.eta_pair()

    def csd(freq_hz: np.ndarray) -> np.ndarray:
        freq = np.abs(np.atleast_1d(np.asarray(freq_hz, dtype=float)))
        sq, anti = _lorentzian_terms(params, freq)
        return _combination_covariance(
            1.0 - eta_x * sq,
            1.0 + eta_x * anti,
            1.0 - eta_y * sq,
            1.0 + eta_y * anti,
            params.operating_mode,
        )

    return csd


def flat_epr_csd(s_sq_x, s_anti_x, s_sq_y, s_anti_y, operating_mode: str = "deamplify"):
    """Frequency-independent source with prescribed combination variances.

    Handy for pure two-mode-squeezed inputs (s_anti = 1 / s_sq) and for
    pinning the single-beam excess noise independently of the cavity
    model.  The implied state must be physical.
    """
    cov = _combination_covariance(s_sq_x, s_anti_x, s_sq_y, s_anti_y, operating_mode)[0]
    GaussianState(np.zeros(4), cov)  # validates physicality

    def csd(freq_hz: np.ndarray) -> np.ndarray:
        n = np.atleast_1d(np.asarray(freq_hz, dtype=float)).size
        return np.broadcast_to(cov, (n, 4, 4)).copy()

    return csd

"""Scalar figures of merit for the dense-coding channel."""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class VariancePair:
    """Correlation variances of the two measured combinations.

    ``v_x`` is Var(X1+X2)/2 and ``v_y`` is Var(Y1-Y2)/2, both relative
    to the shot-noise limit (1 = SNL).
    """

    v_x: float
    v_y: float

    def __post_init__(self):
        if self.v_x <= 0 or self.v_y <= 0:
            raise ValueError("correlation variances must be positive")


def snr_improvement(epr_floor_db: float, snl_floor_db: float) -> float:
    """Gain of the decoded signal-to-noise ratio over the shot-noise case.

    Tone-depth independent: with equal encoded power the SNR difference
    is just the noise-floor difference.
    """
    if not (np.isfinite(epr_floor_db) and np.isfinite(snl_floor_db)):
        raise ValueError("floors must be finite")
    return snl_floor_db - epr_floor_db


def variance_product(pair: VariancePair) -> float:
    """Product of the two correlation variances in absolute units.

    The SNL value of each two-mode combination is 2, so the product is
    (2 v_x)(2 v_y); values below 4 indicate correlations below the SNL
    in both combinations at once.
    """
    return (2.0 * pair.v_x) * (2.0 * pair.v_y)


def teleport_fidelity(pair: VariancePair) -> float:
    """Projected unity-gain coherent-state teleportation fidelity.

    F = 1 / sqrt((1 + v_x)(1 + v_y)); F = 1/2 at the shot-noise point
    is the no-entanglement benchmark.
    """
    return 1.0 / math.sqrt((1.0 + pair.v_x) * (1.0 + pair.v_y))


def channel_information(snr_x_db: float, snr_y_db: float) -> float:
    """Shannon information of the two simultaneously decoded quadratures.

    One half log2(1 + SNR) per quadrature, in bits per symbol.
    Minus-infinite SNRs contribute zero.
    """
    total = 0.0
    for snr_db in (snr_x_db, snr_y_db):
        if snr_db == -np.inf:
            continue
        if not np.isfinite(snr_db):
            raise ValueError("SNRs must be finite or -inf")
        total += 0.5 * math.log2(1.0 + 10.0 ** (snr_db / 10.0))
    return total


def dense_information_at_power(signal_power: float, floor_x: float, floor_y: float) -> float:
    """Dense-channel information at a mean encoded power budget.

    The power splits evenly over the two quadratures; the Bell readout
    halves each tone's power, and the per-channel noise floors are the
    correlation variances relative to the SNL.
    """
    if signal_power < 0:
        raise ValueError("signal power must be nonnegative")
    snr_x = signal_power / (4.0 * floor_x)
    snr_y = signal_power / (4.0 * floor_y)
    return 0.5 * math.log2(1.0 + snr_x) + 0.5 * math.log2(1.0 + snr_y)


def coherent_benchmark_information(signal_power: float) -> float:
    """Single-quadrature coherent-state benchmark at equal signal power.

    All the power modulates one quadrature of a coherent beam read out
    at the shot-noise limit.
    """
    if signal_power < 0:
        raise ValueError("signal power must be nonnegative")
    return 0.5 * math.log2(1.0 + signal_power)

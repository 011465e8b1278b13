"""Deterministic, parallel-safe random substreams.

Every stochastic operation in the package draws from a counter-based
Philox generator keyed by a master seed plus a small integer tuple that
names the purpose of the stream (synthesis chunk, detector channel,
calibration run, ...).  Substreams are statistically independent and the
assignment is stable, so results are bit-identical no matter how work is
distributed over workers.
"""

import numpy as np

# purpose tags for substream keys; fixed forever to keep seeds stable
SYNTH = 0
ELECTRONICS = 1
DETECTOR_LOSS = 2
SNL_RUN = 3
TAP_VACUUM = 4


def substream(seed: int, *key: int) -> np.random.Generator:
    """Return the Philox generator for ``(seed, key)``.

    The same ``(seed, key)`` always yields the same stream, and distinct
    keys yield independent streams.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derived_seed(seed: int, *key: int) -> int:
    """Deterministically derive an independent master seed from ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])

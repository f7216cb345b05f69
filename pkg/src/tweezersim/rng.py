"""Counter-based random substreams for reproducible parallel trials."""

import numpy as np

_MASK64 = (1 << 64) - 1
_MAX_TRIAL = 1 << 48
_MAX_STREAM = 1 << 16


def trial_rng(seed: int, trial_id: int = 0, stream: int = 0) -> np.random.Generator:
    """Return the generator owned by one (seed, trial_id, stream) triple.

    Built on the counter-based Philox engine with the 128-bit key
    ``(seed, stream << 48 | trial_id)``, so every trial consumes its own
    substream: results do not depend on batch layout, execution order, or
    how many other trials run.  Distinct ``stream`` values give a trial
    several independent generators (e.g. trajectory thresholds vs.
    detector thinning).
    """
    if not 0 <= trial_id < _MAX_TRIAL:
        raise ValueError("trial_id must be in [0, 2**48)")
    if not 0 <= stream < _MAX_STREAM:
        raise ValueError("stream must be in [0, 2**16)")
    key = np.array([seed & _MASK64, (stream << 48) | trial_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))

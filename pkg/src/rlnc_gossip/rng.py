"""Counter-based RNG streams.

Each (seed, trial) gets three independent Philox streams — protocol
randomness, flooding coins, and adversary randomness — keyed so results
are identical no matter how trials are distributed across workers.
"""

from __future__ import annotations

import numpy as np

PROTOCOL_STREAM = 0
COIN_STREAM = 1
ADVERSARY_STREAM = 2

_STRIDE = 8  # streams per trial; room to grow without re-keying

ALGORITHM = "philox4x64-10 (numpy)"


def stream_key(seed: int, trial: int, stream: int) -> int:
    if not 0 <= stream < _STRIDE:
        raise ValueError("stream out of range")
    return seed * 2**64 + trial * _STRIDE + stream


def make_stream(seed: int, trial: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=stream_key(seed, trial, stream)))


def trial_streams(seed: int, trial: int):
    """(protocol, coin, adversary) generators for one trial."""
    return (make_stream(seed, trial, PROTOCOL_STREAM),
            make_stream(seed, trial, COIN_STREAM),
            make_stream(seed, trial, ADVERSARY_STREAM))

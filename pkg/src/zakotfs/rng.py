"""Per-frame random streams keyed by (master seed, frame index, stream id)."""

from __future__ import annotations

import numpy as np

# stream ids; fixed so every system draws identical randomness per frame
CHANNEL = 0
DATA = 1
PILOT_NOISE = 2
DATA_NOISE = 3
PLACEMENT = 4


def frame_rng(seed: int, frame: int, stream: int) -> np.random.Generator:
    """Independent generator for one (frame, stream); order of use is irrelevant."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(frame), int(stream)))
    return np.random.default_rng(ss)


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)

"""Counter-based random streams keyed by (seed, stream_id).

Each stream wraps numpy's Philox generator with the 128-bit key built from
the seed and the stream id, so a trial's draws depend only on those two
integers and never on how many other trials ran before it.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def mix(*parts: int) -> int:
    """Hash a tuple of nonnegative integers into one 64-bit stream id."""
    h = 0x6A09E667F3BCC908
    for p in parts:
        h = splitmix64(h ^ (int(p) & MASK64))
    return h


class RngStream:
    """A reproducible stream of draws owned by a single trial."""

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) & MASK64
        self.stream_id = int(stream_id) & MASK64
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def substream(self, *parts: int) -> "RngStream":
        return RngStream(self.seed, mix(self.stream_id, *parts))

    # thin pass-throughs keep call sites short
    def random(self, size=None):
        return self.generator.random(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

    def normal(self, size=None):
        return self.generator.standard_normal(size)


def as_stream(rng, default_seed: int = 0) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    if rng is None:
        return RngStream(default_seed)
    return RngStream(int(rng))

"""Counter-based uniform streams for reproducible, shard-invariant sampling.

Each simulated agent owns one Philox counter block keyed by the seed: block i
yields four uniforms of which the first two are used (period-1 cost and the
conditional period-2 quantile).  ``Philox.advance`` jumps whole blocks, so a
range of draws can be generated on any worker without changing the numbers.
"""

from __future__ import annotations

import numpy as np

#: uniforms consumed per simulated agent (one Philox block yields 4)
PER_DRAW = 2
_BLOCK = 4


def draw_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniforms for draws [start, start + count), shape (count, PER_DRAW)."""
    bitgen = np.random.Philox(key=np.uint64(seed))
    bitgen.advance(start)
    block = np.random.Generator(bitgen).random((count, _BLOCK))
    return block[:, :PER_DRAW]


def chunks(n: int, size: int = 1 << 19):
    """Yield (start, count) covering range(n) in fixed-size blocks."""
    start = 0
    while start < n:
        yield start, min(size, n - start)
        start += size

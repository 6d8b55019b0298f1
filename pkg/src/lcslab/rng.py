"""Counter-based random streams.

Every stochastic routine in the package draws from a Philox generator whose
128-bit key encodes ``(seed, stream, replicate)``.  Distinct replicates are
therefore statistically independent, can be generated in any order or on any
number of workers, and always reproduce bit-identically for a fixed seed.
Draws within one replicate are consumed in a fixed row-major layout with a
constant number of uniforms per path position, so paths of different lengths
generated from the same key share a common prefix.
"""

from __future__ import annotations

import numpy as np

_REP_BITS = 48
_REP_MASK = (1 << _REP_BITS) - 1

# Stream labels.  Each top-level stochastic routine owns one so that e.g. a
# tail experiment and a sandwich experiment run from the same seed do not
# consume overlapping draws.
STREAM_SAMPLE = 1
STREAM_COUPLE = 2
STREAM_MEAN = 3
STREAM_TAIL = 4
STREAM_GRID = 5
STREAM_TEST = 6


def substream(seed: int, stream: int, replicate: int = 0) -> np.random.Generator:
    """Return the generator for one (seed, stream, replicate) cell."""
    if replicate < 0 or replicate > _REP_MASK:
        raise ValueError("replicate index out of range")
    key = np.array(
        [np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
         np.uint64(((stream & 0xFFFF) << _REP_BITS) | replicate)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def uniform_block(seed: int, stream: int, replicate: int, n: int, cols: int) -> np.ndarray:
    """Uniforms of shape (n, cols): row i holds the draws for path position i."""
    return substream(seed, stream, replicate).random((n, cols))

"""Deterministic stream-split random number generation.

All randomness in the package flows through Philox4x64 counter-based
generators keyed by (seed, purpose, replicate).  Two runs with the same
seed produce bit-identical streams regardless of the order in which the
individual streams are consumed, because each (purpose, replicate) pair
owns an independent key rather than a position in a shared sequence.

Generator: numpy Philox (Philox4x64-10), numpy >= 1.24.
Key layout: key[0] = user seed, key[1] = (purpose_id << 32) | replicate.
"""

from __future__ import annotations

import numpy as np

# purpose identifiers; append only, never renumber
GRAPH_SAMPLING = 1
LANCZOS_START = 2
PSI_SAMPLING = 3
BOUND_SWEEP = 4

_MASK64 = (1 << 64) - 1


def stream(seed: int, purpose: int, replicate: int = 0) -> np.random.Generator:
    """Return the generator for one (seed, purpose, replicate) stream."""
    if not 0 <= replicate < (1 << 32):
        raise ValueError(f"replicate out of range: {replicate}")
    key = np.array(
        [int(seed) & _MASK64, ((purpose << 32) | replicate) & _MASK64],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))

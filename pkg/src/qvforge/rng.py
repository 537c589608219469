"""Counter-based random streams.

Every random draw in the toolkit comes from a named substream of a single
root seed, so any stage can be re-run in isolation (or in parallel, in any
order) and produce identical results.  Streams are Philox keyed by the root
seed and a small integer path (purpose, circuit index, layer/shot index).
"""

from __future__ import annotations

import numpy as np

# Purpose tags.  Keep these stable: they are part of the reproducibility
# contract between stages.
GEN_PERM = 1
GEN_SU4 = 2
HEURISTIC = 3
SIM = 4
BOOTSTRAP = 5


def substream(root_seed: int, purpose: int, index: int = 0, sub: int = 0) -> np.random.Generator:
    """Generator for the (purpose, index, sub) substream of ``root_seed``.

    The three path components are packed into the second Philox key word, so
    distinct paths are distinct counters rather than re-seeded states.
    """
    if not 0 <= root_seed < 2**64:
        raise ValueError("root seed must fit in 64 bits")
    if not 0 <= purpose < 2**8:
        raise ValueError("purpose tag out of range")
    if not 0 <= index < 2**32:
        raise ValueError("stream index out of range")
    if not 0 <= sub < 2**24:
        raise ValueError("stream sub-index out of range")
    key = (purpose << 56) | (index << 24) | sub
    return np.random.Generator(np.random.Philox(key=[root_seed, key]))

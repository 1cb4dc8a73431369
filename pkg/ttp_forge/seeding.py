"""Seed derivation helpers.

Every stochastic routine takes a single integer seed. Independent streams
(runs, trials, instances) are derived from a root seed and a key path with
numpy's SeedSequence, so results do not depend on execution order.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int | None) -> np.random.Generator:
    """Create a Generator for a seed (None draws fresh OS entropy)."""
    return np.random.default_rng(seed)


def derive_seed(seed: int, *keys: int) -> int:
    """Derive a child seed from a root seed and a path of integer keys.

    Args:
        seed: Root seed
        *keys: Non-negative integers identifying the child stream

    Returns:
        A 63-bit non-negative integer seed
    """
    sequence = np.random.SeedSequence([seed, *keys])
    state = sequence.generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])


def spawn_seeds(seed: int, count: int) -> list[int]:
    """Derive `count` independent seeds from one root seed."""
    return [derive_seed(seed, index) for index in range(count)]

"""DALex parent selection.

Each selection event draws an importance score per training case from
N(0, sigma), turns the scores into case weights with a softmax and picks
the individual with the lowest weighted error. Large sigma concentrates the
weight on few cases (lexicase-like); sigma = 0 weighs all cases equally.
"""

from __future__ import annotations

import numpy as np
from scipy.special import softmax


# Selection events per matrix product, bounds the weight matrix size.
_BATCH = 256


def _check(errors: np.ndarray, sigma: float) -> None:
    if errors.ndim != 2 or errors.shape[0] == 0 or errors.shape[1] == 0:
        raise ValueError(f"Error matrix must be non-empty and 2-D (got shape {errors.shape})")
    if sigma < 0:
        raise ValueError(f"Sigma must be non-negative (got {sigma})")


def dalex_select(errors: np.ndarray, sigma: float, rng: np.random.Generator) -> int:
    """Select one individual from an (individuals x cases) error matrix.

    Ties go to the lower index.
    """
    errors = np.asarray(errors, dtype=np.float64)
    _check(errors, sigma)
    weights = softmax(rng.normal(0.0, sigma, size=errors.shape[1]))
    return int(np.argmin(errors @ weights))


def dalex_select_many(
    errors: np.ndarray, count: int, sigma: float, rng: np.random.Generator
) -> np.ndarray:
    """`count` independent DALex selections, computed in batches."""
    errors = np.asarray(errors, dtype=np.float64)
    _check(errors, sigma)
    chosen = np.empty(count, dtype=np.int64)
    for start in range(0, count, _BATCH):
        size = min(_BATCH, count - start)
        weights = softmax(rng.normal(0.0, sigma, size=(size, errors.shape[1])), axis=1)
        chosen[start : start + size] = np.argmin(errors @ weights.T, axis=0)
    return chosen

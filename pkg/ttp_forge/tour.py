"""Tour construction and 2-opt local search.

Nearest-neighbor construction followed by first-improvement 2-opt gives
desk-scale tours that stand in for chained Lin-Kernighan.

Example usage:
    from ttp_forge.tour import reference_tour

    tour = reference_tour(instance)
    tour.order[0]  # always 1
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
import logging

import numpy as np

from ttp_forge.config import DISTANCE_MATRIX_MAX_CITIES, TWO_OPT_MAX_PASSES
from ttp_forge.instance import TtpInstance, distance, distance_matrix, distance_row, round_distances
from ttp_forge.seeding import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tour:
    """A closed tour anchored at city 1.

    Attributes:
        order: Permutation of 1..n with order[0] == 1
        total_length: Length of the closed tour including the return leg
    """

    order: tuple[int, ...]
    total_length: int

    @classmethod
    def from_order(cls, instance: TtpInstance, order: Sequence[int]) -> Tour:
        """Validate a city order and compute its length.

        Raises:
            ValueError: If order is not a permutation of 1..n starting at 1
        """
        order = tuple(int(city) for city in order)
        if sorted(order) != list(range(1, instance.n + 1)):
            raise ValueError(f"Tour must be a permutation of 1..{instance.n}")
        if order[0] != 1:
            raise ValueError(f"Tour must start at city 1 (starts at {order[0]})")
        return cls(order=order, total_length=int(leg_lengths(instance, order).sum()))

    @property
    def n(self) -> int:
        return len(self.order)


def leg_lengths(instance: TtpInstance, order: Sequence[int]) -> np.ndarray:
    """Length of each leg order[i] -> order[i+1], the last leg returning to order[0]."""
    idx = np.asarray(order, dtype=np.int64) - 1
    points = instance.coords_array[idx]
    deltas = points - np.roll(points, -1, axis=0)
    return round_distances(np.sqrt((deltas**2).sum(axis=1)), instance.edge_weight_kind)


def _rotate_to_city_one(order: list[int]) -> list[int]:
    pivot = order.index(1)
    return order[pivot:] + order[:pivot]


def nearest_neighbor_tour(instance: TtpInstance, start: int | None = 1, seed: int | None = None) -> Tour:
    """Greedy nearest-unvisited construction.

    Ties go to the lower city index. The result is rotated so it starts
    at city 1.

    Args:
        instance: Problem instance
        start: First city to visit; None picks one at random from `seed`
        seed: Only used when start is None
    """
    n = instance.n
    if start is None:
        start = int(make_rng(seed).integers(1, n, endpoint=True))
    if not 1 <= start <= n:
        raise ValueError(f"Start city {start} outside 1..{n}")

    visited = np.zeros(n, dtype=bool)
    current = start
    visited[current - 1] = True
    order = [current]
    for _ in range(n - 1):
        row = distance_row(instance, current).astype(np.float64)
        row[visited] = np.inf
        # argmin returns the first minimum, i.e. the lowest city index
        current = int(np.argmin(row)) + 1
        visited[current - 1] = True
        order.append(current)

    return Tour.from_order(instance, _rotate_to_city_one(order))


def two_opt_improve(instance: TtpInstance, tour: Tour, max_passes: int = TWO_OPT_MAX_PASSES) -> Tour:
    """First-improvement 2-opt.

    Scans (i, j) with i ascending then j ascending and applies the first
    improving reversal of order[i..j]. City 1 stays at position 0.

    Args:
        instance: Problem instance
        tour: Starting tour
        max_passes: Maximum number of full scans

    Returns:
        A tour no longer than the input
    """
    n = instance.n
    if n < 4:
        return tour

    matrix = distance_matrix(instance) if n <= DISTANCE_MATRIX_MAX_CITIES else None

    def d(a: int, b: int) -> int:
        if matrix is not None:
            return int(matrix[a - 1, b - 1])
        return distance(instance, a, b)

    order = list(tour.order)
    passes = 0
    improved = True
    while improved and passes < max_passes:
        improved = False
        passes += 1
        for i in range(1, n - 1):
            a, b = order[i - 1], order[i]
            for j in range(i + 1, n):
                c, e = order[j], order[(j + 1) % n]
                delta = d(a, c) + d(b, e) - d(a, b) - d(c, e)
                if delta < 0:
                    order[i : j + 1] = order[i : j + 1][::-1]
                    b = order[i]
                    improved = True

    if improved:
        logger.debug("2-opt stopped after %d passes with improving moves left", passes)
    return Tour.from_order(instance, order)


def reference_tour(instance: TtpInstance, max_passes: int = TWO_OPT_MAX_PASSES) -> Tour:
    """Nearest neighbor from city 1 polished by 2-opt."""
    return two_opt_improve(instance, nearest_neighbor_tour(instance), max_passes)

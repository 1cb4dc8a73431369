"""Knapsack oracles.

Exact dynamic programming for small instances and a profit-density greedy
for large ones. Both are used to calibrate renting ratios and as ground
truth in tests.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
import logging

import numpy as np

from ttp_forge.config import DP_WORK_BUDGET
from ttp_forge.errors import CapacityError
from ttp_forge.instance import Item

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KpSolution:
    """A feasible 0-1 knapsack selection.

    Attributes:
        picked: Ids of the selected items
        total_profit: Sum of selected profits
        total_weight: Sum of selected weights
    """

    picked: frozenset[int]
    total_profit: int
    total_weight: int

    @classmethod
    def from_items(cls, items: Sequence[Item]) -> KpSolution:
        return cls(
            picked=frozenset(item.id for item in items),
            total_profit=sum(item.profit for item in items),
            total_weight=sum(item.weight for item in items),
        )


def kp_dp_optimal(items: Sequence[Item], capacity: int, work_budget: int = DP_WORK_BUDGET) -> KpSolution:
    """Solve the 0-1 knapsack exactly with a DP table over capacity.

    Items are only taken when strictly better than skipping them, so
    co-optimal ties resolve towards leaving items out.

    Args:
        items: Candidate items
        capacity: Knapsack capacity W
        work_budget: Maximum number of DP cell updates

    Returns:
        A profit-maximal solution

    Raises:
        ValueError: If capacity is negative
        CapacityError: If len(items) * (W + 1) exceeds work_budget
    """
    if capacity < 0:
        raise ValueError(f"Capacity must be non-negative (got {capacity})")
    if capacity == 0 or not items:
        return KpSolution(frozenset(), 0, 0)
    work = len(items) * (capacity + 1)
    if work > work_budget:
        raise CapacityError(
            f"DP needs {work} cell updates (budget {work_budget}); use kp_greedy instead"
        )

    best = np.zeros(capacity + 1, dtype=np.int64)
    taken = np.zeros((len(items), capacity + 1), dtype=bool)
    for row, item in enumerate(items):
        w = item.weight
        if w > capacity:
            continue
        candidate = best[: capacity + 1 - w] + item.profit
        improves = candidate > best[w:]
        taken[row, w:] = improves
        best[w:] = np.where(improves, candidate, best[w:])

    picked = []
    remaining = capacity
    for row in range(len(items) - 1, -1, -1):
        if taken[row, remaining]:
            picked.append(items[row])
            remaining -= items[row].weight
    return KpSolution.from_items(picked)


def kp_greedy(items: Sequence[Item], capacity: int) -> KpSolution:
    """Pack items by descending profit density while they fit.

    Ties are broken by lower weight, then lower id.
    """
    if capacity < 0:
        raise ValueError(f"Capacity must be non-negative (got {capacity})")
    ordered = sorted(items, key=lambda item: (-item.profit / item.weight, item.weight, item.id))
    picked = []
    load = 0
    for item in ordered:
        if load + item.weight <= capacity:
            picked.append(item)
            load += item.weight
    return KpSolution.from_items(picked)


def solve_kp(items: Sequence[Item], capacity: int, work_budget: int = DP_WORK_BUDGET) -> KpSolution:
    """Exact DP when affordable, greedy otherwise."""
    try:
        return kp_dp_optimal(items, capacity, work_budget)
    except CapacityError as e:
        logger.info("Falling back to greedy knapsack: %s", e)
        return kp_greedy(items, capacity)

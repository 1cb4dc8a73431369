"""Benchmark-style instance generation.

Items are placed at every city except city 1, weights and profits are
sampled according to the knapsack type, the capacity is a fraction C/11 of
the total item weight and the renting ratio is calibrated so that the
near-optimal knapsack packing carried along the reference tour has an
objective of about zero.

Example usage:
    from ttp_forge.instance_generation import generate_instance

    instance = generate_instance(coords, item_factor=3, kp_type=KpType.UNCORR,
                                 capacity_factor=5, seed=42, base_name="eil51")
"""

from __future__ import annotations

from collections.abc import Sequence
import dataclasses
import logging

import numpy as np

from ttp_forge.config import (
    CAPACITY_DIVISOR,
    CAPACITY_FACTORS,
    ITEM_FACTORS,
    SIMILAR_WEIGHT_RANGE,
    STRONGLY_CORR_PROFIT_OFFSET,
    STRONGLY_CORR_WEIGHT_RANGE,
    UNCORR_PROFIT_RANGE,
    UNCORR_WEIGHT_RANGE,
)
from ttp_forge.enums import EdgeWeightKind, KpType
from ttp_forge.instance import Item, TtpInstance
from ttp_forge.knapsack import solve_kp
from ttp_forge.objective import PackingPlan, tour_time
from ttp_forge.seeding import make_rng
from ttp_forge.tour import Tour, reference_tour

logger = logging.getLogger(__name__)


def instance_name(base_name: str, item_count: int, kp_type: KpType, capacity_factor: int) -> str:
    """Benchmark naming convention, e.g. eil51_n150_uncorr_05."""
    return f"{base_name}_n{item_count}_{kp_type.slug}_{capacity_factor:02d}"


def sample_items(
    rng: np.random.Generator, cities: int, item_factor: int, kp_type: KpType
) -> tuple[Item, ...]:
    """Sample F items for each city 2..n, city-major, ids in placement order.

    Uniform sampling is inclusive on both endpoints.
    """
    count = item_factor * (cities - 1)
    if kp_type is KpType.UNCORR:
        weights = rng.integers(*UNCORR_WEIGHT_RANGE, size=count, endpoint=True)
        profits = rng.integers(*UNCORR_PROFIT_RANGE, size=count, endpoint=True)
    elif kp_type is KpType.UNCORR_SIMILAR_WEIGHTS:
        weights = rng.integers(*SIMILAR_WEIGHT_RANGE, size=count, endpoint=True)
        profits = rng.integers(*UNCORR_PROFIT_RANGE, size=count, endpoint=True)
    else:
        weights = rng.integers(*STRONGLY_CORR_WEIGHT_RANGE, size=count, endpoint=True)
        profits = weights + STRONGLY_CORR_PROFIT_OFFSET

    city_of = np.repeat(np.arange(2, cities + 1), item_factor)
    return tuple(
        Item(id=index + 1, city=int(city_of[index]), weight=int(weights[index]), profit=int(profits[index]))
        for index in range(count)
    )


def capacity_for(items: Sequence[Item], capacity_factor: int) -> int:
    """W = floor(C / 11 * sum w), in exact integer arithmetic."""
    return (capacity_factor * sum(item.weight for item in items)) // CAPACITY_DIVISOR


def calibrate_renting_ratio(instance: TtpInstance, tour: Tour) -> float:
    """R = P* / T*, the knapsack optimum over its travel time along `tour`.

    Returns 0 when either the profit or the time is zero.
    """
    solution = solve_kp(instance.items, instance.capacity)
    if solution.total_profit == 0:
        return 0.0
    plan = PackingPlan.from_indices(instance, (item_id - 1 for item_id in solution.picked))
    time = tour_time(instance, tour, plan)
    if time <= 0:
        return 0.0
    return solution.total_profit / time


def generate_instance(
    coords: Sequence[tuple[float, float]],
    item_factor: int,
    kp_type: KpType,
    capacity_factor: int,
    tour: Tour | None = None,
    seed: int | None = None,
    base_name: str = "instance",
    edge_weight_kind: EdgeWeightKind = EdgeWeightKind.CEIL_2D,
) -> TtpInstance:
    """Generate one benchmark-style instance.

    Args:
        coords: City coordinates in node order
        item_factor: Items per city F, one of 1, 3, 5, 10
        kp_type: Knapsack type
        capacity_factor: Capacity factor C in 1..10
        tour: Tour used for renting-ratio calibration (reference tour if None)
        seed: Random seed; identical arguments give identical instances
        base_name: Prefix of the generated instance name
        edge_weight_kind: Distance rounding rule

    Returns:
        The generated instance

    Raises:
        ValueError: If F or C is outside the benchmark sets
    """
    if item_factor not in ITEM_FACTORS:
        raise ValueError(f"Invalid item factor: {item_factor}. Valid options: {', '.join(map(str, ITEM_FACTORS))}")
    if capacity_factor not in CAPACITY_FACTORS:
        raise ValueError(f"Invalid capacity factor: {capacity_factor}. Valid options: 1..{CAPACITY_FACTORS[-1]}")
    if len(coords) < 2:
        raise ValueError(f"Instance needs at least 2 cities (got {len(coords)})")

    rng = make_rng(seed)
    items = sample_items(rng, len(coords), item_factor, kp_type)
    draft = TtpInstance(
        name=instance_name(base_name, len(items), kp_type, capacity_factor),
        coords=tuple((float(x), float(y)) for x, y in coords),
        items=items,
        capacity=capacity_for(items, capacity_factor),
        renting_ratio=0.0,
        edge_weight_kind=edge_weight_kind,
        kp_type=kp_type,
    )
    if tour is None:
        tour = reference_tour(draft)
    elif tour.n != draft.n:
        raise ValueError(f"Tour visits {tour.n} cities; coordinates define {draft.n}")

    renting_ratio = calibrate_renting_ratio(draft, tour)
    logger.debug("Generated %s with W=%d, R=%.6g", draft.name, draft.capacity, renting_ratio)
    return dataclasses.replace(draft, renting_ratio=renting_ratio)

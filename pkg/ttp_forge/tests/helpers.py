"""Shared builders and oracles for the test suite."""

from __future__ import annotations

import itertools
import math

import numpy as np

from ttp_forge.enums import FeatureSet, KpType
from ttp_forge.instance import Item, TtpInstance
from ttp_forge.parameter_model import ParameterCurve, ParameterModel
from ttp_forge.tour import Tour


def random_instance(
    seed: int,
    n: int = 6,
    items_per_city: int = 1,
    capacity_fraction: float = 0.5,
    renting_ratio: float | None = None,
    kp_type: KpType | None = KpType.UNCORR,
) -> TtpInstance:
    """Small random instance with integer coordinates, weights and profits."""
    rng = np.random.default_rng(seed)
    coords = tuple((float(x), float(y)) for x, y in rng.integers(0, 100, size=(n, 2)))
    items = []
    for city in range(2, n + 1):
        for _ in range(items_per_city):
            items.append(
                Item(
                    id=len(items) + 1,
                    city=city,
                    weight=int(rng.integers(1, 50)),
                    profit=int(rng.integers(1, 80)),
                )
            )
    total = sum(item.weight for item in items)
    return TtpInstance(
        name=f"random{seed}",
        coords=coords,
        items=tuple(items),
        capacity=max(1, int(capacity_fraction * total)),
        renting_ratio=float(rng.uniform(0.1, 2.0)) if renting_ratio is None else renting_ratio,
        kp_type=kp_type,
    )


def identity_tour(instance: TtpInstance) -> Tour:
    return Tour.from_order(instance, list(range(1, instance.n + 1)))


def naive_objective(instance: TtpInstance, order: list[int], bits: list[int]) -> float:
    """Direct evaluation of profit minus rent times travel time, one leg at a time."""
    v_max, v_min, capacity = instance.v_max, instance.v_min, instance.capacity
    nu = (v_max - v_min) / capacity if capacity else 0.0
    profit = 0
    load = 0
    time = 0.0
    for position, city in enumerate(order):
        for index, item in enumerate(instance.items):
            if item.city == city and bits[index]:
                load += item.weight
                profit += item.profit
        nxt = order[(position + 1) % len(order)]
        (x1, y1), (x2, y2) = instance.coords[city - 1], instance.coords[nxt - 1]
        leg = math.ceil(math.hypot(x1 - x2, y1 - y2))
        time += leg / max(v_max - nu * load, v_min)
    return profit - instance.renting_ratio * time


def feasible_plans(instance: TtpInstance):
    """Every bit vector within capacity."""
    weights = [item.weight for item in instance.items]
    for bits in itertools.product((0, 1), repeat=instance.m_total):
        if sum(w for w, b in zip(weights, bits) if b) <= instance.capacity:
            yield list(bits)


def exhaustive_best(instance: TtpInstance, order: list[int]) -> float:
    return max(naive_objective(instance, order, bits) for bits in feasible_plans(instance))


def exhaustive_kp(items: list[Item], capacity: int) -> int:
    best = 0
    for bits in itertools.product((0, 1), repeat=len(items)):
        weight = sum(item.weight for item, b in zip(items, bits) if b)
        if weight <= capacity:
            best = max(best, sum(item.profit for item, b in zip(items, bits) if b))
    return best


def exhaustive_tour_length(instance: TtpInstance) -> int:
    """Shortest closed CEIL_2D tour from city 1 over every permutation of the others."""
    n = instance.n
    legs = [
        [math.ceil(math.hypot(x1 - x2, y1 - y2)) for x2, y2 in instance.coords] for x1, y1 in instance.coords
    ]
    return min(
        sum(legs[order[k]][order[(k + 1) % n]] for k in range(n))
        for order in ((0, *rest) for rest in itertools.permutations(range(1, n)))
    )


def fixture_model() -> ParameterModel:
    """Linear curves on every cell: IPR-heavy weights, a fill fraction rising with C."""
    model = ParameterModel()
    for feature_set in FeatureSet:
        for kp_type in KpType:
            for param in feature_set.parameter_names:
                if param == "percent":
                    curve = ParameterCurve.linear(0.3, 0.06)
                else:
                    curve = ParameterCurve.linear({"w0": 1.0, "w1": -0.5}.get(param, 0.1), 0.0)
                model.set(feature_set, kp_type, param, curve)
    return model

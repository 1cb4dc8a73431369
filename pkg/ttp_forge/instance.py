"""TTP instance representation.

A TtpInstance holds the cities, the items placed at every city but the
first, the knapsack capacity W, the renting ratio R and the speed bounds.
Cities are 1-indexed throughout the public API; items are addressed by
their position in `items` (equal to `Item.id - 1`).

Example usage:
    from ttp_forge.instance import TtpInstance, distance

    instance = TtpInstance.from_coordinates("square", [(0, 0), (3, 4)])
    distance(instance, 1, 2)  # 5
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

from ttp_forge.config import CAPACITY_DIVISOR, CAPACITY_FACTORS, DEFAULT_V_MAX, DEFAULT_V_MIN
from ttp_forge.enums import EdgeWeightKind, KpType


@dataclass(frozen=True)
class Item:
    """An item available at one city.

    Attributes:
        id: Stable 1-based ordinal
        city: City index in 2..n
        weight: Positive integer weight
        profit: Positive integer profit
    """

    id: int
    city: int
    weight: int
    profit: int

    def __post_init__(self) -> None:
        if self.weight < 1 or self.profit < 1:
            raise ValueError(
                f"Item {self.id}: weight and profit must be >= 1 "
                f"(got w={self.weight}, p={self.profit})"
            )


@dataclass(frozen=True)
class TtpInstance:
    """An immutable TTP instance.

    Attributes:
        name: Instance name
        coords: (x, y) per city, in node order
        items: Items in file order
        capacity: Knapsack capacity W
        renting_ratio: Cost R per time unit
        v_max: Maximum (empty knapsack) speed
        v_min: Minimum (full knapsack) speed
        edge_weight_kind: Distance rounding rule
        kp_type: Knapsack category, when known
    """

    name: str
    coords: tuple[tuple[float, float], ...]
    items: tuple[Item, ...]
    capacity: int
    renting_ratio: float
    v_max: float = DEFAULT_V_MAX
    v_min: float = DEFAULT_V_MIN
    edge_weight_kind: EdgeWeightKind = EdgeWeightKind.CEIL_2D
    kp_type: KpType | None = field(default=None)

    def __post_init__(self) -> None:
        n = len(self.coords)
        if n < 2:
            raise ValueError(f"Instance needs at least 2 cities (got {n})")
        if not self.v_max > self.v_min > 0:
            raise ValueError(f"Speeds must satisfy v_max > v_min > 0 (got {self.v_max}, {self.v_min})")
        if self.capacity < 0:
            raise ValueError(f"Capacity must be non-negative (got {self.capacity})")
        if self.renting_ratio < 0:
            raise ValueError(f"Renting ratio must be non-negative (got {self.renting_ratio})")
        for item in self.items:
            if not 2 <= item.city <= n:
                raise ValueError(f"Item {item.id} is assigned to city {item.city}; valid cities are 2..{n}")

    @classmethod
    def from_coordinates(
        cls,
        name: str,
        coords: Sequence[tuple[float, float]],
        edge_weight_kind: EdgeWeightKind = EdgeWeightKind.CEIL_2D,
    ) -> TtpInstance:
        """Build an item-less instance, useful for tour construction."""
        return cls(
            name=name,
            coords=tuple((float(x), float(y)) for x, y in coords),
            items=(),
            capacity=0,
            renting_ratio=0.0,
            edge_weight_kind=edge_weight_kind,
        )

    @property
    def n(self) -> int:
        """Number of cities."""
        return len(self.coords)

    @property
    def m_total(self) -> int:
        """Number of items."""
        return len(self.items)

    @cached_property
    def coords_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=np.float64).reshape(self.n, 2)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.fromiter((item.weight for item in self.items), dtype=np.int64, count=self.m_total)

    @cached_property
    def profits(self) -> np.ndarray:
        return np.fromiter((item.profit for item in self.items), dtype=np.int64, count=self.m_total)

    @cached_property
    def item_cities(self) -> np.ndarray:
        """1-based city index per item."""
        return np.fromiter((item.city for item in self.items), dtype=np.int64, count=self.m_total)

    @cached_property
    def total_item_weight(self) -> int:
        return int(self.weights.sum())

    @property
    def nu(self) -> float:
        """Speed lost per unit of carried weight (0 for a zero-capacity knapsack)."""
        if self.capacity == 0:
            return 0.0
        return (self.v_max - self.v_min) / self.capacity

    @property
    def item_factor(self) -> float:
        """Items per city, excluding city 1."""
        return self.m_total / (self.n - 1)

    @property
    def capacity_factor(self) -> int:
        """Capacity factor C recovered from W = floor(C / 11 * sum w), clamped to 1..10."""
        if self.total_item_weight == 0:
            return CAPACITY_FACTORS[0]
        estimate = round(CAPACITY_DIVISOR * self.capacity / self.total_item_weight)
        return min(max(estimate, CAPACITY_FACTORS[0]), CAPACITY_FACTORS[-1])

    def distance(self, i: int, j: int) -> int:
        """Rounded Euclidean distance between 1-based cities i and j."""
        return distance(self, i, j)


def round_distance(raw: float, kind: EdgeWeightKind) -> int:
    """Apply an edge-weight rounding rule to a Euclidean length."""
    if kind is EdgeWeightKind.CEIL_2D:
        return math.ceil(raw)
    return int(raw + 0.5)


def round_distances(raw: np.ndarray, kind: EdgeWeightKind) -> np.ndarray:
    """Vectorized `round_distance`, returning int64."""
    if kind is EdgeWeightKind.CEIL_2D:
        return np.ceil(raw).astype(np.int64)
    return np.floor(raw + 0.5).astype(np.int64)


def distance(instance: TtpInstance, i: int, j: int) -> int:
    """Distance d(i, j) between 1-based cities.

    Raises:
        ValueError: If either index is outside 1..n
    """
    n = instance.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"City index out of range: ({i}, {j}); valid cities are 1..{n}")
    if i == j:
        return 0
    xi, yi = instance.coords[i - 1]
    xj, yj = instance.coords[j - 1]
    return round_distance(math.sqrt((xi - xj) ** 2 + (yi - yj) ** 2), instance.edge_weight_kind)


def distance_row(instance: TtpInstance, i: int) -> np.ndarray:
    """Distances from 1-based city i to every city, indexed by city - 1."""
    deltas = instance.coords_array - instance.coords_array[i - 1]
    return round_distances(np.sqrt((deltas**2).sum(axis=1)), instance.edge_weight_kind)


def distance_matrix(instance: TtpInstance) -> np.ndarray:
    """Full n x n distance matrix indexed by city - 1."""
    points = instance.coords_array
    deltas = points[:, None, :] - points[None, :, :]
    return round_distances(np.sqrt((deltas**2).sum(axis=2)), instance.edge_weight_kind)


def instance_descriptors(instance: TtpInstance) -> tuple[float, ...]:
    """The eight instance features x0..x7 used for parameter regression.

    Returns:
        (cities, items, renting ratio, capacity, item factor, v_max, v_min,
        capacity factor)
    """
    return (
        float(instance.n),
        float(instance.m_total),
        float(instance.renting_ratio),
        float(instance.capacity),
        float(instance.item_factor),
        float(instance.v_max),
        float(instance.v_min),
        float(instance.capacity_factor),
    )

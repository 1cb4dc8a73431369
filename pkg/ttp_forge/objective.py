"""TTP objective evaluation.

The objective of a packing plan along a tour is the collected profit minus
R times the travel time, where the thief slows down linearly with the
carried weight. Every full evaluation is charged to an EvalCounter, the
cost metric used when comparing heuristics.

Example usage:
    from ttp_forge.objective import EvalCounter, PackingPlan, evaluate

    counter = EvalCounter()
    value = evaluate(instance, tour, PackingPlan.empty(instance), counter)
    counter.count  # 1
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ttp_forge.errors import CapacityError
from ttp_forge.instance import TtpInstance
from ttp_forge.tour import Tour, leg_lengths


@dataclass
class EvalCounter:
    """Counts full objective evaluations.

    Each worker owns its counter; harness code merges them by summation.

    Attributes:
        count: Number of evaluations recorded so far
    """

    count: int = 0

    def record(self, evaluations: int = 1) -> None:
        if evaluations < 0:
            raise ValueError(f"Evaluation count must be non-negative (got {evaluations})")
        self.count += evaluations

    def merge(self, other: EvalCounter) -> None:
        """Add another counter's evaluations to this one."""
        self.count += other.count

    @classmethod
    def total(cls, counters: Iterable[EvalCounter]) -> EvalCounter:
        return cls(count=sum(counter.count for counter in counters))

    def to_dict(self) -> dict:
        return {"count": self.count}

    @classmethod
    def from_dict(cls, data: dict) -> EvalCounter:
        return cls(count=int(data.get("count", 0)))


@dataclass
class PackingPlan:
    """Packed/unpacked bit per item, indexed by item position.

    Attributes:
        bits: Boolean array of length m_total
        total_weight: Cached sum of packed weights
    """

    bits: np.ndarray
    total_weight: int = 0

    @classmethod
    def empty(cls, instance: TtpInstance) -> PackingPlan:
        return cls(bits=np.zeros(instance.m_total, dtype=bool), total_weight=0)

    @classmethod
    def from_bits(cls, instance: TtpInstance, bits: Iterable[bool] | np.ndarray) -> PackingPlan:
        """Build a plan from a bit vector.

        Raises:
            ValueError: If the length differs from m_total
            CapacityError: If the packed weight exceeds W
        """
        array = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=bool)
        if array.shape != (instance.m_total,):
            raise ValueError(f"Plan has {array.size} bits; instance has {instance.m_total} items")
        weight = int(instance.weights[array].sum())
        if weight > instance.capacity:
            raise CapacityError(f"Plan weight {weight} exceeds capacity {instance.capacity}")
        return cls(bits=array.copy(), total_weight=weight)

    @classmethod
    def from_indices(cls, instance: TtpInstance, indices: Iterable[int]) -> PackingPlan:
        """Build a plan packing the given 0-based item positions."""
        bits = np.zeros(instance.m_total, dtype=bool)
        bits[list(indices)] = True
        return cls.from_bits(instance, bits)

    def pack(self, instance: TtpInstance, index: int) -> None:
        """Pack one item in place.

        Raises:
            CapacityError: If the item does not fit
        """
        if self.bits[index]:
            return
        weight = int(instance.weights[index])
        if self.total_weight + weight > instance.capacity:
            raise CapacityError(
                f"Item {index + 1} (w={weight}) does not fit: load {self.total_weight}/{instance.capacity}"
            )
        self.bits[index] = True
        self.total_weight += weight

    def unpack(self, instance: TtpInstance, index: int) -> None:
        if self.bits[index]:
            self.bits[index] = False
            self.total_weight -= int(instance.weights[index])

    def fits(self, instance: TtpInstance, index: int) -> bool:
        """Whether packing item `index` keeps the plan within capacity."""
        return bool(self.bits[index]) or self.total_weight + int(instance.weights[index]) <= instance.capacity

    def copy(self) -> PackingPlan:
        return PackingPlan(bits=self.bits.copy(), total_weight=self.total_weight)

    def packed_indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    @property
    def packed_count(self) -> int:
        return int(self.bits.sum())

    def to_text(self) -> str:
        """Whitespace-separated 0/1 bits, the plan file format."""
        return " ".join("1" if bit else "0" for bit in self.bits)


@dataclass(frozen=True)
class TourProfile:
    """Per-tour quantities reused across many plan evaluations.

    Attributes:
        instance: Problem instance
        tour: Tour the profile was built for
        legs: legs[i] = d(c_i, c_i+1), the last entry closing the tour
        item_position: 0-based tour position of each item's city
        rdist: Remaining distance from each item's city back to city 1
    """

    instance: TtpInstance
    tour: Tour
    legs: np.ndarray = field(repr=False)
    item_position: np.ndarray = field(repr=False)
    rdist: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, instance: TtpInstance, tour: Tour) -> TourProfile:
        if tour.n != instance.n:
            raise ValueError(f"Tour visits {tour.n} cities; instance has {instance.n}")
        legs = leg_lengths(instance, tour.order).astype(np.float64)
        position_of_city = np.empty(instance.n, dtype=np.int64)
        position_of_city[np.asarray(tour.order, dtype=np.int64) - 1] = np.arange(instance.n)
        item_position = position_of_city[instance.item_cities - 1]
        # distance still to travel from position i, including the return leg
        remaining = np.cumsum(legs[::-1])[::-1]
        return cls(
            instance=instance,
            tour=tour,
            legs=legs,
            item_position=item_position,
            rdist=remaining[item_position],
        )

    @cached_property
    def speed_loss(self) -> float:
        return self.instance.nu

    def _check(self, plan: PackingPlan) -> None:
        if plan.bits.shape != (self.instance.m_total,):
            raise ValueError(f"Plan has {plan.bits.size} bits; instance has {self.instance.m_total} items")
        # from the bits: a directly constructed plan may carry a stale total_weight
        weight = int(self.instance.weights[plan.bits].sum())
        if weight > self.instance.capacity:
            raise CapacityError(f"Plan weight {weight} exceeds capacity {self.instance.capacity}")

    def tour_time(self, plan: PackingPlan) -> float:
        """Travel time of the tour carrying `plan` (not counted as an evaluation)."""
        self._check(plan)
        return self._time(plan.bits)

    def _time(self, bits: np.ndarray) -> float:
        instance = self.instance
        picked_weights = np.where(bits, instance.weights, 0)
        load_at = np.bincount(self.item_position, weights=picked_weights, minlength=instance.n)
        carried = np.cumsum(load_at)
        speeds = np.maximum(instance.v_max - self.speed_loss * carried, instance.v_min)
        return float((self.legs / speeds).sum())

    def profit(self, plan: PackingPlan) -> int:
        return int(self.instance.profits[plan.bits].sum())

    def evaluate(self, plan: PackingPlan, counter: EvalCounter | None = None) -> float:
        """Objective value of `plan`, charged to `counter`.

        Raises:
            CapacityError: If the plan exceeds W (counter untouched)
        """
        self._check(plan)
        value = self.profit(plan) - self.instance.renting_ratio * self._time(plan.bits)
        if counter is not None:
            counter.record()
        return value


def evaluate(
    instance: TtpInstance, tour: Tour, plan: PackingPlan, counter: EvalCounter | None = None
) -> float:
    """Objective value of `plan` along `tour`; see TourProfile.evaluate."""
    return TourProfile.build(instance, tour).evaluate(plan, counter)


def tour_time(instance: TtpInstance, tour: Tour, plan: PackingPlan) -> float:
    """Travel time term of the objective: evaluate == profit - R * tour_time."""
    return TourProfile.build(instance, tour).tour_time(plan)

"""Reference packing initializers: packIterative and Insertion.

packIterative ranks items by p^a / (w^a rDist) and packs them in batches,
halving the batch whenever the objective drops; the exponent a is tuned by
a golden-section search. Insertion ranks items by three approximations of
the objective change of packing them and adds items while the true
objective improves.
"""

from __future__ import annotations

from dataclasses import dataclass
import logging
import math

import numpy as np

from ttp_forge.config import (
    PACK_ITERATIVE_ALPHA_HI,
    PACK_ITERATIVE_ALPHA_ITERS,
    PACK_ITERATIVE_ALPHA_LO,
    PACK_ITERATIVE_BATCH_FRACTION,
)
from ttp_forge.evolution import score_order
from ttp_forge.instance import TtpInstance
from ttp_forge.objective import EvalCounter, PackingPlan, TourProfile
from ttp_forge.tour import Tour

logger = logging.getLogger(__name__)

_INVERSE_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PackIterativeConfig:
    """Settings of packIterative.

    Attributes:
        alpha_lo: Lower bound of the exponent search
        alpha_hi: Upper bound of the exponent search
        alpha_iters: Number of exponents tried
        batch_fraction: Initial batch size as a fraction of the item count
    """

    alpha_lo: float = PACK_ITERATIVE_ALPHA_LO
    alpha_hi: float = PACK_ITERATIVE_ALPHA_HI
    alpha_iters: int = PACK_ITERATIVE_ALPHA_ITERS
    batch_fraction: float = PACK_ITERATIVE_BATCH_FRACTION

    def __post_init__(self) -> None:
        if not self.alpha_lo < self.alpha_hi:
            raise ValueError(f"alpha_lo must be below alpha_hi (got {self.alpha_lo}, {self.alpha_hi})")
        if self.alpha_iters < 1:
            raise ValueError(f"alpha_iters must be at least 1 (got {self.alpha_iters})")
        if not 0.0 < self.batch_fraction <= 1.0:
            raise ValueError(f"batch_fraction must lie in (0, 1] (got {self.batch_fraction})")


@dataclass
class BaselineResult:
    """Plan produced by a baseline.

    Attributes:
        plan: Best plan
        objective: Its objective
        detail: Winning variant ("alpha=..." or the insertion score name)
    """

    plan: PackingPlan
    objective: float
    detail: str = ""


def pack_iterative_scores(profile: TourProfile, alpha: float) -> np.ndarray:
    """log(p^a / (w^a rDist)); items with zero rDist score +inf."""
    instance = profile.instance
    with np.errstate(divide="ignore"):
        return alpha * (np.log(instance.profits) - np.log(instance.weights)) - np.log(profile.rdist.astype(np.float64))


def _pack_in_batches(profile: TourProfile, order: np.ndarray, batch_fraction: float, counter: EvalCounter) -> BaselineResult:
    instance = profile.instance
    m = instance.m_total
    plan = PackingPlan.empty(instance)
    value = profile.evaluate(plan, counter)
    step = max(1, math.ceil(batch_fraction * m))
    position = 0
    while position < m:
        batch = []
        for index in order[position : position + step]:
            if plan.fits(instance, int(index)):
                plan.pack(instance, int(index))
                batch.append(int(index))
        if not batch:
            position += step
            continue
        candidate = profile.evaluate(plan, counter)
        if candidate > value:
            value = candidate
            position += step
            continue
        for index in batch:
            plan.unpack(instance, index)
        if step == 1:
            break
        step = max(1, step // 2)
    return BaselineResult(plan, value)


def pack_iterative(
    instance: TtpInstance,
    tour: Tour,
    config: PackIterativeConfig | None = None,
    counter: EvalCounter | None = None,
    profile: TourProfile | None = None,
) -> BaselineResult:
    """packIterative with a golden-section search over the exponent.

    Every inner evaluation, including the empty-plan baseline of each tried exponent, is
    charged to the counter.
    """
    config = config if config is not None else PackIterativeConfig()
    counter = counter if counter is not None else EvalCounter()
    if profile is None:
        profile = TourProfile.build(instance, tour)

    best: BaselineResult | None = None

    def try_alpha(alpha: float) -> float:
        nonlocal best
        order = score_order(pack_iterative_scores(profile, alpha))
        result = _pack_in_batches(profile, order, config.batch_fraction, counter)
        result.detail = f"alpha={alpha:.4f}"
        if best is None or result.objective > best.objective:
            best = result
        return result.objective

    low, high = config.alpha_lo, config.alpha_hi
    if config.alpha_iters == 1:
        try_alpha((low + high) / 2.0)
    else:
        inner_low = high - _INVERSE_PHI * (high - low)
        inner_high = low + _INVERSE_PHI * (high - low)
        value_low, value_high = try_alpha(inner_low), try_alpha(inner_high)
        for _ in range(config.alpha_iters - 2):
            if value_low >= value_high:
                high, inner_high, value_high = inner_high, inner_low, value_low
                inner_low = high - _INVERSE_PHI * (high - low)
                value_low = try_alpha(inner_low)
            else:
                low, inner_low, value_low = inner_low, inner_high, value_high
                inner_high = low + _INVERSE_PHI * (high - low)
                value_high = try_alpha(inner_high)

    assert best is not None
    logger.debug("packIterative on %s: %.6g (%s)", instance.name, best.objective, best.detail)
    return best


def insertion_scores(profile: TourProfile) -> dict[str, np.ndarray]:
    """The three approximations of the objective change of packing each item.

    Returns:
        Mapping from score name ("single", "full", "spread") to per-item values
    """
    instance = profile.instance
    p = instance.profits.astype(np.float64)
    w = instance.weights.astype(np.float64)
    rdist = profile.rdist.astype(np.float64)
    rent = instance.renting_ratio
    v_max, v_min, nu, capacity = instance.v_max, instance.v_min, instance.nu, instance.capacity

    def speed(load: np.ndarray) -> np.ndarray:
        return np.maximum(v_max - nu * load, v_min)

    total_length = float(profile.legs.sum())
    spread_load = capacity * (1.0 - rdist / total_length) if total_length > 0 else np.zeros_like(rdist)
    return {
        "single": p - rent * rdist * (1.0 / speed(w) - 1.0 / v_max),
        "full": p - rent * rdist * (1.0 / v_min - 1.0 / speed(capacity - w)),
        "spread": p - rent * rdist * (1.0 / speed(spread_load + w) - 1.0 / speed(spread_load)),
    }


def insertion(
    instance: TtpInstance,
    tour: Tour,
    counter: EvalCounter | None = None,
    profile: TourProfile | None = None,
) -> BaselineResult:
    """Insertion: best of three score orderings.

    For each ordering, items are packed in descending score while the true
    objective improves; items that do not fit are skipped without an
    evaluation and the first non-improving item ends the ordering. The
    empty plan is evaluated once and shared.
    """
    counter = counter if counter is not None else EvalCounter()
    if profile is None:
        profile = TourProfile.build(instance, tour)

    empty = PackingPlan.empty(instance)
    empty_value = profile.evaluate(empty, counter)
    best = BaselineResult(empty, empty_value, "none")

    for name, scores in insertion_scores(profile).items():
        plan = PackingPlan.empty(instance)
        value = empty_value
        for index in score_order(scores):
            index = int(index)
            if not plan.fits(instance, index):
                continue
            plan.pack(instance, index)
            candidate = profile.evaluate(plan, counter)
            if candidate > value:
                value = candidate
            else:
                plan.unpack(instance, index)
                break
        if value > best.objective:
            best = BaselineResult(plan, value, name)

    logger.debug("Insertion on %s: %.6g (%s)", instance.name, best.objective, best.detail)
    return best

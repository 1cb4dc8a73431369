"""Learned packing-initialization heuristics (3T, 4T, 5TA, 5TB, 6T).

A parameter model predicts a genotype from the instance's capacity factor.
Items are ranked by the genotype's score function, packed up to p-hat W,
and a bidirectional doubling search over the prefix cutoff finds the best
plan of that ranking. A short (1+1) EA then perturbs the weights while a
running estimate p-hat replaces the evolved percent term.

Example usage:
    from ttp_forge.heuristics import run_heuristic

    result = run_heuristic(instance, tour, FeatureSet.T6, model, seed=3)
    result.objective, result.evaluations
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
import logging

import numpy as np

from ttp_forge.config import (
    DOUBLING_GROWTH,
    DOUBLING_INITIAL_STEP,
    DOUBLING_SHRINK,
    HEURISTIC_GENERATIONS,
    HEURISTIC_WEIGHT_SIGMA,
    P_ESTIMATE_DEVIATION,
)
from ttp_forge.enums import FeatureSet
from ttp_forge.evolution import Genotype, normalize_weights, score_order
from ttp_forge.features import compute_features, feature_matrix
from ttp_forge.instance import TtpInstance
from ttp_forge.objective import EvalCounter, PackingPlan, TourProfile
from ttp_forge.parameter_model import ParameterModel, predict_genotype
from ttp_forge.seeding import make_rng
from ttp_forge.tour import Tour

logger = logging.getLogger(__name__)


class CutoffPlans:
    """Nested plans obtained by walking a ranking and cutting it at k items.

    Item j of the ranking is included when it still fits under W given the
    items included before it, so every cutoff yields a feasible plan and
    plans grow with k.
    """

    def __init__(self, instance: TtpInstance, order: Sequence[int] | np.ndarray):
        self.instance = instance
        self.order = np.asarray(order, dtype=np.int64)
        weights = instance.weights[self.order]
        included = np.zeros(self.order.size, dtype=bool)
        load = 0
        for position, weight in enumerate(weights):
            if load + int(weight) <= instance.capacity:
                included[position] = True
                load += int(weight)
        self.included = included
        self.loads = np.concatenate(([0], np.cumsum(np.where(included, weights, 0))))

    def __len__(self) -> int:
        return int(self.order.size)

    def plan(self, cutoff: int) -> PackingPlan:
        bits = np.zeros(self.instance.m_total, dtype=bool)
        head = self.order[:cutoff]
        bits[head[self.included[:cutoff]]] = True
        return PackingPlan(bits=bits, total_weight=int(self.loads[cutoff]))


def longest_fitting_prefix(instance: TtpInstance, order: Sequence[int] | np.ndarray, limit: float) -> int:
    """Largest k such that the first k ranked items weigh at most `limit`."""
    loads = np.cumsum(instance.weights[np.asarray(order, dtype=np.int64)])
    return int(np.searchsorted(loads, limit, side="right"))


@dataclass
class DoublingResult:
    """Best cutoff found by doubling_search.

    Attributes:
        plan: Best plan
        objective: Its objective
        cutoff: Number of ranked items considered by the best plan
        visited: Every evaluated cutoff, in evaluation order
    """

    plan: PackingPlan
    objective: float
    cutoff: int
    visited: list[int] = field(default_factory=list)


def doubling_search(
    profile: TourProfile,
    order: Sequence[int] | np.ndarray | CutoffPlans,
    start_count: int,
    counter: EvalCounter | None = None,
    refine: bool = True,
) -> DoublingResult:
    """Search the ranking cutoff in both directions from start_count.

    Each direction starts at start_count with step 1. An improving candidate is
    accepted and doubles the step; a failing candidate shrinks the step by a
    factor of 8 (to at least 1), and a failure at step 1 ends the direction.
    Forward is searched before backward. Every candidate costs one evaluation.

    Doubling can stop on the slope of a peak it jumped over. With `refine`,
    a unit-step climb from the best cutoff follows; it crosses plateaus, stops
    at the first drop and reuses cutoffs already evaluated. On objective
    curves that rise and then fall, the refined result is the best cutoff.

    Args:
        profile: Evaluation profile of the instance and tour
        order: Item positions by descending score, or prebuilt cutoff plans
        start_count: Initial cutoff, clamped to 0..m
        counter: Evaluation counter
        refine: Finish with the unit-step climb

    Returns:
        The best cutoff seen, never worse than the start
    """
    cutoffs = order if isinstance(order, CutoffPlans) else CutoffPlans(profile.instance, order)
    m = len(cutoffs)
    start = min(max(start_count, 0), m)
    visited = [start]
    start_plan = cutoffs.plan(start)
    start_value = profile.evaluate(start_plan, counter)
    best = DoublingResult(start_plan, start_value, start, visited)
    values = {start: start_value}

    for direction in (1, -1):
        current, current_value = start, start_value
        step = DOUBLING_INITIAL_STEP
        while True:
            candidate = current + direction * step
            if 0 <= candidate <= m:
                plan = cutoffs.plan(candidate)
                value = profile.evaluate(plan, counter)
                visited.append(candidate)
                values[candidate] = value
                if value > current_value:
                    current, current_value = candidate, value
                    step *= DOUBLING_GROWTH
                    if value > best.objective:
                        best = DoublingResult(plan, value, candidate, visited)
                    continue
            if step == 1:
                break
            step = max(1, step // DOUBLING_SHRINK)

    if refine:
        best = _climb_unit_steps(profile, cutoffs, best, values, counter)
    return best


def _climb_unit_steps(
    profile: TourProfile,
    cutoffs: CutoffPlans,
    best: DoublingResult,
    values: dict[int, float],
    counter: EvalCounter | None,
) -> DoublingResult:
    m = len(cutoffs)
    for direction in (1, -1):
        current, current_value = best.cutoff, best.objective
        while 0 <= current + direction <= m:
            neighbour = current + direction
            value = values.get(neighbour)
            if value is None:
                value = profile.evaluate(cutoffs.plan(neighbour), counter)
                values[neighbour] = value
                best.visited.append(neighbour)
            if value < current_value:
                break
            current, current_value = neighbour, value
            if value > best.objective:
                best = DoublingResult(cutoffs.plan(neighbour), value, neighbour, best.visited)
    return best


def update_p_estimate(
    p_hat: float, p_sample: float, relative: bool = True, deviation: float = P_ESTIMATE_DEVIATION
) -> float:
    """Running estimate of the best knapsack fill fraction.

    A sample deviating from the estimate by more than 10% (of the estimate
    when `relative`, absolute otherwise) is averaged in; a closer sample
    replaces the estimate.
    """
    threshold = deviation * p_hat if relative else deviation
    if abs(p_sample - p_hat) > threshold:
        return (p_sample + p_hat) / 2.0
    return p_sample


@dataclass
class HeuristicResult:
    """Outcome of one heuristic run.

    Attributes:
        plan: Best plan
        objective: Its objective
        evaluations: Objective evaluations consumed by the run
        genotype: Normalized weights of the best individual and final p-hat
    """

    plan: PackingPlan
    objective: float
    evaluations: int
    genotype: Genotype


def run_heuristic(
    instance: TtpInstance,
    tour: Tour,
    feature_set: FeatureSet,
    model: ParameterModel,
    generations: int = HEURISTIC_GENERATIONS,
    seed: int | None = None,
    counter: EvalCounter | None = None,
    include_rejected: bool = True,
    relative_deviation: bool = True,
) -> HeuristicResult:
    """Run one learned heuristic on an instance.

    Args:
        instance: Problem instance (its kp_type selects the model curves)
        tour: Fixed tour
        feature_set: Score-function basis
        model: Parameter model
        generations: (1+1) EA generations after the predicted genotype
        seed: Random seed
        counter: Evaluation counter shared with the caller
        include_rejected: Let rejected offspring update p-hat
        relative_deviation: Measure p-hat deviation relative to p-hat

    Returns:
        Best plan, objective and the evaluations consumed
    """
    if generations < 0:
        raise ValueError(f"Generations must be non-negative (got {generations})")
    counter = counter if counter is not None else EvalCounter()
    first_count = counter.count
    rng = make_rng(seed)

    predicted = predict_genotype(model, feature_set, instance.kp_type, instance.capacity_factor)
    profile = TourProfile.build(instance, tour)
    basis = feature_matrix(compute_features(instance, tour, profile), feature_set)
    p_hat = predicted.percent

    def fill_fraction(plan: PackingPlan) -> float:
        return plan.total_weight / instance.capacity if instance.capacity > 0 else 0.0

    def assess(weights: np.ndarray) -> DoublingResult:
        order = score_order(basis @ weights)
        start_count = longest_fitting_prefix(instance, order, p_hat * instance.capacity)
        return doubling_search(profile, order, start_count, counter)

    best_weights = predicted.weight_array
    best = assess(best_weights)
    p_hat = update_p_estimate(p_hat, fill_fraction(best.plan), relative_deviation)

    for _ in range(generations):
        weights = best_weights + rng.normal(0.0, HEURISTIC_WEIGHT_SIGMA, size=feature_set.arity)
        result = assess(weights)
        improved = result.objective > best.objective
        if improved or include_rejected:
            p_hat = update_p_estimate(p_hat, fill_fraction(result.plan), relative_deviation)
        if improved:
            best, best_weights = result, weights

    genotype = Genotype(tuple(float(w) for w in best_weights), float(np.clip(p_hat, 0.0, 1.0)), feature_set)
    if np.any(best_weights):
        genotype = normalize_weights(genotype)
    evaluations = counter.count - first_count
    logger.debug(
        "%s on %s: objective %.6g after %d evaluations", feature_set.name, instance.name, best.objective, evaluations
    )
    return HeuristicResult(plan=best.plan, objective=best.objective, evaluations=evaluations, genotype=genotype)

"""(1+1) evolutionary loops.

packing_ea hill-climbs a bitstring packing plan from the empty plan; its
near-optimal plans are the raw material of the boundary analysis.
meta_ea instead evolves a score-function genotype [w0..wk, p]: items are
ranked by their score and collected greedily up to a weight of p * W.

Example usage:
    from ttp_forge.evolution import meta_ea

    result = meta_ea(instance, tour, FeatureSet.T4, generations=1000, seed=7)
    result.genotype.weights
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging

import numpy as np

from ttp_forge.config import META_INITIAL_PERCENT, META_PERCENT_SIGMA, META_RUNS, META_WEIGHT_SIGMA
from ttp_forge.enums import FeatureSet
from ttp_forge.errors import DegenerateGenotypeError
from ttp_forge.features import ItemFeatureTable, compute_features, feature_matrix
from ttp_forge.instance import TtpInstance
from ttp_forge.objective import EvalCounter, PackingPlan, TourProfile
from ttp_forge.seeding import make_rng, spawn_seeds
from ttp_forge.tour import Tour

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Genotype:
    """Score-function weights plus the percent term.

    Attributes:
        weights: One weight per basis term of feature_set
        percent: Fraction of W to fill, in [0, 1]
        feature_set: Basis the weights refer to
    """

    weights: tuple[float, ...]
    percent: float
    feature_set: FeatureSet

    def __post_init__(self) -> None:
        if len(self.weights) != self.feature_set.arity:
            raise ValueError(
                f"{self.feature_set.name} needs {self.feature_set.arity} weights (got {len(self.weights)})"
            )
        if not 0.0 <= self.percent <= 1.0:
            raise ValueError(f"Percent must lie in [0, 1] (got {self.percent})")

    @classmethod
    def zero(cls, feature_set: FeatureSet, percent: float = META_INITIAL_PERCENT) -> Genotype:
        return cls(weights=(0.0,) * feature_set.arity, percent=percent, feature_set=feature_set)

    @property
    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)

    def values(self) -> tuple[float, ...]:
        """Genotype as a flat [w0..wk, p] vector."""
        return (*self.weights, self.percent)


def normalize_weights(genotype: Genotype) -> Genotype:
    """Scale weights to unit Euclidean norm; percent is untouched.

    Raises:
        DegenerateGenotypeError: If every weight is zero
    """
    norm = float(np.linalg.norm(genotype.weight_array))
    if norm == 0.0:
        raise DegenerateGenotypeError("Cannot normalize an all-zero weight vector")
    return Genotype(
        weights=tuple(float(w) for w in genotype.weight_array / norm),
        percent=genotype.percent,
        feature_set=genotype.feature_set,
    )


def score_items(features: ItemFeatureTable | np.ndarray, genotype: Genotype) -> np.ndarray:
    """Per-item dot product of the weights with the basis terms.

    Args:
        features: A feature table, or a precomputed (m, arity) basis matrix
        genotype: Weights to apply

    Raises:
        ValueError: If the weights do not match the basis arity
    """
    if isinstance(features, ItemFeatureTable):
        matrix = feature_matrix(features, genotype.feature_set)
    else:
        matrix = features
    if matrix.shape[1] != len(genotype.weights):
        raise ValueError(
            f"Genotype has {len(genotype.weights)} weights; features have {matrix.shape[1]} terms"
        )
    return matrix @ genotype.weight_array


def score_order(scores: np.ndarray) -> np.ndarray:
    """Item positions by descending score, lower position first on ties."""
    return np.argsort(-scores, kind="stable")


def pack_by_percent(instance: TtpInstance, scores: np.ndarray, percent: float) -> PackingPlan:
    """Collect items by descending score while they fit under min(pW, W).

    An item that would overflow the threshold is skipped and later items are
    still considered.
    """
    if not 0.0 <= percent <= 1.0:
        raise ValueError(f"Percent must lie in [0, 1] (got {percent})")
    threshold = min(percent * instance.capacity, instance.capacity)
    plan = PackingPlan.empty(instance)
    weights = instance.weights
    load = 0
    for index in score_order(scores):
        weight = int(weights[index])
        if load + weight <= threshold:
            plan.bits[index] = True
            load += weight
    plan.total_weight = load
    return plan


@dataclass
class PackingEaResult:
    plan: PackingPlan
    objective: float


@dataclass
class MetaEaResult:
    """Best genotype found by meta_ea and its packing."""

    genotype: Genotype
    objective: float
    plan: PackingPlan = field(repr=False)


def _flip_mask(rng: np.random.Generator, m: int) -> np.ndarray:
    rate = 1.0 / m
    while True:
        mask = rng.random(m) < rate
        if mask.any():
            return mask


def packing_ea(
    instance: TtpInstance,
    tour: Tour,
    generations: int,
    seed: int | None = None,
    counter: EvalCounter | None = None,
    profile: TourProfile | None = None,
) -> PackingEaResult:
    """(1+1) EA over packing bitstrings, starting from the empty plan.

    Each offspring flips every bit with probability 1/m (resampled until at
    least one bit flips). Offspring over capacity are discarded without an
    evaluation; the rest cost one evaluation and replace the parent only
    when strictly better.
    """
    if generations < 0:
        raise ValueError(f"Generations must be non-negative (got {generations})")
    if profile is None:
        profile = TourProfile.build(instance, tour)
    counter = counter if counter is not None else EvalCounter()
    rng = make_rng(seed)

    parent = PackingPlan.empty(instance)
    best = profile.evaluate(parent)
    m = instance.m_total
    if m == 0:
        return PackingEaResult(parent, best)

    weights = instance.weights
    for _ in range(generations):
        mask = _flip_mask(rng, m)
        flipped = weights[mask]
        delta = int(flipped[~parent.bits[mask]].sum()) - int(flipped[parent.bits[mask]].sum())
        weight = parent.total_weight + delta
        if weight > instance.capacity:
            continue
        child = PackingPlan(bits=parent.bits ^ mask, total_weight=weight)
        value = profile.evaluate(child, counter)
        if value > best:
            parent, best = child, value

    return PackingEaResult(parent, best)


def meta_ea(
    instance: TtpInstance,
    tour: Tour,
    feature_set: FeatureSet,
    generations: int,
    seed: int | None = None,
    counter: EvalCounter | None = None,
    profile: TourProfile | None = None,
    features: ItemFeatureTable | None = None,
) -> MetaEaResult:
    """(1+1) EA over score-function genotypes.

    Starts from zero weights with p = 0.5. Every generation adds N(0, 1)
    noise to each weight and N(0, 0.1) to p (clamped to [0, 1]). The
    offspring is scored, packed by percent and evaluated; it replaces the
    parent on strict improvement. The returned weights are normalized
    unless no nonzero genotype was ever accepted.
    """
    if generations < 0:
        raise ValueError(f"Generations must be non-negative (got {generations})")
    if profile is None:
        profile = TourProfile.build(instance, tour)
    if features is None:
        features = compute_features(instance, tour, profile)
    counter = counter if counter is not None else EvalCounter()
    rng = make_rng(seed)
    basis = feature_matrix(features, feature_set)

    parent = Genotype.zero(feature_set)
    parent_plan = pack_by_percent(instance, score_items(basis, parent), parent.percent)
    best = profile.evaluate(parent_plan, counter)

    for _ in range(generations):
        weights = parent.weight_array + rng.normal(0.0, META_WEIGHT_SIGMA, size=feature_set.arity)
        percent = float(np.clip(parent.percent + rng.normal(0.0, META_PERCENT_SIGMA), 0.0, 1.0))
        child = Genotype(tuple(float(w) for w in weights), percent, feature_set)
        plan = pack_by_percent(instance, score_items(basis, child), child.percent)
        value = profile.evaluate(plan, counter)
        if value > best:
            parent, parent_plan, best = child, plan, value

    try:
        parent = normalize_weights(parent)
    except DegenerateGenotypeError:
        logger.debug("meta_ea kept the zero genotype on %s", instance.name)
    return MetaEaResult(genotype=parent, objective=best, plan=parent_plan)


def best_meta_genotype(
    instance: TtpInstance,
    tour: Tour,
    feature_set: FeatureSet,
    generations: int,
    runs: int = META_RUNS,
    seed: int | None = None,
    counter: EvalCounter | None = None,
) -> MetaEaResult:
    """Best of `runs` independent meta_ea runs; the first run wins ties."""
    if runs < 1:
        raise ValueError(f"Runs must be at least 1 (got {runs})")
    profile = TourProfile.build(instance, tour)
    features = compute_features(instance, tour, profile)
    seeds = spawn_seeds(seed if seed is not None else 0, runs)
    best: MetaEaResult | None = None
    for run_seed in seeds:
        result = meta_ea(instance, tour, feature_set, generations, run_seed, counter, profile, features)
        if best is None or result.objective > best.objective:
            best = result
    assert best is not None
    return best

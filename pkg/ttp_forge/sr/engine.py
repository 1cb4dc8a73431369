"""Genetic-programming symbolic regression loop.

A generational GP with DALex parent selection, gplearn-style operators
(subtree crossover, subtree, hoist and point mutation, reproduction) and
elitism of one. Classification runs also keep a pareto front of their
best-of-generation individuals; regression runs keep the best individual
under each program-length cap.

Example usage:
    from ttp_forge.sr.engine import SrConfig, evolve

    result = evolve(dataset, SrConfig(population=200, generations=50, seed=1))
    result.best.to_prefix()
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
import logging

import numpy as np

from ttp_forge.config import (
    DALEX_SIGMA,
    PARETO_LENGTH_CAPS,
    SR_CONST_RANGE,
    SR_GENERATIONS,
    SR_INIT_DEPTH,
    SR_MAX_DEPTH,
    SR_P_CROSSOVER,
    SR_P_HOIST_MUTATION,
    SR_P_POINT_MUTATION,
    SR_P_POINT_REPLACE,
    SR_P_SUBTREE_MUTATION,
    SR_POPULATION,
)
from ttp_forge.enums import SrTask
from ttp_forge.seeding import make_rng
from ttp_forge.sr.expr import (
    POLYNOMIAL_FUNCTION_SET,
    REGRESSION_FUNCTION_SET,
    ExprTree,
    build_program,
    resolve_function_set,
)
from ttp_forge.sr.fitness import SrDataset, case_errors
from ttp_forge.sr.pareto import ParetoEntry, offer_expression
from ttp_forge.sr.selection import dalex_select_many

logger = logging.getLogger(__name__)


@dataclass
class SrConfig:
    """Settings for one GP run.

    Attributes:
        population: Individuals per generation
        generations: Generations including the initial one
        function_set: Primitive names; None picks by task
        max_depth: Offspring deeper than this are replaced by their parent
        init_depth: Depth range for ramped half-and-half initialization
        const_range: Ephemeral constant range, or None for no constants
        p_crossover: Probability of subtree crossover
        p_subtree_mutation: Probability of subtree mutation
        p_hoist_mutation: Probability of hoist mutation
        p_point_mutation: Probability of point mutation
        p_point_replace: Per-node replacement rate of point mutation
        sigma: DALex importance-score spread
        length_caps: Program-length caps for the length-capped elites
        seed: Random seed
    """

    population: int = SR_POPULATION
    generations: int = SR_GENERATIONS
    function_set: tuple[str, ...] | None = None
    max_depth: int = SR_MAX_DEPTH
    init_depth: tuple[int, int] = SR_INIT_DEPTH
    const_range: tuple[float, float] | None = SR_CONST_RANGE
    p_crossover: float = SR_P_CROSSOVER
    p_subtree_mutation: float = SR_P_SUBTREE_MUTATION
    p_hoist_mutation: float = SR_P_HOIST_MUTATION
    p_point_mutation: float = SR_P_POINT_MUTATION
    p_point_replace: float = SR_P_POINT_REPLACE
    sigma: float = DALEX_SIGMA
    length_caps: tuple[int, ...] = PARETO_LENGTH_CAPS
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.population < 1:
            raise ValueError(f"Population must be at least 1 (got {self.population})")
        if self.generations < 1:
            raise ValueError(f"Generations must be at least 1 (got {self.generations})")
        low, high = self.init_depth
        if not 1 <= low <= high:
            raise ValueError(f"Invalid init depth range: {self.init_depth}")
        if self.max_depth < 1:
            raise ValueError(f"Max depth must be at least 1 (got {self.max_depth})")
        probabilities = (self.p_crossover, self.p_subtree_mutation, self.p_hoist_mutation, self.p_point_mutation)
        if any(p < 0 for p in probabilities) or sum(probabilities) > 1.0 + 1e-9:
            raise ValueError(f"Operator probabilities must be non-negative and sum to at most 1: {probabilities}")
        if self.sigma < 0:
            raise ValueError(f"Sigma must be non-negative (got {self.sigma})")

    def functions_for(self, task: SrTask) -> tuple[str, ...]:
        """Configured primitives, defaulting to polynomial ones for classification."""
        if self.function_set is not None:
            return self.function_set
        return POLYNOMIAL_FUNCTION_SET if task is SrTask.BINARY_BCE else REGRESSION_FUNCTION_SET


@dataclass
class LengthCappedBest:
    cap: int
    expr: ExprTree
    loss: float


@dataclass
class SrRunResult:
    """Outcome of one GP run.

    Attributes:
        best: Lowest-loss individual seen in any generation
        best_loss: Its loss
        front: Pareto front of best-of-generation individuals
        length_bests: Best individual shorter than each cap (caps never met are absent)
        history: Best loss per generation
    """

    best: ExprTree
    best_loss: float
    front: list[ParetoEntry] = field(default_factory=list)
    length_bests: dict[int, LengthCappedBest] = field(default_factory=dict)
    history: list[float] = field(default_factory=list)


def _error_matrix(population: list[ExprTree], dataset: SrDataset) -> np.ndarray:
    return np.vstack([case_errors(individual, dataset) for individual in population])


def evolve(dataset: SrDataset, config: SrConfig | None = None, track_front: bool | None = None) -> SrRunResult:
    """Run symbolic regression on a dataset.

    Args:
        dataset: Training cases
        config: Run settings
        track_front: Keep a pareto front; defaults to True for classification

    Returns:
        The best expression, pareto front and length-capped elites
    """
    config = config if config is not None else SrConfig()
    if track_front is None:
        track_front = dataset.task is SrTask.BINARY_BCE
    rng = make_rng(config.seed)
    functions = resolve_function_set(config.functions_for(dataset.task))
    n_features = dataset.n_features
    operator_edges = np.cumsum(
        [config.p_crossover, config.p_subtree_mutation, config.p_hoist_mutation, config.p_point_mutation]
    )

    population = [
        ExprTree(
            build_program(rng, functions, n_features, config.init_depth, const_range=config.const_range),
            n_features,
        )
        for _ in range(config.population)
    ]

    result: SrRunResult | None = None
    front: list[ParetoEntry] = []
    length_bests: dict[int, LengthCappedBest] = {}
    history: list[float] = []
    last_offered: ExprTree | None = None

    for generation in range(config.generations):
        errors = _error_matrix(population, dataset)
        losses = errors.mean(axis=1)
        champion = int(np.argmin(losses))
        champion_loss = float(losses[champion])
        history.append(champion_loss)

        if result is None or champion_loss < result.best_loss:
            result = SrRunResult(best=population[champion], best_loss=champion_loss)
        # the elite survives unchanged, so only expand new champions
        if track_front and population[champion] is not last_offered:
            front = offer_expression(front, population[champion], champion_loss)
            last_offered = population[champion]
        lengths = np.array([individual.length for individual in population])
        for cap in config.length_caps:
            eligible = np.flatnonzero(lengths < cap)
            if eligible.size == 0:
                continue
            index = int(eligible[np.argmin(losses[eligible])])
            incumbent = length_bests.get(cap)
            if incumbent is None or losses[index] < incumbent.loss:
                length_bests[cap] = LengthCappedBest(cap, population[index], float(losses[index]))

        if generation + 1 == config.generations:
            break

        parents = dalex_select_many(errors, 2 * config.population, config.sigma, rng)
        offspring = [population[champion]]
        for slot in range(1, config.population):
            parent = population[parents[2 * slot]]
            draw = rng.uniform()
            if draw < operator_edges[0]:
                donor = population[parents[2 * slot + 1]]
                program = parent.crossover(donor.program, rng)
            elif draw < operator_edges[1]:
                program = parent.subtree_mutation(rng, functions, config.const_range, config.init_depth)
            elif draw < operator_edges[2]:
                program = parent.hoist_mutation(rng)
            elif draw < operator_edges[3]:
                program = parent.point_mutation(rng, functions, config.p_point_replace, config.const_range)
            else:
                offspring.append(parent)
                continue
            child = ExprTree(program, n_features)
            offspring.append(child if child.depth <= config.max_depth else parent)
        population = offspring

    assert result is not None
    result.front = front
    result.length_bests = length_bests
    result.history = history
    logger.debug(
        "SR run finished: loss %.6g, %d front entries, expr %s",
        result.best_loss,
        len(front),
        result.best.to_prefix(),
    )
    return result


def independent_runs(dataset: SrDataset, config: SrConfig, seeds: list[int], track_front: bool | None = None) -> list[SrRunResult]:
    """Independent runs of `evolve`, one per seed."""
    runs = []
    for seed in seeds:
        runs.append(evolve(dataset, dataclasses.replace(config, seed=seed), track_front))
    return runs

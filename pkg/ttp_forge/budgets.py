"""
Compute budgets for the analysis pipeline and comparisons.

Three presets trade fidelity for run time: `smoke` finishes in seconds and
is meant for tests and CI, `desk` reproduces the experiments at a scale a
workstation handles in hours, and `full` uses full-scale run lengths.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ttp_forge.config import (
    COMPARE_TRIALS,
    HEURISTIC_GENERATIONS,
    META_RUNS,
    REGRESSION_RUNS,
    SR_GENERATIONS,
    SR_POPULATION,
    SR_RUNS,
)


class BudgetLevel(Enum):
    """Available budget presets."""

    SMOKE = "smoke"
    DESK = "desk"
    FULL = "full"


@dataclass(frozen=True)
class BudgetSettings:
    """
    Run lengths for one budget level.

    Attributes:
        name: Display name
        description: Short description of the intended use
        packing_generations: Generations of each packing EA run (ea-data)
        meta_generations: Generations of each meta EA run (meta-data)
        meta_runs: Independent meta EA runs per instance and feature set
        nlbc_population: GP population for boundary classification
        nlbc_generations: GP generations for boundary classification
        nlbc_runs: Independent classification runs per instance
        nlbc_max_cases: Cap on training items per classification run (0 = all)
        regression_population: GP population for parameter regression
        regression_generations: GP generations for parameter regression
        regression_runs: Independent regression runs per parameter
        fit_method: Curve fitting method of the parameter model
        heuristic_generations: (1+1) EA generations of the learned heuristics
        trials: Comparison trials per instance and heuristic
    """

    name: str
    description: str
    packing_generations: int
    meta_generations: int
    meta_runs: int
    nlbc_population: int
    nlbc_generations: int
    nlbc_runs: int
    nlbc_max_cases: int
    regression_population: int
    regression_generations: int
    regression_runs: int
    fit_method: str
    heuristic_generations: int
    trials: int


BUDGET_CONFIGS: dict[BudgetLevel, BudgetSettings] = {
    BudgetLevel.SMOKE: BudgetSettings(
        name="Smoke",
        description="Seconds-long runs for tests and CI",
        packing_generations=200,
        meta_generations=50,
        meta_runs=2,
        nlbc_population=60,
        nlbc_generations=8,
        nlbc_runs=1,
        nlbc_max_cases=200,
        regression_population=60,
        regression_generations=8,
        regression_runs=2,
        fit_method="linear",
        heuristic_generations=5,
        trials=3,
    ),
    BudgetLevel.DESK: BudgetSettings(
        name="Desk",
        description="Scaled-down experiments for a single workstation",
        packing_generations=10**4,
        meta_generations=10**3,
        meta_runs=META_RUNS,
        nlbc_population=SR_POPULATION,
        nlbc_generations=SR_GENERATIONS,
        nlbc_runs=SR_RUNS,
        nlbc_max_cases=2000,
        regression_population=SR_POPULATION,
        regression_generations=SR_GENERATIONS,
        regression_runs=SR_RUNS,
        fit_method="sr",
        heuristic_generations=HEURISTIC_GENERATIONS,
        trials=COMPARE_TRIALS,
    ),
    BudgetLevel.FULL: BudgetSettings(
        name="Full",
        description="Full-scale run lengths; expect days of compute",
        packing_generations=10**6,
        meta_generations=10**5,
        meta_runs=META_RUNS,
        nlbc_population=SR_POPULATION,
        nlbc_generations=SR_GENERATIONS,
        nlbc_runs=SR_RUNS,
        nlbc_max_cases=0,
        regression_population=SR_POPULATION,
        regression_generations=SR_GENERATIONS,
        regression_runs=REGRESSION_RUNS,
        fit_method="sr",
        heuristic_generations=HEURISTIC_GENERATIONS,
        trials=COMPARE_TRIALS,
    ),
}


def get_budget_settings(level: BudgetLevel) -> BudgetSettings:
    """
    Get the settings for a budget level.

    Example:
        >>> get_budget_settings(BudgetLevel.DESK).meta_generations
        1000
    """
    return BUDGET_CONFIGS[level]


def get_budget_from_string(budget_str: str) -> BudgetLevel:
    """
    Convert a string to a BudgetLevel.

    Raises:
        ValueError: If budget_str doesn't match any budget level

    Example:
        >>> get_budget_from_string("Smoke")
        <BudgetLevel.SMOKE: 'smoke'>
    """
    budget_str = budget_str.strip().lower()
    for level in BudgetLevel:
        if level.value == budget_str:
            return level
    raise ValueError(
        f"Unknown budget: {budget_str}. "
        f"Valid options: {', '.join(level.value for level in BudgetLevel)}"
    )

"""Trial execution for heuristic comparisons.

Every instance gets one reference tour that all heuristics and trials
share. Learned heuristics run once per trial seed. The baselines are
deterministic, so they run once per instance and their record is copied to
every trial. Tasks run on a process pool sized by TTP_FORGE_THREADS and
results are sorted canonically before they are returned.

Example usage:
    from ttp_forge.harness.compare import CompareConfig, run_comparison

    records = run_comparison(instances, CompareConfig(heuristics=("T6", "insertion"), trials=5))
"""

from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
import logging
import os
import time

from ttp_forge.baselines import insertion, pack_iterative
from ttp_forge.config import COMPARE_TRIALS, HEURISTIC_GENERATIONS, THREADS_ENV_VAR
from ttp_forge.enums import FeatureSet
from ttp_forge.errors import ModelError
from ttp_forge.harness.records import TrialRecord
from ttp_forge.heuristics import run_heuristic
from ttp_forge.instance import TtpInstance
from ttp_forge.objective import EvalCounter
from ttp_forge.parameter_model import ParameterModel, parse_model, serialize_model
from ttp_forge.seeding import derive_seed
from ttp_forge.tour import Tour, reference_tour

logger = logging.getLogger(__name__)

LEARNED_HEURISTICS = tuple(feature_set.name for feature_set in FeatureSet)
BASELINE_HEURISTICS = ("packIterative", "insertion")
HEURISTIC_NAMES = LEARNED_HEURISTICS + BASELINE_HEURISTICS


def parse_heuristics(text: str) -> tuple[str, ...]:
    """Parse a comma-separated heuristic list, e.g. "T6,insertion".

    Learned heuristics also accept their "6T" style names.

    Raises:
        ValueError: If a name is unknown or the list is empty
    """
    names = []
    for token in (part.strip() for part in text.split(",")):
        if not token:
            continue
        names.append(resolve_heuristic(token))
    if not names:
        raise ValueError(f"No heuristics given. Valid options: {', '.join(HEURISTIC_NAMES)}")
    return tuple(dict.fromkeys(names))


def resolve_heuristic(name: str) -> str:
    """Canonical heuristic name.

    Raises:
        ValueError: If name matches no heuristic
    """
    for baseline in BASELINE_HEURISTICS:
        if name.lower() == baseline.lower():
            return baseline
    try:
        return FeatureSet.from_string(name).name
    except ValueError:
        raise ValueError(f"Unknown heuristic: {name}. Valid options: {', '.join(HEURISTIC_NAMES)}") from None


def worker_count(default: int | None = None) -> int:
    """Worker pool size: TTP_FORGE_THREADS if set, else the CPU count.

    Raises:
        ValueError: If the environment variable is not a positive integer
    """
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or not raw.strip():
        return max(1, default if default is not None else (os.cpu_count() or 1))
    try:
        count = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer (got {raw!r})") from None
    if count < 1:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer (got {raw!r})")
    return count


@dataclass(frozen=True)
class CompareConfig:
    """Settings of a comparison.

    Attributes:
        heuristics: Heuristic names, in report order
        trials: Trials per instance and heuristic
        seed: Root seed of the trial seeds
        heuristic_generations: (1+1) EA generations of the learned heuristics
        workers: Pool size; None reads TTP_FORGE_THREADS
    """

    heuristics: tuple[str, ...] = HEURISTIC_NAMES
    trials: int = COMPARE_TRIALS
    seed: int = 0
    heuristic_generations: int = HEURISTIC_GENERATIONS
    workers: int | None = None

    def __post_init__(self) -> None:
        if not self.heuristics:
            raise ValueError(f"No heuristics given. Valid options: {', '.join(HEURISTIC_NAMES)}")
        for name in self.heuristics:
            if name not in HEURISTIC_NAMES:
                raise ValueError(f"Unknown heuristic: {name}. Valid options: {', '.join(HEURISTIC_NAMES)}")
        if self.trials < 1:
            raise ValueError(f"Trials must be at least 1 (got {self.trials})")
        if self.heuristic_generations < 0:
            raise ValueError(f"Heuristic generations must be non-negative (got {self.heuristic_generations})")

    @property
    def needs_model(self) -> bool:
        return any(name in LEARNED_HEURISTICS for name in self.heuristics)

    def trial_seeds(self) -> list[int]:
        return [derive_seed(self.seed, trial) for trial in range(self.trials)]


@dataclass(frozen=True)
class TrialTask:
    """One unit of work for the pool; the model travels as its CSV text."""

    instance: TtpInstance
    tour: Tour
    heuristic: str
    seed: int
    generations: int
    model_text: str | None


@lru_cache(maxsize=4)
def _parsed_model(text: str) -> ParameterModel:
    return parse_model(text)


def run_trial(task: TrialTask) -> TrialRecord:
    """Run one heuristic once and time it."""
    counter = EvalCounter()
    start = time.perf_counter()
    if task.heuristic == "packIterative":
        objective = pack_iterative(task.instance, task.tour, counter=counter).objective
    elif task.heuristic == "insertion":
        objective = insertion(task.instance, task.tour, counter=counter).objective
    else:
        if task.model_text is None:
            raise ModelError(f"{task.heuristic} needs a parameter model")
        result = run_heuristic(
            task.instance,
            task.tour,
            FeatureSet[task.heuristic],
            _parsed_model(task.model_text),
            generations=task.generations,
            seed=task.seed,
            counter=counter,
        )
        objective = result.objective
    wall_ms = int(round((time.perf_counter() - start) * 1000))
    return TrialRecord(task.instance.name, task.heuristic, task.seed, float(objective), counter.count, wall_ms)


def _execute(tasks: list[TrialTask], workers: int) -> list[TrialRecord]:
    if workers <= 1 or len(tasks) <= 1:
        return [run_trial(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_trial, tasks))


def sort_records(records: Sequence[TrialRecord], seeds: Sequence[int]) -> list[TrialRecord]:
    """Canonical order: instance, heuristic (report order), trial."""
    heuristic_order = {name: index for index, name in enumerate(HEURISTIC_NAMES)}
    trial_order = {seed: index for index, seed in enumerate(seeds)}
    return sorted(
        records,
        key=lambda r: (r.instance, heuristic_order.get(r.heuristic, len(heuristic_order)), trial_order.get(r.seed, -1)),
    )


def run_comparison(
    instances: Sequence[TtpInstance],
    config: CompareConfig | None = None,
    model: ParameterModel | None = None,
) -> list[TrialRecord]:
    """Run every requested heuristic on every instance.

    Args:
        instances: Problem instances
        config: Comparison settings
        model: Parameter model, required for learned heuristics

    Returns:
        One record per (instance, heuristic, trial), canonically sorted

    Raises:
        ModelError: If learned heuristics are requested without a model
    """
    config = config if config is not None else CompareConfig()
    if config.needs_model and model is None:
        raise ModelError("Learned heuristics requested but no parameter model is available")
    model_text = serialize_model(model) if model is not None else None
    seeds = config.trial_seeds()
    workers = config.workers if config.workers is not None else worker_count()
    logger.debug("Comparison pool size: %d", workers)

    tasks = []
    for instance in instances:
        tour = reference_tour(instance)
        for name in config.heuristics:
            task_seeds = seeds[:1] if name in BASELINE_HEURISTICS else seeds
            tasks.extend(
                TrialTask(instance, tour, name, seed, config.heuristic_generations, model_text) for seed in task_seeds
            )
    logger.info(
        "Running %d tasks (%d instances, %d heuristics, %d trials)",
        len(tasks),
        len(instances),
        len(config.heuristics),
        config.trials,
    )

    records = []
    for record in _execute(tasks, workers):
        if record.heuristic in BASELINE_HEURISTICS:
            records.extend(
                TrialRecord(record.instance, record.heuristic, seed, record.objective, record.evals, record.wall_ms)
                for seed in seeds
            )
        else:
            records.append(record)
    return sort_records(records, seeds)

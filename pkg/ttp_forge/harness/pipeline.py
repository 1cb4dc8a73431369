"""Analysis pipeline: from packing data to a fitted parameter model.

Stages run in order and each reads the previous stage's artifacts from the
output directory:

- ea-data: (1+1) packing EA per instance; per-item feature/packed tables
- nlbc: BCE symbolic regression on those tables; pareto fronts and a
  term-set frequency table
- meta-data: best meta-EA genotype per instance and feature set
- fit-model: parameter curves over C, a variable-frequency report and
  curve plot data

Output layout:
    ea-data/summary.csv     instance,kp_type,C,F,objective,packed,evals
    ea-data/items/<name>.csv  item_id,ipr_std,rdist_std,packed
    nlbc/fronts.csv         instance,run,loss,term_count,term_set,expr
    nlbc/term_sets.csv      size,count,term_set
    meta-data/genotypes.csv instance,kp_type,C,F,feature_set,w0..w4,p,objective
    meta-data/descriptors.csv instance,x0..x7
    fit-model/parameter_model.csv
    fit-model/variable_frequency.csv feature_set,kp_type,param,x0,x1,x2,x3,x4,x7
    fit-model/curves.csv    feature_set,kp_type,param,C,value
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
import logging
from pathlib import Path

import numpy as np

from ttp_forge.budgets import BudgetLevel, BudgetSettings, get_budget_settings
from ttp_forge.config import (
    ANALYSIS_MASK_BOUND,
    CAPACITY_FACTORS,
    FEATURE_PLOT_LIMIT,
    REGRESSION_OMITTED_VARIABLES,
)
from ttp_forge.enums import FeatureSet, KpType, PipelineStage, SrTask
from ttp_forge.errors import StageError
from ttp_forge.evolution import best_meta_genotype, packing_ea
from ttp_forge.features import analysis_mask, compute_features, export_rows
from ttp_forge.harness import charts
from ttp_forge.harness.records import read_table, write_table
from ttp_forge.harness.suite import load_instances
from ttp_forge.instance import TtpInstance, instance_descriptors
from ttp_forge.instance_io import format_number
from ttp_forge.objective import EvalCounter, TourProfile
from ttp_forge.parameter_model import PERCENT, GenotypeRecord, fit_parameter_model, save_model
from ttp_forge.seeding import derive_seed, make_rng, spawn_seeds
from ttp_forge.sr.engine import SrConfig, independent_runs
from ttp_forge.sr.fitness import SrDataset
from ttp_forge.sr.pareto import ParetoEntry, format_term_set, term_set_frequencies, variable_frequency
from ttp_forge.tour import reference_tour

logger = logging.getLogger(__name__)

MAX_WEIGHTS = max(feature_set.arity for feature_set in FeatureSet)
SUMMARY_COLUMNS = ("instance", "kp_type", "C", "F", "objective", "packed", "evals")
ITEM_COLUMNS = ("item_id", "ipr_std", "rdist_std", "packed")
FRONT_COLUMNS = ("instance", "run", "loss", "term_count", "term_set", "expr")
TERM_SET_COLUMNS = ("size", "count", "term_set")
GENOTYPE_COLUMNS = ("instance", "kp_type", "C", "F", "feature_set") + tuple(
    f"w{i}" for i in range(MAX_WEIGHTS)
) + ("p", "objective")
DESCRIPTOR_COLUMNS = ("instance",) + tuple(f"x{i}" for i in range(8))
REGRESSION_VARIABLES = tuple(i for i in range(8) if i not in REGRESSION_OMITTED_VARIABLES)
FREQUENCY_COLUMNS = ("feature_set", "kp_type", "param") + tuple(f"x{i}" for i in REGRESSION_VARIABLES)
CURVE_COLUMNS = ("feature_set", "kp_type", "param", "C", "value")


@dataclass(frozen=True)
class PipelineConfig:
    """Settings shared by the pipeline stages.

    Attributes:
        instances: Instance files or suite directories
        out_dir: Root directory of the stage artifacts
        budget: Run lengths
        seed: Root seed
        feature_sets: Feature sets of the meta-data and fit-model stages
        frequency_feature_sets: Feature sets of the variable-frequency report
        plot_limit: Instances that get a feature scatter plot
        term_set_min_count: Minimum occurrences of a reported term set
    """

    instances: tuple[Path, ...] = ()
    out_dir: Path = Path("results")
    budget: BudgetSettings = field(default_factory=lambda: get_budget_settings(BudgetLevel.DESK))
    seed: int = 0
    feature_sets: tuple[FeatureSet, ...] = tuple(FeatureSet)
    frequency_feature_sets: tuple[FeatureSet, ...] = (FeatureSet.T6,)
    plot_limit: int = FEATURE_PLOT_LIMIT
    term_set_min_count: int = 2

    def __post_init__(self) -> None:
        if not self.feature_sets:
            raise ValueError("At least one feature set is required")
        if self.plot_limit < 0:
            raise ValueError(f"Plot limit must be non-negative (got {self.plot_limit})")
        if self.term_set_min_count < 1:
            raise ValueError(f"Term-set minimum count must be at least 1 (got {self.term_set_min_count})")

    def stage_dir(self, stage: PipelineStage) -> Path:
        return Path(self.out_dir) / stage.value


def _require(path: Path) -> Path:
    if not path.exists():
        raise StageError(f"Missing prerequisite artifact: {path}")
    return path


def _load_stage_instances(config: PipelineConfig) -> list[TtpInstance]:
    if not config.instances:
        raise StageError("No instance sources given")
    return load_instances(list(config.instances))


# ea-data


def run_ea_data(config: PipelineConfig) -> list[Path]:
    """Run the packing EA on every instance and export its plan with item features."""
    stage_dir = config.stage_dir(PipelineStage.EA_DATA)
    instances = _load_stage_instances(config)
    summary = []
    written = []
    for index, instance in enumerate(instances):
        tour = reference_tour(instance)
        profile = TourProfile.build(instance, tour)
        counter = EvalCounter()
        result = packing_ea(
            instance,
            tour,
            config.budget.packing_generations,
            seed=derive_seed(config.seed, 1, index),
            counter=counter,
            profile=profile,
        )
        table = compute_features(instance, tour, profile)
        rows = export_rows(table, result.plan)
        written.append(write_table(stage_dir / "items" / f"{instance.name}.csv", ITEM_COLUMNS, rows))
        summary.append(
            (
                instance.name,
                instance.kp_type.slug if instance.kp_type else "",
                instance.capacity_factor,
                format_number(instance.item_factor),
                float(result.objective),
                result.plan.packed_count,
                counter.count,
            )
        )
        if index < config.plot_limit and len(table):
            mask = analysis_mask(table)
            charts.feature_scatter(
                table.ipr_std[mask],
                table.rdist_std[mask],
                result.plan.bits[mask],
                instance.name,
                stage_dir / "plots" / f"{instance.name}.svg",
            )
        logger.info("ea-data %s: objective %.6g, %d items packed", instance.name, result.objective, result.plan.packed_count)
    written.append(write_table(stage_dir / "summary.csv", SUMMARY_COLUMNS, summary))
    return written


# nlbc


def nlbc_dataset(
    rows: list[dict[str, str]], max_cases: int, rng: np.random.Generator, bound: float = ANALYSIS_MASK_BOUND
) -> SrDataset | None:
    """Masked (ipr_std, rdist_std) -> packed cases, subsampled to max_cases (0 keeps all).

    The mask keeps the same items as `analysis_mask`.

    Returns:
        The dataset, or None when no item survives the mask
    """
    inputs = np.array([(float(row["ipr_std"]), float(row["rdist_std"])) for row in rows]).reshape(-1, 2)
    targets = np.array([int(row["packed"]) for row in rows], dtype=np.float64)
    mask = (np.abs(inputs) <= bound).all(axis=1)
    inputs, targets = inputs[mask], targets[mask]
    if targets.size == 0:
        return None
    if max_cases and targets.size > max_cases:
        keep = np.sort(rng.choice(targets.size, size=max_cases, replace=False))
        inputs, targets = inputs[keep], targets[keep]
    return SrDataset(inputs, targets, SrTask.BINARY_BCE, variable_names=("ipr_std", "rdist_std"))


def run_nlbc(config: PipelineConfig) -> list[Path]:
    """Evolve nonlinear boundary classifiers and tabulate their term sets."""
    ea_dir = config.stage_dir(PipelineStage.EA_DATA)
    summary = read_table(_require(ea_dir / "summary.csv"), SUMMARY_COLUMNS)
    budget = config.budget
    sr_config = SrConfig(population=budget.nlbc_population, generations=budget.nlbc_generations)
    stage_dir = config.stage_dir(PipelineStage.NLBC)

    fronts: list[list[ParetoEntry]] = []
    front_rows = []
    for index, row in enumerate(summary):
        name = row["instance"]
        items = read_table(_require(ea_dir / "items" / f"{name}.csv"), ITEM_COLUMNS)
        dataset = nlbc_dataset(items, budget.nlbc_max_cases, make_rng(derive_seed(config.seed, 2, index)))
        if dataset is None:
            logger.warning("nlbc %s: no items inside the analysis mask; skipped", name)
            continue
        seeds = spawn_seeds(derive_seed(config.seed, 2, index, 1), budget.nlbc_runs)
        for run, result in enumerate(independent_runs(dataset, sr_config, seeds, track_front=True)):
            fronts.append(result.front)
            front_rows.extend(
                (name, run, entry.loss, entry.term_count, format_term_set(entry.term_set), entry.expr.to_prefix())
                for entry in result.front
            )
        logger.info("nlbc %s: %d cases, %d runs", name, dataset.cases, budget.nlbc_runs)

    frequencies = term_set_frequencies(fronts, min_count=config.term_set_min_count)
    term_rows = [
        (size, entry.count, format_term_set(entry.term_set)) for size, entries in frequencies.items() for entry in entries
    ]
    return [
        write_table(stage_dir / "fronts.csv", FRONT_COLUMNS, front_rows),
        write_table(stage_dir / "term_sets.csv", TERM_SET_COLUMNS, term_rows),
    ]


# meta-data


def run_meta_data(config: PipelineConfig) -> list[Path]:
    """Best meta-EA genotype per instance and feature set, plus instance descriptors."""
    stage_dir = config.stage_dir(PipelineStage.META_DATA)
    instances = _load_stage_instances(config)
    budget = config.budget
    genotype_rows = []
    descriptor_rows = []
    for index, instance in enumerate(instances):
        if instance.kp_type is None:
            logger.warning("meta-data %s: unknown knapsack type; skipped", instance.name)
            continue
        tour = reference_tour(instance)
        descriptor_rows.append((instance.name, *instance_descriptors(instance)))
        for feature_set in config.feature_sets:
            result = best_meta_genotype(
                instance,
                tour,
                feature_set,
                budget.meta_generations,
                runs=budget.meta_runs,
                seed=derive_seed(config.seed, 3, index, list(FeatureSet).index(feature_set)),
            )
            weights = [float(w) for w in result.genotype.weights]
            padding = [""] * (MAX_WEIGHTS - len(weights))
            genotype_rows.append(
                (
                    instance.name,
                    instance.kp_type.slug,
                    instance.capacity_factor,
                    format_number(instance.item_factor),
                    feature_set.name,
                    *weights,
                    *padding,
                    float(result.genotype.percent),
                    float(result.objective),
                )
            )
        logger.info("meta-data %s: %d feature sets", instance.name, len(config.feature_sets))
    return [
        write_table(stage_dir / "genotypes.csv", GENOTYPE_COLUMNS, genotype_rows),
        write_table(stage_dir / "descriptors.csv", DESCRIPTOR_COLUMNS, descriptor_rows),
    ]


def read_genotypes(path: str | Path) -> list[GenotypeRecord]:
    """Parse meta-data/genotypes.csv into GenotypeRecords."""
    records = []
    for row in read_table(path, GENOTYPE_COLUMNS):
        feature_set = FeatureSet.from_string(row["feature_set"])
        weights = tuple(float(row[f"w{i}"]) for i in range(feature_set.arity))
        records.append(
            GenotypeRecord(
                instance=row["instance"],
                kp_type=KpType.from_string(row["kp_type"]),
                capacity_factor=int(row["C"]),
                item_factor=float(row["F"]),
                feature_set=feature_set,
                values=weights + (float(row["p"]),),
                objective=float(row["objective"]),
            )
        )
    return records


def read_descriptors(path: str | Path) -> dict[str, tuple[float, ...]]:
    return {
        row["instance"]: tuple(float(row[f"x{i}"]) for i in range(8)) for row in read_table(path, DESCRIPTOR_COLUMNS)
    }


# fit-model


def variable_frequency_rows(
    records: list[GenotypeRecord],
    descriptors: dict[str, tuple[float, ...]],
    config: PipelineConfig,
) -> list[tuple]:
    """Presence frequency of each instance descriptor in regression solutions.

    For every (feature set, knapsack type, parameter) cell the parameter is
    regressed on x0..x4 and x7; the length-capped elites of all runs are
    the solutions counted.

    Raises:
        StageError: If a genotype's instance has no descriptor row
    """
    budget = config.budget
    sr_config = SrConfig(population=budget.regression_population, generations=budget.regression_generations)
    rows = []
    for fs_index, feature_set in enumerate(config.frequency_feature_sets):
        for kp_index, kp_type in enumerate(KpType):
            cell = [r for r in records if r.feature_set is feature_set and r.kp_type is kp_type]
            if not cell:
                continue
            missing = sorted({r.instance for r in cell} - set(descriptors))
            if missing:
                raise StageError(f"Missing descriptors for {', '.join(missing)} in meta-data/descriptors.csv")
            inputs = np.array([[descriptors[r.instance][i] for i in REGRESSION_VARIABLES] for r in cell])
            for param_index, param in enumerate(feature_set.parameter_names):
                targets = np.array([r.value(param) for r in cell])
                dataset = SrDataset(inputs, targets, SrTask.REGRESSION_MAE)
                seeds = spawn_seeds(derive_seed(config.seed, 4, fs_index, kp_index, param_index), budget.regression_runs)
                runs = independent_runs(dataset, sr_config, seeds, track_front=False)
                expressions = [best.expr for run in runs for best in run.length_bests.values()]
                frequency = variable_frequency(expressions, range(len(REGRESSION_VARIABLES)))
                rows.append((feature_set.name, kp_type.slug, param, *(frequency[j] for j in range(len(REGRESSION_VARIABLES)))))
    return rows


def run_fit_model(config: PipelineConfig) -> list[Path]:
    """Fit the parameter model and write the regression reports."""
    meta_dir = config.stage_dir(PipelineStage.META_DATA)
    records = read_genotypes(_require(meta_dir / "genotypes.csv"))
    descriptors = read_descriptors(_require(meta_dir / "descriptors.csv"))
    if not records:
        raise StageError(f"No genotypes in {meta_dir / 'genotypes.csv'}")
    stage_dir = config.stage_dir(PipelineStage.FIT_MODEL)
    budget = config.budget

    sr_config = SrConfig(population=budget.regression_population, generations=budget.regression_generations)
    model = fit_parameter_model(records, budget.fit_method, sr_config, runs=budget.regression_runs, seed=config.seed)
    model_path = stage_dir / "parameter_model.csv"
    save_model(model, model_path)

    curve_rows = []
    cells = sorted({(r.feature_set, r.kp_type) for r in records}, key=lambda k: (list(FeatureSet).index(k[0]), list(KpType).index(k[1])))
    for feature_set, kp_type in cells:
        cell = [r for r in records if r.feature_set is feature_set and r.kp_type is kp_type]
        c = np.array([r.capacity_factor for r in cell], dtype=np.float64)
        samples, curves = {}, {}
        for param in feature_set.parameter_names:
            values = np.asarray(model.curve(feature_set, kp_type, param)(np.array(CAPACITY_FACTORS, dtype=np.float64)))
            if param == PERCENT:
                values = np.clip(values, 0.0, 1.0)
            curves[param] = values
            samples[param] = (c, np.array([r.value(param) for r in cell]))
            curve_rows.extend(
                (feature_set.name, kp_type.slug, param, capacity, float(value))
                for capacity, value in zip(CAPACITY_FACTORS, values)
            )
        charts.parameter_curves_chart(
            samples,
            curves,
            f"{feature_set.name} {kp_type.slug}",
            stage_dir / "plots" / f"{feature_set.name}_{kp_type.slug}.svg",
        )

    frequency_rows = variable_frequency_rows(records, descriptors, config)
    logger.info("fit-model: %d curves from %d genotypes", len(model), len(records))
    return [
        model_path,
        write_table(stage_dir / "curves.csv", CURVE_COLUMNS, curve_rows),
        write_table(stage_dir / "variable_frequency.csv", FREQUENCY_COLUMNS, frequency_rows),
    ]


STAGE_RUNNERS: dict[PipelineStage, Callable[[PipelineConfig], list[Path]]] = {
    PipelineStage.EA_DATA: run_ea_data,
    PipelineStage.NLBC: run_nlbc,
    PipelineStage.META_DATA: run_meta_data,
    PipelineStage.FIT_MODEL: run_fit_model,
}


def run_stage(stage: PipelineStage, config: PipelineConfig) -> list[Path]:
    """Run one stage and return the artifacts it wrote."""
    logger.info("Running stage %s (budget %s)", stage.value, config.budget.name)
    return STAGE_RUNNERS[stage](config)


def get_stage_from_string(stage_str: str) -> PipelineStage:
    """Convert a stage name such as "fit-model" to a PipelineStage.

    Raises:
        ValueError: If stage_str names no stage
    """
    key = stage_str.strip().lower()
    for stage in PipelineStage:
        if stage.value == key:
            return stage
    raise ValueError(f"Unknown stage: {stage_str}. Valid options: {', '.join(s.value for s in PipelineStage)}")

"""Rebuild the packaged parameter model from a generated suite.

The packaged model is a pipeline artifact: a suite is generated, the
meta-data and fit-model stages run on it, and the fitted curves are written
with comment lines recording the command, suite and seed that produced them.

Example usage:
    from ttp_forge.harness.model_build import ModelBuildConfig, build_model

    model = build_model(ModelBuildConfig(budget=BudgetLevel.DESK, seed=0))
"""

from __future__ import annotations

from contextlib import ExitStack
import dataclasses
from dataclasses import dataclass, field
import logging
from pathlib import Path
import tempfile

from ttp_forge.budgets import BudgetLevel, get_budget_settings
from ttp_forge.enums import PipelineStage
from ttp_forge.harness.pipeline import PipelineConfig, run_stage
from ttp_forge.harness.suite import SuiteSpec, generate_suite
from ttp_forge.parameter_model import ParameterModel, default_model_path, load_model, save_model

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelBuildConfig:
    """What to build the model from.

    Attributes:
        out_path: Model file to write; None writes the packaged model
        budget: Budget of the meta-data and fit-model stages
        seed: Root seed of the suite and both stages (overrides suite.seed)
        suite: Suite to generate
        work_dir: Keeps the suite and stage artifacts; None uses a temporary directory
    """

    out_path: Path | None = None
    budget: BudgetLevel = BudgetLevel.DESK
    seed: int = 0
    suite: SuiteSpec = field(default_factory=SuiteSpec)
    work_dir: Path | None = None

    @property
    def model_path(self) -> Path:
        return Path(self.out_path) if self.out_path is not None else default_model_path()


def build_command(config: ModelBuildConfig) -> str:
    """The command line that reproduces `config`."""
    suite = config.suite
    parts = ["ttp-forge build-model", f"--budget {config.budget.value}", f"--seed {config.seed}"]
    if suite.coords_path is not None:
        parts.append(f"--coords {suite.coords_path}")
    else:
        parts.append(f"--synthetic {suite.synthetic} --cities {suite.cities}")
    parts.append(f"--item-factors {','.join(map(str, suite.item_factors))}")
    return " ".join(parts)


def provenance_lines(config: ModelBuildConfig) -> list[str]:
    """Comment lines stored at the top of a built model."""
    suite = config.suite
    settings = get_budget_settings(config.budget)
    return [
        f"built by: {build_command(config)}",
        f"seed: {config.seed}",
        (
            f"suite: {suite.size} instances; capacity factors {','.join(map(str, suite.capacity_factors))}; "
            f"knapsack types {','.join(kp_type.slug for kp_type in suite.kp_types)}"
        ),
        (
            f"fit: {settings.fit_method} curves from {settings.meta_generations} meta-EA generations "
            f"x {settings.meta_runs} runs ({settings.name} budget)"
        ),
    ]


def build_model(config: ModelBuildConfig) -> ParameterModel:
    """Generate the suite, run meta-data and fit-model, and write the model.

    Returns:
        The fitted model, as written to config.model_path
    """
    with ExitStack() as stack:
        if config.work_dir is not None:
            work = Path(config.work_dir)
        else:
            work = Path(stack.enter_context(tempfile.TemporaryDirectory(prefix="ttp-forge-model-")))
        suite_dir = work / "suite"
        generate_suite(dataclasses.replace(config.suite, seed=config.seed), suite_dir)
        pipeline = PipelineConfig(
            instances=(suite_dir,),
            out_dir=work / "results",
            budget=get_budget_settings(config.budget),
            seed=config.seed,
            frequency_feature_sets=(),
        )
        run_stage(PipelineStage.META_DATA, pipeline)
        run_stage(PipelineStage.FIT_MODEL, pipeline)
        model = load_model(pipeline.stage_dir(PipelineStage.FIT_MODEL) / "parameter_model.csv")

    save_model(model, config.model_path, provenance_lines(config))
    logger.info("Wrote %d curves to %s", len(model), config.model_path)
    return model

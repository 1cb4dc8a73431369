"""
Command-line entry point for ttp-forge.
Allows running as: python -m ttp_forge
"""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
import sys

from ttp_forge.budgets import get_budget_from_string, get_budget_settings
from ttp_forge.config import SUITE_ITEM_FACTORS
from ttp_forge.enums import PipelineStage
from ttp_forge.errors import TtpForgeError
from ttp_forge.harness import charts
from ttp_forge.harness.compare import CompareConfig, parse_heuristics, run_comparison
from ttp_forge.harness.model_build import ModelBuildConfig, build_model
from ttp_forge.harness.pipeline import PipelineConfig, run_stage
from ttp_forge.harness.ranking import build_rank_table, frequency_rows, summary_rows
from ttp_forge.harness.records import write_table, write_trials
from ttp_forge.harness.suite import SYNTHETIC_KINDS, SuiteSpec, generate_suite, load_instances
from ttp_forge.instance_io import parse_int_list, read_ttp
from ttp_forge.objective import PackingPlan, TourProfile
from ttp_forge.parameter_model import load_default_model, load_model
from ttp_forge.tour import Tour, reference_tour

logger = logging.getLogger("ttp_forge")

PIPELINE_CHOICES = [stage.value for stage in PipelineStage] + ["all"]


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_generate(args: argparse.Namespace) -> int:
    """Write a benchmark suite and its manifest."""
    spec = SuiteSpec(
        coords_path=Path(args.coords) if args.coords else None,
        synthetic=args.synthetic,
        cities=args.cities,
        item_factors=args.item_factors,
        seed=args.seed,
        base_name=args.name,
    )
    entries = generate_suite(spec, args.out)
    print(f"Wrote {len(entries)} instances to {args.out}")
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    """Run one pipeline stage, or all of them in order."""
    config = PipelineConfig(
        instances=tuple(Path(source) for source in args.instances),
        out_dir=Path(args.out),
        budget=get_budget_settings(get_budget_from_string(args.budget)),
        seed=args.seed,
    )
    stages = list(PipelineStage) if args.stage == "all" else [PipelineStage(args.stage)]
    for stage in stages:
        for path in run_stage(stage, config):
            print(path)
    return 0


def cmd_build_model(args: argparse.Namespace) -> int:
    """Rebuild a parameter model from a generated suite."""
    config = ModelBuildConfig(
        out_path=Path(args.out) if args.out else None,
        budget=get_budget_from_string(args.budget),
        seed=args.seed,
        suite=SuiteSpec(
            coords_path=Path(args.coords) if args.coords else None,
            synthetic=args.synthetic,
            cities=args.cities,
            item_factors=args.item_factors,
        ),
        work_dir=Path(args.work) if args.work else None,
    )
    model = build_model(config)
    print(f"Wrote {len(model)} curves to {config.model_path}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    """Run heuristics on instances and write trials, ranks and rank charts."""
    budget = get_budget_settings(get_budget_from_string(args.budget))
    config = CompareConfig(
        heuristics=parse_heuristics(args.heuristics),
        trials=args.trials if args.trials is not None else budget.trials,
        seed=args.seed,
        heuristic_generations=budget.heuristic_generations,
    )
    model = None
    if config.needs_model:
        model = load_model(args.model) if args.model else load_default_model()
    instances = load_instances(args.instances)
    records = run_comparison(instances, config, model)

    out = Path(args.out)
    write_trials(out / "trials.csv", records)
    table = build_rank_table(records, config.heuristics)
    write_table(out / "ranks.csv", ("heuristic", "mean_objective_rank", "mean_evals_rank"), summary_rows(table))
    write_table(out / "rank_frequencies.csv", ("metric", "heuristic", "rank", "count"), frequency_rows(table))
    for metric in ("objective", "evals"):
        charts.rank_frequency_chart(table.rank_frequencies(metric), f"rank by {metric}", out / f"ranks_{metric}.svg")

    for name, objective_rank, evals_rank in summary_rows(table):
        print(f"{name:<14} objective rank {objective_rank:6.3f}   evals rank {evals_rank:6.3f}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    """Evaluate a packing plan on an instance along a tour."""
    instance = read_ttp(args.instance)
    if args.tour:
        tour = Tour.from_order(instance, parse_int_list(Path(args.tour).read_text()))
    else:
        tour = reference_tour(instance)
    if args.plan:
        bits = parse_int_list(Path(args.plan).read_text())
        plan = PackingPlan.from_bits(instance, bits) if bits else PackingPlan.empty(instance)
    else:
        plan = PackingPlan.empty(instance)
    profile = TourProfile.build(instance, tour)
    print(f"objective {profile.evaluate(plan)!r}")
    print(f"time {profile.tour_time(plan)!r}")
    print(f"profit {profile.profit(plan)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ttp-forge",
        description="Learned packing heuristics for the Traveling Thief Problem.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s generate --synthetic uniform --cities 51 --out suite
  %(prog)s pipeline all suite --budget smoke --out results
  %(prog)s build-model --budget desk --seed 0
  %(prog)s compare suite --heuristics T6,insertion,packIterative --model results/fit-model/parameter_model.csv
  %(prog)s evaluate suite/uniform51_n50_uncorr_01.ttp --plan plan.txt

Environment:
  TTP_FORGE_THREADS caps the comparison worker pool
        """,
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Log debug messages")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="Generate a benchmark suite")
    source = generate.add_mutually_exclusive_group()
    source.add_argument("--coords", metavar="PATH", help="TSPLIB coordinate file")
    source.add_argument(
        "--synthetic", choices=SYNTHETIC_KINDS, default="uniform", help="Synthetic coordinate set (default: uniform)"
    )
    generate.add_argument("--cities", type=int, default=51, metavar="N", help="Cities of a synthetic set (default: 51)")
    generate.add_argument(
        "--item-factors",
        type=_int_list,
        default=SUITE_ITEM_FACTORS,
        metavar="LIST",
        help="Comma-separated item factors (default: 1,5,10)",
    )
    generate.add_argument("--name", help="Instance name prefix")
    generate.add_argument("--seed", type=int, default=0, metavar="N", help="Suite seed (default: 0)")
    generate.add_argument("--out", required=True, metavar="DIR", help="Output directory")
    generate.set_defaults(handler=cmd_generate)

    pipeline = commands.add_parser("pipeline", help="Run analysis pipeline stages")
    pipeline.add_argument("stage", choices=PIPELINE_CHOICES, help="Stage to run")
    pipeline.add_argument("instances", nargs="*", help="Instance files or suite directories")
    pipeline.add_argument("--budget", default="desk", help="Budget preset: smoke, desk, full (default: desk)")
    pipeline.add_argument("--seed", type=int, default=0, metavar="N", help="Root seed (default: 0)")
    pipeline.add_argument("--out", default="results", metavar="DIR", help="Artifact directory (default: results)")
    pipeline.set_defaults(handler=cmd_pipeline)

    build = commands.add_parser("build-model", help="Rebuild the parameter model from a generated suite")
    build_source = build.add_mutually_exclusive_group()
    build_source.add_argument("--coords", metavar="PATH", help="TSPLIB coordinate file")
    build_source.add_argument(
        "--synthetic", choices=SYNTHETIC_KINDS, default="uniform", help="Synthetic coordinate set (default: uniform)"
    )
    build.add_argument("--cities", type=int, default=51, metavar="N", help="Cities of a synthetic set (default: 51)")
    build.add_argument(
        "--item-factors",
        type=_int_list,
        default=SUITE_ITEM_FACTORS,
        metavar="LIST",
        help="Comma-separated item factors (default: 1,5,10)",
    )
    build.add_argument("--budget", default="desk", help="Budget preset: smoke, desk, full (default: desk)")
    build.add_argument("--seed", type=int, default=0, metavar="N", help="Root seed (default: 0)")
    build.add_argument("--out", metavar="PATH", help="Model file (default: the packaged model)")
    build.add_argument("--work", metavar="DIR", help="Keep the suite and stage artifacts here")
    build.set_defaults(handler=cmd_build_model)

    compare = commands.add_parser("compare", help="Compare heuristics on instances")
    compare.add_argument("instances", nargs="+", help="Instance files or suite directories")
    compare.add_argument(
        "--heuristics",
        default="T3,T4,T5A,T5B,T6,packIterative,insertion",
        metavar="LIST",
        help="Comma-separated heuristic names (default: all)",
    )
    compare.add_argument("--trials", type=int, metavar="N", help="Trials per instance (default: from budget)")
    compare.add_argument("--model", metavar="PATH", help="Parameter model (default: the packaged model)")
    compare.add_argument("--budget", default="desk", help="Budget preset: smoke, desk, full (default: desk)")
    compare.add_argument("--seed", type=int, default=0, metavar="N", help="Root seed (default: 0)")
    compare.add_argument("--out", default="comparison", metavar="DIR", help="Output directory (default: comparison)")
    compare.set_defaults(handler=cmd_compare)

    evaluate = commands.add_parser("evaluate", help="Evaluate a packing plan")
    evaluate.add_argument("instance", help="Instance file")
    evaluate.add_argument("--tour", metavar="PATH", help="Tour file (default: reference tour)")
    evaluate.add_argument("--plan", metavar="PATH", help="Plan file of 0/1 bits (default: empty plan)")
    evaluate.set_defaults(handler=cmd_evaluate)

    return parser


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except (TtpForgeError, OSError, ValueError) as e:
        logger.error("%s", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())

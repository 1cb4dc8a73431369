"""Unit tests for harness.pipeline module."""

from __future__ import annotations

from pathlib import Path
import tempfile
import unittest

import numpy as np

from ttp_forge.budgets import BudgetLevel, get_budget_settings
from ttp_forge.config import ANALYSIS_MASK_BOUND
from ttp_forge.enums import FeatureSet, KpType, PipelineStage
from ttp_forge.errors import StageError
from ttp_forge.features import analysis_mask, compute_features, export_rows
from ttp_forge.harness.pipeline import (
    CURVE_COLUMNS,
    FREQUENCY_COLUMNS,
    SUMMARY_COLUMNS,
    PipelineConfig,
    get_stage_from_string,
    nlbc_dataset,
    read_descriptors,
    read_genotypes,
    run_stage,
)
from ttp_forge.harness.records import read_table
from ttp_forge.harness.suite import SuiteSpec, generate_suite
from ttp_forge.objective import PackingPlan
from ttp_forge.parameter_model import load_model
from ttp_forge.tests.helpers import identity_tour, random_instance


def item_rows(values):
    return [{"ipr_std": str(x), "rdist_std": str(y), "packed": str(p)} for x, y, p in values]


class TestStageHelpers(unittest.TestCase):
    """Test stage lookup, settings and the classification dataset."""

    def test_get_stage_from_string(self):
        """Test stage names and the error message."""
        self.assertIs(get_stage_from_string(" Fit-Model "), PipelineStage.FIT_MODEL)
        with self.assertRaises(ValueError) as ctx:
            get_stage_from_string("train")
        self.assertIn("Valid options", str(ctx.exception))

    def test_config_validation(self):
        """Test rejected settings."""
        with self.assertRaises(ValueError):
            PipelineConfig(feature_sets=())
        with self.assertRaises(ValueError):
            PipelineConfig(plot_limit=-1)
        with self.assertRaises(ValueError):
            PipelineConfig(term_set_min_count=0)

    def test_nlbc_dataset_mask(self):
        """Test that items outside [-2, 2]^2 are dropped."""
        rows = item_rows([(0.5, -2.0, 1), (2.5, 0.0, 1), (0.0, 0.0, 0)])
        dataset = nlbc_dataset(rows, 0, np.random.default_rng(0))
        self.assertEqual(dataset.cases, 2)
        np.testing.assert_array_equal(dataset.targets, [1.0, 0.0])

    def test_nlbc_dataset_subsample(self):
        """Test the case cap and the empty result."""
        rows = item_rows([(0.01 * i, 0.0, i % 2) for i in range(50)])
        self.assertEqual(nlbc_dataset(rows, 10, np.random.default_rng(1)).cases, 10)
        self.assertIsNone(nlbc_dataset(item_rows([(3.0, 0.0, 1)]), 0, np.random.default_rng(2)))

    def test_nlbc_dataset_matches_analysis_mask(self):
        """Test that the classifier cases are exactly the items the analysis mask keeps."""
        instance = random_instance(9, n=20, items_per_city=5)
        tour = identity_tour(instance)
        table = compute_features(instance, tour)
        plan = PackingPlan(np.arange(instance.m_total) % 2 == 0)
        rows = [
            {"ipr_std": repr(x), "rdist_std": repr(y), "packed": str(p)} for _, x, y, p in export_rows(table, plan)
        ]
        for bound in (ANALYSIS_MASK_BOUND, 0.5):
            mask = analysis_mask(table, bound)
            dataset = nlbc_dataset(rows, 0, np.random.default_rng(3), bound=bound)
            self.assertEqual(dataset.cases, int(mask.sum()))
            np.testing.assert_array_equal(dataset.targets, plan.bits[mask].astype(np.float64))
        self.assertLess(int(analysis_mask(table, 0.5).sum()), int(analysis_mask(table).sum()))


class TestPipelineStages(unittest.TestCase):
    """Run every stage on a tiny suite with the smoke budget."""

    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        root = Path(cls.tmp.name)
        spec = SuiteSpec(cities=8, item_factors=(3,), capacity_factors=(2, 5, 8), kp_types=(KpType.UNCORR,), seed=1)
        generate_suite(spec, root / "suite")
        cls.config = PipelineConfig(
            instances=(root / "suite",),
            out_dir=root / "results",
            budget=get_budget_settings(BudgetLevel.SMOKE),
            seed=4,
            feature_sets=(FeatureSet.T3, FeatureSet.T6),
            plot_limit=2,
            term_set_min_count=1,
        )
        cls.written = {stage: run_stage(stage, cls.config) for stage in PipelineStage}

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def test_ea_data(self):
        """Test the summary, item tables and plots."""
        stage_dir = self.config.stage_dir(PipelineStage.EA_DATA)
        summary = read_table(stage_dir / "summary.csv", SUMMARY_COLUMNS)
        self.assertEqual(len(summary), 3)
        self.assertEqual([row["C"] for row in summary], ["2", "5", "8"])
        for row in summary:
            self.assertLessEqual(int(row["evals"]), get_budget_settings(BudgetLevel.SMOKE).packing_generations)
            items = read_table(stage_dir / "items" / f"{row['instance']}.csv")
            self.assertEqual(len(items), 21)
            self.assertEqual(sum(int(item["packed"]) for item in items), int(row["packed"]))
        self.assertEqual(len(list((stage_dir / "plots").glob("*.svg"))), 2)

    def test_nlbc(self):
        """Test that fronts and term sets are written."""
        stage_dir = self.config.stage_dir(PipelineStage.NLBC)
        fronts = read_table(stage_dir / "fronts.csv")
        for row in fronts:
            self.assertEqual(int(row["term_count"]), len(row["term_set"].split(" + ")) if row["term_set"] else 0)
        self.assertTrue((stage_dir / "term_sets.csv").exists())

    def test_meta_data(self):
        """Test one genotype per instance and feature set."""
        stage_dir = self.config.stage_dir(PipelineStage.META_DATA)
        records = read_genotypes(stage_dir / "genotypes.csv")
        self.assertEqual(len(records), 6)
        self.assertEqual({r.feature_set for r in records}, {FeatureSet.T3, FeatureSet.T6})
        for record in records:
            self.assertEqual(len(record.values), record.feature_set.arity + 1)
            self.assertTrue(0.0 <= record.value("percent") <= 1.0)
        descriptors = read_descriptors(stage_dir / "descriptors.csv")
        self.assertEqual(set(descriptors), {r.instance for r in records})
        self.assertTrue(all(len(values) == 8 for values in descriptors.values()))

    def test_fit_model(self):
        """Test the fitted model and its reports."""
        stage_dir = self.config.stage_dir(PipelineStage.FIT_MODEL)
        model = load_model(stage_dir / "parameter_model.csv")
        self.assertTrue(model.covers(FeatureSet.T3, KpType.UNCORR))
        self.assertTrue(model.covers(FeatureSet.T6, KpType.UNCORR))
        curves = read_table(stage_dir / "curves.csv", CURVE_COLUMNS)
        self.assertEqual(len(curves), (3 + 6) * 10)
        for row in curves:
            if row["param"] == "percent":
                self.assertTrue(0.0 <= float(row["value"]) <= 1.0)
        frequencies = read_table(stage_dir / "variable_frequency.csv", FREQUENCY_COLUMNS)
        self.assertEqual([row["param"] for row in frequencies], list(FeatureSet.T6.parameter_names))
        for row in frequencies:
            for column in FREQUENCY_COLUMNS[3:]:
                self.assertTrue(0.0 <= float(row[column]) <= 1.0)
        self.assertEqual(len(list((stage_dir / "plots").glob("*.svg"))), 2)

    def test_written_paths_exist(self):
        """Test that every reported artifact exists."""
        for paths in self.written.values():
            for path in paths:
                self.assertTrue(Path(path).exists(), path)


class TestStagePrerequisites(unittest.TestCase):
    """Test missing inputs."""

    def test_missing_artifacts(self):
        """Test that later stages need earlier artifacts."""
        with tempfile.TemporaryDirectory() as tmp:
            config = PipelineConfig(instances=(Path(tmp),), out_dir=Path(tmp) / "results")
            for stage in (PipelineStage.NLBC, PipelineStage.FIT_MODEL):
                with self.subTest(stage=stage), self.assertRaises(StageError):
                    run_stage(stage, config)

    def test_no_instances(self):
        """Test stages that load instances."""
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(StageError):
                run_stage(PipelineStage.EA_DATA, PipelineConfig(out_dir=Path(tmp)))
            with self.assertRaises(StageError):
                run_stage(PipelineStage.META_DATA, PipelineConfig(instances=(Path(tmp),), out_dir=Path(tmp)))


if __name__ == "__main__":
    unittest.main()

"""Unit tests for parameter_model module."""

from __future__ import annotations

import dataclasses
from pathlib import Path
import tempfile
import unittest
from unittest.mock import patch

import numpy as np
import pytest

from ttp_forge.config import CAPACITY_FACTORS
from ttp_forge.enums import FeatureSet, KpType
from ttp_forge.errors import ModelError
from ttp_forge.evolution import best_meta_genotype
from ttp_forge.harness.suite import uniform_coords
from ttp_forge.instance_generation import generate_instance
from ttp_forge.parameter_model import (
    MODEL_HEADER,
    GenotypeRecord,
    ParameterCurve,
    ParameterModel,
    default_model_path,
    fit_linear,
    fit_parameter_model,
    fit_piecewise,
    fit_sr,
    is_anomalous,
    load_default_model,
    load_model,
    parse_model,
    predict_genotype,
    prediction_errors,
    save_model,
    serialize_model,
    split_records,
)
from ttp_forge.sr.engine import SrConfig
from ttp_forge.sr.expr import parse_prefix
from ttp_forge.tour import reference_tour


def t3_model(w0=(3.0, 0.0), w1=(4.0, 0.0), percent=(0.5, 0.1)) -> ParameterModel:
    model = ParameterModel()
    model.set(FeatureSet.T3, KpType.UNCORR, "w0", ParameterCurve.linear(*w0))
    model.set(FeatureSet.T3, KpType.UNCORR, "w1", ParameterCurve.linear(*w1))
    model.set(FeatureSet.T3, KpType.UNCORR, "percent", ParameterCurve.linear(*percent))
    return model


def line_records(kp_type: KpType = KpType.UNCORR) -> list[GenotypeRecord]:
    records = []
    for c in CAPACITY_FACTORS:
        for offset in (-0.01, 0.01):
            records.append(
                GenotypeRecord(
                    instance=f"i{c}{offset}",
                    kp_type=kp_type,
                    capacity_factor=c,
                    item_factor=1.0,
                    feature_set=FeatureSet.T3,
                    values=(0.6 + offset, -0.8 + offset, 0.2 + 0.05 * c),
                    objective=0.0,
                )
            )
    return records


class TestParameterCurve(unittest.TestCase):
    """Test curve kinds and evaluation."""

    def test_linear(self):
        """Test intercept plus slope times C."""
        curve = ParameterCurve.linear(0.5, 0.1)
        self.assertAlmostEqual(curve(3), 0.8)
        np.testing.assert_allclose(curve(np.array([1.0, 2.0])), [0.6, 0.7])

    def test_piecewise(self):
        """Test interpolation between the C = 1..10 values."""
        curve = ParameterCurve.piecewise([float(c) ** 2 for c in CAPACITY_FACTORS])
        self.assertAlmostEqual(curve(2.5), 6.5)
        self.assertAlmostEqual(curve(10), 100.0)

    def test_expression(self):
        """Test expression curves on scalars and arrays."""
        curve = ParameterCurve.expression(parse_prefix("mul(x0, 0.5)", 1))
        self.assertEqual(curve(4), 2.0)
        np.testing.assert_allclose(curve(np.array([2.0, 6.0])), [1.0, 3.0])

    def test_invalid(self):
        """Test kind and coefficient validation."""
        with self.assertRaises(ModelError):
            ParameterCurve("cubic", (1.0,))
        with self.assertRaises(ModelError):
            ParameterCurve("linear", (1.0,))
        with self.assertRaises(ModelError):
            ParameterCurve("pwl", (1.0, 2.0))
        with self.assertRaises(ModelError):
            ParameterCurve("expr")


class TestPrediction(unittest.TestCase):
    """Test model lookups and genotype prediction."""

    def test_predict_normalizes_and_clamps(self):
        """Test unit-norm weights and a percent clamped to [0, 1]."""
        genotype = predict_genotype(t3_model(), FeatureSet.T3, KpType.UNCORR, 10)
        self.assertAlmostEqual(genotype.weights[0], 0.6)
        self.assertAlmostEqual(genotype.weights[1], 0.8)
        self.assertEqual(genotype.percent, 1.0)
        low = predict_genotype(t3_model(percent=(-0.5, 0.0)), FeatureSet.T3, KpType.UNCORR, 1)
        self.assertEqual(low.percent, 0.0)

    def test_predict_errors(self):
        """Test unknown kp type, C out of range, missing curves and zero weights."""
        model = t3_model()
        with self.assertRaises(ModelError):
            predict_genotype(model, FeatureSet.T3, None, 5)
        with self.assertRaises(ValueError):
            predict_genotype(model, FeatureSet.T3, KpType.UNCORR, 11)
        with self.assertRaises(ModelError):
            predict_genotype(model, FeatureSet.T4, KpType.UNCORR, 5)
        with self.assertRaises(ModelError):
            predict_genotype(t3_model(w0=(0.0, 0.0), w1=(0.0, 0.0)), FeatureSet.T3, KpType.UNCORR, 5)

    def test_set_validates_param(self):
        """Test that parameters must belong to the feature set."""
        with self.assertRaises(ModelError):
            ParameterModel().set(FeatureSet.T3, KpType.UNCORR, "w4", ParameterCurve.linear(0, 0))

    def test_covers(self):
        """Test cell coverage."""
        model = t3_model()
        self.assertTrue(model.covers(FeatureSet.T3, KpType.UNCORR))
        self.assertFalse(model.covers(FeatureSet.T3, KpType.UNCORR_SIMILAR_WEIGHTS))

    @unittest.skipUnless(default_model_path().exists(), "packaged model not built; run 'ttp-forge build-model'")
    def test_default_model_covers_everything(self):
        """Test the packaged model on every cell and capacity factor."""
        model = load_default_model()
        for feature_set in FeatureSet:
            for kp_type in KpType:
                self.assertTrue(model.covers(feature_set, kp_type))
                for c in CAPACITY_FACTORS:
                    genotype = predict_genotype(model, feature_set, kp_type, c)
                    self.assertAlmostEqual(float(np.linalg.norm(genotype.weight_array)), 1.0)
                    self.assertTrue(0.0 <= genotype.percent <= 1.0)


class TestSerialization(unittest.TestCase):
    """Test the versioned CSV layout."""

    def test_round_trip(self):
        """Test that every curve kind survives serialization."""
        model = t3_model()
        model.set(FeatureSet.T3, KpType.UNCORR, "w1", ParameterCurve.piecewise([0.1 * c for c in CAPACITY_FACTORS]))
        model.set(FeatureSet.T3, KpType.UNCORR, "percent", ParameterCurve.expression(parse_prefix("mul(x0, 0.05)", 1)))
        text = serialize_model(model)
        self.assertTrue(text.startswith(MODEL_HEADER + "\n"))
        parsed = parse_model(text)
        self.assertEqual(parsed.curves, model.curves)
        self.assertEqual(
            parsed.curve(FeatureSet.T3, KpType.UNCORR, "percent").expr.to_prefix(), "mul(x0, 0.05)"
        )
        self.assertEqual(serialize_model(parsed), text)

    def test_header_required(self):
        """Test missing and unsupported version headers."""
        with self.assertRaises(ModelError):
            parse_model("")
        with self.assertRaises(ModelError):
            parse_model("# ttp-forge parameter model v99\n")

    def test_malformed_rows(self):
        """Test that bad rows report their line."""
        for row in ("T3,uncorr,w0", "T3,uncorr,w0,cubic,1", "T9,uncorr,w0,linear,1,2", "T3,uncorr,w0,linear,a,b"):
            with self.subTest(row=row), self.assertRaises(ModelError) as ctx:
                parse_model(f"{MODEL_HEADER}\nfeature_set,kp_type,param,kind,coeffs\n{row}\n")
            self.assertIn("line 3", str(ctx.exception))

    def test_save_and_load(self):
        """Test file helpers."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "models" / "m.csv"
            save_model(t3_model(), path)
            self.assertEqual(load_model(path).curves, t3_model().curves)

    def test_comments_follow_header(self):
        """Test that comment lines sit under the header and are skipped on load."""
        comments = ["built by: ttp-forge build-model --budget desk --seed 0", "suite: capacity factors 1,5,10"]
        text = serialize_model(t3_model(), comments)
        lines = text.splitlines()
        self.assertEqual(lines[0], MODEL_HEADER)
        self.assertEqual(lines[1:3], [f"# {comment}" for comment in comments])
        self.assertEqual(lines[3], "feature_set,kp_type,param,kind,coeffs")
        self.assertEqual(parse_model(text).curves, t3_model().curves)

    def test_missing_default_model(self):
        """Test that an unbuilt packaged model names the command that builds it."""
        with tempfile.TemporaryDirectory() as tmp:
            missing = Path(tmp) / "parameter_model.csv"
            with patch("ttp_forge.parameter_model.default_model_path", return_value=missing):
                with self.assertRaises(ModelError) as ctx:
                    load_default_model()
        self.assertIn("ttp-forge build-model", str(ctx.exception))


class TestFitting(unittest.TestCase):
    """Test curve fitting from genotype records."""

    def test_fit_piecewise_medians(self):
        """Test per-C medians held constant past the data."""
        curve = fit_piecewise(np.array([1.0, 1.0, 3.0]), np.array([0.0, 2.0, 5.0]))
        self.assertEqual(curve.kind, "pwl")
        self.assertEqual(curve.coeffs[:3], (1.0, 3.0, 5.0))
        self.assertEqual(curve.coeffs[-1], 5.0)

    def test_fit_linear(self):
        """Test an exact line and the single-C fallback."""
        c = np.array(CAPACITY_FACTORS, dtype=float)
        curve = fit_linear(c, 0.1 + 0.05 * c)
        self.assertAlmostEqual(curve.coeffs[0], 0.1)
        self.assertAlmostEqual(curve.coeffs[1], 0.05)
        self.assertEqual(fit_linear(np.array([4.0, 4.0]), np.array([1.0, 2.0])).kind, "pwl")

    def test_anomaly_detection(self):
        """Test that a curve far from the medians is flagged."""
        c = np.array([1.0, 1.0, 5.0, 5.0, 10.0, 10.0])
        y = np.array([0.1, 0.2, 0.5, 0.6, 1.0, 1.1])
        self.assertFalse(is_anomalous(fit_linear(c, y), c, y))
        self.assertTrue(is_anomalous(ParameterCurve.linear(100.0, 0.0), c, y))

    def test_fit_model_linear(self):
        """Test that fitted curves recover the generating lines."""
        model = fit_parameter_model(line_records(), method="linear")
        self.assertTrue(model.covers(FeatureSet.T3, KpType.UNCORR))
        self.assertEqual(len(model), 3)
        percent = model.curve(FeatureSet.T3, KpType.UNCORR, "percent")
        self.assertAlmostEqual(percent(4), 0.4)
        self.assertAlmostEqual(model.curve(FeatureSet.T3, KpType.UNCORR, "w0")(7), 0.6)

    def test_fit_model_pwl(self):
        """Test the piecewise method on two knapsack types."""
        records = line_records() + line_records(KpType.BOUNDED_STRONGLY_CORR)
        model = fit_parameter_model(records, method="pwl")
        self.assertEqual(len(model), 6)
        self.assertAlmostEqual(model.curve(FeatureSet.T3, KpType.BOUNDED_STRONGLY_CORR, "percent")(10), 0.7)

    def test_fit_model_unknown_method(self):
        """Test that the fit method is validated."""
        with self.assertRaises(ValueError):
            fit_parameter_model(line_records(), method="spline")

    def test_fit_sr(self):
        """Test that SR fitting yields a finite curve over the C range."""
        c = np.array(CAPACITY_FACTORS, dtype=float)
        config = SrConfig(population=60, generations=5, init_depth=(1, 3), max_depth=4)
        curve = fit_sr(c, 0.2 + 0.05 * c, config, runs=2, seed=3)
        self.assertIn(curve.kind, ("expr", "linear"))
        self.assertTrue(np.isfinite(curve(c)).all())
        self.assertEqual(fit_sr(np.array([2.0, 2.0]), np.array([0.1, 0.3]), config).kind, "pwl")


class TestValidation(unittest.TestCase):
    """Test held-out splits and prediction errors."""

    def test_split_records(self):
        """Test split sizes, disjointness and reproducibility."""
        records = line_records()
        train, held_out = split_records(records, 0.2, seed=4)
        self.assertEqual((len(train), len(held_out)), (16, 4))
        self.assertEqual(sorted(r.instance for r in train + held_out), sorted(r.instance for r in records))
        self.assertEqual(split_records(records, 0.2, seed=4), (train, held_out))
        self.assertEqual(len(split_records(records[:2], 0.01)[1]), 1)

    def test_split_invalid(self):
        """Test rejected fractions and too few records."""
        for holdout in (0.0, 1.0):
            with self.assertRaises(ValueError):
                split_records(line_records(), holdout)
        with self.assertRaises(ValueError):
            split_records(line_records()[:1], 0.5)

    def test_prediction_errors(self):
        """Test per-parameter mean errors and skipped zero-weight records."""
        model = fit_parameter_model(line_records(), method="linear")
        zero = dataclasses.replace(line_records()[0], values=(0.0, 0.0, 0.9))
        errors = prediction_errors(model, [*line_records(), zero])
        self.assertEqual(set(errors), {(FeatureSet.T3, "w0"), (FeatureSet.T3, "w1"), (FeatureSet.T3, "percent")})
        self.assertAlmostEqual(errors[(FeatureSet.T3, "w0")], 0.01)
        self.assertAlmostEqual(errors[(FeatureSet.T3, "w1")], 0.01)
        self.assertAlmostEqual(errors[(FeatureSet.T3, "percent")], 0.0)
        with self.assertRaises(ModelError):
            prediction_errors(model, line_records(KpType.BOUNDED_STRONGLY_CORR))

    @pytest.mark.slow
    def test_linear_model_predicts_held_out_genotypes(self):
        """Test that curves fitted on 80% of meta-EA genotypes predict the other 20%."""
        coords = uniform_coords(np.random.default_rng(0), 25)
        records = []
        for item_factor in (1, 3, 5, 10):
            for c in CAPACITY_FACTORS:
                instance = generate_instance(coords, item_factor, KpType.UNCORR, c, seed=100 * item_factor + c)
                result = best_meta_genotype(instance, reference_tour(instance), FeatureSet.T3, 400, runs=2, seed=c)
                genotype = result.genotype
                records.append(
                    GenotypeRecord(
                        instance=instance.name,
                        kp_type=KpType.UNCORR,
                        capacity_factor=c,
                        item_factor=instance.item_factor,
                        feature_set=FeatureSet.T3,
                        values=(*genotype.weights, genotype.percent),
                        objective=result.objective,
                    )
                )
        train, held_out = split_records(records, 0.2, seed=1)
        model = fit_parameter_model(train, method="linear")
        for (feature_set, param), error in prediction_errors(model, held_out).items():
            self.assertLessEqual(error, 0.15, f"{feature_set.name}/{param}")


if __name__ == "__main__":
    unittest.main()

"""Unit tests for sr.fitness and sr.selection modules."""

from __future__ import annotations

import math
import unittest

import numpy as np

from ttp_forge.config import DALEX_SIGMA, FITNESS_PENALTY
from ttp_forge.enums import SrTask
from ttp_forge.sr.expr import parse_prefix
from ttp_forge.sr.fitness import (
    SrDataset,
    absolute_case_errors,
    bce_case_errors,
    bce_fitness,
    fitness,
    mae_fitness,
)
from ttp_forge.sr.selection import dalex_select, dalex_select_many


class TestSrDataset(unittest.TestCase):
    """Test dataset validation."""

    def test_shapes(self):
        """Test normalized shapes and counts."""
        dataset = SrDataset(np.zeros((4, 2)), [0, 1, 1, 0], SrTask.BINARY_BCE)
        self.assertEqual(dataset.cases, 4)
        self.assertEqual(dataset.n_features, 2)

    def test_invalid(self):
        """Test mismatched rows, empty data, bad labels and names."""
        with self.assertRaises(ValueError):
            SrDataset(np.zeros((3, 2)), [0, 1], SrTask.REGRESSION_MAE)
        with self.assertRaises(ValueError):
            SrDataset(np.zeros((0, 2)), [], SrTask.REGRESSION_MAE)
        with self.assertRaises(ValueError):
            SrDataset(np.zeros((2, 1)), [0, 2], SrTask.BINARY_BCE)
        with self.assertRaises(ValueError):
            SrDataset(np.zeros((2, 1)), [0, 1], SrTask.BINARY_BCE, variable_names=("a", "b"))


class TestLosses(unittest.TestCase):
    """Test BCE and MAE losses."""

    def test_bce_of_zero_output(self):
        """Test that a zero output costs ln 2 per case."""
        dataset = SrDataset(np.zeros((2, 1)), [0, 1], SrTask.BINARY_BCE)
        self.assertAlmostEqual(bce_fitness(parse_prefix("0.0", 1), dataset), math.log(2))

    def test_bce_confident_predictions(self):
        """Test that confident correct outputs approach zero loss."""
        errors = bce_case_errors(np.array([30.0, -30.0]), np.array([1.0, 0.0]))
        self.assertTrue((errors < 1e-10).all())

    def test_bce_is_clamped(self):
        """Test that confident wrong outputs stay finite."""
        errors = bce_case_errors(np.array([1000.0]), np.array([0.0]))
        self.assertTrue(np.isfinite(errors).all())
        self.assertLess(errors[0], FITNESS_PENALTY)

    def test_non_finite_penalized(self):
        """Test that inf and nan outputs get the penalty."""
        np.testing.assert_array_equal(
            bce_case_errors(np.array([np.nan, np.inf]), np.array([1.0, 1.0])), [FITNESS_PENALTY] * 2
        )
        np.testing.assert_array_equal(
            absolute_case_errors(np.array([np.inf, 1.0]), np.array([0.0, 3.0])), [FITNESS_PENALTY, 2.0]
        )

    def test_mae(self):
        """Test mean absolute error and dispatch by task."""
        dataset = SrDataset(np.array([[1.0], [2.0], [4.0]]), [1.0, 1.0, 1.0], SrTask.REGRESSION_MAE)
        expr = parse_prefix("x0", 1)
        self.assertAlmostEqual(mae_fitness(expr, dataset), 4.0 / 3.0)
        self.assertAlmostEqual(fitness(expr, dataset), 4.0 / 3.0)


class TestDalexSelection(unittest.TestCase):
    """Test DALex parent selection."""

    def test_dominant_individual(self):
        """Test that an individual best on every case always wins."""
        errors = np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [2.0, 2.0, 2.0]])
        rng = np.random.default_rng(0)
        for _ in range(50):
            self.assertEqual(dalex_select(errors, DALEX_SIGMA, rng), 1)

    def test_zero_sigma_uses_mean(self):
        """Test that sigma 0 picks by mean error, lower index on ties."""
        rng = np.random.default_rng(1)
        self.assertEqual(dalex_select(np.array([[1.0, 0.0], [0.0, 1.0]]), 0.0, rng), 0)
        self.assertEqual(dalex_select(np.array([[2.0, 0.0], [0.0, 1.0]]), 0.0, rng), 1)

    def test_specialists_both_selected(self):
        """Test that large sigma lets case specialists win."""
        errors = np.array([[0.0, 10.0], [10.0, 0.0]])
        chosen = dalex_select_many(errors, 400, DALEX_SIGMA, np.random.default_rng(2))
        self.assertGreater((chosen == 0).sum(), 100)
        self.assertGreater((chosen == 1).sum(), 100)

    def test_select_many_batches(self):
        """Test counts beyond one batch and index range."""
        errors = np.random.default_rng(3).random((10, 5))
        chosen = dalex_select_many(errors, 600, DALEX_SIGMA, np.random.default_rng(4))
        self.assertEqual(chosen.shape, (600,))
        self.assertTrue(((chosen >= 0) & (chosen < 10)).all())

    def test_invalid(self):
        """Test that empty matrices and negative sigma are rejected."""
        rng = np.random.default_rng(5)
        with self.assertRaises(ValueError):
            dalex_select(np.zeros((0, 3)), DALEX_SIGMA, rng)
        with self.assertRaises(ValueError):
            dalex_select(np.zeros((2, 2)), -1.0, rng)

    def test_argument_order(self):
        """Test that sigma precedes the generator, positionally and by keyword."""
        errors = np.array([[2.0, 0.0], [0.0, 1.0]])
        by_position = dalex_select(errors, 0.0, np.random.default_rng(6))
        by_keyword = dalex_select(errors, sigma=0.0, rng=np.random.default_rng(6))
        self.assertEqual(by_position, by_keyword)
        many = dalex_select_many(errors, 5, sigma=0.0, rng=np.random.default_rng(7))
        self.assertEqual(many.tolist(), [1] * 5)


if __name__ == "__main__":
    unittest.main()

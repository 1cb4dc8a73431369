"""Unit tests for baselines module."""

from __future__ import annotations

import unittest
from unittest.mock import patch

import numpy as np
import pytest

from ttp_forge import baselines
from ttp_forge.baselines import (
    PackIterativeConfig,
    insertion,
    insertion_scores,
    pack_iterative,
    pack_iterative_scores,
)
from ttp_forge.objective import EvalCounter, PackingPlan, TourProfile, evaluate
from ttp_forge.tests.helpers import exhaustive_best, random_instance
from ttp_forge.tour import reference_tour


class TestPackIterative(unittest.TestCase):
    """Test packIterative."""

    def setUp(self):
        self.instance = random_instance(12, n=10, items_per_city=3)
        self.tour = reference_tour(self.instance)

    def test_config_validation(self):
        """Test rejected settings."""
        with self.assertRaises(ValueError):
            PackIterativeConfig(alpha_lo=5.0, alpha_hi=1.0)
        with self.assertRaises(ValueError):
            PackIterativeConfig(alpha_iters=0)
        with self.assertRaises(ValueError):
            PackIterativeConfig(batch_fraction=0.0)

    def test_scores(self):
        """Test the log-space score p^a / (w^a rDist)."""
        profile = TourProfile.build(self.instance, self.tour)
        scores = pack_iterative_scores(profile, 2.0)
        expected = np.log(self.instance.profits**2 / (self.instance.weights**2 * profile.rdist))
        np.testing.assert_allclose(scores, expected)

    def test_result_consistent(self):
        """Test feasibility, reported objective and the empty-plan floor."""
        counter = EvalCounter()
        result = pack_iterative(self.instance, self.tour, counter=counter)
        self.assertLessEqual(result.plan.total_weight, self.instance.capacity)
        self.assertAlmostEqual(result.objective, evaluate(self.instance, self.tour, result.plan))
        empty = evaluate(self.instance, self.tour, PackingPlan.empty(self.instance))
        self.assertGreaterEqual(result.objective, empty)
        self.assertTrue(result.detail.startswith("alpha="))
        self.assertGreater(counter.count, 0)

    def test_evaluations_per_alpha(self):
        """Test that the golden-section search tries alpha_iters exponents."""
        with patch.object(baselines, "_pack_in_batches", wraps=baselines._pack_in_batches) as packer:
            pack_iterative(self.instance, self.tour, PackIterativeConfig(alpha_iters=7))
        self.assertEqual(packer.call_count, 7)

    def test_single_iteration_uses_midpoint(self):
        """Test alpha_iters=1."""
        result = pack_iterative(self.instance, self.tour, PackIterativeConfig(alpha_lo=1.0, alpha_hi=3.0, alpha_iters=1))
        self.assertEqual(result.detail, "alpha=2.0000")

    def test_free_travel_packs_everything(self):
        """Test that without rent every item is packed when all fit."""
        instance = random_instance(13, n=8, items_per_city=2, capacity_fraction=1.0, renting_ratio=0.0)
        result = pack_iterative(instance, reference_tour(instance))
        self.assertEqual(result.plan.packed_count, instance.m_total)
        self.assertAlmostEqual(result.objective, float(instance.profits.sum()))


class TestInsertion(unittest.TestCase):
    """Test Insertion."""

    def setUp(self):
        self.instance = random_instance(14, n=10, items_per_city=3)
        self.tour = reference_tour(self.instance)

    def test_scores_without_rent(self):
        """Test that every score reduces to the profit when R = 0."""
        instance = random_instance(15, renting_ratio=0.0)
        profile = TourProfile.build(instance, reference_tour(instance))
        for name, scores in insertion_scores(profile).items():
            with self.subTest(name=name):
                np.testing.assert_allclose(scores, instance.profits)

    def test_score_names(self):
        """Test the three score variants."""
        profile = TourProfile.build(self.instance, self.tour)
        self.assertEqual(set(insertion_scores(profile)), {"single", "full", "spread"})

    def test_single_score_is_exact_gain(self):
        """Test that the single-item score equals f({j}) - f(empty) for every fitting item."""
        for seed in range(20):
            instance = random_instance(200 + seed, n=9, items_per_city=3)
            profile = TourProfile.build(instance, reference_tour(instance))
            empty_value = profile.evaluate(PackingPlan.empty(instance))
            single = insertion_scores(profile)["single"]
            for index in range(instance.m_total):
                if instance.weights[index] > instance.capacity:
                    continue
                gain = profile.evaluate(PackingPlan.from_indices(instance, [index])) - empty_value
                self.assertLessEqual(abs(single[index] - gain), 1e-9 * max(1.0, abs(gain)), f"seed {seed}")

    def test_result_consistent(self):
        """Test feasibility, reported objective and the empty-plan floor."""
        counter = EvalCounter()
        result = insertion(self.instance, self.tour, counter=counter)
        self.assertLessEqual(result.plan.total_weight, self.instance.capacity)
        self.assertAlmostEqual(result.objective, evaluate(self.instance, self.tour, result.plan))
        empty = evaluate(self.instance, self.tour, PackingPlan.empty(self.instance))
        self.assertGreaterEqual(result.objective, empty)
        self.assertIn(result.detail, ("none", "single", "full", "spread"))
        self.assertLessEqual(counter.count, 1 + 3 * self.instance.m_total)

    def test_free_travel_packs_everything(self):
        """Test that without rent every fitting item is packed."""
        instance = random_instance(16, n=8, items_per_city=2, capacity_fraction=1.0, renting_ratio=0.0)
        result = insertion(instance, reference_tour(instance))
        self.assertEqual(result.plan.packed_count, instance.m_total)


class TestExhaustiveOracle(unittest.TestCase):
    """Compare both baselines with every feasible plan on 12-item instances."""

    @pytest.mark.slow
    def test_against_exhaustive_best(self):
        """Test that neither baseline beats the optimum and packIterative closes most of the gap."""
        closed = []
        for seed in range(30):
            instance = random_instance(300 + seed, n=5, items_per_city=3)
            tour = reference_tour(instance)
            optimum = exhaustive_best(instance, list(tour.order))
            empty = evaluate(instance, tour, PackingPlan.empty(instance))
            tolerance = 1e-9 * max(1.0, abs(optimum))
            packed = pack_iterative(instance, tour)
            for result in (insertion(instance, tour), packed):
                self.assertLessEqual(result.plan.total_weight, instance.capacity)
                self.assertLessEqual(result.objective, optimum + tolerance, f"seed {seed}")
                self.assertGreaterEqual(result.objective, empty - tolerance, f"seed {seed}")
            if optimum - empty > tolerance:
                closed.append((packed.objective - empty) / (optimum - empty))
        self.assertGreater(len(closed), 10)
        self.assertGreaterEqual(float(np.median(closed)), 0.9)


if __name__ == "__main__":
    unittest.main()

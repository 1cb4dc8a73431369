"""Unit tests for instance_generation module."""

from __future__ import annotations

import unittest

import numpy as np

from ttp_forge.enums import KpType
from ttp_forge.instance_generation import capacity_for, generate_instance, instance_name, sample_items
from ttp_forge.instance_io import serialize_ttp
from ttp_forge.knapsack import kp_dp_optimal
from ttp_forge.objective import PackingPlan, evaluate, tour_time
from ttp_forge.tour import reference_tour


def random_coords(seed: int, n: int) -> list[tuple[float, float]]:
    rng = np.random.default_rng(seed)
    return [(float(x), float(y)) for x, y in rng.integers(0, 200, size=(n, 2))]


class TestSampling(unittest.TestCase):
    """Test item sampling per knapsack type."""

    def test_counts_and_cities(self):
        """Test F items at every city but the first, city-major."""
        items = sample_items(np.random.default_rng(0), 5, 3, KpType.UNCORR)
        self.assertEqual(len(items), 12)
        self.assertEqual([item.city for item in items[:4]], [2, 2, 2, 3])
        self.assertEqual([item.id for item in items], list(range(1, 13)))

    def test_uncorrelated_ranges(self):
        """Test inclusive 1..1000 ranges."""
        items = sample_items(np.random.default_rng(1), 200, 1, KpType.UNCORR)
        self.assertTrue(all(1 <= item.weight <= 1000 and 1 <= item.profit <= 1000 for item in items))

    def test_similar_weights(self):
        """Test weights in 1000..1010."""
        items = sample_items(np.random.default_rng(2), 100, 1, KpType.UNCORR_SIMILAR_WEIGHTS)
        self.assertTrue(all(1000 <= item.weight <= 1010 for item in items))

    def test_strongly_correlated(self):
        """Test p = w + 100."""
        items = sample_items(np.random.default_rng(3), 100, 1, KpType.BOUNDED_STRONGLY_CORR)
        self.assertTrue(all(item.profit == item.weight + 100 for item in items))

    def test_capacity_for(self):
        """Test W = floor(C * sum w / 11)."""
        items = sample_items(np.random.default_rng(4), 10, 1, KpType.UNCORR)
        total = sum(item.weight for item in items)
        self.assertEqual(capacity_for(items, 3), (3 * total) // 11)


class TestGenerateInstance(unittest.TestCase):
    """Test generate_instance."""

    def test_name_convention(self):
        """Test the benchmark name layout."""
        self.assertEqual(instance_name("eil51", 150, KpType.UNCORR, 5), "eil51_n150_uncorr_05")

    def test_metadata(self):
        """Test kp_type, capacity factor and item factor round trips."""
        instance = generate_instance(random_coords(0, 9), 3, KpType.UNCORR, 7, seed=1, base_name="t")
        self.assertIs(instance.kp_type, KpType.UNCORR)
        self.assertEqual(instance.m_total, 24)
        self.assertEqual(instance.capacity_factor, 7)
        self.assertEqual(instance.item_factor, 3.0)
        self.assertEqual(instance.name, "t_n24_uncorr_07")

    def test_invalid_factors(self):
        """Test that F and C outside their sets are rejected."""
        with self.assertRaises(ValueError):
            generate_instance(random_coords(0, 5), 2, KpType.UNCORR, 5)
        with self.assertRaises(ValueError):
            generate_instance(random_coords(0, 5), 1, KpType.UNCORR, 11)

    def test_deterministic(self):
        """Test that the same seed regenerates identical files."""
        coords = random_coords(1, 8)
        first = generate_instance(coords, 1, KpType.BOUNDED_STRONGLY_CORR, 4, seed=9)
        second = generate_instance(coords, 1, KpType.BOUNDED_STRONGLY_CORR, 4, seed=9)
        self.assertEqual(serialize_ttp(first), serialize_ttp(second))

    def test_calibration_zeroes_optimal_packing(self):
        """Test that the KP-optimal plan along the reference tour scores about zero."""
        for seed in range(30):
            kp_type = list(KpType)[seed % 3]
            coords = random_coords(100 + seed, 6 + seed % 10)
            instance = generate_instance(coords, 1, kp_type, 1 + seed % 10, seed=seed)
            tour = reference_tour(instance)
            solution = kp_dp_optimal(instance.items, instance.capacity)
            plan = PackingPlan.from_indices(instance, [item_id - 1 for item_id in solution.picked])
            value = evaluate(instance, tour, plan)
            self.assertLessEqual(abs(value), 1e-6 * solution.total_profit, f"seed {seed}")

    def test_calibration_uses_loaded_travel_time(self):
        """Test that R divides by the loaded tour time, not the empty-knapsack time."""
        coords = random_coords(7, 10)
        instance = generate_instance(coords, 3, KpType.UNCORR, 8, seed=4)
        tour = reference_tour(instance)
        solution = kp_dp_optimal(instance.items, instance.capacity)
        plan = PackingPlan.from_indices(instance, [item_id - 1 for item_id in solution.picked])
        loaded, empty = tour_time(instance, tour, plan), tour_time(instance, tour, PackingPlan.empty(instance))
        self.assertGreater(loaded, empty)
        self.assertAlmostEqual(instance.renting_ratio, solution.total_profit / loaded)
        self.assertLess(instance.renting_ratio, solution.total_profit / empty)


if __name__ == "__main__":
    unittest.main()

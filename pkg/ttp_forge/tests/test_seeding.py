"""Unit tests for seeding module."""

from __future__ import annotations

import unittest

from ttp_forge.seeding import derive_seed, make_rng, spawn_seeds


class TestSeeding(unittest.TestCase):
    """Test seed derivation."""

    def test_derive_is_stable(self):
        """Test that the same key path gives the same seed."""
        self.assertEqual(derive_seed(7, 1, 2), derive_seed(7, 1, 2))

    def test_key_paths_differ(self):
        """Test that sibling and reordered paths give distinct seeds."""
        seeds = {derive_seed(7, 1, 2), derive_seed(7, 2, 1), derive_seed(7, 1), derive_seed(8, 1, 2)}
        self.assertEqual(len(seeds), 4)

    def test_range(self):
        """Test that derived seeds are non-negative 63-bit integers."""
        for key in range(100):
            seed = derive_seed(0, key)
            self.assertGreaterEqual(seed, 0)
            self.assertLess(seed, 2**63)

    def test_spawn(self):
        """Test spawned seeds against derive_seed."""
        self.assertEqual(spawn_seeds(3, 4), [derive_seed(3, i) for i in range(4)])
        self.assertEqual(spawn_seeds(3, 0), [])

    def test_make_rng(self):
        """Test that a seed fixes the stream."""
        self.assertEqual(make_rng(5).integers(1000, size=3).tolist(), make_rng(5).integers(1000, size=3).tolist())


if __name__ == "__main__":
    unittest.main()

"""Unit tests for sr.expr module."""

from __future__ import annotations

import unittest

import numpy as np

from ttp_forge.errors import ParseError
from ttp_forge.sr.expr import (
    POLYNOMIAL_FUNCTION_SET,
    REGRESSION_FUNCTION_SET,
    ExprTree,
    add,
    build_program,
    eval_expr,
    mul,
    parse_prefix,
    resolve_function_set,
)


class TestExprTree(unittest.TestCase):
    """Test program structure and evaluation."""

    def test_execute(self):
        """Test vectorized evaluation of a nested program."""
        expr = parse_prefix("add(mul(x0, x1), 0.5)", n_features=2)
        np.testing.assert_allclose(expr.execute(np.array([[2.0, 3.0], [1.0, -1.0]])), [6.5, -0.5])

    def test_single_terminal(self):
        """Test programs made of one variable or constant."""
        inputs = np.array([[4.0], [5.0]])
        np.testing.assert_allclose(ExprTree([0], 1).execute(inputs), [4.0, 5.0])
        np.testing.assert_allclose(ExprTree([1.5], 1).execute(inputs), [1.5, 1.5])
        self.assertEqual(ExprTree([0], 1).depth, 0)

    def test_shape_properties(self):
        """Test length, depth and referenced variables."""
        expr = parse_prefix("add(mul(x0, x1), 0.5)", n_features=3)
        self.assertEqual(expr.length, 5)
        self.assertEqual(expr.depth, 2)
        self.assertEqual(expr.variables(), frozenset({0, 1}))
        self.assertTrue(expr.uses_only(POLYNOMIAL_FUNCTION_SET))

    def test_protected_division(self):
        """Test that near-zero denominators yield 1."""
        expr = parse_prefix("div(x0, x1)", n_features=2)
        result = expr.execute(np.array([[3.0, 0.0], [3.0, 1e-7], [3.0, 2.0]]))
        np.testing.assert_allclose(result, [1.0, 1.0, 1.5])
        self.assertFalse(expr.uses_only(POLYNOMIAL_FUNCTION_SET))

    def test_eval_expr_row(self):
        """Test single-row evaluation."""
        self.assertEqual(eval_expr(parse_prefix("sub(x0, x1)", 2), [5.0, 2.0]), 3.0)

    def test_invalid_programs(self):
        """Test that malformed programs are rejected."""
        with self.assertRaises(ValueError):
            ExprTree([add, 0], 1)
        with self.assertRaises(ValueError):
            ExprTree([0, 1], 2)
        with self.assertRaises(ValueError):
            ExprTree([mul, 0, 2], 2)
        with self.assertRaises(ValueError):
            ExprTree([], 1)

    def test_equality_by_text(self):
        """Test that equal programs compare and hash equal."""
        first = parse_prefix("add(x0, 1.0)", 1)
        second = ExprTree([add, 0, 1.0], 1)
        self.assertEqual(first, second)
        self.assertEqual(len({first, second}), 1)


class TestPrefixText(unittest.TestCase):
    """Test the nested-call notation."""

    def test_to_prefix_format(self):
        """Test canonical rendering."""
        expr = parse_prefix("add( mul(x0,x1) , 0.5 )", 2)
        self.assertEqual(expr.to_prefix(), "add(mul(x0, x1), 0.5)")

    def test_negative_and_exponent_constants(self):
        """Test signed and scientific constants."""
        expr = parse_prefix("sub(x0, -1.5e-3)", 1)
        self.assertEqual(expr.program[2], -1.5e-3)

    def test_parse_errors(self):
        """Test missing operands, unknown names and trailing tokens."""
        for text in ("add(x0)", "pow(x0, x1)", "add(x0, x1) x0", "add(x0, x1", "x0 $"):
            with self.subTest(text=text), self.assertRaises(ParseError):
                parse_prefix(text, 2)

    def test_variable_out_of_range(self):
        """Test that parsed variables respect n_features."""
        with self.assertRaises(ParseError):
            parse_prefix("add(x0, x3)", 2)


class TestGeneticOperators(unittest.TestCase):
    """Test random programs and the operators built on them."""

    def setUp(self):
        self.functions = resolve_function_set(REGRESSION_FUNCTION_SET)

    def test_resolve_unknown(self):
        """Test that unknown primitives list the valid options."""
        with self.assertRaises(ValueError) as ctx:
            resolve_function_set(["add", "sin"])
        self.assertIn("Valid options", str(ctx.exception))
        with self.assertRaises(ValueError):
            resolve_function_set([])

    def test_build_program_is_valid(self):
        """Test that grown programs are valid and respect the depth range."""
        rng = np.random.default_rng(0)
        for method in ("full", "grow", None):
            for _ in range(100):
                expr = ExprTree(build_program(rng, self.functions, 3, (2, 4), method), 3)
                self.assertLessEqual(expr.depth, 4)
                self.assertGreaterEqual(expr.depth, 1)

    def test_full_method_reaches_depth(self):
        """Test that full trees reach the drawn depth exactly."""
        rng = np.random.default_rng(1)
        for _ in range(50):
            expr = ExprTree(build_program(rng, self.functions, 2, (3, 3), "full"), 2)
            self.assertEqual(expr.depth, 3)

    def test_unknown_build_method(self):
        """Test that the build method is validated."""
        with self.assertRaises(ValueError):
            build_program(np.random.default_rng(0), self.functions, 2, method="half")

    def test_operators_produce_valid_programs(self):
        """Test crossover and every mutation on random parents."""
        rng = np.random.default_rng(2)
        for _ in range(200):
            parent = ExprTree(build_program(rng, self.functions, 2, (1, 5)), 2)
            donor = ExprTree(build_program(rng, self.functions, 2, (1, 5)), 2)
            ExprTree(parent.crossover(donor.program, rng), 2)
            ExprTree(parent.subtree_mutation(rng, self.functions), 2)
            hoisted = ExprTree(parent.hoist_mutation(rng), 2)
            self.assertLessEqual(hoisted.length, parent.length)
            ExprTree(parent.point_mutation(rng, self.functions, 0.5), 2)

    def test_point_mutation_without_replacement(self):
        """Test that a zero replacement rate changes nothing."""
        rng = np.random.default_rng(3)
        parent = ExprTree(build_program(rng, self.functions, 2), 2)
        self.assertEqual(ExprTree(parent.point_mutation(rng, self.functions, 0.0), 2), parent)

    def test_no_constants(self):
        """Test that const_range=None yields only variables as terminals."""
        rng = np.random.default_rng(4)
        for _ in range(50):
            program = build_program(rng, self.functions, 2, const_range=None)
            self.assertFalse(any(isinstance(node, float) for node in program))


if __name__ == "__main__":
    unittest.main()

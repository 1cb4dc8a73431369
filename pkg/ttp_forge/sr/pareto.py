"""Monomial extraction and pareto bookkeeping for evolved expressions.

A classifier expression is expanded with sympy into a sum of monomials and
its coefficients are dropped, leaving the set of terms it uses. Best-of-
generation individuals are kept on a front trading loss against term count.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
import logging

import sympy

from ttp_forge.errors import UnsupportedExpansionError
from ttp_forge.sr.expr import ExprTree, Function

logger = logging.getLogger(__name__)

CONSTANT_TERM = "1"
# Coefficients left over from floating-point cancellation
_ZERO_COEFFICIENT = 1e-12


def to_sympy(expr: ExprTree) -> sympy.Expr:
    """Convert a polynomial program into a sympy expression over x0..xk.

    Raises:
        UnsupportedExpansionError: If the program uses a non-polynomial operator
    """
    symbols = sympy.symbols(f"x0:{max(expr.n_features, 1)}")
    operators = {
        "add": lambda a, b: a + b,
        "sub": lambda a, b: a - b,
        "mul": lambda a, b: a * b,
    }
    stack: list[list] = []
    for node in expr.program:
        if isinstance(node, Function):
            if node.name not in operators:
                raise UnsupportedExpansionError(f"Cannot expand '{node.name}' in {expr.to_prefix()}")
            stack.append([node.name])
            continue
        value = symbols[node] if isinstance(node, int) else sympy.Float(node)
        if not stack:
            return value
        stack[-1].append(value)
        while len(stack[-1]) == 3:
            name, left, right = stack.pop()
            value = operators[name](left, right)
            if not stack:
                return value
            stack[-1].append(value)
    raise AssertionError("unreachable: program validated on construction")


def render_monomial(exponents: Sequence[int]) -> str:
    """Render exponents as "x0^2*x1"; all-zero exponents render as "1"."""
    factors = []
    for index, power in enumerate(exponents):
        if power == 1:
            factors.append(f"x{index}")
        elif power > 1:
            factors.append(f"x{index}^{power}")
    return "*".join(factors) if factors else CONSTANT_TERM


def _monomial_key(exponents: tuple[int, ...]) -> tuple:
    return (sum(exponents), tuple(-power for power in exponents))


def expand_polynomial(expr: ExprTree) -> dict[tuple[int, ...], float]:
    """Expanded coefficients keyed by per-variable exponents.

    Coefficients within 1e-12 of zero are dropped.

    Raises:
        UnsupportedExpansionError: If the program uses division or another
            non-polynomial operator
    """
    symbols = sympy.symbols(f"x0:{max(expr.n_features, 1)}")
    poly = sympy.Poly(sympy.expand(to_sympy(expr)), *symbols)
    coefficients = {}
    for monomial, coefficient in poly.terms():
        value = float(coefficient)
        if abs(value) > _ZERO_COEFFICIENT:
            coefficients[tuple(monomial)] = value
    return coefficients


def expand_to_monomials(expr: ExprTree) -> frozenset[str]:
    """Monomials of the expanded expression with coefficients removed.

    Raises:
        UnsupportedExpansionError: If the program uses division or another
            non-polynomial operator
    """
    return frozenset(render_monomial(monomial) for monomial in expand_polynomial(expr))


def sorted_terms(terms: Iterable[str]) -> list[str]:
    """Terms ordered by degree, then by variable."""

    def key(term: str) -> tuple:
        if term == CONSTANT_TERM:
            return (0, ())
        powers: dict[int, int] = {}
        for factor in term.split("*"):
            name, _, power = factor.partition("^")
            powers[int(name[1:])] = int(power) if power else 1
        width = max(powers) + 1
        return _monomial_key(tuple(powers.get(i, 0) for i in range(width)))

    return sorted(terms, key=key)


def format_term_set(terms: Iterable[str]) -> str:
    """Canonical text form, e.g. "x0 + x1 + x0*x1"."""
    return " + ".join(sorted_terms(terms))


@dataclass(frozen=True)
class ParetoEntry:
    """A front member.

    Attributes:
        expr: Expression
        loss: Training loss
        term_count: Number of distinct monomials
        term_set: The monomials
    """

    expr: ExprTree
    loss: float
    term_set: frozenset[str]

    @property
    def term_count(self) -> int:
        return len(self.term_set)

    @classmethod
    def from_expr(cls, expr: ExprTree, loss: float) -> ParetoEntry:
        return cls(expr=expr, loss=loss, term_set=expand_to_monomials(expr))

    def dominates(self, other: ParetoEntry) -> bool:
        """Strictly better loss with no more terms."""
        return self.loss < other.loss and self.term_count <= other.term_count


def pareto_update(front: Sequence[ParetoEntry], candidate: ParetoEntry) -> list[ParetoEntry]:
    """Offer a candidate to a front.

    The candidate joins unless an incumbent dominates it or has the same
    loss and term set; incumbents it dominates are removed.
    """
    for incumbent in front:
        if incumbent.dominates(candidate):
            return list(front)
        if incumbent.loss == candidate.loss and incumbent.term_set == candidate.term_set:
            return list(front)
    survivors = [incumbent for incumbent in front if not candidate.dominates(incumbent)]
    survivors.append(candidate)
    survivors.sort(key=lambda entry: (entry.term_count, entry.loss))
    return survivors


def offer_expression(front: Sequence[ParetoEntry], expr: ExprTree, loss: float) -> list[ParetoEntry]:
    """Expand and offer an expression; non-polynomial ones leave the front unchanged."""
    try:
        entry = ParetoEntry.from_expr(expr, loss)
    except UnsupportedExpansionError as e:
        logger.debug("Skipping expansion: %s", e)
        return list(front)
    return pareto_update(front, entry)


@dataclass(frozen=True)
class TermSetCount:
    term_set: frozenset[str]
    count: int

    @property
    def size(self) -> int:
        return len(self.term_set)


def term_set_frequencies(fronts: Iterable[Sequence[ParetoEntry]], min_count: int = 1) -> dict[int, list[TermSetCount]]:
    """Count identical term sets across fronts, grouped by set size.

    Args:
        fronts: Pareto fronts, e.g. one per run and instance
        min_count: Keep only sets appearing at least this often

    Returns:
        Mapping from term count to entries sorted by descending count
    """
    counts: Counter[frozenset[str]] = Counter(entry.term_set for front in fronts for entry in front)
    grouped: dict[int, list[TermSetCount]] = {}
    for term_set, count in counts.items():
        if count >= min_count:
            grouped.setdefault(len(term_set), []).append(TermSetCount(term_set, count))
    for entries in grouped.values():
        entries.sort(key=lambda entry: (-entry.count, format_term_set(entry.term_set)))
    return dict(sorted(grouped.items()))


def variable_frequency(expressions: Sequence[ExprTree], variables: Sequence[int]) -> dict[int, float]:
    """Fraction of expressions that reference each variable.

    Returns:
        Mapping from variable index to a fraction in [0, 1]; all zeros when
        there are no expressions
    """
    if not expressions:
        return {variable: 0.0 for variable in variables}
    used = [expr.variables() for expr in expressions]
    return {variable: sum(variable in names for names in used) / len(used) for variable in variables}

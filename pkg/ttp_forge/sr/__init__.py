"""Symbolic regression by genetic programming.

Modules:
    expr: Flat prefix programs, primitives and genetic operators
    fitness: Datasets, per-case errors, BCE and MAE losses
    selection: DALex parent selection
    pareto: Monomial expansion, pareto fronts and frequency tables
    engine: The evolution loop
"""

from ttp_forge.sr.engine import SrConfig, SrRunResult, evolve
from ttp_forge.sr.expr import ExprTree, eval_expr, parse_prefix
from ttp_forge.sr.fitness import SrDataset, bce_fitness, mae_fitness
from ttp_forge.sr.pareto import (
    ParetoEntry,
    expand_polynomial,
    expand_to_monomials,
    pareto_update,
    variable_frequency,
)
from ttp_forge.sr.selection import dalex_select

__all__ = [
    "ExprTree",
    "ParetoEntry",
    "SrConfig",
    "SrDataset",
    "SrRunResult",
    "bce_fitness",
    "dalex_select",
    "eval_expr",
    "evolve",
    "expand_polynomial",
    "expand_to_monomials",
    "mae_fitness",
    "pareto_update",
    "parse_prefix",
    "variable_frequency",
]

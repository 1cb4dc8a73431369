"""Expression programs for symbolic regression.

A program is a flat list in prefix order. Each node is a `Function`, an
`int` (index of an input variable) or a `float` (constant). This layout
makes subtree selection a matter of slicing, which keeps the genetic
operators short.

Example usage:
    from ttp_forge.sr.expr import ExprTree, parse_prefix

    expr = parse_prefix("add(mul(x0, x1), 0.5)", n_features=2)
    expr.execute(X)
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
import re

import numpy as np

from ttp_forge.config import PROTECTED_DIVISION_EPSILON, SR_CONST_RANGE, SR_INIT_DEPTH
from ttp_forge.errors import ParseError


@dataclass(frozen=True)
class Function:
    """A vectorized primitive usable as an inner node."""

    name: str
    arity: int
    function: Callable[..., np.ndarray]

    def __call__(self, *args: np.ndarray) -> np.ndarray:
        return self.function(*args)


def _protected_division(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.where(np.abs(right) >= PROTECTED_DIVISION_EPSILON, np.divide(left, right), 1.0)


def _guarded(operation: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> Callable[..., np.ndarray]:
    def apply(left: np.ndarray, right: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return operation(left, right)

    return apply


add = Function("add", 2, _guarded(np.add))
sub = Function("sub", 2, _guarded(np.subtract))
mul = Function("mul", 2, _guarded(np.multiply))
div = Function("div", 2, _protected_division)

FUNCTIONS: dict[str, Function] = {f.name: f for f in (add, sub, mul, div)}
POLYNOMIAL_FUNCTION_SET = ("add", "sub", "mul")
REGRESSION_FUNCTION_SET = ("add", "sub", "mul", "div")

Node = Function | int | float


def resolve_function_set(names: Sequence[str]) -> tuple[Function, ...]:
    """Look up primitives by name.

    Raises:
        ValueError: If a name is unknown or the set is empty
    """
    if not names:
        raise ValueError("Function set must not be empty")
    unknown = [name for name in names if name not in FUNCTIONS]
    if unknown:
        raise ValueError(f"Unknown functions: {', '.join(unknown)}. Valid options: {', '.join(FUNCTIONS)}")
    return tuple(FUNCTIONS[name] for name in names)


def _is_variable(node: Node) -> bool:
    return isinstance(node, int) and not isinstance(node, bool)


def subtree_end(program: Sequence[Node], start: int) -> int:
    """Index one past the subtree rooted at `start`."""
    stack = 1
    end = start
    while stack > end - start:
        node = program[end]
        if isinstance(node, Function):
            stack += node.arity
        end += 1
    return end


class ExprTree:
    """A symbolic-regression individual.

    Attributes:
        program: Nodes in prefix order
        n_features: Number of input variables the program may reference
    """

    def __init__(self, program: Sequence[Node], n_features: int):
        self.program: list[Node] = list(program)
        self.n_features = n_features
        self._validate()

    def _validate(self) -> None:
        if not self.program:
            raise ValueError("Program must contain at least one node")
        pending = 1
        for node in self.program:
            if pending == 0:
                raise ValueError("Program has trailing nodes")
            if isinstance(node, Function):
                pending += node.arity - 1
            else:
                if _is_variable(node) and not 0 <= node < self.n_features:
                    raise ValueError(f"Variable x{node} outside 0..{self.n_features - 1}")
                pending -= 1
        if pending != 0:
            raise ValueError("Program is missing operands")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ExprTree) and self.to_prefix() == other.to_prefix()

    def __hash__(self) -> int:
        return hash(self.to_prefix())

    def __repr__(self) -> str:
        return f"ExprTree({self.to_prefix()!r})"

    def __str__(self) -> str:
        return self.to_prefix()

    @property
    def length(self) -> int:
        """Number of nodes."""
        return len(self.program)

    @property
    def depth(self) -> int:
        """Depth of the tree; a single terminal has depth 0."""
        terminals = [0]
        depth = 1
        for node in self.program:
            if isinstance(node, Function):
                terminals.append(node.arity)
                depth = max(len(terminals), depth)
            else:
                terminals[-1] -= 1
                while terminals[-1] == 0 and len(terminals) > 1:
                    terminals.pop()
                    terminals[-1] -= 1
        return depth - 1

    def variables(self) -> frozenset[int]:
        """Indices of the input variables referenced by the program."""
        return frozenset(node for node in self.program if _is_variable(node))

    def uses_only(self, names: Sequence[str]) -> bool:
        return all(node.name in names for node in self.program if isinstance(node, Function))

    def execute(self, inputs: np.ndarray) -> np.ndarray:
        """Evaluate the program on every row of `inputs` (shape (cases, n_features))."""
        inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        cases = inputs.shape[0]

        def operand(node: object) -> np.ndarray:
            if isinstance(node, float):
                return np.full(cases, node)
            if _is_variable(node):
                return inputs[:, node]
            return node  # type: ignore[return-value]

        first = self.program[0]
        if not isinstance(first, Function):
            return operand(first).astype(np.float64, copy=True)

        apply_stack: list[list] = []
        for node in self.program:
            if isinstance(node, Function):
                apply_stack.append([node])
            else:
                apply_stack[-1].append(node)
            while len(apply_stack[-1]) == apply_stack[-1][0].arity + 1:
                function, *args = apply_stack.pop()
                result = function(*(operand(arg) for arg in args))
                if not apply_stack:
                    return result
                apply_stack[-1].append(result)
        raise AssertionError("unreachable: program validated on construction")

    def to_prefix(self) -> str:
        """Render as nested calls, e.g. "add(mul(x0, x1), 0.5)"."""
        parts: list[str] = []
        pending: list[int] = []
        for node in self.program:
            if isinstance(node, Function):
                parts.append(f"{node.name}(")
                pending.append(node.arity)
                continue
            parts.append(f"x{node}" if _is_variable(node) else repr(float(node)))
            while pending:
                pending[-1] -= 1
                if pending[-1] == 0:
                    pending.pop()
                    parts.append(")")
                else:
                    parts.append(", ")
                    break
        return "".join(parts)

    def copy(self) -> ExprTree:
        return ExprTree(self.program, self.n_features)

    # Genetic operators. Each returns a new program list.

    def get_subtree(self, rng: np.random.Generator, program: Sequence[Node] | None = None) -> tuple[int, int]:
        """Pick a random subtree, favouring inner nodes 90% to 10%."""
        if program is None:
            program = self.program
        probs = np.array([0.9 if isinstance(node, Function) else 0.1 for node in program])
        probs = np.cumsum(probs / probs.sum())
        start = min(int(np.searchsorted(probs, rng.uniform())), len(program) - 1)
        return start, subtree_end(program, start)

    def crossover(self, donor: Sequence[Node], rng: np.random.Generator) -> list[Node]:
        """Replace a random subtree with a random subtree of `donor`."""
        start, end = self.get_subtree(rng)
        donor_start, donor_end = self.get_subtree(rng, donor)
        return self.program[:start] + list(donor[donor_start:donor_end]) + self.program[end:]

    def subtree_mutation(
        self,
        rng: np.random.Generator,
        function_set: Sequence[Function],
        const_range: tuple[float, float] | None = SR_CONST_RANGE,
        init_depth: tuple[int, int] = SR_INIT_DEPTH,
    ) -> list[Node]:
        """Crossover with a freshly grown random program."""
        chicken = build_program(rng, function_set, self.n_features, init_depth, const_range=const_range)
        return self.crossover(chicken, rng)

    def hoist_mutation(self, rng: np.random.Generator) -> list[Node]:
        """Replace a random subtree with one of its own subtrees."""
        start, end = self.get_subtree(rng)
        subtree = self.program[start:end]
        sub_start, sub_end = self.get_subtree(rng, subtree)
        return self.program[:start] + subtree[sub_start:sub_end] + self.program[end:]

    def point_mutation(
        self,
        rng: np.random.Generator,
        function_set: Sequence[Function],
        p_replace: float,
        const_range: tuple[float, float] | None = SR_CONST_RANGE,
    ) -> list[Node]:
        """Replace each node with probability `p_replace` by a node of equal arity."""
        program = list(self.program)
        by_arity: dict[int, list[Function]] = {}
        for function in function_set:
            by_arity.setdefault(function.arity, []).append(function)
        for index in np.flatnonzero(rng.uniform(size=len(program)) < p_replace):
            node = program[index]
            if isinstance(node, Function):
                # a node whose arity is absent from the set is left alone
                options = by_arity.get(node.arity, [node])
                program[index] = options[int(rng.integers(len(options)))]
            else:
                program[index] = random_terminal(rng, self.n_features, const_range)
        return program


def random_terminal(rng: np.random.Generator, n_features: int, const_range: tuple[float, float] | None) -> Node:
    """A variable index or, with probability 1 / (n_features + 1), a constant."""
    choices = n_features + 1 if const_range is not None else n_features
    terminal = int(rng.integers(choices))
    if terminal == n_features and const_range is not None:
        return float(rng.uniform(*const_range))
    return terminal


def build_program(
    rng: np.random.Generator,
    function_set: Sequence[Function],
    n_features: int,
    init_depth: tuple[int, int] = SR_INIT_DEPTH,
    method: str | None = None,
    const_range: tuple[float, float] | None = SR_CONST_RANGE,
) -> list[Node]:
    """Grow a random program.

    Args:
        rng: Random generator
        function_set: Primitives for inner nodes
        n_features: Number of input variables
        init_depth: Inclusive (min, max) range the target depth is drawn from
        method: "full", "grow", or None to pick one at random (ramped half-and-half)
        const_range: Range of ephemeral constants, or None for no constants

    Returns:
        Program nodes in prefix order
    """
    if method is None:
        method = "full" if rng.integers(2) else "grow"
    if method not in ("full", "grow"):
        raise ValueError(f"Unknown build method: {method}. Valid options: full, grow")
    max_depth = int(rng.integers(init_depth[0], init_depth[1], endpoint=True))

    function = function_set[int(rng.integers(len(function_set)))]
    program: list[Node] = [function]
    terminal_stack = [function.arity]
    while terminal_stack:
        depth = len(terminal_stack)
        choice = int(rng.integers(n_features + len(function_set)))
        if depth < max_depth and (method == "full" or choice < len(function_set)):
            function = function_set[int(rng.integers(len(function_set)))]
            program.append(function)
            terminal_stack.append(function.arity)
        else:
            program.append(random_terminal(rng, n_features, const_range))
            terminal_stack[-1] -= 1
            while terminal_stack[-1] == 0:
                terminal_stack.pop()
                if not terminal_stack:
                    return program
                terminal_stack[-1] -= 1
    return program


def eval_expr(expr: ExprTree, row: Sequence[float] | np.ndarray) -> float:
    """Evaluate an expression on a single input row."""
    return float(expr.execute(np.asarray(row, dtype=np.float64)[None, :])[0])


_TOKEN = re.compile(r"\s*(?:(?P<number>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<punct>[(),]))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    position = 0
    text = text.strip()
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None or match.end() == position:
            raise ParseError(f"Unexpected character {text[position]!r} at offset {position}")
        tokens.append(match.group(match.lastgroup))
        position = match.end()
    return tokens


def parse_prefix(text: str, n_features: int, functions: dict[str, Function] | None = None) -> ExprTree:
    """Parse the nested-call notation written by `ExprTree.to_prefix`.

    Raises:
        ParseError: On malformed text or unknown names
    """
    functions = functions if functions is not None else FUNCTIONS
    tokens = _tokenize(text)
    program: list[Node] = []
    position = 0

    def expect(token: str) -> None:
        nonlocal position
        if position >= len(tokens) or tokens[position] != token:
            found = tokens[position] if position < len(tokens) else "end of input"
            raise ParseError(f"Expected {token!r}, found {found!r} in {text!r}")
        position += 1

    def parse_node() -> None:
        nonlocal position
        if position >= len(tokens):
            raise ParseError(f"Unexpected end of expression {text!r}")
        token = tokens[position]
        position += 1
        if token in functions:
            function = functions[token]
            program.append(function)
            expect("(")
            for argument in range(function.arity):
                if argument:
                    expect(",")
                parse_node()
            expect(")")
        elif re.fullmatch(r"x\d+", token):
            program.append(int(token[1:]))
        else:
            try:
                program.append(float(token))
            except ValueError:
                raise ParseError(f"Unknown token {token!r} in {text!r}") from None

    parse_node()
    if position != len(tokens):
        raise ParseError(f"Trailing tokens in {text!r}")
    try:
        return ExprTree(program, n_features)
    except ValueError as e:
        raise ParseError(str(e)) from e

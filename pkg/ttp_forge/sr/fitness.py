"""Per-case errors and losses for symbolic-regression individuals.

Non-finite outputs are charged FITNESS_PENALTY per case so evaluation is
total and selection can still compare every individual.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from ttp_forge.config import BCE_CLAMP, FITNESS_PENALTY
from ttp_forge.enums import SrTask
from ttp_forge.sr.expr import ExprTree


@dataclass(frozen=True)
class SrDataset:
    """Training cases for one SR run.

    Attributes:
        inputs: Matrix with one row per case and one column per variable
        targets: One target per case; 0/1 labels for BCE tasks
        task: Loss family
        variable_names: Optional display names of the columns
    """

    inputs: np.ndarray = field(repr=False)
    targets: np.ndarray = field(repr=False)
    task: SrTask
    variable_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=np.float64))
        targets = np.asarray(self.targets, dtype=np.float64).ravel()
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)
        if inputs.shape[0] != targets.shape[0]:
            raise ValueError(f"Dataset has {inputs.shape[0]} input rows but {targets.shape[0]} targets")
        if targets.shape[0] == 0:
            raise ValueError("Dataset must contain at least one case")
        if self.task is SrTask.BINARY_BCE and not np.isin(targets, (0.0, 1.0)).all():
            raise ValueError("BCE targets must be 0 or 1")
        if self.variable_names and len(self.variable_names) != inputs.shape[1]:
            raise ValueError(
                f"Dataset has {inputs.shape[1]} columns but {len(self.variable_names)} variable names"
            )

    @property
    def n_features(self) -> int:
        return int(self.inputs.shape[1])

    @property
    def cases(self) -> int:
        return int(self.targets.shape[0])


def sigmoid(raw: np.ndarray) -> np.ndarray:
    return expit(raw)


def bce_case_errors(raw: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Binary cross entropy per case of sigmoid(raw) against 0/1 targets."""
    with np.errstate(invalid="ignore"):
        predicted = np.clip(sigmoid(raw), BCE_CLAMP, 1.0 - BCE_CLAMP)
        errors = -(targets * np.log(predicted) + (1.0 - targets) * np.log(1.0 - predicted))
    return np.where(np.isfinite(raw) & np.isfinite(errors), errors, FITNESS_PENALTY)


def absolute_case_errors(raw: np.ndarray, targets: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", over="ignore"):
        errors = np.abs(raw - targets)
    return np.where(np.isfinite(errors), errors, FITNESS_PENALTY)


def case_errors(expr: ExprTree, dataset: SrDataset) -> np.ndarray:
    """Per-case error of `expr` under the dataset's loss."""
    raw = expr.execute(dataset.inputs)
    if dataset.task is SrTask.BINARY_BCE:
        return bce_case_errors(raw, dataset.targets)
    return absolute_case_errors(raw, dataset.targets)


def bce_fitness(expr: ExprTree, dataset: SrDataset) -> float:
    """Mean binary cross entropy of sigmoid(expr) against the labels."""
    return float(bce_case_errors(expr.execute(dataset.inputs), dataset.targets).mean())


def mae_fitness(expr: ExprTree, dataset: SrDataset) -> float:
    """Mean absolute error against the targets."""
    return float(absolute_case_errors(expr.execute(dataset.inputs), dataset.targets).mean())


def fitness(expr: ExprTree, dataset: SrDataset) -> float:
    return float(case_errors(expr, dataset).mean())

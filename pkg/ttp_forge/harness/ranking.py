"""Rank tables over comparison trials.

Within every (instance, trial seed) group each heuristic is ranked by
objective (higher is better) and by evaluation count (lower is better).
Rank tables use average ranks for ties; rank-frequency counts give tied
heuristics the best shared rank.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from ttp_forge.harness.records import TrialRecord

METRICS = ("objective", "evals")


@dataclass
class RankTable:
    """Per-trial values and ranks of a set of heuristics.

    Attributes:
        heuristics: Column order
        trials: (instance, seed) of every row
        objectives: Objective per trial and heuristic, shape (T, H)
        evals: Evaluation count per trial and heuristic, shape (T, H)
    """

    heuristics: tuple[str, ...]
    trials: list[tuple[str, int]] = field(default_factory=list)
    objectives: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    evals: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def ranks(self, metric: str, method: str = "average") -> np.ndarray:
        """Rank matrix of shape (T, H); rank 1 is best.

        Raises:
            ValueError: If metric is unknown
        """
        if metric == "objective":
            keyed = -self.objectives
        elif metric == "evals":
            keyed = self.evals
        else:
            raise ValueError(f"Unknown metric: {metric}. Valid options: {', '.join(METRICS)}")
        if keyed.shape[0] == 0:
            return np.zeros(keyed.shape)
        return rankdata(keyed, method=method, axis=1)

    def mean_ranks(self, metric: str) -> dict[str, float]:
        ranks = self.ranks(metric)
        if ranks.shape[0] == 0:
            return {name: float("nan") for name in self.heuristics}
        return {name: float(value) for name, value in zip(self.heuristics, ranks.mean(axis=0))}

    def rank_frequencies(self, metric: str) -> dict[str, list[int]]:
        """How often each heuristic attains rank 1..H; ties take the best rank."""
        ranks = self.ranks(metric, method="min").astype(int)
        size = len(self.heuristics)
        return {
            name: np.bincount(ranks[:, column], minlength=size + 1)[1:].tolist()
            for column, name in enumerate(self.heuristics)
        }


def build_rank_table(records: Sequence[TrialRecord], heuristics: Sequence[str] | None = None) -> RankTable:
    """Group trial records by (instance, seed) and line them up by heuristic.

    Args:
        records: Trial records
        heuristics: Column order; defaults to order of first appearance

    Raises:
        ValueError: If a group misses a heuristic or repeats one
    """
    if heuristics is None:
        heuristics = list(dict.fromkeys(record.heuristic for record in records))
    columns = {name: index for index, name in enumerate(heuristics)}
    groups: dict[tuple[str, int], dict[str, TrialRecord]] = {}
    for record in records:
        if record.heuristic not in columns:
            raise ValueError(
                f"Unknown heuristic in records: {record.heuristic}. Valid options: {', '.join(heuristics)}"
            )
        group = groups.setdefault((record.instance, record.seed), {})
        if record.heuristic in group:
            raise ValueError(f"Duplicate record for {record.heuristic} on {record.instance} seed {record.seed}")
        group[record.heuristic] = record

    trials = sorted(groups)
    objectives = np.zeros((len(trials), len(heuristics)))
    evals = np.zeros((len(trials), len(heuristics)))
    for row, key in enumerate(trials):
        group = groups[key]
        missing = [name for name in heuristics if name not in group]
        if missing:
            raise ValueError(f"Trial {key[0]} seed {key[1]} is missing {', '.join(missing)}")
        for name, column in columns.items():
            objectives[row, column] = group[name].objective
            evals[row, column] = group[name].evals
    return RankTable(tuple(heuristics), trials, objectives, evals)


def summary_rows(table: RankTable) -> list[tuple[str, float, float]]:
    """Rows (heuristic, mean objective rank, mean evals rank)."""
    objective = table.mean_ranks("objective")
    evals = table.mean_ranks("evals")
    return [(name, objective[name], evals[name]) for name in table.heuristics]


def frequency_rows(table: RankTable) -> list[tuple[str, str, int, int]]:
    """Rows (metric, heuristic, rank, count) for both metrics."""
    rows = []
    for metric in METRICS:
        for name, counts in table.rank_frequencies(metric).items():
            rows.extend((metric, name, rank, count) for rank, count in enumerate(counts, start=1))
    return rows

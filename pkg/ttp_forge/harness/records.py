"""CSV layouts written and read back by the harness.

Every table starts with a header row. Floats are written with repr() so a
written file parses back to identical values.

CSV Structure (trials):
    instance,heuristic,seed,objective,evals,wall_ms
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
import csv
from dataclasses import dataclass
from pathlib import Path

from ttp_forge.errors import ParseError

TRIAL_COLUMNS = ("instance", "heuristic", "seed", "objective", "evals", "wall_ms")


def format_cell(value: object) -> str:
    """Render one CSV cell; floats keep full precision."""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    """Write a header and rows, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(value) for value in row])
    return path


def read_table(path: str | Path, expected_header: Sequence[str] | None = None) -> list[dict[str, str]]:
    """Read a CSV written by write_table.

    Args:
        path: File to read
        expected_header: Required leading columns, if any

    Returns:
        One dict per data row, keyed by column name

    Raises:
        ParseError: If the file is empty or the header does not match
    """
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise ParseError(f"{path} is empty")
    header = rows[0]
    if expected_header is not None and tuple(header[: len(expected_header)]) != tuple(expected_header):
        raise ParseError(f"{path}: expected columns {','.join(expected_header)}, found {','.join(header)}", 1)
    records = []
    for line_number, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"{path}: expected {len(header)} fields, found {len(row)}", line_number)
        records.append(dict(zip(header, row)))
    return records


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one heuristic on one instance for one trial seed.

    Attributes:
        instance: Instance name
        heuristic: Heuristic name
        seed: Trial seed
        objective: Final objective
        evals: Objective evaluations consumed
        wall_ms: Wall-clock time in milliseconds
    """

    instance: str
    heuristic: str
    seed: int
    objective: float
    evals: int
    wall_ms: int

    def to_row(self) -> tuple:
        return (self.instance, self.heuristic, self.seed, float(self.objective), self.evals, self.wall_ms)

    @classmethod
    def from_row(cls, row: dict[str, str]) -> TrialRecord:
        return cls(
            instance=row["instance"],
            heuristic=row["heuristic"],
            seed=int(row["seed"]),
            objective=float(row["objective"]),
            evals=int(row["evals"]),
            wall_ms=int(row["wall_ms"]),
        )


def write_trials(path: str | Path, records: Iterable[TrialRecord]) -> Path:
    return write_table(path, TRIAL_COLUMNS, (record.to_row() for record in records))


def read_trials(path: str | Path) -> list[TrialRecord]:
    """Read a trials CSV.

    Raises:
        ParseError: On a wrong header or a malformed value
    """
    records = []
    for line_number, row in enumerate(read_table(path, TRIAL_COLUMNS), start=2):
        try:
            records.append(TrialRecord.from_row(row))
        except ValueError as e:
            raise ParseError(f"{path}: {e}", line_number) from e
    return records

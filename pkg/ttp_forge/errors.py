"""Exception types raised by ttp-forge."""

from __future__ import annotations


class TtpForgeError(Exception):
    """Base class for all ttp-forge errors."""


class ParseError(TtpForgeError, ValueError):
    """Malformed instance, tour, plan or model text.

    Attributes:
        line: 1-based line number of the offending line, or None
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class CapacityError(TtpForgeError):
    """A plan or a DP table exceeds its allowed size."""


class ModelError(TtpForgeError):
    """A parameter model is missing a cell or is malformed."""


class DegenerateGenotypeError(TtpForgeError, ValueError):
    """A genotype whose weights cannot be normalized."""


class UnsupportedExpansionError(TtpForgeError):
    """An expression uses an operator that has no polynomial expansion."""


class StageError(TtpForgeError):
    """A pipeline stage is missing a prerequisite artifact."""
